import math
from fractions import Fraction

import mpmath
import pytest

from conftest import SMALL_SPACES
from fewdist.poly import Poly
from fewdist.spaces import (
    DistanceSet,
    Space,
    SpaceError,
    distance_domain,
    multiplicity,
    tau0,
    zonal,
    zonal_monomial_coeffs,
    zonal_values,
)

PROPERTY_SPACES = [Space.hamming(12), Space.hamming(20), Space.johnson(30, 12), Space.sphere(3), Space.sphere(8), Space.sphere(24)]


def test_tau0():
    assert tau0(Space.hamming(10)) == 0
    assert tau0(Space.sphere(8)) == 1
    assert tau0(Space.johnson(23, 7)) == 0


@pytest.mark.parametrize(
    "space,k,h",
    [(Space.johnson(23, 7), 2, 230), (Space.sphere(8), 3, 112), (Space.hamming(23), 3, 1771)],
)
def test_multiplicity_examples(space, k, h):
    assert multiplicity(space, k) == h


@pytest.mark.parametrize("space", SMALL_SPACES)
def test_multiplicity_zero(space):
    assert multiplicity(space, 0) == 1


def test_multiplicity_sums():
    for n in range(1, 16):
        assert sum(multiplicity(Space.hamming(n), i) for i in range(n + 1)) == 2**n
    for n in range(2, 16):
        for w in range(1, n // 2 + 1):
            sp = Space.johnson(n, w)
            assert sum(multiplicity(sp, i) for i in range(w + 1)) == math.comb(n, w)


def test_johnson_degree_out_of_range():
    with pytest.raises(SpaceError):
        multiplicity(Space.johnson(10, 3), 4)


def test_zonal_examples():
    assert zonal(Space.hamming(6), 1, 3) == 0
    assert zonal(Space.sphere(8), 2, Fraction(1, 2)) == Fraction(1, 7)
    assert zonal_monomial_coeffs(Space.sphere(8), 1) == [0, 1]
    assert zonal_monomial_coeffs(Space.sphere(8), 3) == [0, Fraction(-48, 112), 0, Fraction(160, 112)]
    assert zonal_monomial_coeffs(Space.hamming(5), 0) == [1]


@pytest.mark.parametrize("space", PROPERTY_SPACES)
def test_zonal_at_tau0_is_one(space):
    top = min(12, space.max_degree or 12)
    for k in range(top + 1):
        assert zonal(space, k, tau0(space)) == 1


@pytest.mark.parametrize("space", PROPERTY_SPACES)
def test_degree_property(space):
    top = min(12, space.max_degree or 12)
    for k in range(top + 1):
        c = zonal_monomial_coeffs(space, k)
        assert len(c) == k + 1 and c[-1] != 0


@pytest.mark.parametrize("space", PROPERTY_SPACES)
def test_direct_matches_monomial(space, rng):
    top = min(12, space.max_degree or 12)
    for _ in range(50):
        if space.is_finite:
            x = Fraction(rng.randint(0, space.max_degree))
        else:
            x = Fraction(rng.randint(-997, 997), 997)
        vals = zonal_values(space, top, x)
        for k in range(top + 1):
            assert vals[k] == Poly(zonal_monomial_coeffs(space, k))(x)


def _hamming_dist(a, b):
    return bin(a ^ b).count("1")


def test_positive_definite_finite(rng):
    for trial in range(200):
        if trial % 2:
            n = rng.randint(3, 12)
            sp = Space.hamming(n)
            pts = list({rng.getrandbits(n) for _ in range(rng.randint(2, 20))})
            dist = _hamming_dist
            top = n
        else:
            n = rng.randint(4, 12)
            w = rng.randint(1, n // 2)
            sp = Space.johnson(n, w)
            pool = [sum(1 << i for i in c) for c in __import__("itertools").combinations(range(n), w)]
            pts = rng.sample(pool, min(len(pool), rng.randint(2, 20)))

            def dist(a, b):
                return _hamming_dist(a, b) // 2

            top = w
        for k in range(top + 1):
            total = sum(zonal(sp, k, dist(a, b)) for a in pts for b in pts)
            assert total * multiplicity(sp, k) >= 0


def test_positive_definite_sphere(rng):
    with mpmath.workprec(256):
        for _ in range(20):
            n = rng.randint(3, 8)
            sp = Space.sphere(n)
            pts = []
            for _ in range(rng.randint(2, 12)):
                v = [rng.randint(-9, 9) for _ in range(n)]
                if all(c == 0 for c in v):
                    v[0] = 1
                pts.append(v)
            norms = [sum(c * c for c in v) for v in pts]
            for k in range(9):
                total = mpmath.mpf(0)
                for a, na in zip(pts, norms):
                    for b, nb in zip(pts, norms):
                        ip = sum(x * y for x, y in zip(a, b))
                        t = mpmath.mpf(ip) / mpmath.sqrt(mpmath.mpf(na) * nb)
                        t = min(max(t, mpmath.mpf(-1)), mpmath.mpf(1))
                        g = zonal_values(sp, k, t)[k]
                        total += g
                assert total * multiplicity(sp, k) >= -mpmath.mpf("1e-20")


def test_distance_domain():
    assert distance_domain(Space.hamming(5)).values() == [1, 2, 3, 4, 5]
    assert distance_domain(Space.johnson(23, 7)).values() == list(range(1, 8))
    dom = distance_domain(Space.sphere(8))
    assert Fraction(-1) in dom and Fraction(1) not in dom and Fraction(999, 1000) in dom


def test_space_validation():
    with pytest.raises(SpaceError):
        Space.johnson(5, 3)
    with pytest.raises(SpaceError):
        Space.sphere(1)
    assert Space.parse("johnson:23,7") == Space.johnson(23, 7)
    assert str(Space.parse("sphere:8")) == "sphere:8"
    with pytest.raises(SpaceError):
        Space.parse("torus:3")


def test_distance_set_validation():
    sp = Space.sphere(8)
    d = DistanceSet.of(sp, ["1/2", "-1/2", "0"])
    assert d.distances == (Fraction(-1, 2), 0, Fraction(1, 2))
    with pytest.raises(SpaceError):
        DistanceSet(sp, (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(SpaceError):
        DistanceSet(sp, (Fraction(1),))
    with pytest.raises(SpaceError):
        DistanceSet(Space.hamming(4), (Fraction(0), Fraction(2)))
