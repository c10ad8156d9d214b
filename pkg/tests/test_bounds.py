import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import SMALL_SPACES, random_distances
from fewdist.bounds import (
    EXACT,
    FLOAT_CERTIFIED,
    Certificate,
    absolute_bound,
    combined_bound,
    combined_bound_numeric,
    default_truncation,
    harmonic_bound,
    harmonic_bound_numeric,
    lp_bound_dual,
    lp_bound_primal,
    phi_table,
    verify_certificate,
)
from fewdist.spaces import DistanceSet, Space, multiplicity, tau0, zonal


def _d(space, *vals):
    return DistanceSet.of(space, list(vals))


@pytest.mark.parametrize(
    "space,s,value",
    [
        (Space.sphere(23), 3, 2576),
        (Space.sphere(8), 4, 450),
        (Space.sphere(24), 5, 115830),
        (Space.sphere(24), 6, 573300),
    ],
)
def test_absolute_bound_sphere(space, s, value):
    assert absolute_bound(space, s) == value


def test_absolute_bound_finite():
    for n in range(3, 15):
        for s in range(1, 4):
            assert absolute_bound(Space.hamming(n), s) == sum(math.comb(n, i) for i in range(s + 1))
    assert absolute_bound(Space.johnson(12, 5), 2) == math.comb(12, 2)


def test_default_truncation():
    assert default_truncation(Space.sphere(8), 3) == 10
    assert default_truncation(Space.hamming(10), 3) == 10
    assert default_truncation(Space.johnson(13, 5), 3) == 5
    assert default_truncation(Space.hamming(10), 3, 40) == 10


def test_harmonic_definition(rng):
    """H counts the multiplicities of the positive zonal coefficients of the annihilator."""
    for space in SMALL_SPACES:
        for s in (2, 3):
            for _ in range(20):
                d = DistanceSet(space, random_distances(space, s, rng))
                h, exp = harmonic_bound(d)
                t0 = tau0(space)
                # the expansion reproduces the annihilator at sample points
                for t in list(d.distances) + [t0, Fraction(1, 7)]:
                    want = math.prod((di - t) / (di - t0) for di in d.distances)
                    assert exp.evaluate(space, t) == want
                assert h == sum(multiplicity(space, i) for i, c in enumerate(exp.coefficients) if c > 0)


def test_harmonic_numeric_is_inclusive(rng):
    space = Space.sphere(8)
    for _ in range(50):
        d = DistanceSet(space, random_distances(space, 3, rng))
        ds = [mpmath.mpf(x.numerator) / x.denominator for x in d.distances]
        hn, _ = harmonic_bound_numeric(space, ds)
        assert hn >= harmonic_bound(d)[0]


def test_sphere23_discrepancy():
    r = combined_bound(_d(Space.sphere(23), "-1/3", "0", "1/3"), 10)
    assert r.harmonic == 2300
    assert r.lp == 2300
    assert r.combined == 2300
    assert r.discrepancy
    assert 0 in r.expansion.zero_indices


def test_e8_four_distances():
    r = combined_bound(_d(Space.sphere(8), "-1", "-1/2", "0", "1/2"))
    assert r.absolute == 450
    assert r.harmonic == 450
    assert r.lp == 240
    assert r.combined == 240


def test_e8_half():
    r = combined_bound(_d(Space.sphere(8), "-1/2", "0", "1/2"))
    assert r.combined == 120
    assert r.lp_certificate.value == 120


def _float_dual(space, ds, m):
    table = np.array([[float(v) for v in row] for row in phi_table(space, ds, m)])
    res = linprog(np.ones(m), A_ub=table.T, b_ub=-np.ones(len(ds)), bounds=(0, None), method="highs")
    return None if res.status != 0 else 1 + res.fun


@pytest.mark.parametrize("space", SMALL_SPACES)
def test_lp_against_float_solver(space, rng):
    m = default_truncation(space, 3)
    for _ in range(15):
        d = DistanceSet(space, random_distances(space, min(3, space.max_degree or 3), rng))
        m_use = max(m, d.s)
        lp, cert = lp_bound_dual(d, m_use)
        ref = _float_dual(space, d.distances, m_use)
        if cert is None:
            assert ref is None
            continue
        assert ref is not None
        assert abs(float(cert.value) - ref) <= 1e-6 * max(1.0, ref)
        assert lp == math.floor(cert.value)


def test_primal_equals_dual(rng):
    """Strong duality on 100 random small instances."""
    spaces = [Space.hamming(8), Space.hamming(11), Space.johnson(12, 5), Space.johnson(10, 4)]
    done = 0
    while done < 100:
        space = spaces[done % len(spaces)]
        s = rng.randint(2, 3)
        d = DistanceSet(space, random_distances(space, s, rng))
        m = default_truncation(space, s)
        lp, cert = lp_bound_dual(d, m)
        assert lp_bound_primal(d, m) == lp
        done += 1


def test_every_reported_certificate_verifies(rng):
    for space in SMALL_SPACES:
        for s in (2, 3, 4):
            if space.is_finite and s > space.max_degree:
                continue
            for _ in range(10):
                d = DistanceSet(space, random_distances(space, s, rng))
                r = combined_bound(d)
                assert r.combined == (r.harmonic if r.lp is None else min(r.harmonic, r.lp))
                if r.lp_certificate is not None:
                    cert = r.lp_certificate
                    assert cert.verify()
                    assert verify_certificate(space, d.distances, cert.f)
                    # direct evaluation through the recurrence, not the monomial form
                    for di in d.distances:
                        assert sum(fk * zonal(space, k, di) for k, fk in enumerate(cert.f, start=1)) <= -1
                    assert cert.value == 1 + sum(cert.f)


def test_certificate_roundtrip_and_tamper():
    r = combined_bound(_d(Space.sphere(8), "-1/2", "0", "1/2"))
    cert = r.lp_certificate
    back = Certificate.from_json(cert.to_json())
    assert back.f == cert.f and back.value == cert.value and back.verify()
    obj = cert.to_dict()
    obj["value"] = "121"
    with pytest.raises(ValueError):
        Certificate.from_dict(obj)
    obj = cert.to_dict()
    obj["bound"] = 119
    with pytest.raises(ValueError):
        Certificate.from_dict(obj)
    obj = cert.to_dict()
    obj["f"] = ["0"] * len(obj["f"])
    obj.pop("value")
    obj.pop("bound")
    assert not Certificate.from_dict(obj).verify()


def test_infeasible_lp_falls_back_to_harmonic():
    d = _d(Space.sphere(23), "-1/3", "0", "1/3")
    assert lp_bound_dual(d, 3) == (None, None)
    r = combined_bound(d, 3)
    assert r.harmonic_only
    assert r.combined == r.harmonic


def test_numeric_matches_exact_on_rational_input():
    space = Space.sphere(8)
    vals = [Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2)]
    ds = [mpmath.mpf(v.numerator) / v.denominator for v in vals]
    r = combined_bound_numeric(space, ds)
    assert r.exactness == FLOAT_CERTIFIED
    assert r.lp == 240
    assert r.combined == 240
    assert r.lp_certificate.verify()
    assert combined_bound(DistanceSet(space, tuple(vals))).exactness == EXACT


def test_report_dict_fields():
    r = combined_bound(_d(Space.sphere(23), "-1/3", "0", "1/3"), 10)
    obj = r.to_dict()
    assert obj["harmonic"] == 2300 and obj["lp"] == 2300
    assert obj["discrepancy"] is True
    assert obj["harmonic_with_zeros"] == r.harmonic_with_zeros
    assert obj["certificate"]["bound"] == 2300
