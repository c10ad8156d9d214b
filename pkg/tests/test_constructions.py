import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from fewdist.bounds import combined_bound
from fewdist.constructions import (
    LEECH_COUNT,
    ConstructionError,
    PointSet,
    e8_full,
    e8_half,
    golay23,
    golay23_dual_is_even_subcode,
    golay23_even,
    golay23_weight7,
    golay24,
    hamming_weight_classes,
    johnson24_lift,
    johnson_prefix,
    leech_inner_products,
    leech_minimal_vectors,
    leech_pairs,
    leech_section,
    sphere_01,
    verify_spectrum,
)
from fewdist.spaces import DistanceSet, Space

F = Fraction


def _brute_spectrum(x: PointSet):
    """Pairwise distances straight from the definitions, in Fractions."""
    out = set()
    if x.space.kind == "sphere":
        norm = x.norm()
        for a, b in itertools.combinations(x.points, 2):
            out.add(sum(F(p) * F(q) for p, q in zip(a, b)) / norm)
    else:
        for a, b in itertools.combinations(x.points, 2):
            d = sum(p != q for p, q in zip(a, b))
            out.add(F(d // 2) if x.space.kind == "johnson" else F(d))
    return tuple(sorted(out))


def test_golay_weight_enumerator():
    assert golay23().weight_distribution() == {0: 1, 7: 253, 8: 506, 11: 1288, 12: 1288, 15: 506, 16: 253, 23: 1}
    assert golay24().weight_distribution() == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}
    assert golay23().minimum_distance() == 7
    assert golay23().is_linear()


def test_golay_dual_is_even_subcode():
    assert golay23_dual_is_even_subcode()


def test_golay23_even():
    x = golay23_even()
    r = verify_spectrum(x)
    assert (r.cardinality, r.s) == (2048, 3)
    assert r.distances == (8, 12, 16)


def test_golay23_weight7():
    r = verify_spectrum(golay23_weight7())
    assert (r.cardinality, r.s) == (253, 2)


def test_johnson24_lift():
    x = johnson24_lift()
    assert x.space == Space.johnson(24, 8)
    r = verify_spectrum(x)
    assert (r.cardinality, r.s) == (253, 2)
    assert r.distances == _brute_spectrum(x)


def test_e8():
    r = verify_spectrum(e8_full())
    assert r.cardinality == 240
    assert r.distances == (F(-1), F(-1, 2), F(0), F(1, 2))
    half = verify_spectrum(e8_half())
    assert half.cardinality == 120
    assert half.distances == (F(-1, 2), F(0), F(1, 2))
    seeded = e8_half(seed=7)
    assert seeded.points != e8_half().points
    assert verify_spectrum(seeded).distances == half.distances


@pytest.mark.parametrize("n,s", [(8, 3), (10, 3), (11, 4), (12, 4)])
def test_hamming_weight_classes(n, s):
    x = hamming_weight_classes(n, s)
    assert len(x) == sum(math.comb(n, k) for k in range(s, -1, -2))
    r = verify_spectrum(x)
    assert r.s == s
    assert r.distances == _brute_spectrum(x)


@pytest.mark.parametrize("n,w,s", [(13, 5, 3), (16, 6, 3), (15, 5, 4)])
def test_johnson_prefix(n, w, s):
    x = johnson_prefix(n, w, s)
    assert len(x) == math.comb(n - w + s, s)
    assert verify_spectrum(x).s == s


def test_sphere_01():
    x = sphere_01(8, 3)
    assert len(x) == 84
    assert verify_spectrum(x).distances == (F(-1, 2), F(0), F(1, 2))
    big = sphere_01(21, 3)
    assert len(big) == math.comb(22, 3)
    assert verify_spectrum(big).s == 3


def test_spectrum_matches_brute_force():
    for x in (sphere_01(6, 2), e8_half(), hamming_weight_classes(7, 2), johnson_prefix(10, 4, 2)):
        assert verify_spectrum(x).distances == _brute_spectrum(x)


def test_lower_bounds_do_not_exceed_upper_bounds():
    for x in (e8_half(), sphere_01(8, 3), golay23_even()):
        r = verify_spectrum(x)
        rep = combined_bound(DistanceSet(x.space, r.distances))
        assert r.cardinality <= rep.combined


def test_pointset_text_roundtrip(tmp_path):
    for x in (e8_half(), golay23_weight7(), sphere_01(5, 2)):
        path = tmp_path / "pts.txt"
        x.save(path)
        back = PointSet.load(path)
        assert back.points == x.points and back.space == x.space and back.label == x.label


def test_pointset_validation():
    with pytest.raises(ConstructionError):
        PointSet(Space.hamming(3), ((0, 1, 0), (0, 1, 0)))
    with pytest.raises(ConstructionError):
        PointSet(Space.johnson(4, 2), ((1, 1, 0, 0), (1, 0, 0, 0)))
    with pytest.raises(ConstructionError):
        PointSet(Space.hamming(3), ((0, 2, 0),))
    with pytest.raises(ConstructionError):
        PointSet(Space.sphere(3), ((1, 0, 0), (0, 2, 0))).norm()
    with pytest.raises(ConstructionError):
        PointSet.from_text("# space=hamming:3 count=2\n010\n")
    with pytest.raises(ConstructionError):
        hamming_weight_classes(4, 3)


@pytest.fixture(scope="module")
def leech():
    return leech_minimal_vectors()


def test_leech_vectors(leech):
    assert leech.shape == (LEECH_COUNT, 24)
    assert len({tuple(v) for v in leech[:5000].tolist()}) == 5000


def test_leech_section(leech):
    pairs = leech_pairs(leech, count=3, seed=1)
    for pair in pairs:
        x, y = leech[pair[0]], leech[pair[1]]
        assert int(x @ y) == -8
        sec = leech_section(leech, pair)
        r = verify_spectrum(sec)
        assert r.cardinality == 2025
        assert r.distances == (F(-4, 11), F(-1, 44), F(7, 22))
    assert sec.space == Space.sphere(22)
    # the centered vectors are orthogonal to x and y
    arr = np.array(sec.points, dtype=np.int64)
    assert not (arr @ x).any() and not (arr @ y).any()


def test_leech_section_text_roundtrip(leech, tmp_path):
    sec = leech_section(leech)
    sec.save(tmp_path / "leech.txt")
    assert PointSet.load(tmp_path / "leech.txt").points == sec.points


@pytest.mark.slow
def test_leech_inner_products_full(leech):
    assert leech_inner_products(leech) == [F(-1), F(-1, 2), F(-1, 4), F(0), F(1, 4), F(1, 2)]
