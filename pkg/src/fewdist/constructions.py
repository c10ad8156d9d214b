"""Explicit s-distance sets: lower-bound families and extremal examples.

Binary points are 0/1 tuples.  Sphere points are integer (or rational)
coordinate tuples of one common squared norm; the inner product divided by
that norm is the distance, so no irrational coordinates ever appear.  A
sphere PointSet for ``sphere:n`` may use more than n coordinates as long as
the points span an n-dimensional subspace (e.g. the centered 0/1 vectors
of ``sphere_01`` live in a hyperplane of R^(n+1)).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .spaces import HAMMING, JOHNSON, SPHERE, Space

# Generator polynomial of the binary quadratic-residue code of length 23
# (quadratic residues mod 23 give the cyclotomic coset {1,2,3,4,6,8,9,12,13,16,18}).
GOLAY23_GENERATOR = (1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1)  # 1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class PointSet:
    space: Space
    points: tuple
    label: str = ""

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise ConstructionError("points are not distinct")
        if not pts:
            return
        if self.space.kind in (HAMMING, JOHNSON):
            for p in pts:
                if len(p) != self.space.n or any(b not in (0, 1) for b in p):
                    raise ConstructionError(f"not a binary vector of length {self.space.n}")
            if self.space.kind == JOHNSON and any(sum(p) != self.space.w for p in pts):
                raise ConstructionError(f"Johnson points must have weight {self.space.w}")
        else:
            dim = len(pts[0])
            if dim < self.space.n or any(len(p) != dim for p in pts):
                raise ConstructionError("sphere points need one common length of at least n")

    def __len__(self):
        return len(self.points)

    def norm(self) -> Fraction:
        """Common squared norm of a sphere point set."""
        norms = {sum(Fraction(c) ** 2 for c in p) for p in self.points}
        if len(norms) != 1:
            raise ConstructionError("sphere points have different norms")
        return norms.pop()

    def integer_array(self) -> tuple[np.ndarray, int]:
        """Points scaled to integers, with the scale factor."""
        den = 1
        for p in self.points:
            for c in p:
                den = math.lcm(den, Fraction(c).denominator)
        arr = np.array([[int(Fraction(c) * den) for c in p] for p in self.points], dtype=np.int64)
        return arr, den

    def to_text(self) -> str:
        lines = [f"# space={self.space} label={self.label or '-'} count={len(self)}"]
        for p in self.points:
            if self.space.kind == SPHERE:
                lines.append(",".join(str(Fraction(c)) for c in p))
            else:
                lines.append("".join(str(b) for b in p))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PointSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ConstructionError("missing header line")
        fields = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        space = Space.parse(fields["space"])
        label = "" if fields.get("label", "-") == "-" else fields["label"]
        pts = []
        for ln in lines[1:]:
            if space.kind == SPHERE:
                pts.append(tuple(_number(t) for t in ln.split(",")))
            else:
                pts.append(tuple(int(ch) for ch in ln.strip()))
        if "count" in fields and int(fields["count"]) != len(pts):
            raise ConstructionError("point count does not match header")
        return cls(space, tuple(pts), label)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "PointSet":
        with open(path) as fh:
            return cls.from_text(fh.read())


def _number(tok: str):
    q = Fraction(tok.strip())
    return q.numerator if q.denominator == 1 else q


@dataclass(frozen=True)
class SpectrumReport:
    cardinality: int
    distances: tuple

    @property
    def s(self) -> int:
        return len(self.distances)

    def to_dict(self) -> dict:
        return {
            "cardinality": self.cardinality,
            "s": self.s,
            "distances": [str(d) for d in self.distances],
        }


def _pair_values(a: np.ndarray, b: np.ndarray | None, chunk: int) -> set:
    """Distinct entries of a @ b.T over pairs (upper triangle when b is None)."""
    sym = b is None
    b = a if sym else b
    # float64 products are exact while every partial sum stays below 2^53
    bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1]
    exact_float = bound < 2**53
    af = a.astype(np.float64) if exact_float else a.astype(object)
    bf = b.astype(np.float64) if exact_float else b.astype(object)
    # keep each block near 2^24 entries
    rows = max(1, min(chunk, 2**24 // max(1, b.shape[0])))
    counts = np.zeros(2 * bound + 1, dtype=bool) if exact_float and bound < 2**20 else None
    seen: set = set()
    for start in range(0, a.shape[0], rows):
        if sym:
            block = af[start : start + rows] @ bf[start:].T
            k = block.shape[0]
            vals = np.concatenate([block[:, :k][np.triu_indices(k, 1)], block[:, k:].ravel()])
        else:
            vals = (af[start : start + rows] @ bf.T).ravel()
        if counts is not None:
            counts[np.bincount(vals.astype(np.int64) + bound, minlength=counts.size) > 0] = True
        else:
            seen.update(int(v) for v in np.unique(vals))
    if counts is not None:
        seen.update(int(v) - bound for v in np.flatnonzero(counts))
    return seen


def verify_spectrum(x: PointSet, chunk: int = 2048) -> SpectrumReport:
    """All pairwise distances of ``x``, computed exactly."""
    if len(x) < 2:
        raise ConstructionError("need at least two points")
    if x.space.kind == SPHERE:
        norm = x.norm()
        arr, den = x.integer_array()
        ints = _pair_values(arr, None, chunk)
        scale = norm * den * den
        dists = sorted({Fraction(v) / scale for v in ints})
    else:
        arr = np.array(x.points, dtype=np.int64)
        weights = arr.sum(axis=1)
        if len(set(weights.tolist())) == 1:
            # constant weight: d_H = 2w - 2<a,b>
            w = int(weights[0])
            dists = sorted({2 * w - 2 * v for v in _pair_values(arr, None, chunk)})
        else:
            signed = 1 - 2 * arr  # 0/1 -> +1/-1, d_H = (n - <a,b>) / 2
            dists = sorted({(x.space.n - v) // 2 for v in _pair_values(signed, None, chunk)})
        if x.space.kind == JOHNSON:
            dists = [d // 2 for d in dists]
        dists = [Fraction(d) for d in dists]
    return SpectrumReport(len(x), tuple(dists))


# ---------------------------------------------------------------------------
# families


def _weight_vectors(n: int, k: int, offset: int = 0, total: int | None = None):
    total = n + offset if total is None else total
    for ones in itertools.combinations(range(n), k):
        v = [0] * total
        for i in range(offset):
            v[i] = 1
        for i in ones:
            v[offset + i] = 1
        yield tuple(v)


def hamming_weight_classes(n: int, s: int) -> PointSet:
    """All binary words whose weight is s, s-2, s-4, ..."""
    if s < 1 or 2 * s > n:
        raise ConstructionError("need 1 <= s and 2s <= n")
    pts = [v for k in range(s, -1, -2) for v in _weight_vectors(n, k)]
    return PointSet(Space.hamming(n), tuple(pts), f"hamming-weights-{n}-{s}")


def johnson_prefix(n: int, w: int, s: int) -> PointSet:
    """Ones on the first w - s positions plus any s of the remaining ones."""
    if not (1 <= s <= w and s <= n - w):
        raise ConstructionError("need 1 <= s <= w and s <= n - w")
    pts = list(_weight_vectors(n - (w - s), s, offset=w - s))
    return PointSet(Space.johnson(n, w), tuple(pts), f"johnson-prefix-{n}-{w}-{s}")


def sphere_01(n: int, s: int) -> PointSet:
    """Weight-s 0/1 vectors of length n + 1, centered on their hyperplane, in S^(n-1)."""
    if s < 1 or 2 * s > n + 1:
        raise ConstructionError("need 1 <= s and 2s <= n + 1")
    pts = [tuple((n + 1) * b - s for b in v) for v in _weight_vectors(n + 1, s)]
    return PointSet(Space.sphere(n), tuple(pts), f"sphere-01-{n}-{s}")


# ---------------------------------------------------------------------------
# Golay codes


@dataclass(frozen=True)
class BinaryCode:
    length: int
    generators: tuple  # rows as int bit masks, bit i = coordinate i
    codewords: tuple  # all codewords as int bit masks

    @property
    def dimension(self) -> int:
        return len(self.generators)

    def weight_distribution(self) -> dict:
        out: dict = {}
        for c in self.codewords:
            w = c.bit_count()
            out[w] = out.get(w, 0) + 1
        return dict(sorted(out.items()))

    def minimum_distance(self) -> int:
        return min(c.bit_count() for c in self.codewords if c)

    def is_linear(self) -> bool:
        words = set(self.codewords)
        return all((a ^ b) in words for a in self.codewords[:64] for b in self.codewords)

    def vector(self, c: int) -> tuple:
        return tuple((c >> i) & 1 for i in range(self.length))


def _span(rows) -> tuple:
    words = [0]
    for r in rows:
        words += [w ^ r for w in words]
    return tuple(sorted(words))


@lru_cache(maxsize=None)
def golay23() -> BinaryCode:
    """Cyclic [23, 12, 7] code generated by the cyclic shifts of g(x)."""
    g = sum(bit << i for i, bit in enumerate(GOLAY23_GENERATOR))
    rows = tuple(g << i for i in range(12))
    return BinaryCode(23, rows, _span(rows))


@lru_cache(maxsize=None)
def golay24() -> BinaryCode:
    """Extended code: an overall parity bit appended as coordinate 23."""
    def ext(c):
        return c | ((c.bit_count() & 1) << 23)

    base = golay23()
    return BinaryCode(24, tuple(ext(r) for r in base.generators), tuple(sorted(ext(c) for c in base.codewords)))


def golay23_dual_is_even_subcode() -> bool:
    """The even-weight subcode is orthogonal to every generator and has dimension 11 = 23 - 12."""
    code = golay23()
    even = [c for c in code.codewords if c.bit_count() % 2 == 0]
    if len(even) != 2 ** (code.length - code.dimension):
        return False
    return all((c & r).bit_count() % 2 == 0 for c in even for r in code.generators)


def golay23_even() -> PointSet:
    code = golay23()
    pts = [code.vector(c) for c in code.codewords if c.bit_count() % 2 == 0]
    return PointSet(Space.hamming(23), tuple(pts), "golay23-even")


def golay23_weight7() -> PointSet:
    code = golay23()
    pts = [code.vector(c) for c in code.codewords if c.bit_count() == 7]
    return PointSet(Space.johnson(23, 7), tuple(pts), "golay23-weight7")


def johnson24_lift() -> PointSet:
    """Prepend a 1 to each weight-7 Golay word: weight 8 in length 24."""
    pts = [(1,) + p for p in golay23_weight7().points]
    return PointSet(Space.johnson(24, 8), tuple(pts), "johnson24-lift")


# ---------------------------------------------------------------------------
# E8 and Leech


def e8_roots() -> list[tuple]:
    """The 240 roots scaled by 2 (integer coordinates, squared norm 8)."""
    roots = []
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((2, -2), repeat=2):
            v = [0] * 8
            v[i], v[j] = si, sj
            roots.append(tuple(v))
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            roots.append(signs)
    return roots


def e8_full() -> PointSet:
    return PointSet(Space.sphere(8), tuple(e8_roots()), "e8")


def _lex_positive(v) -> bool:
    return next(c for c in v if c) > 0


def e8_half(seed: int | None = None) -> PointSet:
    """One root from each antipodal pair; 120 points with inner products 0, +-1/2.

    Without a seed the representative with positive first nonzero coordinate
    is kept; a seed picks each representative at random instead.
    """
    reps = sorted(v for v in e8_roots() if _lex_positive(v))
    if seed is not None:
        rng = random.Random(seed)
        reps = [v if rng.random() < 0.5 else tuple(-c for c in v) for v in reps]
    label = "e8-half" if seed is None else f"e8-half-seed{seed}"
    return PointSet(Space.sphere(8), tuple(reps), label)


LEECH_NORM = 32
LEECH_COUNT = 196560


def leech_minimal_vectors() -> np.ndarray:
    """The 196560 minimal vectors of the Leech lattice scaled to squared norm 32."""
    code = golay24()
    out = []
    for i, j in itertools.combinations(range(24), 2):
        for si, sj in itertools.product((4, -4), repeat=2):
            v = [0] * 24
            v[i], v[j] = si, sj
            out.append(v)
    octads = [c for c in code.codewords if c.bit_count() == 8]
    sign_patterns = [s for s in itertools.product((1, -1), repeat=8) if s.count(-1) % 2 == 0]
    for c in octads:
        support = [i for i in range(24) if (c >> i) & 1]
        for signs in sign_patterns:
            v = [0] * 24
            for pos, sg in zip(support, signs):
                v[pos] = 2 * sg
            out.append(v)
    for c in code.codewords:
        flip = [-1 if (c >> k) & 1 else 1 for k in range(24)]
        for i in range(24):
            out.append([flip[k] * (-3 if k == i else 1) for k in range(24)])
    arr = np.array(out, dtype=np.int64)
    assert arr.shape[0] == LEECH_COUNT, f"expected {LEECH_COUNT} minimal vectors, got {arr.shape[0]}"
    assert (np.einsum("ij,ij->i", arr, arr) == LEECH_NORM).all()
    return arr


def _section(vectors: np.ndarray, xi: int, yi: int) -> PointSet:
    """Points z with <z,x> = 16, <z,y> = 0, projected off span(x, y)."""
    x, y = vectors[xi], vectors[yi]
    mask = (vectors @ x == LEECH_NORM // 2) & (vectors @ y == 0)
    z = vectors[mask]
    # projection of z onto span(x, y) is (8x + 2y) / 15 for these inner products
    centered = 15 * z - 8 * x - 2 * y
    return PointSet(Space.sphere(22), tuple(map(tuple, centered.tolist())), f"leech-section-{xi}-{yi}")


def leech_pairs(vectors: np.ndarray, count: int = 0, seed: int = 0) -> list[tuple[int, int]]:
    """First pair (x, y) in generation order with <x,y> = -8, then ``count`` random ones."""
    pairs = []
    for xi in range(vectors.shape[0]):
        hits = np.nonzero(vectors @ vectors[xi] == -LEECH_NORM // 4)[0]
        hits = hits[hits > xi]
        if len(hits):
            pairs.append((xi, int(hits[0])))
            break
    rng = np.random.default_rng(seed)
    while len(pairs) < count + 1:
        xi = int(rng.integers(vectors.shape[0]))
        hits = np.nonzero(vectors @ vectors[xi] == -LEECH_NORM // 4)[0]
        pairs.append((xi, int(rng.choice(hits))))
    return pairs


def leech_section(vectors: np.ndarray | None = None, pair: tuple[int, int] | None = None) -> PointSet:
    """2025 points in S^21 with inner products -4/11, -1/44, 7/22."""
    vectors = leech_minimal_vectors() if vectors is None else vectors
    if pair is None:
        pair = leech_pairs(vectors)[0]
    return _section(vectors, *pair)


def leech_inner_products(vectors: np.ndarray, chunk: int = 8192) -> list[Fraction]:
    """Distinct normalized inner products over all distinct pairs."""
    vals = _pair_values(vectors, None, chunk)
    return sorted(Fraction(v, LEECH_NORM) for v in vals)


CONSTRUCTIONS = {
    "hamming-weights": hamming_weight_classes,
    "johnson-prefix": johnson_prefix,
    "sphere-01": sphere_01,
    "golay23-even": golay23_even,
    "golay23-weight7": golay23_weight7,
    "johnson24-lift": johnson24_lift,
    "e8": e8_full,
    "e8-half": e8_half,
    "leech-section": leech_section,
}
