"""The three two-point-homogeneous spaces and their zonal functions.

``Space("hamming", n)`` is the binary Hamming cube, ``Space("johnson", n, w)``
the binary Johnson scheme with distance ``|x ^ y| / 2`` and
``Space("sphere", n)`` the unit sphere S^(n-1) in R^n with the inner product
playing the role of the distance.

Zonal functions are normalized so that ``zonal(space, k, tau0(space)) == 1``.
Krawtchouk and Hahn polynomials are evaluated from their finite sums, the
Gegenbauer family from its three-term recurrence; scalar evaluation and
monomial coefficient extraction run through the same code, once with a
number and once with :class:`~fewdist.poly.Poly` as argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactmath import parse_scalar, scalar_str
from .poly import Poly, falling_binomial

HAMMING = "hamming"
JOHNSON = "johnson"
SPHERE = "sphere"
KINDS = (HAMMING, JOHNSON, SPHERE)


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class Space:
    kind: str
    n: int
    w: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpaceError(f"unknown space kind {self.kind!r}")
        if self.kind == JOHNSON:
            if self.w is None or self.w < 1 or 2 * self.w > self.n:
                raise SpaceError(f"Johnson space needs 1 <= w <= n/2, got n={self.n}, w={self.w}")
        elif self.w is not None:
            raise SpaceError(f"{self.kind} space takes no weight")
        if self.kind == SPHERE and self.n < 2:
            raise SpaceError("sphere needs ambient dimension n >= 2")
        if self.kind == HAMMING and self.n < 1:
            raise SpaceError("Hamming space needs n >= 1")

    @classmethod
    def hamming(cls, n: int) -> "Space":
        return cls(HAMMING, n)

    @classmethod
    def johnson(cls, n: int, w: int) -> "Space":
        return cls(JOHNSON, n, w)

    @classmethod
    def sphere(cls, n: int) -> "Space":
        return cls(SPHERE, n)

    @classmethod
    def parse(cls, text: str) -> "Space":
        """``hamming:<n>``, ``johnson:<n>,<w>`` or ``sphere:<n>`` (S^(n-1))."""
        try:
            kind, _, args = text.strip().lower().partition(":")
            nums = [int(a) for a in args.split(",")]
        except ValueError:
            raise SpaceError(f"bad space spec {text!r}") from None
        if kind == JOHNSON and len(nums) == 2:
            return cls.johnson(*nums)
        if kind in (HAMMING, SPHERE) and len(nums) == 1:
            return cls(kind, nums[0])
        raise SpaceError(f"bad space spec {text!r}")

    def __str__(self):
        if self.kind == JOHNSON:
            return f"johnson:{self.n},{self.w}"
        return f"{self.kind}:{self.n}"

    @property
    def is_finite(self) -> bool:
        return self.kind != SPHERE

    @property
    def max_degree(self) -> int | None:
        """Number of nontrivial zonal functions (None for the sphere)."""
        if self.kind == HAMMING:
            return self.n
        if self.kind == JOHNSON:
            return self.w
        return None


def tau0(space: Space) -> Fraction:
    return Fraction(1) if space.kind == SPHERE else Fraction(0)


def _check_degree(space: Space, k: int):
    if k < 0:
        raise SpaceError(f"negative degree {k}")
    top = space.max_degree
    if top is not None and k > top:
        raise SpaceError(f"degree {k} exceeds {top} for {space}")


def multiplicity(space: Space, k: int) -> int:
    """Dimension h_k of the k-th harmonic space."""
    _check_degree(space, k)
    n = space.n
    if space.kind == HAMMING:
        return math.comb(n, k)
    if space.kind == JOHNSON:
        return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)
    lower = math.comb(n + k - 3, k - 2) if k >= 2 else 0
    return math.comb(n + k - 1, k) - lower


def _lam(n: int, k: int) -> Fraction:
    # lambda_0 = 0 by convention
    return Fraction(k, n + 2 * k - 2) if k > 0 else Fraction(0)


def _gegenbauer_all(n: int, kmax: int, x) -> list:
    """G_0..G_kmax at ``x`` via x G_k = l_{k+1} G_{k+1} + (1 - l_{k-1}) G_{k-1}."""
    g = [Poly([Fraction(1)]) if isinstance(x, Poly) else Fraction(1)]
    if kmax >= 1:
        g.append(x * n)
    for k in range(1, kmax):
        nxt = (x * g[k] - g[k - 1] * (1 - _lam(n, k - 1))) / _lam(n, k + 1)
        g.append(nxt)
    return g


def _krawtchouk(n: int, k: int, x):
    total = 0
    for j in range(k + 1):
        term = falling_binomial(x, j) * falling_binomial(n - x, k - j)
        total = total + term if j % 2 == 0 else total - term
    return total / math.comb(n, k)


def _hahn(n: int, w: int, k: int, x):
    total = 0
    for j in range(k + 1):
        c = Fraction(math.comb(k, j) * math.comb(n + 1 - k, j), math.comb(w, j) * math.comb(n - w, j))
        term = falling_binomial(x, j) * c
        total = total + term if j % 2 == 0 else total - term
    return total


def _zonal_generic(space: Space, k: int, x):
    if space.kind == HAMMING:
        return _krawtchouk(space.n, k, x)
    if space.kind == JOHNSON:
        return _hahn(space.n, space.w, k, x)
    return _gegenbauer_all(space.n, k, x)[k] / multiplicity(space, k)


def zonal(space: Space, k: int, x):
    """Phi_k(x); exact in, exact out (same scalar field as ``x``)."""
    _check_degree(space, k)
    return _zonal_generic(space, k, x)


def zonal_values(space: Space, kmax: int, x) -> list:
    """[Phi_0(x), ..., Phi_kmax(x)] in one pass."""
    _check_degree(space, kmax)
    if space.kind == SPHERE:
        g = _gegenbauer_all(space.n, kmax, x)
        return [g[k] / multiplicity(space, k) for k in range(kmax + 1)]
    return [_zonal_generic(space, k, x) for k in range(kmax + 1)]


@lru_cache(maxsize=None)
def _monomial_cached(space: Space, k: int) -> tuple:
    p = _zonal_generic(space, k, Poly.x())
    if not isinstance(p, Poly):
        p = Poly([p])
    return tuple(Fraction(c) for c in p.coeffs(k + 1))


def zonal_monomial_coeffs(space: Space, k: int) -> list[Fraction]:
    """Coefficients of Phi_k in the monomial basis, constant term first."""
    _check_degree(space, k)
    return list(_monomial_cached(space, k))


@dataclass(frozen=True)
class DistanceDomain:
    kind: str  # "integers" or "interval"
    low: Fraction
    high: Fraction
    high_open: bool = False

    def __contains__(self, d) -> bool:
        if self.kind == "integers":
            try:
                if Fraction(d).denominator != 1:
                    return False
            except (TypeError, ValueError):
                return False
        if d < self.low:
            return False
        return d < self.high if self.high_open else d <= self.high

    def values(self) -> list[int]:
        if self.kind != "integers":
            raise SpaceError("continuous domain has no value list")
        return list(range(int(self.low), int(self.high) + 1))


def distance_domain(space: Space) -> DistanceDomain:
    if space.kind == HAMMING:
        return DistanceDomain("integers", Fraction(1), Fraction(space.n))
    if space.kind == JOHNSON:
        return DistanceDomain("integers", Fraction(1), Fraction(space.w))
    return DistanceDomain("interval", Fraction(-1), Fraction(1), high_open=True)


@dataclass(frozen=True)
class DistanceSet:
    """A space plus s distinct distances sorted ascending."""

    space: Space
    distances: tuple

    def __post_init__(self):
        ds = tuple(self.distances)
        object.__setattr__(self, "distances", ds)
        if not ds:
            raise SpaceError("a distance set needs at least one distance")
        dom = distance_domain(self.space)
        for d in ds:
            if d not in dom:
                raise SpaceError(f"distance {d} outside the domain of {self.space}")
        for a, b in zip(ds, ds[1:]):
            if not a < b:
                raise SpaceError("distances must be strictly increasing")

    @classmethod
    def of(cls, space: Space, values) -> "DistanceSet":
        """Build from unsorted values (strings are parsed exactly)."""
        vals = [parse_scalar(v) if isinstance(v, str) else v for v in values]
        vals = [Fraction(v) if isinstance(v, int) else v for v in vals]
        return cls(space, tuple(sorted(vals)))

    @property
    def s(self) -> int:
        return len(self.distances)

    def key(self) -> tuple:
        return tuple(float(d) for d in self.distances)

    def as_strings(self) -> list[str]:
        return [scalar_str(d) for d in self.distances]
