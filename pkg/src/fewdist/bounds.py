"""Upper bounds on |X| for an s-distance set with a prescribed distance set D.

* ``absolute_bound``: h_0 + ... + h_s.
* ``harmonic_bound``: expand the annihilator f(t) = prod (d_i - t)/(d_i - tau0)
  in the zonal basis and sum h_i over strictly positive coefficients.
* ``lp_bound_primal`` / ``lp_bound_dual``: the Delsarte linear program and its
  dual, truncated to degrees 1..m.  Any feasible dual vector is a bound, so
  dual certificates are re-checked outside the solver before being reported.

Exact inputs (rationals, quadratic-field elements) go through exact
arithmetic throughout.  Numerically located distance sets use
``combined_bound_numeric``, which checks its certificate in interval
arithmetic and treats near-zero harmonic coefficients as positive.
"""

from __future__ import annotations

import contextlib
import json
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exactmath import (
    LpProblem,
    QuadExt,
    ceil_scalar,
    floor_scalar,
    lp_solve,
    parse_scalar,
    scalar_str,
    to_scalar,
)
from .poly import Poly
from .spaces import (
    DistanceSet,
    Space,
    multiplicity,
    tau0,
    zonal_monomial_coeffs,
    zonal_values,
)

EXACT = "exact"
FLOAT_CERTIFIED = "float-certified"
NUMERIC_ZERO = mpmath.mpf("1e-20")
DEFAULT_RADIUS = Fraction(1, 10**20)
IV_BITS = 300


def absolute_bound(space: Space, s: int) -> int:
    if s < 1:
        raise ValueError("s must be positive")
    return sum(multiplicity(space, k) for k in range(s + 1))


def default_truncation(space: Space, s: int, m: int | None = None) -> int:
    """LP truncation degree: s + 7 on the sphere, the full range otherwise."""
    top = space.max_degree
    if m is None:
        return top if top is not None else s + 7
    return m if top is None else min(m, top)


# ---------------------------------------------------------------------------
# harmonic bound


@dataclass(frozen=True)
class HarmonicExpansion:
    coefficients: tuple
    positive_indices: tuple
    zero_indices: tuple = ()

    def evaluate(self, space: Space, t):
        return sum(
            (c * v for c, v in zip(self.coefficients, zonal_values(space, len(self.coefficients) - 1, t))),
            start=Fraction(0),
        )


def annihilator(distances, t0) -> Poly:
    """Monomial form of prod (d_i - t) / (d_i - tau0)."""
    p = Poly([Fraction(1)])
    for d in distances:
        p = p * Poly([d / (d - t0), Fraction(-1) / (d - t0)])
    return p


def expand_in_zonal_basis(space: Space, poly: Poly, degree: int) -> list:
    """Coefficients c_k with poly = sum_k c_k Phi_k (triangular back-substitution)."""
    rem = poly.coeffs(degree + 1)
    out = [Fraction(0)] * (degree + 1)
    for k in range(degree, -1, -1):
        basis = zonal_monomial_coeffs(space, k)
        ck = rem[k] / basis[k]
        out[k] = ck
        if ck != 0:
            for i in range(k + 1):
                rem[i] = rem[i] - ck * basis[i]
    return out


def harmonic_expansion(d: DistanceSet) -> HarmonicExpansion:
    coeffs = expand_in_zonal_basis(d.space, annihilator(d.distances, tau0(d.space)), d.s)
    coeffs = tuple(to_scalar(c) for c in coeffs)
    pos = tuple(i for i, c in enumerate(coeffs) if c > 0)
    zero = tuple(i for i, c in enumerate(coeffs) if c == 0)
    return HarmonicExpansion(coeffs, pos, zero)


def harmonic_bound(d: DistanceSet) -> tuple[int, HarmonicExpansion]:
    exp = harmonic_expansion(d)
    return sum(multiplicity(d.space, i) for i in exp.positive_indices), exp


def harmonic_bound_numeric(space: Space, distances, zero_tol=NUMERIC_ZERO):
    """Inclusive variant for numerically known distances.

    Coefficients within ``zero_tol`` of zero count as positive; that can only
    enlarge the bound.
    """
    t0 = mpmath.mpf(int(tau0(space)))
    p = Poly([mpmath.mpf(1)])
    for dist in distances:
        p = p * Poly([dist / (dist - t0), mpmath.mpf(-1) / (dist - t0)])
    s = len(distances)
    rem = p.coeffs(s + 1)
    out = [mpmath.mpf(0)] * (s + 1)
    for k in range(s, -1, -1):
        basis = [_mpf(c) for c in zonal_monomial_coeffs(space, k)]
        ck = rem[k] / basis[k]
        out[k] = ck
        for i in range(k + 1):
            rem[i] -= ck * basis[i]
    pos = tuple(i for i, c in enumerate(out) if c > -zero_tol)
    zero = tuple(i for i, c in enumerate(out) if abs(c) <= zero_tol)
    exp = HarmonicExpansion(tuple(out), pos, zero)
    return sum(multiplicity(space, i) for i in pos), exp


def mpf_to_fraction(x) -> Fraction:
    x = mpmath.mpf(x)
    man, exp = x.man_exp
    man, exp = int(man), int(exp)
    if x < 0:
        man = -man
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _mpf(q):
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


# ---------------------------------------------------------------------------
# LP bound


def phi_table(space: Space, distances, m: int) -> list[list]:
    """rows k = 1..m, columns i: Phi_k(d_i)."""
    cols = [zonal_values(space, m, d)[1:] for d in distances]
    return [[to_scalar(cols[i][k]) for i in range(len(distances))] for k in range(m)]


def lp_bound_primal(d: DistanceSet, kmax: int) -> int | None:
    """floor(max 1 + sum alpha_i) subject to sum_i alpha_i Phi_k(d_i) >= -1, k <= kmax.

    Returns None when the truncated program is unbounded.
    """
    if kmax < d.s:
        raise ValueError("kmax must be at least s")
    table = phi_table(d.space, d.distances, kmax)
    prob = LpProblem(
        objective=[1] * d.s,
        rows=table,
        relations=[">="] * kmax,
        rhs=[-1] * kmax,
        maximize=True,
    )
    sol = lp_solve(prob)
    if sol.status != "optimal":
        return None
    return floor_scalar(1 + sol.value)


@dataclass
class Certificate:
    """A dual vector f_1..f_m proving |X| <= 1 + sum f for every X with D(X) = D."""

    space: Space
    distances: tuple
    f: tuple
    value: object  # 1 + sum f, exact
    exactness: str = EXACT
    radius: Fraction | None = None  # half-width of the box around numeric distances

    @property
    def m(self) -> int:
        return len(self.f)

    @property
    def bound(self) -> int:
        # |X| is an integer no larger than the real optimum
        return floor_scalar(self.value)

    def verify(self) -> bool:
        if self.exactness == EXACT:
            return verify_certificate(self.space, self.distances, self.f)
        return verify_certificate_interval(self.space, self.distances, self.f, self.radius)

    def to_dict(self) -> dict:
        out = {
            "space": str(self.space),
            "distances": [_text(x) for x in self.distances],
            "m": self.m,
            "f": [scalar_str(x) for x in self.f],
            "bound": self.bound,
            "value": scalar_str(self.value),
            "exactness": self.exactness,
        }
        if self.radius is not None:
            out["radius"] = scalar_str(self.radius)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "Certificate":
        space = Space.parse(obj["space"])
        exactness = obj.get("exactness", EXACT)
        dists = tuple(parse_scalar(x) for x in obj["distances"])
        radius = parse_scalar(obj["radius"]) if obj.get("radius") is not None else None
        f = tuple(parse_scalar(x) for x in obj["f"])
        value = 1 + sum(f, start=Fraction(0))
        if "value" in obj and parse_scalar(obj["value"]) != to_scalar(value):
            raise ValueError("certificate value does not match 1 + sum f")
        cert = cls(space, dists, f, to_scalar(value), exactness, radius)
        if "bound" in obj and cert.bound != int(obj["bound"]):
            raise ValueError("certificate bound does not match its value")
        return cert

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


def _text(x) -> str:
    if isinstance(x, (int, Fraction, QuadExt)):
        return scalar_str(x)
    return scalar_str(mpf_to_fraction(x))


def _monomial_form(space: Space, f) -> list:
    """F = sum_k f_k Phi_k (k >= 1) in the monomial basis."""
    m = len(f)
    out = [Fraction(0)] * (m + 1)
    for k, fk in enumerate(f, start=1):
        if fk == 0:
            continue
        for i, c in enumerate(zonal_monomial_coeffs(space, k)):
            out[i] = out[i] + fk * c
    return out


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def verify_certificate(space: Space, distances, f) -> bool:
    """Exact check of f >= 0 and sum_k f_k Phi_k(d_i) <= -1 for every d_i.

    Evaluates through the monomial coefficients, not the recurrence the LP
    was built from.
    """
    if any(fk < 0 for fk in f):
        return False
    poly = _monomial_form(space, f)
    return all(_horner(poly, d) <= -1 for d in distances)


def verify_certificate_interval(space: Space, distances, f, radius) -> bool:
    """Same check with each d_i replaced by [d_i - radius, d_i + radius]."""
    if any(fk < 0 for fk in f):
        return False
    return _worst_on_boxes(space, distances, f, radius) <= -1


def _worst_on_boxes(space: Space, centers, f, radius: Fraction):
    """Upper end of sum_k f_k Phi_k over [c - r, c + r], maximized over the centers."""
    iv = mpmath.iv
    with _iv_prec(IV_BITS):
        poly = [_iv(c) for c in _monomial_form(space, f)]
        worst = None
        for c in centers:
            lo, hi = _iv(Fraction(c) - radius), _iv(Fraction(c) + radius)
            val = _horner(poly, iv.mpf([lo.a, hi.b]))
            top = mpf_to_fraction(mpmath.mpf(val.b))
            worst = top if worst is None else max(worst, top)
    return worst


@contextlib.contextmanager
def _iv_prec(bits: int):
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _iv(q):
    q = Fraction(q)
    return mpmath.iv.mpf(q.numerator) / q.denominator


def lp_bound_dual(d: DistanceSet, m: int):
    """min 1 + sum f_k subject to sum_k f_k Phi_k(d_i) <= -1, f >= 0.

    Returns ``(bound, certificate)``; ``(None, None)`` if infeasible at this m.
    The certificate is re-verified before anything is returned.
    """
    if m < d.s:
        raise ValueError("m must be at least s")
    table = phi_table(d.space, d.distances, m)
    rows = [[table[k][i] for k in range(m)] for i in range(d.s)]
    prob = LpProblem(objective=[1] * m, rows=rows, relations=["<="] * d.s, rhs=[-1] * d.s, maximize=False)
    sol = lp_solve(prob)
    if sol.status != "optimal":
        return None, None
    cert = Certificate(d.space, d.distances, tuple(sol.x), to_scalar(1 + sol.value))
    if not cert.verify():
        raise ArithmeticError("LP returned a dual vector that fails verification")
    return cert.bound, cert


# ---------------------------------------------------------------------------
# combined


@dataclass
class BoundReport:
    space: Space
    distances: tuple
    absolute: int
    harmonic: int
    lp: int | None
    combined: int
    lp_certificate: Certificate | None
    expansion: HarmonicExpansion
    exactness: str = EXACT
    m: int | None = None

    @property
    def harmonic_only(self) -> bool:
        return self.lp is None

    @property
    def discrepancy(self) -> bool:
        """Some harmonic coefficient is exactly zero, so counting it would change H."""
        return bool(self.expansion.zero_indices)

    @property
    def value(self):
        """The real number behind ``combined``: min(H, 1 + sum f)."""
        if self.lp_certificate is None:
            return Fraction(self.harmonic)
        v = self.lp_certificate.value
        return v if v < self.harmonic else Fraction(self.harmonic)

    @property
    def harmonic_with_zeros(self) -> int:
        idx = set(self.expansion.positive_indices) | set(self.expansion.zero_indices)
        return sum(multiplicity(self.space, i) for i in idx)

    def to_dict(self) -> dict:
        return {
            "space": str(self.space),
            "s": len(self.distances),
            "distances": [_text(x) for x in self.distances],
            "absolute": self.absolute,
            "harmonic": self.harmonic,
            "harmonic_positive_indices": list(self.expansion.positive_indices),
            "harmonic_zero_indices": list(self.expansion.zero_indices),
            "harmonic_with_zeros": self.harmonic_with_zeros,
            "discrepancy": self.discrepancy,
            "lp": self.lp,
            "lp_m": self.m,
            "lp_value": _text(self.lp_certificate.value) if self.lp_certificate else None,
            "combined": self.combined,
            "harmonic_only": self.harmonic_only,
            "exactness": self.exactness,
            "certificate": self.lp_certificate.to_dict() if self.lp_certificate else None,
        }


def combined_bound(d: DistanceSet, m: int | None = None) -> BoundReport:
    """B(D) = min(H(D), L(D)) with L from the dual LP at truncation m."""
    m = max(default_truncation(d.space, d.s, m), d.s)
    h, exp = harmonic_bound(d)
    lp, cert = lp_bound_dual(d, m)
    combined = h if lp is None else min(h, lp)
    return BoundReport(
        d.space, d.distances, absolute_bound(d.space, d.s), h, lp, combined, cert, exp, EXACT, m
    )


def rationalize(x, bits: int = 100) -> Fraction:
    return Fraction(int(mpmath.nint(x * 2**bits)), 2**bits)


def certify_numeric(space: Space, distances, m: int, radius):
    """Dual certificate for numerically known distances.

    Solves the LP exactly at dyadic roundings of the distances, then scales
    the dual vector so that it is feasible on the whole interval box.
    Returns ``(bound, certificate)`` or ``(None, None)``.
    """
    rat = tuple(rationalize(x) for x in distances)
    table = phi_table(space, rat, m)
    s = len(rat)
    rows = [[table[k][i] for k in range(m)] for i in range(s)]
    sol = lp_solve(LpProblem([1] * m, rows, ["<="] * s, [-1] * s, maximize=False))
    if sol.status != "optimal":
        return None, None
    f = [Fraction(v) for v in sol.x]
    rad = Fraction(radius) + max(abs(r - mpf_to_fraction(x)) for r, x in zip(rat, distances))
    worst = _worst_on_boxes(space, rat, f, rad)
    if not worst < 0:
        return None, None
    # scale by c >= 1/|worst| so every constraint reaches -1
    scale = Fraction(ceil_scalar(Fraction(-10**30) / worst), 10**30)
    f = tuple(fk * scale for fk in f)
    cert = Certificate(space, rat, f, 1 + sum(f), FLOAT_CERTIFIED, rad)
    if not cert.verify():
        return None, None
    return cert.bound, cert


def combined_bound_numeric(space: Space, distances, m: int | None = None, radius=DEFAULT_RADIUS) -> BoundReport:
    s = len(distances)
    m = max(default_truncation(space, s, m), s)
    h, exp = harmonic_bound_numeric(space, distances)
    lp, cert = certify_numeric(space, distances, m, radius)
    combined = h if lp is None else min(h, lp)
    return BoundReport(
        space, tuple(distances), absolute_bound(space, s), h, lp, combined, cert, exp, FLOAT_CERTIFIED, m
    )
