"""The K_i numbers of a distance set and the integrality machinery around them.

For distances d_1 < ... < d_s and self-distance tau0,

    K_i = prod_{j != i} (d_j - tau0) / (d_j - d_i).

They satisfy sum_i d_i^j K_i = tau0^j for j < s, and once an s-distance set
has at least 2N(M, s) points every K_i must be an integer bounded by
:func:`lrs_ceiling`.  K vectors here are always aligned with the ascending
order of the distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .exactmath import QuadExt, DomainError, is_integer_scalar, to_scalar
from .spaces import DistanceSet, Space, multiplicity, tau0

__all__ = [
    "KVector",
    "n_of",
    "lrs_ceiling",
    "k_values",
    "k_vector",
    "check_power_sums",
    "solve_s2",
    "solve_s3",
    "NewtonConfig",
    "solve_s4_numeric",
    "monotone_k_property",
]


def n_of(space: Space, s: int) -> int:
    """N(M, s) = h_0 + ... + h_{s-1}."""
    if s < 1:
        raise ValueError("s must be positive")
    return sum(multiplicity(space, k) for k in range(s))


def lrs_ceiling(n_value: int) -> int:
    """floor(1/2 + sqrt(N^2/(2N-2) + 1/4)) in integer arithmetic.

    t qualifies iff (2t-1)^2 (2N-2) <= 4N^2 + 2N - 2.
    """
    if n_value < 2:
        raise ValueError("lrs_ceiling needs N >= 2")
    lhs_cap = 4 * n_value * n_value + 2 * n_value - 2
    den = 2 * n_value - 2
    # (2t-1) <= sqrt(lhs_cap/den)
    u = math.isqrt(lhs_cap // den)
    while (u + 1) * (u + 1) * den <= lhs_cap:
        u += 1
    while u * u * den > lhs_cap:
        u -= 1
    # largest odd 2t-1 <= u
    if u % 2 == 0:
        u -= 1
    return (u + 1) // 2


@dataclass(frozen=True)
class KVector:
    values: tuple
    all_integer: bool
    ceiling: int | None
    within_ceiling: bool

    @property
    def admissible(self) -> bool:
        return self.all_integer and self.within_ceiling

    def as_ints(self) -> tuple[int, ...]:
        if not self.all_integer:
            raise ValueError("K vector is not integral")
        return tuple(int(to_scalar(v)) for v in self.values)


def k_values(distances, t0) -> list:
    """Raw K_i values for ascending ``distances`` (exact or numeric)."""
    out = []
    for i, di in enumerate(distances):
        num = 1
        den = 1
        for j, dj in enumerate(distances):
            if j != i:
                num = num * (dj - t0)
                den = den * (dj - di)
        out.append(to_scalar(num / den) if not _is_numeric(num) else num / den)
    return out


def _is_numeric(x) -> bool:
    return not isinstance(x, (int, Fraction, QuadExt))


def k_vector(d: DistanceSet) -> KVector:
    if d.s < 2:
        raise ValueError("K values need s >= 2")
    vals = tuple(k_values(d.distances, tau0(d.space)))
    all_int = all(is_integer_scalar(v) for v in vals)
    ceiling = lrs_ceiling(n_of(d.space, d.s))
    if all_int:
        within = all(abs(int(to_scalar(v))) <= ceiling for v in vals)
    else:
        within = False
    return KVector(vals, all_int, ceiling, within)


def check_power_sums(d: DistanceSet, k) -> bool:
    """True iff sum_i d_i^j K_i == tau0^j exactly for j = 0..s-1."""
    kv = k.values if isinstance(k, KVector) else tuple(k)
    if len(kv) != d.s:
        raise ValueError("K vector and distance set differ in length")
    t0 = tau0(d.space)
    for j in range(d.s):
        total = sum((ki * di**j for ki, di in zip(kv, d.distances)), start=Fraction(0))
        if total != t0**j:
            return False
    return True


def solve_s2(k1: int, k2: int, d2, tau0_value):
    """d_1 = (tau0 - d_2 K_2) / K_1."""
    if k1 == 0:
        raise ZeroDivisionError("K_1 must be nonzero")
    return to_scalar((tau0_value - d2 * k2) / Fraction(k1))


def solve_s3(k, d3, tau0_value) -> tuple:
    """The two unknown distances of a 3-distance set from (K_1, K_2, K_3) and d_3.

    Uses the closed form with the root carrying K_1 taken with the minus
    sign in front of (d_3 - tau0) sqrt(-K_1 K_2 K_3).  Returns the two roots
    sorted ascending; ``solve_s3((k2, k1, k3), ...)`` gives the other branch.
    """
    k1, k2, k3 = (int(v) for v in k)
    r = -k1 * k2 * k3
    if r < 0:
        raise DomainError(f"negative radicand -K1K2K3 = {r}")
    if k1 == 0 or k2 == 0 or k1 + k2 == 0:
        raise ZeroDivisionError("K_1, K_2 and K_1 + K_2 must be nonzero")
    root = QuadExt.sqrt(r)
    lead = (d3 - tau0_value) * root
    s12 = k1 + k2
    d1 = (tau0_value * k1 - d3 * (k1 * k3) - lead) / (k1 * s12)
    d2 = (tau0_value * k2 - d3 * (k2 * k3) + lead) / (k2 * s12)
    d1, d2 = to_scalar(d1), to_scalar(d2)
    return (d1, d2) if d1 <= d2 else (d2, d1)


# ---------------------------------------------------------------------------
# numeric s = 4


@dataclass(frozen=True)
class NewtonConfig:
    starts: int = 64
    precision_bits: int = 256
    tolerance: float = 1e-30
    dedup_radius: float = 1e-20
    float_iterations: int = 60
    polish_iterations: int = 40


def halton(count: int, dim: int = 3) -> np.ndarray:
    """First ``count`` Halton points in [0, 1)^dim (bases 2, 3, 5, ...)."""
    primes = [2, 3, 5, 7, 11, 13][:dim]
    out = np.empty((count, dim))
    for c, base in enumerate(primes):
        for i in range(count):
            f, r, k = 1.0, 0.0, i + 1
            while k:
                f /= base
                r += f * (k % base)
                k //= base
            out[i, c] = r
    return out


def newton_starts(count: int) -> np.ndarray:
    return 2.0 * halton(count) - 1.0


def _residual_float(k3, rhs, x):
    # x: (..., 3), rhs: (..., 3)
    p1 = x @ k3
    p2 = (x * x) @ k3
    p3 = (x * x * x) @ k3
    return np.stack([p1, p2, p3], axis=-1) - rhs


def newton_batch(k3: np.ndarray, rhs: np.ndarray, starts: np.ndarray, iterations: int = 60):
    """Damped Newton on sum_i K_i x_i^j = rhs_j (j=1,2,3), vectorized.

    ``rhs`` has shape (B, 3) and ``starts`` shape (S, 3); returns the final
    iterates with shape (B, S, 3) and their max-norm residuals (B, S).
    """
    b = rhs.shape[0]
    x = np.broadcast_to(starts, (b,) + starts.shape).copy()
    r = rhs[:, None, :]
    res = _residual_float(k3, r, x)
    nrm = np.abs(res).max(axis=-1)
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            jac = np.stack([k3 * np.ones_like(x), 2 * k3 * x, 3 * k3 * x * x], axis=-2)
            try:
                step = np.linalg.solve(jac, res[..., None])[..., 0]
            except np.linalg.LinAlgError:
                det = np.linalg.det(jac)
                ok = np.abs(det) > 1e-300
                step = np.zeros_like(x)
                step[ok] = np.linalg.solve(jac[ok], res[ok][..., None])[..., 0]
            step = np.nan_to_num(step, nan=0.0, posinf=0.0, neginf=0.0)
            t = np.ones(x.shape[:-1])
            new_x = x - step
            new_res = _residual_float(k3, r, new_x)
            new_nrm = np.abs(new_res).max(axis=-1)
            for _ in range(8):
                worse = ~(new_nrm < nrm) & (nrm > 1e-15)
                if not worse.any():
                    break
                t = np.where(worse, t / 2, t)
                new_x = x - t[..., None] * step
                new_res = _residual_float(k3, r, new_x)
                new_nrm = np.abs(new_res).max(axis=-1)
            x, res, nrm = new_x, new_res, np.nan_to_num(new_nrm, nan=np.inf)
            if (nrm < 1e-14).all():
                break
    return x, nrm


def polish(k, d4, tau0_value, guess, config: NewtonConfig):
    """Newton refinement at ``config.precision_bits``; returns (triple, residual)."""
    with mpmath.workprec(config.precision_bits):
        mpf = mpmath.mpf
        kk = [mpf(int(v)) for v in k]
        t0 = mpf(tau0_value.numerator) / tau0_value.denominator if isinstance(tau0_value, Fraction) else mpf(tau0_value)
        d4m = _to_mpf(d4)
        rhs = [t0**j - kk[3] * d4m**j for j in (1, 2, 3)]
        x = [mpf(float(g)) for g in guess]

        def resid(x):
            return [sum(kk[i] * x[i] ** j for i in range(3)) - rhs[j - 1] for j in (1, 2, 3)]

        res = resid(x)
        for _ in range(config.polish_iterations):
            if max(abs(v) for v in res) <= config.tolerance:
                break
            jac = mpmath.matrix([[j * kk[i] * x[i] ** (j - 1) for i in range(3)] for j in (1, 2, 3)])
            try:
                step = mpmath.lu_solve(jac, mpmath.matrix(res))
            except ZeroDivisionError:
                break
            x = [x[i] - step[i] for i in range(3)]
            res = resid(x)
        return tuple(x), max(abs(v) for v in res)


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, QuadExt):
        return v.to_mpf()
    if isinstance(v, int):
        return mpmath.mpf(v)
    return mpmath.mpf(v)


def solve_s4_numeric(k, d4, tau0_value, config: NewtonConfig | None = None) -> list[tuple]:
    """All numerically found (d_1, d_2, d_3) with sum_{i<=4} K_i d_i^j = tau0^j, j=1..3.

    Multi-start damped Newton from a Halton grid over [-1, 1)^3 in float,
    then refinement at ``precision_bits``.  Triples with residual above
    ``tolerance`` are dropped and near-duplicates merged.
    """
    config = config or NewtonConfig()
    k = tuple(int(v) for v in k)
    if len(k) != 4 or sum(k) != 1:
        raise ValueError("need four K values summing to 1")
    t0 = float(tau0_value)
    d4f = float(d4)
    k3 = np.array(k[:3], dtype=float)
    rhs = np.array([[t0**j - k[3] * d4f**j for j in (1, 2, 3)]])
    x, nrm = newton_batch(k3, rhs, newton_starts(config.starts), config.float_iterations)
    return _polish_unique(k, d4, tau0_value, x[0][nrm[0] < 1e-8], config)


def _polish_unique(k, d4, tau0_value, guesses, config):
    found: list[tuple] = []
    with mpmath.workprec(config.precision_bits):
        for g in guesses:
            if any(max(abs(float(a) - b) for a, b in zip(t, g)) < 1e-7 for t in found):
                continue
            trip, res = polish(k, d4, tau0_value, g, config)
            if res > config.tolerance:
                continue
            if any(max(abs(a - b) for a, b in zip(t, trip)) < config.dedup_radius for t in found):
                continue
            found.append(trip)
    found.sort(key=lambda t: tuple(float(v) for v in t))
    return found


def monotone_k_property(d: DistanceSet) -> bool:
    """Whether |K| at the distance farthest from tau0 is below |K| at the next one.

    Requires all distances on one side of tau0.
    """
    if d.s < 2:
        raise ValueError("monotone property needs s >= 2")
    t0 = tau0(d.space)
    below = all(x < t0 for x in d.distances)
    above = all(x > t0 for x in d.distances)
    if not (below or above):
        raise ValueError("distances straddle tau0")
    ks = k_values(d.distances, t0)
    if below:
        far, nxt = ks[0], ks[1]
    else:
        far, nxt = ks[-1], ks[-2]
    return abs(far) < abs(nxt)
