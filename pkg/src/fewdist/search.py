"""Maximize the combined bound over all admissible distance sets.

For a space M and s the result is

    max( max_{D admissible} B(D),  2 N(M, s) - 1 )

where D is admissible when every K_i is an integer of magnitude at most the
LRS ceiling.  Finite spaces enumerate all s-subsets of the distance domain.
On the sphere the K vector is enumerated and the largest distance d_s runs
over the grid t / grid_steps in (0, 1); the remaining distances come from the
closed form (s = 3) or from Newton's method (s = 4).

Work is split into items (one K vector, or one leading distance for finite
spaces) that are evaluated independently and merged by max with a
lexicographic tie-break, so results do not depend on ``parallel_width``.

Inside an item a candidate is skipped once it provably cannot beat the
running maximum: either its harmonic bound is already too small, or a dual
vector found earlier in the item still certifies a small enough LP bound.
``emit_all_candidates`` turns the skipping off.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import linprog

from .bounds import (
    DEFAULT_RADIUS,
    EXACT,
    FLOAT_CERTIFIED,
    BoundReport,
    _monomial_form,
    _worst_on_boxes,
    absolute_bound,
    certify_numeric,
    combined_bound,
    default_truncation,
    harmonic_bound,
    harmonic_bound_numeric,
    lp_bound_dual,
    mpf_to_fraction,
)
from .exactmath import QuadExt, floor_scalar, qcmp, scalar_str
from .lrs import (
    KVector,
    NewtonConfig,
    _polish_unique,
    k_values,
    k_vector,
    lrs_ceiling,
    n_of,
    newton_batch,
    newton_starts,
    solve_s3,
)
from .spaces import DistanceSet, Space, distance_domain, zonal_monomial_coeffs

log = logging.getLogger(__name__)

GRID_DEFAULT = {3: 2000, 4: 400}
POOL_SIZE = 48


@dataclass(frozen=True)
class SearchConfig:
    lp_truncation: int | None = None
    grid_steps: int | None = None
    precision_bits: int = 256
    residual_tolerance: float = 1e-30
    parallel_width: int = 1
    emit_all_candidates: bool = False
    refine_fallback: bool = True
    newton_starts: int = 64
    k_filter: tuple | None = None  # restrict the sphere search to these K vectors

    def grid_for(self, s: int) -> int:
        g = self.grid_steps if self.grid_steps is not None else GRID_DEFAULT.get(s, 2000)
        if g < 2:
            raise ValueError("grid_steps must be at least 2")
        return g

    def to_dict(self) -> dict:
        out = asdict(self)
        out["k_filter"] = [list(k) for k in self.k_filter] if self.k_filter else None
        return out


@dataclass
class Candidate:
    distance_set: DistanceSet
    k_vector: KVector
    report: BoundReport

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out["K"] = [scalar_str(v) if not _is_num(v) else mpmath.nstr(v, 20) for v in self.k_vector.values]
        out["admissible"] = self.k_vector.admissible
        return out


def _is_num(v) -> bool:
    return not isinstance(v, (int, Fraction, QuadExt))


@dataclass
class SearchResult:
    space: Space
    s: int
    upper_bound: int
    fallback_value: int
    best_candidate: Candidate | None
    candidates_examined: int
    rigor: str
    config: SearchConfig
    refined_fallback: int | None = None
    candidates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "space": str(self.space),
            "s": self.s,
            "upper_bound": self.upper_bound,
            "fallback": self.fallback_value,
            "refined_fallback": self.refined_fallback,
            "best_candidate": self.best_candidate.to_dict() if self.best_candidate else None,
            "examined": self.candidates_examined,
            "rigor": self.rigor,
            "config": self.config.to_dict(),
        }


# ---------------------------------------------------------------------------
# per-item bookkeeping


def _d_key(ds):
    return functools.cmp_to_key(_cmp_tuple)(tuple(ds))


def _cmp_tuple(a, b) -> int:
    for x, y in zip(a, b):
        c = qcmp(x, y)
        if c:
            return c
    return len(a) - len(b)


class _Pool:
    """Dual vectors seen so far, reused as bounds for nearby distance sets."""

    def __init__(self, space: Space):
        self.space = space
        self.items: list[tuple] = []  # (f, sum_f, exact monomials, float monomials)

    def _entry(self, f):
        f = tuple(max(Fraction(0), _as_fraction(v)) for v in f)
        total = sum(f)
        if total == 0:
            return None
        mono = _monomial_form(self.space, f)
        return f, total, mono, np.array([float(c) for c in mono])

    def add(self, f):
        entry = self._entry(f)
        if entry is not None:
            self.items.insert(0, entry)
            del self.items[POOL_SIZE:]

    def _float_ok(self, entries, distances, target: int) -> np.ndarray:
        xs = np.array([float(d) for d in distances])
        width = max(len(e[3]) for e in entries)
        mono = np.zeros((width, len(entries)))
        for j, e in enumerate(entries):
            mono[: len(e[3]), j] = e[3]
        worst = np.polynomial.polynomial.polyval(xs, mono).max(axis=1)
        totals = np.array([float(e[1]) for e in entries])
        with np.errstate(divide="ignore", invalid="ignore"):
            est = 1 + totals / -worst
        return (worst < 0) & (est < target + 1 - 1e-9)

    def _proves(self, entry, distances, target: int, exact: bool, radius) -> bool:
        f, total, mono, _ = entry
        if exact:
            worst_q = max(_horner(mono, d) for d in distances)
        else:
            worst_q = _worst_on_boxes(self.space, distances, f, radius)
        return worst_q < 0 and floor_scalar(1 + total / -worst_q) <= target

    def proves_at_most(self, distances, target: int, exact: bool = True, radius=None) -> bool:
        """True if some stored vector shows floor(L(D)) <= target."""
        if not self.items:
            return False
        for idx in np.flatnonzero(self._float_ok(self.items, distances, target))[:4]:
            if self._proves(self.items[idx], distances, target, exact, radius):
                self.items.insert(0, self.items.pop(idx))
                return True
        return False

    def try_vector(self, f, distances, target: int, exact: bool = True, radius=None) -> bool:
        """Check a fresh vector; it joins the pool when it succeeds."""
        entry = self._entry(f)
        if entry is None or not self._float_ok([entry], distances, target)[0]:
            return False
        if not self._proves(entry, distances, target, exact, radius):
            return False
        self.items.insert(0, entry)
        del self.items[POOL_SIZE:]
        return True


@functools.lru_cache(maxsize=None)
def _float_monomials(space: Space, m: int) -> np.ndarray:
    """Column k - 1 holds the monomial coefficients of Phi_k, k = 1..m."""
    out = np.zeros((m + 1, m))
    for k in range(1, m + 1):
        c = zonal_monomial_coeffs(space, k)
        out[: len(c), k - 1] = [float(v) for v in c]
    return out


def float_dual(space: Space, xs, m: int):
    """Floating-point solution of the dual LP: (1 + sum f, f) or None.

    Only used to propose dual vectors; anything that matters is re-checked
    exactly or in interval arithmetic.
    """
    table = np.polynomial.polynomial.polyval(np.asarray(xs, dtype=float), _float_monomials(space, m))
    res = linprog(
        np.ones(m), A_ub=table.T, b_ub=-np.ones(len(xs)), bounds=(0, None), method="highs"
    )
    if res.status != 0:
        return None
    return 1 + res.fun, res.x


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, QuadExt) and v.b == 0:
        return v.a
    return Fraction(float(v)).limit_denominator(10**12)


@dataclass
class _ItemResult:
    best: Candidate | None = None
    best_value: int = 0
    examined: int = 0
    candidates: list = field(default_factory=list)


class _Tracker:
    def __init__(self, space: Space, threshold: int, emit_all: bool):
        self.space = space
        self.threshold = threshold
        self.emit_all = emit_all
        self.pool = _Pool(space)
        self.out = _ItemResult()

    def offer(self, cand: Candidate):
        if self.emit_all:
            self.out.candidates.append(cand)
        v = cand.report.combined
        if v > self.threshold or (
            v == self.threshold and self.out.best is not None and _better(cand, self.out.best)
        ):
            self.threshold = v
            self.out.best = cand
            self.out.best_value = v


def _better(a: Candidate, b: Candidate) -> bool:
    """Ranking among candidates: larger bound, then tighter real value, then smaller D."""
    ra, rb = a.report, b.report
    if ra.combined != rb.combined:
        return ra.combined > rb.combined
    c = qcmp(ra.value, rb.value)
    if c:
        return c < 0
    return _cmp_tuple(a.distance_set.distances, b.distance_set.distances) < 0


def _screen(tracker: _Tracker, distances, h: int, m: int, exact: bool) -> bool:
    """True when ``distances`` provably cannot displace the incumbent.

    Skipping needs floor(B(D)) < T, or floor(B(D)) <= T together with a
    real-valued bound that loses the tie-break.  The floor claims are backed
    by a dual vector checked exactly (or on interval boxes); only the
    tie-break comparison leans on the floating-point LP value.
    """
    if tracker.emit_all:
        return False
    t = tracker.threshold
    if h < t:
        return True
    radius = None if exact else DEFAULT_RADIUS
    pts = distances if exact else tuple(mpf_to_fraction(x) for x in distances)
    if tracker.pool.proves_at_most(pts, t - 1, exact, radius):
        return True
    fd = float_dual(tracker.space, [float(x) for x in distances], m)
    best = tracker.out.best
    if h == t and (fd is None or fd[0] > h + 1e-4):
        # The LP is infeasible or comfortably above H, so the combined bound
        # and the real value are both exactly h; only the tie-break is left.
        if best is None:
            return True
        c = qcmp(h, best.report.value)
        return c > 0 or (c == 0 and _cmp_tuple(distances, best.distance_set.distances) >= 0)
    if fd is None:
        return False
    raw = min(h, fd[0])
    if raw < t - 1e-6:
        target = t - 1
    elif raw < t + 1 - 1e-6 and (best is None or raw > float(best.report.value) + 1e-9):
        target = t
    else:
        return False
    return tracker.pool.try_vector(fd[1], pts, target, exact, radius)


def _evaluate_exact(d: DistanceSet, m: int, tracker: _Tracker) -> BoundReport | None:
    """Full report for ``d`` unless it provably cannot displace the incumbent."""
    h, exp = harmonic_bound(d)
    if _screen(tracker, d.distances, h, m, True):
        return None
    lp, cert = lp_bound_dual(d, m)
    if cert is not None:
        tracker.pool.add(cert.f)
    combined = h if lp is None else min(h, lp)
    return BoundReport(d.space, d.distances, absolute_bound(d.space, d.s), h, lp, combined, cert, exp, EXACT, m)


def _merge(space: Space, s: int, fallback: int, items: list[_ItemResult], config, rigor, refined=None):
    best = None
    for it in items:
        if it.best is not None and (best is None or _better(it.best, best)):
            best = it.best
    examined = sum(it.examined for it in items)
    top = best.report.combined if best else 0
    floor = fallback if refined is None else refined
    cands = [c for it in items for c in it.candidates]
    return SearchResult(
        space, s, max(top, floor), fallback, best, examined, rigor, config, refined, cands
    )


def _run_items(fn, payloads, width: int):
    if width <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=width) as ex:
        return list(ex.map(fn, payloads))


# ---------------------------------------------------------------------------
# finite spaces


def _finite_item(payload) -> _ItemResult:
    """Admissible subsets of one group: best B(D)."""
    space, s, combos, m, emit_all = payload
    tracker = _Tracker(space, -1, emit_all)
    for combo in combos:
        d = DistanceSet(space, tuple(Fraction(x) for x in combo))
        kv = k_vector(d)
        if not kv.admissible:
            continue
        tracker.out.examined += 1
        rep = _evaluate_exact(d, m, tracker)
        if rep is not None:
            tracker.offer(Candidate(d, kv, rep))
    return tracker.out


def _refine_item(payload) -> int:
    """Largest min(cap, B(D)) over the non-admissible subsets of one group."""
    space, s, combos, m, cap, floor = payload
    pool = _Pool(space)
    best = floor
    for combo in combos:
        d = DistanceSet(space, tuple(Fraction(x) for x in combo))
        if k_vector(d).admissible:
            continue
        h, _ = harmonic_bound(d)
        if min(h, cap) <= best or pool.proves_at_most(d.distances, best):
            continue
        lp, cert = lp_bound_dual(d, m)
        if cert is not None:
            pool.add(cert.f)
        best = max(best, min(cap, h if lp is None else min(h, lp)))
        if best >= cap:
            break
    return best


def search_finite(space: Space, s: int, config: SearchConfig | None = None) -> SearchResult:
    """Exhaustive search over all s-subsets of the distance domain.

    With ``refine_fallback`` (default) the 2N - 1 term is replaced by the
    maximum of min(2N - 1, B(D)) over non-admissible D.  This is still an
    upper bound: a set X with |X| >= 2N has admissible D(X), and otherwise
    |X| <= min(2N - 1, B(D(X))).
    """
    config = config or SearchConfig()
    if not space.is_finite:
        raise ValueError("search_finite needs a Hamming or Johnson space")
    values = distance_domain(space).values()
    if not 2 <= s <= len(values):
        raise ValueError(f"s must lie in 2..{len(values)}")
    m = max(default_truncation(space, s, config.lp_truncation), s)
    fallback = 2 * n_of(space, s) - 1
    groups = [
        list(g) for _, g in itertools.groupby(itertools.combinations(values, s), key=lambda c: c[0])
    ]
    payloads = [(space, s, g, m, config.emit_all_candidates) for g in groups]
    items = _run_items(_finite_item, payloads, config.parallel_width)
    refined = None
    if config.refine_fallback:
        top = max((it.best_value for it in items if it.best is not None), default=0)
        floor = min(top, fallback)
        refine_payloads = [(space, s, g, m, fallback, floor) for g in groups]
        refined = max(_run_items(_refine_item, refine_payloads, config.parallel_width))
    return _merge(space, s, fallback, items, config, EXACT, refined)


# ---------------------------------------------------------------------------
# sphere, s = 3


def sphere_k_vectors(s: int, ceiling: int) -> list[tuple]:
    """Integer K vectors for d_1 < ... < d_s < 1.

    Each factor of K_i is positive for j < i and negative for j > i, so the
    sign of K_i is (-1)^(s-i); together with sum K = 1 and the ceiling this
    leaves a finite list.
    """
    ranges = []
    for i in range(1, s + 1):
        if (s - i) % 2 == 0:
            ranges.append(range(1, ceiling + 1))
        else:
            ranges.append(range(-ceiling, 0))
    return [k for k in itertools.product(*ranges) if sum(k) == 1]


def _sphere_s3_item(payload) -> _ItemResult:
    n, k, grid, m, fallback, emit_all = payload
    space = Space.sphere(n)
    k1, k2, k3 = k
    tracker = _Tracker(space, fallback - 1, emit_all)
    ts = np.arange(1, grid) / grid
    r = math.sqrt(-k1 * k2 * k3)
    s12 = k1 + k2
    if s12 == 0:
        return tracker.out
    with np.errstate(all="ignore"):
        # root carrying K_1 with either sign of the square root
        for sign in (-1, 1):
            lo = (k1 - ts * k1 * k3 + sign * (ts - 1) * r) / (k1 * s12)
            mid = (k2 - ts * k2 * k3 - sign * (ts - 1) * r) / (k2 * s12)
            ok = (lo >= -1 - 1e-9) & (lo < mid + 1e-9) & (mid < ts + 1e-9)
            for t in np.nonzero(ok)[0]:
                d3 = Fraction(int(t) + 1, grid)
                kk = (k1, k2, k3) if sign == -1 else (k2, k1, k3)
                pair = solve_s3(kk, d3, 1)
                if not (pair[0] >= -1 and pair[0] < pair[1] < d3):
                    continue
                d = DistanceSet(space, (pair[0], pair[1], d3))
                kv = k_vector(d)
                if not kv.admissible or kv.as_ints() != tuple(k):
                    continue
                tracker.out.examined += 1
                rep = _evaluate_exact(d, m, tracker)
                if rep is not None:
                    tracker.offer(Candidate(d, kv, rep))
    return tracker.out


def search_sphere_s3(n: int, config: SearchConfig | None = None) -> SearchResult:
    """Sphere S^(n-1), s = 3: enumerate K, grid d_3 over (0, 1), solve for d_1, d_2.

    d_3 <= 0 needs no search: such sets have at most 2n + 1 points, which is
    below the 2N - 1 fallback.
    """
    config = config or SearchConfig()
    if n < 3:
        raise ValueError("n must be at least 3")
    space = Space.sphere(n)
    nval = n_of(space, 3)
    fallback = 2 * nval - 1
    grid = config.grid_for(3)
    m = max(default_truncation(space, 3, config.lp_truncation), 3)
    ks = sphere_k_vectors(3, lrs_ceiling(nval))
    if config.k_filter:
        ks = [k for k in ks if k in {tuple(x) for x in config.k_filter}]
    payloads = [(n, k, grid, m, fallback, config.emit_all_candidates) for k in ks]
    items = _run_items(_sphere_s3_item, payloads, config.parallel_width)
    return _merge(space, 3, fallback, items, config, "grid-numeric")


# ---------------------------------------------------------------------------
# sphere, s = 4


def _sphere_s4_item(payload) -> _ItemResult:
    n, k, grid, m, fallback, emit_all, ncfg = payload
    space = Space.sphere(n)
    tracker = _Tracker(space, fallback - 1, emit_all)
    ts = np.arange(1, grid) / grid
    k3 = np.array(k[:3], dtype=float)
    rhs = np.stack([1.0 - k[3] * ts**j for j in (1, 2, 3)], axis=-1)
    x, nrm = newton_batch(k3, rhs, newton_starts(ncfg.starts), ncfg.float_iterations)
    ceiling_ok = True
    for ti in range(len(ts)):
        good = x[ti][nrm[ti] < 1e-8]
        if not len(good):
            continue
        d4f = ts[ti]
        good = good[
            (good[:, 0] >= -1 - 1e-9)
            & (good[:, 0] < good[:, 1] + 1e-9)
            & (good[:, 1] < good[:, 2] + 1e-9)
            & (good[:, 2] < d4f + 1e-9)
        ]
        if not len(good):
            continue
        d4 = Fraction(ti + 1, grid)
        with mpmath.workprec(ncfg.precision_bits):
            for trip in _polish_unique(k, d4, Fraction(1), good, ncfg):
                d4m = mpmath.mpf(d4.numerator) / d4.denominator
                ds = tuple(trip) + (d4m,)
                slack = mpmath.mpf(ncfg.tolerance) * 10**6
                if not (ds[0] >= -1 - slack and ds[0] < ds[1] < ds[2] < ds[3]):
                    continue
                kv_num = k_values(ds, mpmath.mpf(1))
                if any(abs(a - b) > mpmath.mpf("1e-15") for a, b in zip(kv_num, k)):
                    continue
                tracker.out.examined += 1
                rep = _evaluate_numeric(space, ds, m, tracker)
                if rep is not None:
                    kv = KVector(tuple(Fraction(v) for v in k), True, None, ceiling_ok)
                    tracker.offer(Candidate(_NumericDistances(space, ds), kv, rep))
    return tracker.out


@dataclass(frozen=True)
class _NumericDistances:
    """Stand-in for DistanceSet when the distances are only known numerically."""

    space: Space
    distances: tuple

    @property
    def s(self) -> int:
        return len(self.distances)


def _evaluate_numeric(space, ds, m, tracker: _Tracker):
    h, exp = harmonic_bound_numeric(space, ds)
    if _screen(tracker, ds, h, m, False):
        return None
    lp, cert = certify_numeric(space, ds, m, DEFAULT_RADIUS)
    if cert is not None:
        tracker.pool.add(cert.f)
    combined = h if lp is None else min(h, lp)
    return BoundReport(space, tuple(ds), absolute_bound(space, len(ds)), h, lp, combined, cert, exp, FLOAT_CERTIFIED, m)


def search_sphere_s4(n: int, config: SearchConfig | None = None) -> SearchResult:
    """Sphere S^(n-1), s = 4: enumerate K, grid d_4, Newton for (d_1, d_2, d_3)."""
    config = config or SearchConfig()
    if n < 4:
        raise ValueError("n must be at least 4")
    space = Space.sphere(n)
    nval = n_of(space, 4)
    fallback = 2 * nval - 1
    grid = config.grid_for(4)
    m = max(default_truncation(space, 4, config.lp_truncation), 4)
    ncfg = NewtonConfig(
        starts=config.newton_starts,
        precision_bits=config.precision_bits,
        tolerance=config.residual_tolerance,
    )
    ks = sphere_k_vectors(4, lrs_ceiling(nval))
    if config.k_filter:
        ks = [k for k in ks if k in {tuple(x) for x in config.k_filter}]
    payloads = [(n, k, grid, m, fallback, config.emit_all_candidates, ncfg) for k in ks]
    items = _run_items(_sphere_s4_item, payloads, config.parallel_width)
    return _merge(space, 4, fallback, items, config, "grid-numeric")


def search(space: Space, s: int, config: SearchConfig | None = None) -> SearchResult:
    if space.is_finite:
        return search_finite(space, s, config)
    if s == 3:
        return search_sphere_s3(space.n, config)
    if s == 4:
        return search_sphere_s4(space.n, config)
    raise ValueError("sphere searches cover s = 3 and s = 4 only")


def bound_for_known(d: DistanceSet, config: SearchConfig | None = None) -> Candidate:
    """Admissibility and the full bound report for one distance set."""
    config = config or SearchConfig()
    kv = k_vector(d) if d.s >= 2 else KVector((Fraction(1),), True, None, True)
    return Candidate(d, kv, combined_bound(d, config.lp_truncation))
