"""Exact scalars and an exact simplex solver.

Everything here works over ``fractions.Fraction`` or over a real quadratic
field Q(sqrt(m)) represented by :class:`QuadExt`.  No floating point is used
for any decision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

__all__ = [
    "QuadExt",
    "DomainError",
    "SingularMatrixError",
    "squarefree_split",
    "sqrt_exact",
    "to_scalar",
    "scalar_str",
    "parse_scalar",
    "qadd",
    "qmul",
    "qdiv",
    "qcmp",
    "is_integer_scalar",
    "floor_scalar",
    "ceil_scalar",
    "solve_linear",
    "LpProblem",
    "LpSolution",
    "lp_solve",
]


class DomainError(ValueError):
    """Raised for arithmetic outside the supported field (mixed radicands etc.)."""


class SingularMatrixError(ArithmeticError):
    pass


def squarefree_split(r: int) -> tuple[int, int]:
    """Write ``r = c*c*m`` with ``m`` square-free and return ``(c, m)``."""
    if r < 0:
        raise DomainError(f"negative radicand {r}")
    if r == 0:
        return 0, 0
    c, m = 1, 1
    rest = r
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        c *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    m *= rest
    return c, m


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QuadExt:
    """Element ``a + b*sqrt(m)`` of a real quadratic field.

    ``m`` is square-free and ``m > 1``; an element with ``b == 0`` is a plain
    rational and mixes freely with any radicand.
    """

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b=0, m: int = 0):
        a = _frac(a)
        b = _frac(b)
        if b == 0 or m == 0:
            if b != 0:
                raise DomainError("nonzero b with radicand 0")
            m = 0
        elif m == 1:
            a, b, m = a + b, Fraction(0), 0
        self.a = a
        self.b = b
        self.m = m

    @classmethod
    def sqrt(cls, r, scale=1) -> "QuadExt":
        """``scale * sqrt(r)`` for a nonnegative rational ``r``."""
        r = _frac(r)
        if r < 0:
            raise DomainError(f"negative radicand {r}")
        # sqrt(p/q) = sqrt(p*q)/q
        c, m = squarefree_split(r.numerator * r.denominator)
        coef = _frac(scale) * Fraction(c, r.denominator)
        if m <= 1:
            return cls(coef * m, 0, 0) if m == 1 else cls(0)
        return cls(0, coef, m)

    # -- helpers --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other)
        return None

    def _common_m(self, other: "QuadExt") -> int:
        if self.m == other.m or other.m == 0:
            return self.m
        if self.m == 0:
            return other.m
        raise DomainError(f"mixed radicands {self.m} and {other.m}")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b != 0:
            raise DomainError(f"{self} is irrational")
        return self.a

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.m)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.m

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        lhs = a * a
        rhs = b * b * self.m
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self._common_m(o)
        return QuadExt(self.a + o.a, self.b + o.b, m)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.m)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self._common_m(o)
        return QuadExt(self.a - o.a, self.b - o.b, m)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.m)
        if not isinstance(other, QuadExt):
            return NotImplemented
        m = self._common_m(other)
        a = self.a * other.a + self.b * other.b * m
        b = self.a * other.b + self.b * other.a
        return QuadExt(a, b, m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            return QuadExt(self.a / other, self.b / other, self.m)
        if not isinstance(other, QuadExt):
            return NotImplemented
        if other.b == 0:
            return self / other.a
        nrm = other.norm()
        if nrm == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return (self * other.conjugate()) / nrm

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = QuadExt(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- ordering -------------------------------------------------------
    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadExt with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.m == o.m)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.m)

    def to_mpf(self, ctx=None):
        import mpmath

        ctx = ctx or mpmath.mp
        a = ctx.mpf(self.a.numerator) / self.a.denominator
        if self.b == 0:
            return a
        b = ctx.mpf(self.b.numerator) / self.b.denominator
        return a + b * ctx.sqrt(self.m)

    def __repr__(self):
        return f"QuadExt({scalar_str(self)!r})"

    def __str__(self):
        return scalar_str(self)


def sqrt_exact(r) -> Fraction | QuadExt:
    """Square root of a nonnegative rational as an exact scalar."""
    return to_scalar(QuadExt.sqrt(r))


def to_scalar(x):
    """Demote a rational-valued :class:`QuadExt` to ``Fraction``."""
    if isinstance(x, QuadExt):
        return x.a if x.b == 0 else x
    if isinstance(x, int):
        return Fraction(x)
    return x


def is_integer_scalar(x) -> bool:
    if isinstance(x, QuadExt):
        return x.b == 0 and x.a.denominator == 1
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return False


def floor_scalar(x) -> int:
    """Exact floor of a rational or quadratic-field scalar."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(math.floor(x))
    if isinstance(x, QuadExt):
        if x.b == 0:
            return int(math.floor(x.a))
        guess = math.floor(float(x))
        while x < guess:
            guess -= 1
        while x >= guess + 1:
            guess += 1
        return guess
    raise TypeError(f"not an exact scalar: {x!r}")


def ceil_scalar(x) -> int:
    return -floor_scalar(-x)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar_str(x) -> str:
    """Exact text form: ``p/q`` or ``a+b√m`` (``b√m`` when ``a == 0``)."""
    if isinstance(x, QuadExt):
        if x.b == 0:
            return _fmt_frac(x.a)
        bpart = _fmt_frac(x.b) + f"√{x.m}"
        if x.a == 0:
            return bpart
        sep = "" if x.b < 0 else "+"
        return f"{_fmt_frac(x.a)}{sep}{bpart}"
    if isinstance(x, (int, Fraction)):
        return _fmt_frac(Fraction(x))
    raise TypeError(f"not an exact scalar: {x!r}")


_QUAD_RE = re.compile(
    r"^\s*(?:(?P<a>[+-]?\d+(?:/\d+)?)\s*)?"
    r"(?:(?P<bs>[+-])?\s*(?P<b>\d+(?:/\d+)?)?\s*\*?\s*(?:√|sqrt)\(?(?P<m>\d+)\)?)?\s*$"
)


def parse_scalar(text: str):
    """Parse ``p/q``, ``a+b√m`` or ``a+b*sqrt(m)`` into an exact scalar."""
    t = text.strip().replace("−", "-")
    if not t:
        raise ValueError("empty scalar")
    if "√" not in t and "sqrt" not in t:
        return Fraction(t)
    mt = _QUAD_RE.match(t)
    if not mt or mt.group("m") is None:
        raise ValueError(f"cannot parse scalar {text!r}")
    a = Fraction(mt.group("a")) if mt.group("a") else Fraction(0)
    b = Fraction(mt.group("b")) if mt.group("b") else Fraction(1)
    if mt.group("a") and mt.group("bs") is None and mt.group("b") is None:
        # "3√7": the leading number is the coefficient of the root
        a, b = Fraction(0), a
    if mt.group("bs") == "-":
        b = -b
    elif mt.group("a") and mt.group("bs") is None and mt.group("b") is not None:
        raise ValueError(f"cannot parse scalar {text!r}")
    return to_scalar(a + QuadExt.sqrt(int(mt.group("m")), b))


def qadd(x, y):
    return to_scalar(x + y)


def qmul(x, y):
    return to_scalar(x * y)


def qdiv(x, y):
    if y == 0:
        raise ZeroDivisionError("division by zero")
    return to_scalar(x / y)


def qcmp(x, y) -> int:
    """Return -1, 0 or 1 by the real ordering.

    Elements of different quadratic fields are never equal unless both are
    rational, so they are separated numerically with growing precision.
    """
    if isinstance(x, QuadExt) or isinstance(y, QuadExt):
        qx = QuadExt(0)._coerce(x)
        qy = QuadExt(0)._coerce(y)
        if qx.b != 0 and qy.b != 0 and qx.m != qy.m:
            import mpmath

            prec = 128
            while True:
                with mpmath.workprec(prec):
                    diff = qx.to_mpf() - qy.to_mpf()
                    if abs(diff) > mpmath.mpf(2) ** (16 - prec):
                        return 1 if diff > 0 else -1
                prec *= 2
        return qx._cmp(qy)
    return (x > y) - (x < y)


# ---------------------------------------------------------------------------
# linear algebra


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """Solve ``matrix @ x = rhs`` exactly by Gaussian elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("solve_linear needs a square system")
    a = [[Fraction(v) if isinstance(v, int) else v for v in list(row) + [rhs[i]]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        row = a[col]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if f == 0:
                continue
            f = f / p
            ar = a[r]
            for c in range(col, n + 1):
                if row[c] != 0:
                    ar[c] = ar[c] - f * row[c]
    return [to_scalar(a[i][n] / a[i][i]) for i in range(n)]


# ---------------------------------------------------------------------------
# simplex


@dataclass(frozen=True)
class LpProblem:
    """``maximize/minimize c.x`` subject to ``rows[i].x (rel) rhs[i]``.

    Variables are nonnegative unless listed in ``free``.
    """

    objective: tuple
    rows: tuple
    relations: tuple
    rhs: tuple
    maximize: bool = True
    free: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        object.__setattr__(self, "free", frozenset(self.free))
        nv = len(self.objective)
        if any(len(r) != nv for r in self.rows):
            raise ValueError("constraint rows must match the objective length")
        if len(self.rows) != len(self.relations) or len(self.rows) != len(self.rhs):
            raise ValueError("rows, relations and rhs differ in length")
        bad = set(self.relations) - {"<=", ">=", "="}
        if bad:
            raise ValueError(f"unknown relations {bad}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: object = None
    x: list = field(default_factory=list)
    duals: list = field(default_factory=list)
    basis: list = field(default_factory=list)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Dense tableau with Bland's rule.  Row ``i`` holds ``x_B[i] = rhs``."""

    def __init__(self, a, b, basis):
        # ints would turn into floats under true division
        self.a = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in a]
        self.b = [Fraction(v) if isinstance(v, int) else v for v in b]
        self.basis = basis
        self.pivots = 0

    def pivot(self, r, c):
        a, b = self.a, self.b
        prow = a[r]
        p = prow[c]
        ncols = len(prow)
        if p != 1:
            for j in range(ncols):
                if prow[j] != 0:
                    prow[j] = prow[j] / p
            b[r] = b[r] / p
        nz = [j for j in range(ncols) if prow[j] != 0]
        for i in range(len(a)):
            if i == r:
                continue
            f = a[i][c]
            if f == 0:
                continue
            ai = a[i]
            for j in nz:
                ai[j] = ai[j] - f * prow[j]
            b[i] = b[i] - f * b[r]
        self.basis[r] = c
        self.pivots += 1

    def optimize(self, cost, allowed):
        """Maximize ``cost.x`` over the current basis; returns status."""
        a, b = self.a, self.b
        while True:
            # reduced costs r_j = c_j - c_B B^-1 A_j
            cb = [cost[j] for j in self.basis]
            enter = None
            for j in allowed:
                if j in self.basis:
                    continue
                rc = cost[j]
                for i in range(len(a)):
                    if cb[i] != 0 and a[i][j] != 0:
                        rc = rc - cb[i] * a[i][j]
                if rc > 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            leave = None
            best = None
            for i in range(len(a)):
                if a[i][enter] > 0:
                    ratio = b[i] / a[i][enter]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        best, leave = ratio, i
            if leave is None:
                return "unbounded"
            self.pivot(leave, enter)


def lp_solve(problem: LpProblem) -> LpSolution:
    """Two-phase exact simplex with Bland's anti-cycling rule.

    Returns primal values, the optimal basis (indices into the internal
    standard-form columns) and one dual value per original constraint row.
    Dual signs follow the usual convention for the stated direction:
    for a maximization, ``<=`` rows get nonnegative duals.
    """
    nv = problem.num_vars
    sgn = 1 if problem.maximize else -1
    # column layout: split free vars, then slacks, then artificials
    col_of = []
    cost = []
    for j in range(nv):
        col_of.append(len(cost))
        cost.append(sgn * problem.objective[j])
    neg_col = {}
    for j in sorted(problem.free):
        neg_col[j] = len(cost)
        cost.append(-sgn * problem.objective[j])
    nstruct = len(cost)

    rows, rhs, flipped, kinds = [], [], [], []
    for row, rel, r in zip(problem.rows, problem.relations, problem.rhs):
        coeffs = [0] * nstruct
        for j, v in enumerate(row):
            coeffs[col_of[j]] = v
            if j in neg_col:
                coeffs[neg_col[j]] = -v
        flip = r < 0
        if flip:
            coeffs = [-v for v in coeffs]
            r = -r
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append(coeffs)
        rhs.append(r)
        flipped.append(flip)
        kinds.append(rel)

    nrows = len(rows)
    extra = []  # (row, column kind)
    for i, rel in enumerate(kinds):
        if rel == "<=":
            extra.append((i, "slack"))
        elif rel == ">=":
            extra.append((i, "surplus"))
            extra.append((i, "art"))
        else:
            extra.append((i, "art"))
    ncols = nstruct + len(extra)
    a = [[0] * ncols for _ in range(nrows)]
    for i in range(nrows):
        a[i][:nstruct] = rows[i]
    basis = [None] * nrows
    art_cols = set()
    for k, (i, kind) in enumerate(extra):
        col = nstruct + k
        a[i][col] = -1 if kind == "surplus" else 1
        if kind in ("slack", "art"):
            basis[i] = col
        if kind == "art":
            art_cols.add(col)
    full_cost = cost + [0] * len(extra)
    a0 = [row[:] for row in a]

    t = _Tableau(a, list(rhs), basis)
    all_cols = list(range(ncols))
    if art_cols:
        phase1 = [(-1 if j in art_cols else 0) for j in range(ncols)]
        t.optimize(phase1, all_cols)
        infeas = sum((t.b[i] for i in range(nrows) if t.basis[i] in art_cols), start=0)
        if infeas != 0:
            return LpSolution("infeasible", pivots=t.pivots)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for i in range(nrows):
            if t.basis[i] in art_cols:
                c = next(
                    (j for j in range(ncols) if j not in art_cols and t.a[i][j] != 0), None
                )
                if c is None:
                    continue
                t.pivot(i, c)
            keep.append(i)
        dropped = [i for i in range(nrows) if i not in keep]
        if dropped:
            t.a = [t.a[i] for i in keep]
            t.b = [t.b[i] for i in keep]
            t.basis = [t.basis[i] for i in keep]
    else:
        keep = list(range(nrows))
    allowed = [j for j in all_cols if j not in art_cols]
    status = t.optimize(full_cost, allowed)
    if status == "unbounded":
        return LpSolution("unbounded", pivots=t.pivots)

    xs = [0] * ncols
    for i, j in enumerate(t.basis):
        xs[j] = t.b[i]
    x = []
    for j in range(nv):
        v = xs[col_of[j]]
        if j in neg_col:
            v = v - xs[neg_col[j]]
        x.append(to_scalar(v))
    value = sum((problem.objective[j] * x[j] for j in range(nv)), start=0)

    # duals y with y^T B = c_B over the kept rows, in the original row space
    kept_rows = list(keep)
    bmat = [[a0[r][j] for r in kept_rows] for j in t.basis]  # B^T
    cb = [full_cost[j] for j in t.basis]
    y_kept = solve_linear(bmat, cb) if kept_rows else []
    duals = [Fraction(0)] * nrows
    for r, y in zip(kept_rows, y_kept):
        y = sgn * y
        duals[r] = to_scalar(-y if flipped[r] else y)
    return LpSolution(
        "optimal",
        value=to_scalar(value),
        x=x,
        duals=duals,
        basis=list(t.basis),
        pivots=t.pivots,
    )
