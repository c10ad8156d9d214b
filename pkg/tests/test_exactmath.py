from fractions import Fraction

import pytest
from scipy.optimize import linprog

from fewdist.exactmath import (
    DomainError,
    LpProblem,
    QuadExt,
    SingularMatrixError,
    ceil_scalar,
    floor_scalar,
    lp_solve,
    parse_scalar,
    qadd,
    qcmp,
    qdiv,
    qmul,
    scalar_str,
    solve_linear,
    squarefree_split,
)
from fewdist.spaces import Space, zonal_monomial_coeffs


def rand_frac(rng, span=50):
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def rand_quad(rng, m):
    return QuadExt(rand_frac(rng), rand_frac(rng), m)


def test_examples():
    assert qcmp(QuadExt(1, 1, 2), QuadExt(2, 0, 2)) == 1
    assert qmul(QuadExt(0, 1, 3), QuadExt(0, 1, 3)) == 3
    assert qadd(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)


def test_mixed_radicands_rejected():
    with pytest.raises(DomainError):
        QuadExt(0, 1, 2) + QuadExt(0, 1, 3)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        qdiv(QuadExt(1, 1, 2), QuadExt(0, 0, 2))


def test_sqrt_reduces_radicand():
    assert squarefree_split(72) == (6, 2)
    r = QuadExt.sqrt(144)
    assert r == 12 and not isinstance(r, QuadExt) or r.b == 0
    s = QuadExt.sqrt(12)
    assert s.m == 3 and s.b == 2


def test_field_axioms(rng):
    for i in range(1000):
        if i % 2:
            x, y, z = (rand_frac(rng) for _ in range(3))
        else:
            m = rng.choice([2, 3, 5, 6, 7, 10, 11])
            x, y, z = (rand_quad(rng, m) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x and x * y == y * x
        if y != 0:
            assert (x / y) * y == x


def test_qcmp_total_order(rng):
    for _ in range(500):
        m = rng.choice([2, 3, 5])
        x, y, z = (rand_quad(rng, m) for _ in range(3))
        assert qcmp(x, y) == -qcmp(y, x)
        if qcmp(x, y) <= 0 and qcmp(y, z) <= 0:
            assert qcmp(x, z) <= 0
        assert qcmp(x, y) == (float(x) > float(y)) - (float(x) < float(y)) or abs(float(x) - float(y)) < 1e-9


def test_qcmp_across_fields():
    assert qcmp(QuadExt(0, 1, 2), QuadExt(0, 1, 3)) == -1
    assert qcmp(Fraction(3, 2), QuadExt(0, 1, 2)) == 1


def test_exact_sign_near_zero():
    # 99/70 is a close convergent of sqrt 2
    x = QuadExt(Fraction(-99, 70), 1, 2)
    assert x.sign() == -1
    assert floor_scalar(QuadExt(0, 1, 2)) == 1 and ceil_scalar(QuadExt(0, 1, 2)) == 2


@pytest.mark.parametrize("text", ["5/6", "-1/44", "1/3+2√5", "-1/2-√3", "3√7", "0"])
def test_scalar_text_roundtrip(text):
    v = parse_scalar(text)
    assert parse_scalar(scalar_str(v)) == v


def test_solve_linear_examples():
    assert solve_linear([[1, 0], [0, 1]], [Fraction(3), Fraction(4)]) == [3, 4]
    assert solve_linear([[1, 0], [1, 1]], [1, 2]) == [1, 1]
    with pytest.raises(SingularMatrixError):
        solve_linear([[1, 2], [2, 4]], [1, 2])


def test_change_of_basis_sphere8():
    sp = Space.sphere(8)
    cols = [zonal_monomial_coeffs(sp, k) + [0] * (3 - k) for k in range(4)]
    matrix = [[cols[k][i] for k in range(4)] for i in range(4)]
    target = [0, Fraction(-1, 3), 0, Fraction(4, 3)]
    assert solve_linear(matrix, target) == [0, Fraction(1, 15), 0, Fraction(112, 120)]


def test_lp_examples():
    sol = lp_solve(LpProblem([1], [[1]], ["<="], [3]))
    assert sol.status == "optimal" and sol.value == 3
    sol = lp_solve(LpProblem([1, 1], [[1, 1]], ["<="], [1]))
    assert sol.value == 1
    assert lp_solve(LpProblem([1], [[1], [1]], ["<=", ">="], [1, 2])).status == "infeasible"
    assert lp_solve(LpProblem([1, 0], [[1, -1]], ["<="], [1])).status == "unbounded"


def test_lp_free_and_equality():
    # min x + y with x free, x + y = 2, x - y >= -4
    sol = lp_solve(LpProblem([1, 1], [[1, 1], [1, -1]], ["=", ">="], [2, -4], maximize=False, free={0}))
    assert sol.value == 2
    x, y = sol.x
    assert x + y == 2 and x - y >= -4 and y >= 0


def test_bland_degenerate_beale():
    # classic instance on which the largest-coefficient rule cycles
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    rows = [
        [Fraction(1, 4), -60, Fraction(-1, 25), 9],
        [Fraction(1, 2), -90, Fraction(-1, 50), 3],
        [0, 0, 1, 0],
    ]
    sol = lp_solve(LpProblem(c, rows, ["<="] * 3, [0, 0, 1]))
    assert sol.status == "optimal" and sol.value == Fraction(1, 20)


def _random_lp(rng):
    nv, nc = rng.randint(1, 5), rng.randint(1, 5)
    a = [[Fraction(rng.randint(0, 9), rng.randint(1, 4)) for _ in range(nv)] for _ in range(nc)]
    for j in range(nv):
        a[rng.randrange(nc)][j] += 1  # every variable is capped, so the LP is bounded
    b = [Fraction(rng.randint(1, 20), rng.randint(1, 3)) for _ in range(nc)]
    c = [Fraction(rng.randint(-5, 9), rng.randint(1, 3)) for _ in range(nv)]
    return a, b, c


def test_lp_duality_and_replay(rng):
    for _ in range(100):
        a, b, c = _random_lp(rng)
        primal = lp_solve(LpProblem(c, a, ["<="] * len(a), b))
        at = [list(col) for col in zip(*a)]
        dual = lp_solve(LpProblem(b, at, [">="] * len(at), c, maximize=False))
        assert primal.status == dual.status == "optimal"
        assert primal.value == dual.value
        for row, r in zip(a, b):
            assert sum(x * v for x, v in zip(primal.x, row)) <= r
        assert all(v >= 0 for v in primal.x)
        assert sum(y * r for y, r in zip(primal.duals, b)) == primal.value
        ref = linprog([-float(v) for v in c], A_ub=[[float(v) for v in r] for r in a], b_ub=[float(v) for v in b])
        assert abs(-ref.fun - float(primal.value)) < 1e-7


def test_lp_quadratic_field():
    r2 = QuadExt(0, 1, 2)
    sol = lp_solve(LpProblem([1, 1], [[1, r2], [r2, 1]], ["<=", "<="], [1, 1]))
    assert sol.status == "optimal"
    assert sol.value == 2 / (1 + r2)
