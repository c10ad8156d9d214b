"""Minimal dense univariate polynomials over an exact field."""

from __future__ import annotations

from fractions import Fraction


class Poly:
    """Coefficient list, lowest degree first, trailing zeros stripped."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.c = c

    @classmethod
    def const(cls, v) -> "Poly":
        return cls([v])

    @classmethod
    def x(cls) -> "Poly":
        return cls([Fraction(0), Fraction(1)])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.c), len(o.c))
        a = self.c + [0] * (n - len(self.c))
        b = o.c + [0] * (n - len(o.c))
        return Poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([x * other for x in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                out[i + j] = out[i + j] + x * y
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Poly):
            raise TypeError("polynomial division is not supported")
        return Poly([(Fraction(x) if isinstance(x, int) else x) / scalar for x in self.c])

    def __call__(self, x):
        acc = 0
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def __eq__(self, other):
        o = self._lift(other)
        return self.c == o.c

    def __repr__(self):
        return f"Poly({self.c!r})"

    def coeffs(self, length: int | None = None) -> list:
        c = list(self.c)
        if length is not None:
            c += [Fraction(0)] * (length - len(c))
        return c


def falling_binomial(x, j: int):
    """``x(x-1)...(x-j+1)/j!`` for a scalar or :class:`Poly` ``x``."""
    out = Fraction(1)
    for i in range(j):
        out = out * (x - i) / (i + 1)
    return out
