"""Exact univariate polynomials with rational coefficients.

Only what the closed-form registry needs: ring operations and exact
evaluation.  Coefficients are stored low degree first as ``Fraction``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Scalar = Union[int, Fraction]


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar]):
        c = [Fraction(v) for v in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c) if c else (Fraction(0),)

    @classmethod
    def const(cls, v: Scalar) -> "Poly":
        return cls([v])

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @staticmethod
    def _lift(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Rational)):
            return Poly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        """Horner evaluation; exact when ``x`` is an int or Fraction."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        kind = type(x)
        acc = kind(0)
        for c in reversed(self.coeffs):
            acc = acc * x + kind(c.numerator) / c.denominator
        return acc

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0 and self.degree >= 0:
                continue
            terms.append(f"{c}*x^{k}" if k else f"{c}")
        return "Poly(" + " + ".join(terms or ["0"]) + ")"


X = Poly([0, 1])
