"""Truncated Taylor jets in four complex variables, total order <= 4.

A :class:`Jet4` stores the 70 Taylor coefficients ``d^a f(p) / a!`` of a
function at a point ``p``, indexed by the multi-indices ``a = (i1, i2, j1, j2)``
of total degree at most 4.  The first two slots are the holomorphic
variables ``z1, z2``; the last two are the antiholomorphic slots ``c1, c2``
that stand in for ``conj(z1), conj(z2)`` once the kernel is polarized.

The truncated product is the only hot loop.  It is dispatched to the
compiled ``_jetcore`` extension when that was built, and to a vectorized
numpy implementation otherwise.  Set ``G2BERGMAN_PURE_PYTHON=1`` to force
the fallback.
"""
from __future__ import annotations

import cmath
import itertools
import math
import os
from typing import Iterator, Sequence

import numpy as np

NVARS = 4
MAX_ORDER = 4


def _multi_indices() -> list[tuple[int, int, int, int]]:
    out = []
    for total in range(MAX_ORDER + 1):
        level = [a for a in itertools.product(range(total + 1), repeat=NVARS) if sum(a) == total]
        out.extend(sorted(level, reverse=True))
    return out


MULTI_INDICES: list[tuple[int, int, int, int]] = _multi_indices()
NCOEFFS = len(MULTI_INDICES)  # 70
INDEX = {a: k for k, a in enumerate(MULTI_INDICES)}
FACTORIALS = np.array([math.prod(math.factorial(v) for v in a) for a in MULTI_INDICES], dtype=float)
_INT_FACTORIALS = [int(f) for f in FACTORIALS]


def _product_pairs():
    rows = []
    for k, gamma in enumerate(MULTI_INDICES):
        for i, alpha in enumerate(MULTI_INDICES):
            beta = tuple(g - a for g, a in zip(gamma, alpha))
            if min(beta) >= 0:
                rows.append((k, i, INDEX[beta]))
    rows.sort()
    arr = np.array(rows, dtype=np.intp)
    return arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()


PAIR_OUT, PAIR_LEFT, PAIR_RIGHT = _product_pairs()  # 495 pairs, grouped by output
_STARTS = np.flatnonzero(np.r_[True, PAIR_OUT[1:] != PAIR_OUT[:-1]])


def _mul_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.add.reduceat(a[PAIR_LEFT] * b[PAIR_RIGHT], _STARTS)


def _select_backend():
    if os.environ.get("G2BERGMAN_PURE_PYTHON", "") not in ("", "0"):
        return "numpy", _mul_numpy
    try:
        return "cython", _compiled_mul()
    except ImportError:
        return "numpy", _mul_numpy


def _compiled_mul():
    from . import _jetcore

    _jetcore.set_pairs(PAIR_OUT, PAIR_LEFT, PAIR_RIGHT)
    return _jetcore.jet_mul


BACKEND, _mul = _select_backend()


def use_backend(name: str) -> None:
    """Switch the product kernel at runtime (``"cython"`` or ``"numpy"``)."""
    global BACKEND, _mul
    if name == "numpy":
        BACKEND, _mul = "numpy", _mul_numpy
    elif name == "cython":
        BACKEND, _mul = "cython", _compiled_mul()
    else:
        raise ValueError(f"unknown backend {name!r}")


def _zeros(like) -> np.ndarray:
    if _is_mp(like):
        return np.array([like * 0] * NCOEFFS, dtype=object)
    return np.zeros(NCOEFFS, dtype=complex)


def _is_mp(v) -> bool:
    return type(v).__module__.startswith("mpmath")


class Jet4:
    """Order-4 Taylor jet in the variables ``(z1, z2, c1, c2)``.

    Coefficients are ``complex128`` by default.  Seeding with ``mpmath``
    numbers gives an object-dtype jet that carries the working precision of
    the active ``mpmath`` context through every operation.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs)
        if c.dtype != object:
            c = c.astype(complex)
        if c.shape != (NCOEFFS,):
            raise ValueError(f"expected {NCOEFFS} coefficients, got shape {c.shape}")
        self.coeffs = c

    @property
    def extended(self) -> bool:
        return self.coeffs.dtype == object

    @classmethod
    def constant(cls, value) -> "Jet4":
        c = _zeros(value)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, slot: int, value) -> "Jet4":
        """The coordinate function of ``slot`` seeded at ``value``."""
        c = _zeros(value)
        c[0] = value
        unit = [0, 0, 0, 0]
        unit[slot] = 1
        c[INDEX[tuple(unit)]] = 1.0
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs: dict) -> "Jet4":
        c = np.zeros(NCOEFFS, dtype=complex)
        for alpha, v in derivs.items():
            k = INDEX[tuple(alpha)]
            c[k] = v / FACTORIALS[k]
        return cls(c)

    @property
    def value(self) -> complex:
        return complex(self.coeffs[0])

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return complex(self.coeffs[INDEX[tuple(alpha)]])

    def derivative(self, alpha: Sequence[int], *, raw: bool = False):
        """Partial derivative ``d^alpha f`` at the seed point.

        ``raw=True`` keeps the coefficient type (``mpmath`` for extended jets).
        """
        k = INDEX[tuple(alpha)]
        v = self.coeffs[k] * _INT_FACTORIALS[k]
        return v if raw else complex(v)

    def items(self) -> Iterator[tuple[tuple[int, int, int, int], complex]]:
        return zip(MULTI_INDICES, self.coeffs)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet4):
            return Jet4(self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[0] += other
        return Jet4(out)

    __radd__ = __add__

    def __neg__(self):
        return Jet4(-self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet4):
            return Jet4(self.coeffs - other.coeffs)
        out = self.coeffs.copy()
        out[0] -= other
        return Jet4(out)

    def __rsub__(self, other):
        out = -self.coeffs
        out[0] += other
        return Jet4(out)

    def __mul__(self, other):
        if isinstance(other, Jet4):
            if self.extended or other.extended:
                return Jet4(_mul_numpy(self.coeffs, other.coeffs))
            return Jet4(_mul(self.coeffs, other.coeffs))
        return Jet4(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet4):
            return self * other.reciprocal()
        return Jet4(self.coeffs / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer powers only; use log() for general powers")
        if n < 0:
            return self.reciprocal() ** (-n)
        result = Jet4.constant(self.coeffs[0] * 0 + 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _split(self):
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("jet has zero constant term")
        h = self.coeffs.copy()
        h[0] = 0.0
        return c0, Jet4(h / c0)

    def reciprocal(self) -> "Jet4":
        # 1/(c0 (1 + u)) with u nilpotent of order 5
        c0, u = self._split()
        s = Jet4.constant(c0 * 0 + 1)
        for _ in range(MAX_ORDER):
            s = 1.0 - u * s
        return s * (1.0 / c0)

    def log(self) -> "Jet4":
        c0, u = self._split()
        # log(1+u) = u - u^2/2 + u^3/3 - u^4/4, Horner in u
        s = Jet4.constant((c0 * 0 - 1) / MAX_ORDER)
        for k in range(MAX_ORDER - 1, 0, -1):
            s = (1.0 if k % 2 else -1.0) / k + u * s
        out = u * s
        if self.extended:
            import mpmath

            out.coeffs[0] = mpmath.log(c0)
        else:
            out.coeffs[0] = cmath.log(c0)
        return out

    def __repr__(self):
        nz = sum(1 for v in self.coeffs if v != 0)
        return f"Jet4(value={complex(self.coeffs[0]):.6g}, nonzero={nz})"
