"""Membership in G2, disc automorphisms acting on G2, and normalization to (x, 0).

A disc automorphism ``h(z) = e^{i theta} (z - alpha) / (1 - conj(alpha) z)``
acts on G2 through ``H(phi(z1, z2)) = phi(h(z1), h(z2))``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .chainrule import ComplexPoint2, phi, phi_inverse, quadratic_roots
from .errors import DomainError

MEMBERSHIP_MARGIN = 1e-12


@dataclass(frozen=True)
class DiscAutomorphism:
    alpha: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.alpha) >= 1.0:
            raise DomainError(f"alpha={self.alpha} must lie in the unit disc")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))

    @classmethod
    def identity(cls) -> "DiscAutomorphism":
        return cls(0j, 0.0)

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        return cmath.exp(1j * self.theta) * (z - self.alpha) / (1 - self.alpha.conjugate() * z)

    def matrix(self) -> np.ndarray:
        """Moebius matrix ``[[A, B], [C, D]]`` with ``h(z) = (Az + B)/(Cz + D)``."""
        e = cmath.exp(1j * self.theta)
        return np.array([[e, -e * self.alpha], [-self.alpha.conjugate(), 1.0]], dtype=complex)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "DiscAutomorphism":
        (A, B), (C, D) = m
        # normalize D = 1: then A = e^{i theta}, B = -A alpha, C = -conj(alpha)
        A, B = A / D, B / D
        return cls(-B / A, cmath.phase(A))

    def compose(self, other: "DiscAutomorphism") -> "DiscAutomorphism":
        """``self o other``."""
        return DiscAutomorphism.from_matrix(self.matrix() @ other.matrix())

    def __matmul__(self, other: "DiscAutomorphism") -> "DiscAutomorphism":
        return self.compose(other)

    def inverse(self) -> "DiscAutomorphism":
        return DiscAutomorphism.from_matrix(np.linalg.inv(self.matrix()))


@dataclass(frozen=True)
class NormalizationResult:
    x: float
    h: DiscAutomorphism


def is_member(w: ComplexPoint2, margin: float = MEMBERSHIP_MARGIN) -> bool:
    """Whether both roots of ``t^2 - w1 t + w2`` lie in the open unit disc."""
    try:
        r1, r2 = quadratic_roots(complex(w[0]), complex(w[1]))
    except (TypeError, ValueError, OverflowError):
        return False
    if not (math.isfinite(abs(r1)) and math.isfinite(abs(r2))):
        return False
    return max(abs(r1), abs(r2)) < 1.0 - margin


def _require_member(w: ComplexPoint2) -> tuple[complex, complex]:
    w = (complex(w[0]), complex(w[1]))
    if not is_member(w):
        raise DomainError(f"w={w} is not a point of G2")
    return w


def apply_automorphism(h: DiscAutomorphism, w: ComplexPoint2) -> ComplexPoint2:
    """``H(w) = phi(h(z1), h(z2))`` for ``(z1, z2) = phi^{-1}(w)``."""
    w = _require_member(w)
    z1, z2 = phi_inverse(w)[0]
    return phi((h(z1), h(z2)))


def normalize(w: ComplexPoint2) -> NormalizationResult:
    """Automorphism sending ``w`` to ``(x, 0)`` with ``x`` in ``[0, 1)``.

    Centers ``h`` at the root of smaller modulus and rotates so the other
    root lands on ``x >= 0``; points already of the form ``(x, 0)`` get the
    identity.  ``x`` is the pseudo-hyperbolic distance between the roots, so
    it does not depend on which root is taken as center.
    """
    w = _require_member(w)
    z2, z1 = phi_inverse(w)[0]
    h0 = DiscAutomorphism(z1, 0.0)
    v = h0(z2)
    theta = -cmath.phase(v) if v != 0 else 0.0
    h = DiscAutomorphism(z1, theta)
    x = abs(v)
    return NormalizationResult(min(x, math.nextafter(1.0, 0.0)), h)
