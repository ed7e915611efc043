"""The symmetrization map and the change of variables from z to w = (z1+z2, z1 z2)."""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SingularConfigurationError
from .jet import Jet4
from .kernel import DIAGONAL_THRESHOLD

ComplexPoint2 = tuple[complex, complex]


def phi(z: ComplexPoint2) -> ComplexPoint2:
    z1, z2 = complex(z[0]), complex(z[1])
    return (z1 + z2, z1 * z2)


def quadratic_roots(w1: complex, w2: complex) -> tuple[complex, complex]:
    """Roots of ``t^2 - w1 t + w2`` without cancellation, larger modulus first."""
    w1, w2 = complex(w1), complex(w2)
    d = cmath.sqrt(w1 * w1 - 4 * w2)
    s = w1 + d if abs(w1 + d) >= abs(w1 - d) else w1 - d
    if s == 0:
        return 0j, 0j
    r1 = s / 2
    r2 = w2 / r1
    if abs(r2) > abs(r1):
        r1, r2 = r2, r1
    return r1, r2


def phi_inverse(w: ComplexPoint2) -> tuple[ComplexPoint2, ComplexPoint2]:
    """Both orderings of the preimage; the branch with larger ``|z1|`` first."""
    r1, r2 = quadratic_roots(*w)
    return (r1, r2), (r2, r1)


def _coerce(v):
    # keep mpmath numbers so extended-precision pipelines stay extended
    return v if type(v).__module__.startswith("mpmath") else complex(v)


@dataclass(frozen=True)
class ConversionData:
    """Derivatives of the local inverse ``w -> z`` at a base point.

    ``first[i, j] = dz_i/dw_j`` and ``second[i, j, k] = d^2 z_i / dw_j dw_k``.
    """

    base: ComplexPoint2
    first: np.ndarray
    second: np.ndarray

    def conjugate(self) -> "ConversionData":
        return ConversionData(
            (self.base[0].conjugate(), self.base[1].conjugate()),
            self.first.conj(),
            self.second.conj(),
        )


def phi_jacobian(z: ComplexPoint2) -> np.ndarray:
    """``dw_i/dz_j``."""
    z1, z2 = complex(z[0]), complex(z[1])
    return np.array([[1.0, 1.0], [z2, z1]], dtype=complex)


def conversion_at(z: ComplexPoint2, threshold: float = DIAGONAL_THRESHOLD) -> ConversionData:
    """Derivatives of the branch of ``phi^{-1}`` through ``z``.

    Accepts ``mpmath`` inputs, in which case the arrays have object dtype.
    """
    z1, z2 = _coerce(z[0]), _coerce(z[1])
    d = z1 - z2
    if abs(d) < threshold:
        raise SingularConfigurationError(f"coincident roots z1={z1}, z2={z2}")
    dtype = complex if isinstance(z1, complex) else object
    first = np.array([[z1 / d, -1 / d], [-z2 / d, 1 / d]], dtype=dtype)
    # Differentiating w = phi(z(w)) twice: only d^2 w2 / dz1 dz2 = 1 survives,
    # so d^2 z_i/dw_j dw_k = -first[i, 1] (first[0, j] first[1, k] + first[1, j] first[0, k]).
    cross = np.outer(first[0], first[1])
    cross = cross + cross.T
    second = -first[:, 1][:, None, None] * cross[None, :, :]
    return ConversionData((z1, z2), first, second)


# Holomorphic (or antiholomorphic) multi-indices of total order <= 2 in two variables.
SIDE_INDICES = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
_SIDE_POS = {c: k for k, c in enumerate(SIDE_INDICES)}


def _counts(indices) -> tuple[int, int]:
    c = [0, 0]
    for i in indices:
        c[i] += 1
    return tuple(c)


class WDerivativeTable:
    """Derivatives of ``B_G2`` in ``w`` with at most two holomorphic and two
    antiholomorphic differentiations.

    ``table.d((i, k), (j,))`` is ``d^3 B_G2 / dw_i dw_k dconj(w_j)`` with
    0-based indices.
    """

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        v = np.asarray(values)
        self.values = v if v.dtype == object else v.astype(complex)
        if self.values.shape != (6, 6):
            raise ValueError("WDerivativeTable expects a 6x6 array")

    @property
    def extended(self) -> bool:
        """True when the entries are ``mpmath`` numbers."""
        return self.values.dtype == object

    def rounded(self) -> "WDerivativeTable":
        return WDerivativeTable(np.array(self.values.tolist(), dtype=complex))

    def d(self, holo=(), anti=()):
        v = self.values[_SIDE_POS[_counts(holo)], _SIDE_POS[_counts(anti)]]
        return v if self.extended else complex(v)

    def __mul__(self, s):
        return WDerivativeTable(self.values * s)

    __rmul__ = __mul__

    def __add__(self, other):
        return WDerivativeTable(self.values + other.values)

    def conjugation_residual(self) -> float:
        """max |d(I, J) - conj(d(J, I))|; zero for an on-diagonal real kernel."""
        v = self.rounded().values
        return float(np.max(np.abs(v - v.T.conj())))

    def as_dict(self) -> dict:
        return {
            (h, a): complex(self.values[ih, ia])
            for ih, h in enumerate(SIDE_INDICES)
            for ia, a in enumerate(SIDE_INDICES)
        }


def _faa_di_bruno_terms(conv: ConversionData, indices: tuple[int, ...]):
    """(z multi-index counts, weight) pairs expressing d^I (f o z) at order <= 2."""
    first, second = conv.first, conv.second
    if len(indices) == 0:
        return [((0, 0), 1.0)]
    if len(indices) == 1:
        (i,) = indices
        return [(_counts((a,)), first[a, i]) for a in range(2)]
    if len(indices) == 2:
        i, k = indices
        terms = [(_counts((a, b)), first[a, i] * first[b, k]) for a in range(2) for b in range(2)]
        terms += [(_counts((a,)), second[a, i, k]) for a in range(2)]
        return terms
    raise ValueError("only orders <= 2 per side are supported")


def _representative(counts: tuple[int, int]) -> tuple[int, ...]:
    return (0,) * counts[0] + (1,) * counts[1]


def pushforward(
    table_z: Jet4,
    conv: ConversionData,
    conv_anti: ConversionData | None = None,
    *,
    keep_extended: bool = False,
) -> WDerivativeTable:
    """Chain rule from z-derivatives of ``B`` to w-derivatives of ``B_G2``.

    Holomorphic and antiholomorphic slots transform independently (the change
    of variables is holomorphic, so mixed second derivatives of ``z`` vanish).
    Each side expands as ``sum_a B_a dz_a/dw_i`` at first order and
    ``sum_ab B_ab dz_a/dw_i dz_b/dw_k + sum_a B_a d^2 z_a/dw_i dw_k`` at
    second order; the fourth-order mixed term is the product of both.

    Extended-precision inputs are rounded to ``complex128`` unless
    ``keep_extended`` is set.
    """
    if conv_anti is None:
        conv_anti = conv.conjugate()
    extended = keep_extended and table_z.extended
    out = np.empty((6, 6), dtype=object if extended else complex)
    for ih, hc in enumerate(SIDE_INDICES):
        hterms = _faa_di_bruno_terms(conv, _representative(hc))
        for ia, ac in enumerate(SIDE_INDICES):
            aterms = _faa_di_bruno_terms(conv_anti, _representative(ac))
            acc = 0j
            for (zc, wz), (cc, wc) in itertools.product(hterms, aterms):
                acc += wz * wc * table_z.derivative((zc[0], zc[1], cc[0], cc[1]), raw=True)
            out[ih, ia] = acc if extended else complex(acc)
    return WDerivativeTable(out)
