"""Pullback Bergman kernel of the symmetrized bidisc and its derivative jets.

With ``a = 1 - z1 c1``, ``b = 1 - z2 c2``, ``p = 1 - z1 c2``, ``q = 1 - z2 c1``
the kernel is::

    B = 1/(2 pi^2) * 1/((z1 - z2)(c1 - c2)) * (1/(a b)^2 - 1/(p q)^2)

where ``(c1, c2)`` are the antiholomorphic slots (``conj(z)`` on the diagonal).
Since ``p q - a b = (z1 - z2)(c1 - c2)`` the difference quotient cancels
exactly and::

    B = (p q + a b) / (2 pi^2 (a b p q)^2)

which is regular on ``z1 = z2``.  Point evaluations switch to this factored
form below :data:`DIAGONAL_THRESHOLD`; jets always use it.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularConfigurationError
from .jet import Jet4

DIAGONAL_THRESHOLD = 1e-6
NORMALIZATION = 1.0 / (2.0 * math.pi**2)


@dataclass(frozen=True)
class PolarizedKernelArgs:
    """Holomorphic slots ``z1, z2`` and antiholomorphic slots ``c1, c2``."""

    z1: complex
    z2: complex
    c1: complex
    c2: complex

    @classmethod
    def diagonal(cls, z1: complex, z2: complex) -> "PolarizedKernelArgs":
        z1, z2 = complex(z1), complex(z2)
        return cls(z1, z2, z1.conjugate(), z2.conjugate())

    @property
    def on_diagonal(self) -> bool:
        return self.c1 == complex(self.z1).conjugate() and self.c2 == complex(self.z2).conjugate()

    def check_domain(self) -> None:
        for name in ("z1", "z2", "c1", "c2"):
            if abs(getattr(self, name)) >= 1.0:
                raise DomainError(f"{name}={getattr(self, name)!r} is outside the unit disc")

    def swapped(self) -> "PolarizedKernelArgs":
        return PolarizedKernelArgs(self.z2, self.z1, self.c2, self.c1)


def _factored(z1, z2, c1, c2):
    a = 1 - z1 * c1
    b = 1 - z2 * c2
    p = 1 - z1 * c2
    q = 1 - z2 * c1
    ab = a * b
    pq = p * q
    return (pq + ab) / (ab * ab * pq * pq)


def eval_kernel(
    args: PolarizedKernelArgs,
    *,
    threshold: float = DIAGONAL_THRESHOLD,
    form: str = "auto",
    scale: float = 1.0,
) -> complex:
    """Kernel value at polarized arguments.

    ``form`` is ``"auto"`` (literal expression unless ``|z1 - z2|`` or
    ``|c1 - c2|`` falls below ``threshold``), ``"literal"`` or ``"factored"``.
    """
    args.check_domain()
    z1, z2, c1, c2 = (complex(v) for v in (args.z1, args.z2, args.c1, args.c2))
    if form == "auto":
        form = "factored" if min(abs(z1 - z2), abs(c1 - c2)) < threshold else "literal"
    if form == "factored":
        val = _factored(z1, z2, c1, c2)
    elif form == "literal":
        dz, dc = z1 - z2, c1 - c2
        if dz == 0 or dc == 0:
            raise SingularConfigurationError("literal kernel form is undefined on z1 = z2")
        a = 1 - z1 * c1
        b = 1 - z2 * c2
        p = 1 - z1 * c2
        q = 1 - z2 * c1
        val = (1 / (a * b) ** 2 - 1 / (p * q) ** 2) / (dz * dc)
    else:
        raise ValueError(f"unknown kernel form {form!r}")
    return scale * NORMALIZATION * val


def eval_kernel_array(z1, z2, c1, c2, scale: float = 1.0) -> np.ndarray:
    """Vectorized factored-form kernel; no domain checks."""
    z1, z2, c1, c2 = (np.asarray(v, dtype=complex) for v in (z1, z2, c1, c2))
    return scale * NORMALIZATION * _factored(z1, z2, c1, c2)


def kernel_jet(
    center: PolarizedKernelArgs,
    *,
    threshold: float = DIAGONAL_THRESHOLD,
    scale: float = 1.0,
) -> Jet4:
    """Order-4 jet of the kernel in ``(z1, z2, c1, c2)`` around ``center``.

    The center may hold ``mpmath`` numbers, giving an extended-precision jet.
    """
    center.check_domain()
    if abs(center.z1 - center.z2) < threshold or abs(center.c1 - center.c2) < threshold:
        raise SingularConfigurationError(
            "kernel jet requested at z1 = z2 where the coordinate change to G2 is "
            "singular; use the w-coordinate finite-difference oracle instead"
        )
    z1 = Jet4.variable(0, center.z1)
    z2 = Jet4.variable(1, center.z2)
    c1 = Jet4.variable(2, center.c1)
    c2 = Jet4.variable(3, center.c2)
    a = 1 - z1 * c1
    b = 1 - z2 * c2
    p = 1 - z1 * c2
    q = 1 - z2 * c1
    ab = a * b
    pq = p * q
    den = ab * ab * (pq * pq)
    return (pq + ab) * den.reciprocal() * (scale * NORMALIZATION)


# Derivative labels: "1" = d/dz1, "2" = d/dz2, "1b" = d/dconj(z1), "2b" = d/dconj(z2),
# in the order of differentiation.  Some labels name the same partial in a
# different order; all are kept so every ordering has its own key.
KERNEL_DERIVATIVE_LABELS = (
    "1", "2",
    "11b", "12b", "21b", "22b", "11", "12", "22",
    "11b1", "11b2", "12b1", "21b1", "12b2", "22b1", "21b2", "22b2",
    "11b1b", "11b2b", "12b1b", "21b1b", "12b2b", "22b1b", "21b2b", "22b2b",
    "11b11b", "11b12b", "11b21b", "12b11b", "11b22b", "12b21b", "22b11b",
    "12b12b", "22b12b", "22b21b", "12b22b", "22b22b",
)  # fmt: skip

_TOKEN = re.compile(r"[12]b?")


def parse_label(label: str) -> tuple[int, int, int, int]:
    """Multi-index ``(i1, i2, j1, j2)`` of a derivative label such as ``"11b2"``."""
    tokens = _TOKEN.findall(label)
    if "".join(tokens) != label:
        raise ValueError(f"malformed derivative label {label!r}")
    counts = [0, 0, 0, 0]
    for t in tokens:
        slot = int(t[0]) - 1 + (2 if t.endswith("b") else 0)
        counts[slot] += 1
    return tuple(counts)


def swap_label(label: str) -> str:
    """Relabel 1 <-> 2, the index change induced by swapping the two roots."""
    return "".join(
        ("2" if t[0] == "1" else "1") + t[1:] for t in _TOKEN.findall(label)
    )


def derivative_table(x: float, *, scale: float = 1.0):
    """Kernel derivatives listed by label at ``(x, 0)`` and at ``(0, x)``.

    Returns ``(at_x0, at_0x)``.  The second table is keyed so that entry
    ``L`` holds the derivative ``swap_label(L)`` evaluated at ``(0, x)``;
    by the swap symmetry of the kernel the two tables coincide.  At ``x = 0``
    the jet is unavailable and the closed forms are used.
    """
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x={x} is outside [0, 1)")
    if x == 0.0:
        from .closed_forms import eval_closed_form

        table = {lab: complex(scale * eval_closed_form("dB_" + lab, 0.0)) for lab in KERNEL_DERIVATIVE_LABELS}
        return table, dict(table)
    j_x0 = kernel_jet(PolarizedKernelArgs.diagonal(x, 0.0), scale=scale)
    j_0x = kernel_jet(PolarizedKernelArgs.diagonal(0.0, x), scale=scale)
    at_x0 = {lab: j_x0.derivative(parse_label(lab)) for lab in KERNEL_DERIVATIVE_LABELS}
    at_0x = {lab: j_0x.derivative(parse_label(swap_label(lab))) for lab in KERNEL_DERIVATIVE_LABELS}
    return at_x0, at_0x
