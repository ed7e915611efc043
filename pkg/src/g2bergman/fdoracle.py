"""Finite-difference derivative oracle, independent of the jet machinery.

Derivatives are taken of the polarized kernel as an ordinary holomorphic
function of four complex variables: ``(z1, z2, c1, c2)`` for the kernel on
the bidisc, or ``(w1, w2, v1, v2)`` for ``B_G2(w, v) = B(roots(w), roots(v))``.
The latter is branch independent because ``B`` is symmetric in ``(z1, z2)``
and, separately, in ``(c1, c2)``, so it stays valid on the branch locus
``w1^2 = 4 w2`` (in particular at ``x = 0``).

Each partial is a tensor product of 1-D central stencils along real steps,
followed by two levels of Richardson extrapolation in ``h, h/2, h/4``.

Curvature in the orthonormal frame loses up to four digits to cancellation
near the boundary, more than double-precision differences can spare.  The
oracle therefore evaluates the kernel in ``mpmath`` at ``ORACLE_DPS`` digits
by default, where roundoff is negligible and a small step keeps truncation
far below the tolerances.  ``dps=None`` gives the plain double path.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .chainrule import SIDE_INDICES, WDerivativeTable
from .kernel import _factored, eval_kernel_array

# The step is BASE_STEP times the distance of the roots to the unit circle:
# a fixed step misses 1e-4 both near the boundary (truncation) and at small
# x (cancellation in the fourth differences).
BASE_STEP = 5e-2
RICHARDSON_LEVELS = 2
ORACLE_DPS = 40
MP_BASE_STEP = 1e-3

# (offsets, weights) of central stencils for the k-th derivative, step 1
_STENCILS = {
    0: (np.array([0.0]), np.array([1.0])),
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([-0.5, 1.0, -1.0, 0.5])),
    4: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


def _stencil(alpha: Sequence[int], h):
    axes = [_STENCILS[k] for k in alpha]
    offsets = np.array(list(itertools.product(*[a[0] for a in axes])))
    weights = np.array([np.prod(w) for w in itertools.product(*[a[1] for a in axes])])
    if isinstance(h, float):
        return offsets * h, weights / h ** sum(alpha)
    # mpmath step: keep offsets and weights exact until scaled
    return offsets.astype(object) * h, weights.astype(object) / h ** sum(alpha)


def central_derivatives(
    func: Callable[..., np.ndarray],
    center: Sequence[complex],
    multi_indices: Iterable[Sequence[int]],
    *,
    h: float = 1e-2,
    levels: int | None = None,
    dps: int | None = None,
) -> dict[tuple[int, ...], complex]:
    """Mixed partials of a holomorphic ``func(*vars)`` at ``center``.

    ``func`` takes one array per variable and is evaluated once on the union
    of all stencil points.  With ``dps`` the arrays hold ``mpmath`` numbers
    and all arithmetic runs at that precision.
    """
    if levels is None:
        levels = RICHARDSON_LEVELS
    if dps is not None:
        with mpmath.workdps(dps):
            return _central(func, [mpmath.mpc(c) for c in center], multi_indices, mpmath.mpf(h), levels)
    return _central(func, np.asarray(center, dtype=complex), multi_indices, h, levels)


def _central(func, center, multi_indices, h, levels):
    extended = not isinstance(center, np.ndarray)
    if extended:
        center = np.array(center, dtype=object)
    alphas = [tuple(int(v) for v in a) for a in multi_indices]
    steps = [h / 2**k for k in range(levels + 1)]
    blocks, spans = [], []
    start = 0
    for alpha in alphas:
        for hk in steps:
            off, wts = _stencil(alpha, hk)
            if extended:
                off = off.astype(object)
            blocks.append(center[None, :] + off)
            spans.append((start, start + len(off), wts))
            start += len(off)
    pts = np.concatenate(blocks)
    vals = func(*pts.T)
    out = {}
    it = iter(spans)
    for alpha in alphas:
        table = []
        for _ in steps:
            s, e, wts = next(it)
            table.append(np.dot(wts, vals[s:e]))
        for level in range(1, levels + 1):
            f = 4**level
            table = [(f * table[k + 1] - table[k]) / (f - 1) for k in range(len(table) - 1)]
        out[alpha] = complex(table[0])
    return out


def roots_array(w1, w2):
    """Vectorized roots of ``t^2 - w1 t + w2`` (order irrelevant downstream)."""
    if np.asarray(w1).dtype == object:
        return _roots_mp(w1, w2)
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    d = np.sqrt(w1 * w1 - 4 * w2)
    s = np.where(np.abs(w1 + d) >= np.abs(w1 - d), w1 + d, w1 - d)
    r1 = s / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(s != 0, w2 / np.where(s != 0, r1, 1.0), 0.0)
    return r1, r2


def _roots_mp(w1, w2):
    r1, r2 = [], []
    for a, b in zip(w1, w2):
        d = mpmath.sqrt(a * a - 4 * b)
        s = a + d if abs(a + d) >= abs(a - d) else a - d
        r1.append(s / 2)
        r2.append(2 * b / s if s != 0 else s)
    return np.array(r1, dtype=object), np.array(r2, dtype=object)


def _kernel_any(z1, z2, c1, c2, scale):
    if np.asarray(z1).dtype == object:
        return scale * _factored(z1, z2, c1, c2) / (2 * mpmath.pi**2)
    return eval_kernel_array(z1, z2, c1, c2, scale=scale)


def kernel_w(w1, w2, v1, v2, scale: float = 1.0) -> np.ndarray:
    """Polarized ``B_G2(w, v)`` evaluated through the roots of both quadratics."""
    z1, z2 = roots_array(w1, w2)
    c1, c2 = roots_array(v1, v2)
    return _kernel_any(z1, z2, c1, c2, scale)


def _default_step(radius: float, dps: int | None) -> float:
    return step_for(radius, BASE_STEP if dps is None else MP_BASE_STEP)


def step_for(radius: float, base: float = BASE_STEP) -> float:
    """Step scaled with the distance of the roots (modulus <= radius) to the circle."""
    return base * (1.0 - radius)


def fd_kernel_derivatives(
    z1: complex,
    z2: complex,
    multi_indices,
    *,
    h: float | None = None,
    scale: float = 1.0,
    dps: int | None = ORACLE_DPS,
):
    """z-derivatives of the kernel at the on-diagonal point ``(z1, z2)``."""
    center = (complex(z1), complex(z2), complex(z1).conjugate(), complex(z2).conjugate())
    if h is None:
        h = _default_step(max(abs(z1), abs(z2)), dps)
    return central_derivatives(
        lambda a, b, c, d: _kernel_any(a, b, c, d, scale), center, multi_indices, h=h, dps=dps
    )


def fd_w_table(
    w: Sequence[complex],
    *,
    h: float | None = None,
    scale: float = 1.0,
    dps: int | None = ORACLE_DPS,
) -> WDerivativeTable:
    """All w-derivatives of ``B_G2`` needed for curvature, at the on-diagonal point ``w``."""
    w1, w2 = complex(w[0]), complex(w[1])
    center = (w1, w2, w1.conjugate(), w2.conjugate())
    if h is None:
        from .chainrule import quadratic_roots

        h = _default_step(max(abs(r) for r in quadratic_roots(w1, w2)), dps)
    alphas = [hc + ac for hc in SIDE_INDICES for ac in SIDE_INDICES]
    d = central_derivatives(lambda a, b, c, e: kernel_w(a, b, c, e, scale=scale), center, alphas, h=h, dps=dps)
    vals = np.array([[d[hc + ac] for ac in SIDE_INDICES] for hc in SIDE_INDICES])
    return WDerivativeTable(vals)
