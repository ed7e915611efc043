"""Metric, connection and curvature of the Bergman metric on G2.

Everything is computed from a :class:`~g2bergman.chainrule.WDerivativeTable`
of ``B_G2``, so the same formulas run on the jet pipeline and on the
finite-difference oracle.  Index conventions: ``g[i, j] = g_{i jbar}``,
``dg[i, j, l] = d_i g_{j lbar}``, ``dgbar[m, j, l] = d_mbar g_{j lbar}``,
``ddg[i, j, k, l] = d_i d_jbar g_{k lbar}`` and ``R[a, b, c, d] = R_{a bbar c dbar}``.

Sources for point data at the normal point ``(x, 0)``:

``"jet"``
    kernel jet pushed forward to w-coordinates.  Below
    :data:`EXTENDED_PRECISION_GAP` the jet runs in ``mpmath``, since the
    change of variables amplifies rounding roughly like ``x**-6``.
``"fd"``
    finite differences of ``B_G2`` in w-coordinates; valid at ``x = 0``.
``"closed"``
    the registered closed forms (no second metric derivatives).
``"auto"``
    ``"jet"`` for ``x >= JET_MIN_X``, otherwise ``"closed"``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy import optimize

from . import closed_forms as cf
from .chainrule import WDerivativeTable, conversion_at, phi_inverse, pushforward
from .errors import DomainError
from .fdoracle import central_derivatives, fd_w_table, step_for
from .kernel import DIAGONAL_THRESHOLD, PolarizedKernelArgs, kernel_jet

JET_MIN_X = 1e-3
EXTENDED_PRECISION_GAP = 0.15
EXTENDED_BOUNDARY_GAP = 0.05
SOURCES = ("auto", "jet", "fd", "closed")

IDX = (0, 1)


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x={x} is outside [0, 1)")
    return x


def _is_extended(arr) -> bool:
    return np.asarray(arr).dtype == object


def _sqrt(v):
    return mpmath.sqrt(v) if type(v).__module__.startswith("mpmath") else math.sqrt(v)


def _re(v):
    return v.real


def _round(arr) -> np.ndarray:
    return np.array(np.asarray(arr).tolist(), dtype=complex)


@dataclass(frozen=True)
class HermitianMetric2:
    """``g[i, j] = g_{i jbar}`` with its inverse and determinant.

    Entries may be ``mpmath`` numbers (object arrays); :meth:`rounded`
    converts to ``complex128`` keeping the inverse computed at full precision.
    """

    g: np.ndarray
    g_inv: np.ndarray
    det: float

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> "HermitianMetric2":
        g = np.asarray(g)
        if g.dtype != object:
            g = g.astype(complex)
        # symmetrize away rounding so the stored matrix is exactly Hermitian
        g = 0.5 * (g + g.conj().T)
        det = _re(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])
        if det == 0:
            raise DomainError("degenerate metric")
        inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=g.dtype) / det
        return cls(g, inv, det if g.dtype == object else float(det))

    def rounded(self) -> "HermitianMetric2":
        if not _is_extended(self.g):
            return self
        return HermitianMetric2(_round(self.g), _round(self.g_inv), float(self.det))

    def upper(self, k: int, l: int) -> complex:
        """``g^{k lbar}``, defined by ``sum_j g_{i jbar} g^{k jbar} = delta_ik``."""
        return self.g_inv[l, k]

    @property
    def upper_matrix(self) -> np.ndarray:
        return self.g_inv.T

    def inner(self, u, v):
        """``g(u, v) = sum u^i conj(v^j) g_{i jbar}``."""
        u, v = np.asarray(u), np.asarray(v)
        val = sum(u[i] * self.g[i, j] * v[j].conjugate() for i in IDX for j in IDX)
        return val if _is_extended(self.g) else complex(val)

    def is_positive_definite(self) -> bool:
        # Sylvester's criterion, valid in any precision
        return bool(_re(self.g[0, 0]) > 0 and self.det > 0)

    def identity_residual(self) -> float:
        """``max |g g^{-1} - I|``."""
        return float(np.abs(_round(self.g.dot(self.g_inv)) - np.eye(2)).max())


# ---------------------------------------------------------------------------
# formulas in terms of B_G2 derivatives


def metric_from_table(T: WDerivativeTable) -> HermitianMetric2:
    B = T.d()
    g = np.empty((2, 2), dtype=T.values.dtype)
    for i, j in itertools.product(IDX, IDX):
        g[i, j] = (B * T.d((i,), (j,)) - T.d((i,)) * T.d((), (j,))) / B**2
    return HermitianMetric2.from_matrix(g)


def metric_first_derivative_from_table(T: WDerivativeTable) -> np.ndarray:
    """``dg[i, j, l] = d_i g_{j lbar}``."""
    B = T.d()
    dg = np.empty((2, 2, 2), dtype=T.values.dtype)
    for i, j, l in itertools.product(IDX, IDX, IDX):
        Bi, Bj, Blb = T.d((i,)), T.d((j,)), T.d((), (l,))
        dg[i, j, l] = -2 * Bi * (B * T.d((j,), (l,)) - Bj * Blb) / B**3 + (
            Bi * T.d((j,), (l,))
            + B * T.d((j, i), (l,))
            - T.d((j, i)) * Blb
            - Bj * T.d((i,), (l,))
        ) / B**2
    return dg


def metric_antiholomorphic_derivative_from_table(T: WDerivativeTable) -> np.ndarray:
    """``dgbar[m, j, l] = d_mbar g_{j lbar}`` (mirror of the holomorphic formula)."""
    B = T.d()
    dgb = np.empty((2, 2, 2), dtype=T.values.dtype)
    for m, j, l in itertools.product(IDX, IDX, IDX):
        Bm, Bj, Blb = T.d((), (m,)), T.d((j,)), T.d((), (l,))
        dgb[m, j, l] = -2 * Bm * (B * T.d((j,), (l,)) - Bj * Blb) / B**3 + (
            Bm * T.d((j,), (l,))
            + B * T.d((j,), (l, m))
            - T.d((j,), (m,)) * Blb
            - Bj * T.d((), (l, m))
        ) / B**2
    return dgb


def metric_second_derivative_from_table(T: WDerivativeTable) -> np.ndarray:
    """``ddg[i, j, k, l] = d_i d_jbar g_{k lbar}`` expanded in B_G2 derivatives."""
    B = T.d()
    ddg = np.empty((2, 2, 2, 2), dtype=T.values.dtype)
    for i, j, k, l in itertools.product(IDX, IDX, IDX, IDX):
        Bi, Bjb, Bk, Blb = T.d((i,)), T.d((), (j,)), T.d((k,)), T.d((), (l,))
        Bklb, Bijb, Bkjb, Blbi = T.d((k,), (l,)), T.d((i,), (j,)), T.d((k,), (j,)), T.d((i,), (l,))
        Bki, Blbjb = T.d((k, i)), T.d((), (l, j))
        Bklbjb, Bklbi, Bkijb, Blbijb = T.d((k,), (l, j)), T.d((k, i), (l,)), T.d((k, i), (j,)), T.d((i,), (l, j))
        B4 = T.d((i, k), (j, l))
        ddg[i, j, k, l] = (
            6 * Bjb * Bi * B * Bklb / B**4
            - 2 * Bijb * B * Bklb / B**3
            - 4 * Bi * Bjb * Bklb / B**3
            - 2 * Bi * B * Bklbjb / B**3
            - 6 * Bjb * Bi * Bk * Blb / B**4
            + 2 * Bijb * Bk * Blb / B**3
            + 2 * Bi * Bkjb * Blb / B**3
            + 2 * Bi * Bk * Blbjb / B**3
            + Bijb * Bklb / B**2
            + Bi * Bklbjb / B**2
            - Bjb * Bklbi / B**2
            + B4 / B
            + 2 * Bjb * Bki * Blb / B**3
            - Bkijb * Blb / B**2
            - Bki * Blbjb / B**2
            + 2 * Bjb * Bk * Blbi / B**3
            - Bkjb * Blbi / B**2
            - Bk * Blbijb / B**2
        )
    return ddg


def christoffel_from(metric: HermitianMetric2, dg: np.ndarray) -> np.ndarray:
    """``Gamma[k, i, j] = g^{k lbar} d_i g_{j lbar}``."""
    return np.einsum("lk,ijl->kij", metric.g_inv, dg)


def curvature_from(metric: HermitianMetric2, dg: np.ndarray, dgb: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """``R_{a bbar c dbar} = -d_c d_dbar g_{a bbar} + g^{q pbar} d_c g_{a pbar} d_dbar g_{q bbar}``."""
    R = -np.einsum("cdab->abcd", ddg)
    # g^{q pbar} = g_inv[p, q]
    R = R + np.einsum("pq,cap,dqb->abcd", metric.g_inv, dg, dgb)
    return R


@dataclass(frozen=True)
class CurvatureTensor2:
    """``R[a, b, c, d] = R_{a bbar c dbar}``."""

    R: np.ndarray

    def __getitem__(self, idx) -> complex:
        return complex(self.R[idx])

    def contract(self, A, B, C, D):
        """``R(A, Bbar, C, Dbar) = sum A^a conj(B^b) C^c conj(D^d) R_{a bbar c dbar}``."""
        A, B, C, D = (np.asarray(v) for v in (A, B, C, D))
        val = np.einsum("abcd,a,b,c,d->", self.R, A, B.conj(), C, D.conj())
        return val if _is_extended(self.R) else complex(val)

    def symmetry_residual(self) -> float:
        """Largest violation of the Kaehler symmetries and of conjugation."""
        R = _round(self.R)
        res = [
            np.abs(R - R.transpose(2, 1, 0, 3)),  # a <-> c
            np.abs(R - R.transpose(0, 3, 2, 1)),  # b <-> d
            np.abs(R - R.transpose(1, 0, 3, 2).conj()),
        ]
        return float(max(r.max() for r in res))

    def symmetrized(self) -> "CurvatureTensor2":
        """Average over the symmetry group, removing rounding-level asymmetry."""
        R = self.R
        R = 0.5 * (R + R.transpose(2, 1, 0, 3))
        R = 0.5 * (R + R.transpose(0, 3, 2, 1))
        R = 0.5 * (R + R.transpose(1, 0, 3, 2).conj())
        return CurvatureTensor2(R)

    def imag_residual(self) -> float:
        return float(np.abs(self.R.imag).max())


def _frame_dtype(v):
    return object if type(v).__module__.startswith("mpmath") else complex


@dataclass(frozen=True)
class OrthonormalFrame:
    """``X = X_coeff d_1`` and ``Y = t1 d_1 + t2 d_2``."""

    X_coeff: complex
    a1: complex
    a2: complex
    t1: complex
    t2: complex

    @property
    def X(self) -> np.ndarray:
        return np.array([self.X_coeff, 0 * self.X_coeff], dtype=_frame_dtype(self.X_coeff))

    @property
    def Y(self) -> np.ndarray:
        return np.array([self.t1, self.t2], dtype=_frame_dtype(self.t1))

    @classmethod
    def from_metric(cls, metric: HermitianMetric2) -> "OrthonormalFrame":
        g = metric.g
        g11, g21, g22 = _re(g[0, 0]), g[1, 0], _re(g[1, 1])
        if g11 <= 0 or g22 <= 0:
            raise DomainError("metric is not positive definite")
        a1 = -g21 / (g11 * _sqrt(g22))
        a2 = 1 / _sqrt(g22) + 0 * g21
        n2 = _re(metric.inner([a1, a2], [a1, a2]))
        if n2 <= 0:
            raise DomainError("degenerate metric: Gram-Schmidt failed")
        n = _sqrt(n2)
        return cls(1 / _sqrt(g11) + 0 * g21, a1, a2, a1 / n, a2 / n)

    @property
    def tilde_norm2(self) -> float:
        """``g(Ytilde, Ytilde)``, recovered from ``t2 = a2 / |Ytilde|``."""
        return float(abs(self.a2 / self.t2) ** 2)

    def rounded(self) -> "OrthonormalFrame":
        return OrthonormalFrame(*(complex(v) for v in (self.X_coeff, self.a1, self.a2, self.t1, self.t2)))

    def residual(self, metric: HermitianMetric2) -> float:
        """Deviation from orthonormality."""
        X, Y = self.X, self.Y
        return max(
            abs(metric.inner(X, X) - 1), abs(metric.inner(Y, Y) - 1), abs(metric.inner(X, Y))
        )


@dataclass(frozen=True)
class Direction:
    """Unit vector ``V = a X + b Y`` in the orthonormal frame."""

    a: complex
    b: complex

    def __post_init__(self):
        n = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"direction is not a unit vector: |a|^2+|b|^2={n!r}")

    @classmethod
    def from_angles(cls, s: float, phase: float) -> "Direction":
        """``a = sqrt(s)``, ``b = sqrt(1-s) exp(i phase)``."""
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s={s} is outside [0, 1]")
        return cls(complex(math.sqrt(s)), cmath.rect(math.sqrt(1.0 - s), phase))

    def vector(self, frame: OrthonormalFrame) -> np.ndarray:
        return self.a * frame.X + self.b * frame.Y


@dataclass(frozen=True)
class FrameCurvatures:
    """Curvature of the frame ``(X, Y)``.

    ``XXXY = R(X, Xbar, X, Ybar)``, ``YYYX = R(Y, Ybar, Y, Xbar)`` and
    ``XYXY = R(X, Ybar, X, Ybar)``.  The mixed terms are real at normal points
    but complex in general.
    """

    H_X: float
    H_Y: float
    B_XY: float
    XXXY: complex
    YYYX: complex
    XYXY: complex

    def sectional(self, a, b):
        """``R(V, Vbar, V, Vbar)`` for ``V = aX + bY``; broadcasts over arrays."""
        a = np.asarray(a)
        b = np.asarray(b)
        aa, bb = np.abs(a) ** 2, np.abs(b) ** 2
        abar_b = np.conj(a) * b
        val = (
            aa**2 * self.H_X
            + bb**2 * self.H_Y
            + 4 * aa * bb * self.B_XY
            + 4 * aa * np.real(np.conj(abar_b) * self.XXXY)
            + 4 * bb * np.real(abar_b * self.YYYX)
            + 2 * np.real(np.conj(abar_b) ** 2 * self.XYXY)
        )
        return val

    def sectional_angles(self, s, phase):
        s = np.asarray(s, dtype=float)
        a = np.sqrt(s)
        b = np.sqrt(np.clip(1.0 - s, 0.0, None)) * np.exp(1j * np.asarray(phase, dtype=float))
        return self.sectional(a, b)


@dataclass(frozen=True)
class PointGeometry:
    """Metric data and curvature at one point of G2, stored in double precision.

    When built from an extended-precision table, the frame and its curvatures
    are computed before rounding; near the boundary the coordinate metric is
    ill-conditioned and a double-precision frame would lose most digits.
    """

    w: tuple[complex, complex]
    metric: HermitianMetric2
    dg: np.ndarray
    dgb: np.ndarray
    ddg: Optional[np.ndarray]
    christoffel: np.ndarray
    curvature: CurvatureTensor2
    source: str
    table: Optional[WDerivativeTable] = None
    frame: Optional[OrthonormalFrame] = None
    frame_curv: Optional["FrameCurvatures"] = None
    ricci: Optional[np.ndarray] = None
    einstein_deviation: Optional[float] = None
    # (curvature, frame, dps) at table precision when built from an extended table
    extended: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.frame is None:
            object.__setattr__(self, "frame", OrthonormalFrame.from_metric(self.metric))
        if self.frame_curv is None:
            object.__setattr__(self, "frame_curv", _frame_curvatures(self.curvature, self.frame))
        if self.ricci is None:
            ric = ricci_trace(self.metric, self.curvature)
            object.__setattr__(self, "ricci", ric)
            object.__setattr__(self, "einstein_deviation", einstein_deviation(ric, self.metric))
        for name in ("dg", "dgb", "ddg", "christoffel", "ricci"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @classmethod
    def from_table(cls, w, T: WDerivativeTable, source: str) -> "PointGeometry":
        metric = metric_from_table(T)
        dg = metric_first_derivative_from_table(T)
        dgb = metric_antiholomorphic_derivative_from_table(T)
        ddg = metric_second_derivative_from_table(T)
        R = CurvatureTensor2(curvature_from(metric, dg, dgb, ddg))
        gam = christoffel_from(metric, dg)
        frame = OrthonormalFrame.from_metric(metric)
        fc = _frame_curvatures(R, frame)
        ric = ricci_trace(metric, R)
        dev = einstein_deviation(ric, metric)
        ext = None
        if T.extended:
            ext = (R, frame, mpmath.mp.dps)
            ric = _round(ric)
            metric, frame, T = metric.rounded(), frame.rounded(), T.rounded()
            dg, dgb, ddg, gam = _round(dg), _round(dgb), _round(ddg), _round(gam)
            R = CurvatureTensor2(_round(R.R))
        return cls(w, metric, dg, dgb, ddg, gam, R, source, T, frame, fc, ric, dev, ext)

    def frame_curvatures(self) -> "FrameCurvatures":
        return self.frame_curv


def _frame_curvatures(R: CurvatureTensor2, fr: OrthonormalFrame) -> "FrameCurvatures":
    X, Y = fr.X, fr.Y
    return FrameCurvatures(
        float(_re(R.contract(X, X, X, X))),
        float(_re(R.contract(Y, Y, Y, Y))),
        float(_re(R.contract(X, X, Y, Y))),
        complex(R.contract(X, X, X, Y)),
        complex(R.contract(Y, Y, Y, X)),
        complex(R.contract(X, Y, X, Y)),
    )


# ---------------------------------------------------------------------------
# tables of B_G2 derivatives


def _extended_dps(gap: float) -> int:
    # rounding is amplified roughly like gap**-6 by the change of variables
    return 20 + int(math.ceil(6 * math.log10(1.0 / gap)))


def _boundary_dps(margin: float) -> int:
    # the coordinate metric has condition number ~ margin**-2 near the circle
    return 20 + int(math.ceil(4 * math.log10(1.0 / margin)))


def w_table_jet(
    z: Sequence[complex],
    *,
    scale: float = 1.0,
    dps: Optional[int] = None,
    keep_extended: Optional[bool] = None,
) -> WDerivativeTable:
    """w-derivatives of ``B_G2`` at ``phi(z)`` from the kernel jet at ``z``.

    ``dps=None`` picks the precision automatically: ``mpmath`` when the roots
    are closer than :data:`EXTENDED_PRECISION_GAP` or within
    :data:`EXTENDED_BOUNDARY_GAP` of the unit circle, double otherwise.
    ``dps=0`` forces double precision.  Near the circle the table is returned
    unrounded (object dtype) so the geometry can run at the same precision.
    """
    z1, z2 = complex(z[0]), complex(z[1])
    gap = abs(z1 - z2)
    margin = 1.0 - max(abs(z1), abs(z2))
    if dps is None:
        dps = 0
        if gap < EXTENDED_PRECISION_GAP:
            dps = _extended_dps(max(gap, DIAGONAL_THRESHOLD))
        if margin < EXTENDED_BOUNDARY_GAP:
            dps = max(dps, _boundary_dps(max(margin, 1e-12)))
    if keep_extended is None:
        keep_extended = margin < EXTENDED_BOUNDARY_GAP
    if not dps:
        jet = kernel_jet(PolarizedKernelArgs.diagonal(z1, z2), scale=scale)
        return pushforward(jet, conversion_at((z1, z2)))
    with mpmath.workdps(dps):
        m1, m2 = mpmath.mpc(z1), mpmath.mpc(z2)
        jet = kernel_jet(PolarizedKernelArgs(m1, m2, m1.conjugate(), m2.conjugate()), scale=scale)
        T = pushforward(jet, conversion_at((m1, m2)), keep_extended=keep_extended)
        if T.extended:
            # build the geometry while the working precision is still raised
            return _ExtendedTable(T.values, dps)
        return T


class _ExtendedTable(WDerivativeTable):
    """Object-dtype table remembering the precision it was computed at."""

    __slots__ = ("dps",)

    def __init__(self, values, dps: int):
        super().__init__(values)
        self.dps = dps


def geometry_from_table(w, T: WDerivativeTable, source: str) -> "PointGeometry":
    if isinstance(T, _ExtendedTable):
        with mpmath.workdps(T.dps):
            return PointGeometry.from_table(w, T, source)
    return PointGeometry.from_table(w, T, source)


def _resolve_source(x: float, source: str) -> str:
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}; expected one of {SOURCES}")
    if source == "auto":
        return "jet" if x >= JET_MIN_X else "closed"
    if source == "jet" and x < JET_MIN_X:
        raise DomainError(f"jet path needs x >= {JET_MIN_X}; use source='fd' or 'closed'")
    return source


def _closed_geometry(x: float) -> PointGeometry:
    g12 = cf.eval_closed_form("g12", x)
    g = np.array([[cf.eval_closed_form("g11", x), g12], [g12, cf.eval_closed_form("g22", x)]], dtype=complex)
    metric = HermitianMetric2.from_matrix(g)
    gam = np.zeros((2, 2, 2), dtype=complex)
    for name, slots in _CHRISTOFFEL_SLOTS.items():
        v = cf.eval_closed_form(name, x)
        for s in slots:
            gam[s] = v
    R = np.zeros((2, 2, 2, 2), dtype=complex)
    for name, slots in CURVATURE_SLOTS.items():
        v = cf.eval_closed_form(name, x)
        for s in slots:
            R[s] = v
    # d_i g_{j lbar} = sum_k g_{k lbar} Gamma^k_{ij}; at a real point d_mbar g_{j lbar} = conj(d_m g_{l jbar})
    dg = np.einsum("kl,kij->ijl", metric.g, gam)
    dgb = dg.transpose(0, 2, 1).conj()
    return PointGeometry((complex(x), 0j), metric, dg, dgb, None, gam, CurvatureTensor2(R), "closed")


_CHRISTOFFEL_SLOTS = {
    "Gamma_1_11": [(0, 0, 0)],
    "Gamma_2_11": [(1, 0, 0)],
    "Gamma_1_12": [(0, 0, 1), (0, 1, 0)],
    "Gamma_1_22": [(0, 1, 1)],
    "Gamma_2_12": [(1, 0, 1), (1, 1, 0)],
    "Gamma_2_22": [(1, 1, 1)],
}

# independent curvature components and the index slots each one fills
CURVATURE_SLOTS = {
    "R_1111": [(0, 0, 0, 0)],
    "R_1122": [(1, 1, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 0, 1, 1)],
    "R_1212": [(0, 1, 0, 1), (1, 0, 1, 0)],
    "R_2111": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
    "R_1222": [(0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)],
    "R_2222": [(1, 1, 1, 1)],
}
CHRISTOFFEL_SLOTS = _CHRISTOFFEL_SLOTS


@lru_cache(maxsize=512)
def _point_geometry(x: float, source: str, scale: float) -> PointGeometry:
    if source == "closed":
        return _closed_geometry(x)
    if source == "jet":
        T = w_table_jet((x, 0.0), scale=scale)
    else:
        T = fd_w_table((x, 0.0), scale=scale)
    return geometry_from_table((complex(x), 0j), T, source)


def point_geometry(x: float, *, source: str = "auto", scale: float = 1.0) -> PointGeometry:
    """All metric and curvature data at the normal point ``(x, 0)`` (cached)."""
    x = _check_x(x)
    return _point_geometry(x, _resolve_source(x, source), float(scale))


def geometry_at_point(w: Sequence[complex], *, source: str = "jet", scale: float = 1.0) -> PointGeometry:
    """Metric and curvature at an arbitrary member ``w`` of G2, without normalizing.

    ``source`` is ``"jet"`` (needs distinct roots) or ``"fd"``.
    """
    from .automorphism import is_member

    w = (complex(w[0]), complex(w[1]))
    if not is_member(w):
        raise DomainError(f"w={w} is not in G2")
    if source == "jet":
        T = w_table_jet(phi_inverse(w)[0], scale=scale)
    elif source == "fd":
        T = fd_w_table(w, scale=scale)
    else:
        raise ValueError(f"unknown source {source!r} for a general point")
    return geometry_from_table(w, T, source)


# ---------------------------------------------------------------------------
# public operations at the normal point


def metric_at(x: float, *, source: str = "auto") -> HermitianMetric2:
    return point_geometry(x, source=source).metric


def metric_first_derivative(x: float, *, source: str = "auto") -> np.ndarray:
    """``dg[i, j, l] = d_i g_{j lbar}`` at ``(x, 0)``."""
    return point_geometry(x, source=source).dg


def metric_antiholomorphic_derivative(x: float, *, source: str = "auto") -> np.ndarray:
    return point_geometry(x, source=source).dgb


def christoffel_at(x: float, *, source: str = "auto") -> np.ndarray:
    """``Gamma[k, i, j] = Gamma^k_{ij}``."""
    return point_geometry(x, source=source).christoffel


def curvature_at(x: float, *, source: str = "auto") -> CurvatureTensor2:
    return point_geometry(x, source=source).curvature


def frame_at(x: float, *, source: str = "auto") -> OrthonormalFrame:
    return point_geometry(x, source=source).frame


def frame_curvatures(x: float, *, source: str = "auto") -> FrameCurvatures:
    return point_geometry(x, source=source).frame_curvatures()


def hsc(x: float, which: str = "X", *, source: str = "auto") -> float:
    """Holomorphic sectional curvature ``H(X)`` or ``H(Y)``."""
    fc = frame_curvatures(x, source=source)
    if which == "X":
        return fc.H_X
    if which == "Y":
        return fc.H_Y
    raise ValueError(f"which must be 'X' or 'Y', got {which!r}")


def bisectional(x: float, *, source: str = "auto") -> float:
    """``B(X, Y) = R(X, Xbar, Y, Ybar)``."""
    return frame_curvatures(x, source=source).B_XY


def mixed_terms(x: float, *, source: str = "auto") -> dict[str, float]:
    fc = frame_curvatures(x, source=source)
    return {"R_XXXY": fc.XXXY.real, "R_YYYX": fc.YYYX.real, "R_XYXY": fc.XYXY.real}


def hsc_general(x: float, direction: Direction, *, method: str = "expansion", source: str = "auto") -> float:
    """``R(V, Vbar, V, Vbar)`` for ``V = aX + bY``.

    ``method="expansion"`` uses the collected frame expansion,
    ``method="contraction"`` contracts the full tensor with the coordinates of V.
    """
    if not isinstance(direction, Direction):
        raise TypeError("direction must be a Direction")
    geo = point_geometry(x, source=source)
    if method == "expansion":
        return float(geo.frame_curvatures().sectional(direction.a, direction.b))
    if method == "contraction":
        if geo.extended is None:
            V = direction.vector(geo.frame)
            return geo.curvature.contract(V, V, V, V).real
        # near the boundary the double-precision tensor loses ~cond(g) * eps
        R, frame, dps = geo.extended
        with mpmath.workdps(dps):
            V = mpmath.mpc(direction.a) * frame.X + mpmath.mpc(direction.b) * frame.Y
            return float(R.contract(V, V, V, V).real)
    raise ValueError(f"unknown method {method!r}")


def L_factor(x):
    """``(3 - 2x^2)^2``, the weight in ``L(V)``."""
    return (3.0 - 2.0 * np.asarray(x) ** 2) ** 2


# ---------------------------------------------------------------------------
# pinching scan

DEFAULT_X_GRID = tuple(k / 100 for k in range(100))
DEFAULT_S_STEPS = 50
DEFAULT_PHASE_STEPS = 64


@dataclass(frozen=True)
class Extremum:
    value: float
    x: float
    s: float
    phase: float


@dataclass(frozen=True)
class PinchScanResult:
    L_min: Extremum
    L_max: Extremum
    R_min: Extremum
    R_max: Extremum
    L_min_refined: float
    L_max_refined: float
    R_min_refined: float
    R_max_refined: float
    samples: int
    nonnegative: int
    bxy_max: float
    bxy_argmax: float
    # one row (x, L_min, L_max, R_min, R_max, B_XY) per scanned x
    per_x: tuple = ()

    def contained(self, tol: float = 1e-6) -> dict[str, bool]:
        lo_L = min(self.L_min.value, self.L_min_refined)
        hi_L = max(self.L_max.value, self.L_max_refined)
        lo_R = min(self.R_min.value, self.R_min_refined)
        hi_R = max(self.R_max.value, self.R_max_refined)
        return {
            "L_lower": lo_L >= -10.0 - tol,
            "L_upper": hi_L <= -0.5 + tol,
            "R_lower": lo_R >= -10.0 - tol,
            "R_upper": hi_R <= -1.0 / 18.0 + tol,
            "negative": self.nonnegative == 0,
        }


def direction_grid(s_steps: int, phase_steps: int):
    s = np.linspace(0.0, 1.0, s_steps)
    phase = 2.0 * np.pi * np.arange(phase_steps) / phase_steps
    return s, phase


def _scan_chunk(args):
    xs, s_steps, phase_steps, source = args
    s, phase = direction_grid(s_steps, phase_steps)
    S, P = np.meshgrid(s, phase, indexing="ij")
    out_R = np.empty((len(xs), s_steps, phase_steps))
    bxy = np.empty(len(xs))
    for k, x in enumerate(xs):
        fc = frame_curvatures(x, source=source)
        out_R[k] = fc.sectional_angles(S, P)
        bxy[k] = fc.B_XY
    return out_R, bxy


def _golden_refine(f, lo: float, mid: float, hi: float) -> float:
    """One golden-section pass on ``[lo, hi]`` bracketing a grid minimizer."""
    if not (lo < mid < hi):
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded")
        return min(float(res.fun), f(mid))
    try:
        res = optimize.minimize_scalar(f, bracket=(lo, mid, hi), method="golden")
        return min(float(res.fun), f(mid))
    except ValueError:
        # the grid point does not bracket a minimum (flat or monotone cell)
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded")
        return min(float(res.fun), f(mid))


def _refine(fc: FrameCurvatures, weight: float, s_grid, p_grid, i: int, j: int, sign: float) -> float:
    """Refine ``sign * weight * R`` around grid cell ``(i, j)`` along s, then phase."""
    s0, p0 = s_grid[i], p_grid[j]
    lo_s, hi_s = s_grid[max(i - 1, 0)], s_grid[min(i + 1, len(s_grid) - 1)]
    fs = lambda s: sign * weight * float(fc.sectional_angles(min(max(s, 0.0), 1.0), p0))  # noqa: E731
    s_best_val = _golden_refine(fs, lo_s, s0, hi_s)
    res = optimize.minimize_scalar(fs, bounds=(lo_s, hi_s), method="bounded")
    s1 = float(res.x) if res.fun <= s_best_val else s0
    dp = p_grid[1] - p_grid[0] if len(p_grid) > 1 else np.pi
    fp = lambda p: sign * weight * float(fc.sectional_angles(s1, p))  # noqa: E731
    val = _golden_refine(fp, p0 - dp, p0, p0 + dp)
    return sign * min(val, s_best_val)


def pinch_scan(
    x_grid: Sequence[float] = DEFAULT_X_GRID,
    s_steps: int = DEFAULT_S_STEPS,
    phase_steps: int = DEFAULT_PHASE_STEPS,
    *,
    workers: Optional[int] = None,
    refine: bool = True,
    source: str = "auto",
) -> PinchScanResult:
    """Extrema of ``R(V, Vbar, V, Vbar)`` and ``L(V) = (3-2x^2)^2 R`` over a grid.

    Directions are ``a = sqrt(s)``, ``b = sqrt(1-s) exp(i phase)``.  Ties
    resolve to the lexicographically smallest ``(x, s, phase)``, and the
    result does not depend on ``workers``.
    """
    xs = [_check_x(v) for v in x_grid]
    if not xs or s_steps < 1 or phase_steps < 1:
        raise ValueError("scan grids must be nonempty")
    xs_arr = np.asarray(xs)
    if workers and workers > 1 and len(xs) > 1:
        chunks = [list(c) for c in np.array_split(xs_arr, min(workers, len(xs))) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_scan_chunk, [(c, s_steps, phase_steps, source) for c in chunks]))
        Rv = np.concatenate([p[0] for p in parts])
        bxy = np.concatenate([p[1] for p in parts])
    else:
        Rv, bxy = _scan_chunk((xs, s_steps, phase_steps, source))
    Lv = Rv * L_factor(xs_arr)[:, None, None]
    s_grid, p_grid = direction_grid(s_steps, phase_steps)

    def ext(arr, fn):
        # argmin/argmax return the first hit in C order, i.e. lexicographic (x, s, phase)
        k = np.unravel_index(fn(arr), arr.shape)
        return Extremum(float(arr[k]), xs[k[0]], float(s_grid[k[1]]), float(p_grid[k[2]])), k

    L_min, kLmin = ext(Lv, np.argmin)
    L_max, kLmax = ext(Lv, np.argmax)
    R_min, kRmin = ext(Rv, np.argmin)
    R_max, kRmax = ext(Rv, np.argmax)
    refined = []
    for (e, k), sign, weighted in (
        ((L_min, kLmin), 1.0, True),
        ((L_max, kLmax), -1.0, True),
        ((R_min, kRmin), 1.0, False),
        ((R_max, kRmax), -1.0, False),
    ):
        if not refine or len(s_grid) < 2:
            refined.append(e.value)
            continue
        fc = frame_curvatures(e.x, source=source)
        wgt = float(L_factor(e.x)) if weighted else 1.0
        r = _refine(fc, wgt, s_grid, p_grid, k[1], k[2], sign)
        refined.append(min(r, e.value) if sign > 0 else max(r, e.value))
    kb = int(np.argmax(bxy))
    return PinchScanResult(
        L_min, L_max, R_min, R_max, *refined,
        samples=int(Rv.size),
        nonnegative=int(np.count_nonzero(Rv >= 0.0)),
        bxy_max=float(bxy[kb]),
        bxy_argmax=xs[kb],
        per_x=tuple(
            (x, float(l0), float(l1), float(r0), float(r1), float(b))
            for x, l0, l1, r0, r1, b in zip(
                xs, Lv.min(axis=(1, 2)), Lv.max(axis=(1, 2)), Rv.min(axis=(1, 2)), Rv.max(axis=(1, 2)), bxy
            )
        ),
    )  # fmt: skip


# ---------------------------------------------------------------------------
# general points and direction extrema


def sectional_extrema(
    fc: FrameCurvatures, s_steps: int = 41, phase_steps: int = 48, starts: int = 6
) -> tuple[float, float]:
    """Min and max of the holomorphic sectional curvature over unit directions.

    The best ``starts`` grid points seed Nelder-Mead in the boundary-free
    chart ``a = cos t``, ``b = sin t exp(i phase)``; the landscape can have
    several basins, so a single start is not enough.
    """
    s, p = direction_grid(s_steps, phase_steps)
    S, P = np.meshgrid(s, p, indexing="ij")
    vals = fc.sectional_angles(S, P)
    out = []
    for sign in (1.0, -1.0):
        flat = np.argsort(sign * vals, axis=None, kind="stable")[:starts]

        def f(v, sign=sign):
            return sign * float(fc.sectional(math.cos(v[0]), math.sin(v[0]) * cmath.exp(1j * v[1])))

        best = sign * float(vals.flat[flat[0]])
        for k in flat:
            i, j = np.unravel_index(k, vals.shape)
            x0 = [math.acos(math.sqrt(s[i])), p[j]]
            res = optimize.minimize(f, x0=x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-15})
            best = min(best, float(res.fun))
        out.append(sign * best)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# Ricci curvature


@dataclass(frozen=True)
class RicciResult:
    ric: np.ndarray
    metric: HermitianMetric2
    einstein_deviation: float
    method: str

    @property
    def hermitian_residual(self) -> float:
        return float(np.abs(self.ric - self.ric.conj().T).max())


def ricci_trace(metric: HermitianMetric2, R: CurvatureTensor2) -> np.ndarray:
    """``Ric_{i jbar} = g^{a bbar} R_{a bbar i jbar}``, equal to ``-d_i d_jbar log det g``."""
    # g^{a bbar} = g_inv[b, a]
    return np.einsum("ba,abij->ij", metric.g_inv, R.R)


def einstein_deviation(ric: np.ndarray, metric: HermitianMetric2) -> float:
    """``|Ric_11/g_11 - Ric_22/g_22| + |Ric_12 - lam g_12|`` with ``lam = tr(g^-1 Ric)/2``."""
    g = metric.g
    lam = _re(sum(metric.g_inv[b, a] * ric[a, b] for a in IDX for b in IDX)) / 2
    diag = abs(_re(ric[0, 0]) / _re(g[0, 0]) - _re(ric[1, 1]) / _re(g[1, 1]))
    return float(diag + abs(ric[0, 1] - lam * g[0, 1]))


def _log_det_at(w1: complex, w2: complex) -> float:
    T = w_table_jet(phi_inverse((w1, w2))[0])
    return math.log(metric_from_table(T).det)


def ricci_at(x: float, *, method: str = "trace", source: str = "auto") -> RicciResult:
    """Ricci form ``Ric_{i jbar} = -d_i d_jbar log det g`` at ``(x, 0)``.

    ``method="trace"`` contracts the curvature tensor, ``g^{a bbar} R_{a bbar i jbar}``.
    ``method="fd"`` differentiates ``log det g`` numerically in the real
    coordinates of ``w`` around the normal point (jet metric at each node).
    """
    x = _check_x(x)
    geo = point_geometry(x, source=source)
    if method == "trace":
        return RicciResult(geo.ricci, geo.metric, geo.einstein_deviation, method)
    if method == "fd":
        h = step_for(x, 1e-2)
        if x - 2 * h < 2e-2:
            raise DomainError("finite-difference Ricci needs x away from 0 (coincident roots)")

        def f(u1, v1, u2, v2):
            return np.array([_log_det_at(complex(a, b), complex(c, d)) for a, b, c, d in zip(u1, v1, u2, v2)])

        alphas = [(2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2), (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0)]
        d = central_derivatives(lambda *a: f(*(np.real(v) for v in a)), (x, 0.0, 0.0, 0.0), alphas, h=h)
        d = {k: v.real for k, v in d.items()}
        # d_k d_lbar = (d_uk - i d_vk)(d_ul + i d_vl) / 4
        ddb = np.empty((2, 2), dtype=complex)
        ddb[0, 0] = (d[(2, 0, 0, 0)] + d[(0, 2, 0, 0)]) / 4
        ddb[1, 1] = (d[(0, 0, 2, 0)] + d[(0, 0, 0, 2)]) / 4
        ddb[0, 1] = (d[(1, 0, 1, 0)] + d[(0, 1, 0, 1)] + 1j * (d[(1, 0, 0, 1)] - d[(0, 1, 1, 0)])) / 4
        ddb[1, 0] = np.conj(ddb[0, 1])
        ric = -ddb
    else:
        raise ValueError(f"unknown method {method!r}")
    return RicciResult(ric, geo.metric, einstein_deviation(ric, geo.metric), method)


def scaled_outputs(x: float, scale: float, *, source: str = "jet"):
    """(metric, Christoffel, curvature) for the kernel multiplied by ``scale``."""
    x = _check_x(x)
    geo = _point_geometry(x, _resolve_source(x, source), float(scale))
    return geo.metric.g, geo.christoffel, geo.curvature.R
