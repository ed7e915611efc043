"""Three-way verification: closed forms against the jet pipeline and the FD oracle.

For every registered quantity and grid point the report holds the closed
form, the pipeline value (kernel jet, pushforward, geometry) and the value
from finite differences of ``B_G2`` in w-coordinates.  At ``x = 0`` the
change of variables is singular, so the pipeline column is empty there and
only the oracle is compared.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import closed_forms as cf
from . import geometry as geo
from .errors import SingularConfigurationError, UnknownQuantityError
from .fdoracle import fd_kernel_derivatives
from .kernel import (
    KERNEL_DERIVATIVE_LABELS,
    PolarizedKernelArgs,
    eval_kernel,
    kernel_jet,
    parse_label,
)

CSV_HEADER = ("quantity", "x", "closed_form", "pipeline", "oracle", "abs_err", "rel_err", "pass")

DEFAULT_TOLERANCES = {
    "pipeline": 1e-8,  # pipeline vs closed form, rational forms
    "radical": 1e-7,  # pipeline vs closed form, forms with radical factors
    "oracle": 1e-4,  # finite-difference oracle vs closed form
}

DEFAULT_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))

_DBG = {"dBG_1": ((0,), ()), "dBG_2": ((1,), ()), "dBG_11b": ((0,), (0,)), "dBG_12b": ((0,), (1,)), "dBG_22b": ((1,), (1,))}
_METRIC = {"g11": (0, 0), "g12": (0, 1), "g22": (1, 1)}
_INVERSE = {"g_inv_11": (0, 0), "g_inv_12": (0, 1), "g_inv_22": (1, 1)}


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else "%.17g" % v


@dataclass(frozen=True)
class VerificationRow:
    quantity: str
    x: float
    closed_form: float
    pipeline: Optional[float]
    oracle: Optional[float]
    abs_err: float
    rel_err: float
    passed: bool

    def csv_fields(self) -> list[str]:
        return [
            self.quantity,
            _fmt(self.x),
            _fmt(self.closed_form),
            _fmt(self.pipeline),
            _fmt(self.oracle),
            _fmt(self.abs_err),
            _fmt(self.rel_err),
            "true" if self.passed else "false",
        ]


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple[VerificationRow, ...]
    tolerances: Mapping[str, float] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.rows)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    @property
    def max_rel_err(self) -> float:
        return max((r.rel_err for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def failures(self) -> list[VerificationRow]:
        return [r for r in self.rows if not r.passed]

    def summary(self) -> dict:
        return {"total": self.total, "passed": self.passed, "failed": self.failed, "max_rel_err": self.max_rel_err}

    def to_csv(self) -> str:
        return rows_to_csv(r.csv_fields() for r in self.rows)

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def rows_to_csv(rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def relative_error(value: float, reference: float) -> float:
    """``|value - reference| / |reference|``, or the absolute error when the reference is 0."""
    scale = abs(reference) if reference != 0 else 1.0
    return abs(value - reference) / scale


# ---------------------------------------------------------------------------
# value providers


def _frame_values(g: geo.PointGeometry, x: float) -> dict[str, float]:
    fc = g.frame_curvatures()
    q8 = cf.Q8(cf._as_fraction(x))
    f1 = -fc.B_XY * (3 - 2 * x * x) ** 2 * float(q8) ** 2 / (x * x - 1) ** 2
    return {
        "H_X": fc.H_X,
        "H_Y": fc.H_Y,
        "B_XY": fc.B_XY,
        "f1": f1,
        "f2": g.frame.tilde_norm2 / (1 - x * x) ** 2,
        "R_XXXY": fc.XXXY.real,
        "R_YYYX": fc.YYYX.real,
        "R_XYXY": fc.XYXY.real,
    }


def _geometry_values(g: geo.PointGeometry, x: float) -> dict[str, float]:
    out = {}
    for name, (i, j) in _METRIC.items():
        out[name] = g.metric.g[i, j].real
    for name, (i, j) in _INVERSE.items():
        # g^{i jbar} = g_inv[j, i]; real at normal points
        out[name] = g.metric.g_inv[j, i].real
    out["det_g"] = float(g.metric.det)
    for name, slots in geo.CHRISTOFFEL_SLOTS.items():
        out[name] = g.christoffel[slots[0]].real
    for name, slots in geo.CURVATURE_SLOTS.items():
        out[name] = g.curvature.R[slots[0]].real
    out.update(_frame_values(g, x))
    if g.table is not None:
        for name, (h, a) in _DBG.items():
            out[name] = g.table.d(h, a).real
    return out


def pipeline_values(x: float) -> dict[str, float]:
    """Every registered quantity at ``(x, 0)`` through kernel jet, pushforward and geometry."""
    if x < geo.JET_MIN_X:
        raise SingularConfigurationError("the jet pipeline is unavailable at x = 0")
    out = _geometry_values(geo.point_geometry(x, source="jet"), x)
    jet = kernel_jet(PolarizedKernelArgs.diagonal(x, 0.0))
    out["B"] = jet.value.real
    for lab in KERNEL_DERIVATIVE_LABELS:
        out["dB_" + lab] = jet.derivative(parse_label(lab)).real
    return out


def oracle_values(x: float) -> dict[str, float]:
    """Every registered quantity from finite differences (valid at x = 0)."""
    out = _geometry_values(geo.point_geometry(x, source="fd"), x)
    out["B"] = eval_kernel(PolarizedKernelArgs.diagonal(x, 0.0)).real
    alphas = sorted({parse_label(lab) for lab in KERNEL_DERIVATIVE_LABELS})
    d = fd_kernel_derivatives(x, 0.0, alphas)
    for lab in KERNEL_DERIVATIVE_LABELS:
        out["dB_" + lab] = d[parse_label(lab)].real
    return out


def quantity_value(name: str, x: float, *, source: str = "auto") -> float:
    """One quantity at ``(x, 0)`` (used by the CLI ``eval`` command)."""
    x = geo._check_x(x)
    if name == "einstein_deviation":
        return geo.ricci_at(x, source=source).einstein_deviation
    cf.get_closed_form(name)  # raises for unknown names
    if source == "closed":
        return cf.eval_closed_form(name, x)
    resolved = geo._resolve_source(x, source)
    if resolved == "closed":
        return cf.eval_closed_form(name, x)
    vals = pipeline_values(x) if resolved == "jet" else oracle_values(x)
    return vals[name]


def quantity_names() -> list[str]:
    return cf.closed_form_names() + ["einstein_deviation"]


# ---------------------------------------------------------------------------


def _tolerance_for(name: str, tol: Mapping[str, float]) -> float:
    if name in tol:
        return tol[name]
    form = cf.get_closed_form(name)
    return tol["radical"] if form.radicals else tol["pipeline"]


def run_verification(
    grid: Sequence[float] = DEFAULT_GRID,
    *,
    quantities: Optional[Sequence[str]] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    closed_form_override: Optional[Mapping[str, Callable[[float], float]]] = None,
) -> VerificationReport:
    """Compare every quantity on ``grid``.

    A row passes when the pipeline is within its tolerance of the closed
    form (``pipeline``/``radical`` or a per-quantity override) and the oracle
    is within ``oracle``.  ``abs_err`` and ``rel_err`` report the larger
    deviation of the two columns.  ``closed_form_override`` replaces the
    closed-form side for selected names (used to exercise failure paths).
    """
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in (tolerances or {}).items():
        if k not in DEFAULT_TOLERANCES and k not in cf.closed_form_names():
            raise UnknownQuantityError(f"unknown tolerance name {k!r}")
        tol[k] = float(v)
    names = list(quantities) if quantities is not None else cf.closed_form_names()
    for n in names:
        cf.get_closed_form(n)
    override = dict(closed_form_override or {})
    rows = []
    for x in sorted(set(float(v) for v in grid)):
        x = geo._check_x(x)
        pipe = pipeline_values(x) if x >= geo.JET_MIN_X else {}
        orac = oracle_values(x)
        for name in names:
            closed = override[name](x) if name in override else cf.eval_closed_form(name, x)
            p, o = pipe.get(name), orac.get(name)
            errs, ok = [], True
            if p is not None:
                errs.append((abs(p - closed), relative_error(p, closed)))
                ok &= errs[-1][1] <= _tolerance_for(name, tol)
            if o is not None:
                errs.append((abs(o - closed), relative_error(o, closed)))
                ok &= errs[-1][1] <= tol["oracle"]
            if not errs:
                ok = False
                errs.append((math.nan, math.nan))
            ok &= all(np.isfinite(e[1]) for e in errs)
            abs_err = max(e[0] for e in errs)
            rel_err = max(e[1] for e in errs)
            rows.append(VerificationRow(name, x, closed, p, o, abs_err, rel_err, bool(ok)))
    rows.sort(key=lambda r: (r.quantity, r.x))
    return VerificationReport(tuple(rows), tol)
