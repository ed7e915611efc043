"""Registry of exact closed forms in the normalization parameter ``x``.

Every quantity at the normal point ``(x, 0)`` is stored as::

    pi^k * N(x) / D(x) * prod_r (P_r(x) / Q_r(x)) ** e_r

with ``N, D, P_r, Q_r`` rational polynomials and ``e_r`` rational exponents.
The rational part is evaluated exactly (``Fraction``), so a float result is
the correctly rounded value of the stored expression up to the radical and
``pi`` factors, which are taken in extended precision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import DomainError, UnknownQuantityError
from .polynomial import Poly, X

EXTENDED_DPS = 40


@dataclass(frozen=True)
class Radical:
    """``(base_num / base_den) ** exponent`` with a positive base on ``[0, 1)``."""

    base_num: Poly
    base_den: Poly = field(default_factory=lambda: Poly([1]))
    exponent: Fraction = Fraction(1, 2)

    def base(self, x: Fraction) -> Fraction:
        return self.base_num(x) / self.base_den(x)


@dataclass(frozen=True)
class ClosedForm:
    name: str
    numerator: Poly
    denominator: Poly
    pi_power: int = 0
    radicals: tuple[Radical, ...] = ()
    description: str = ""

    @property
    def is_rational(self) -> bool:
        return self.pi_power == 0 and not self.radicals

    def rational_part(self, x) -> Fraction:
        x = _as_fraction(x)
        den = self.denominator(x)
        if den == 0:
            raise ZeroDivisionError(f"{self.name}: denominator vanishes at x={x}")
        return self.numerator(x) / den

    def exact(self, x) -> Fraction:
        """Exact value; only for forms without ``pi`` or radical factors."""
        if not self.is_rational:
            raise ValueError(f"{self.name} is not a rational function of x")
        return self.rational_part(x)

    def evaluate_mp(self, x, dps: int = EXTENDED_DPS):
        xf = _as_fraction(x)
        with mpmath.workdps(dps):
            r = self.rational_part(xf)
            val = mpmath.mpf(r.numerator) / r.denominator
            if self.pi_power:
                val *= mpmath.pi**self.pi_power
            for rad in self.radicals:
                b = rad.base(xf)
                if b <= 0:
                    raise DomainError(f"{self.name}: radicand {b} is not positive at x={x}")
                e = rad.exponent
                val *= (mpmath.mpf(b.numerator) / b.denominator) ** (mpmath.mpf(e.numerator) / e.denominator)
            return +val

    def evaluate(self, x) -> float:
        if self.is_rational:
            return float(self.rational_part(x))
        return float(self.evaluate_mp(x))

    __call__ = evaluate


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


# ---------------------------------------------------------------------------
# shorthand polynomials

ONE = Poly([1])
S = X * X  # x^2
Q8 = S**4 - 8 * S**3 + 23 * S**2 - 30 * S + 15  # (x^4-5x^2+5)(x^4-3x^2+3)
M1 = S - 1
M2 = S - 2
T3 = 3 - 2 * S
P5 = S**2 - 5 * S + 5
P3 = S**2 - 3 * S + 3
E5 = 2 * S**2 - 6 * S + 5
D6 = 4 * S**3 - 18 * S**2 + 28 * S - 15  # (2x^2-3)(2x^4-6x^2+5)

F1 = (
    9 * S**10 - 162 * S**9 + 1297 * S**8 - 6074 * S**7 + 18412 * S**6 - 37738 * S**5
    + 52968 * S**4 - 50274 * S**3 + 30876 * S**2 - 11070 * S + 1755
)
HY_NUM = (
    9 * S**14 - 225 * S**13 + 2575 * S**12 - 17844 * S**11 + 83491 * S**10
    - 278485 * S**9 + 681267 * S**8 - 1237584 * S**7 + 1668725 * S**6 - 1646775 * S**5
    + 1150505 * S**4 - 531240 * S**3 + 137820 * S**2 - 9810 * S - 2430
)
HY_DEN = T3**2 * P5**3 * P3**2

_REGISTRY: dict[str, ClosedForm] = {}


def _reg(name, num, den=ONE, *, pi=0, radicals=(), doc=""):
    if name in _REGISTRY:
        raise ValueError(f"duplicate closed form {name!r}")
    _REGISTRY[name] = ClosedForm(name, Poly._lift(num), Poly._lift(den), pi, tuple(radicals), doc)


# kernel and its z-derivatives at (x, 0); the 1/pi^2 factors are carried by pi_power
_reg("B", 2 - S, 2 * (1 - S) ** 2, pi=-2, doc="kernel on the diagonal")

# Labels list the differentiations in order: "11b2" = d_1 d_1bar d_2.
KERNEL_FORMS = {
    "1": (X * (S - 3), 2 * M1**3),
    "2": (-X * (2 * S - 3), 2 * M1**2),
    "11b": (-(S**2) + 4 * S + 3, 2 * M1**4),
    "12b": (S - 3, 2 * M1**3),
    "21b": (S - 3, 2 * M1**3),
    "22b": (-4 * S**2 + 4 * S + 3, 2 * M1**2),
    "11": (-S * (S - 4), M1**4),
    "12": (S * (S - 2), M1**3),
    "22": (4 * S - 3 * S**2, M1**2),
    "11b1": (X * (S**2 - 5 * S - 8), M1**5),
    "11b2": (-X * (S - 4), M1**4),
    "12b1": (-X * (S - 4), M1**4),
    "21b1": (-X * (S - 4), M1**4),
    "12b2": (X * (2 * S - 5), M1**3),
    "22b1": (X * (2 * S - 5), M1**3),
    "21b2": (-X * (3 * S**2 - 9 * S + 8), M1**3),
    "22b2": (-6 * X**5 + 5 * X**3 + 4 * X, M1**2),
    "11b1b": (-(-(X**5) + 5 * X**3 + 8 * X), M1**5),
    "11b2b": (4 * X - X**3, M1**4),
    "12b1b": (4 * X - X**3, M1**4),
    "21b1b": (4 * X - X**3, M1**4),
    "12b2b": (-X * (3 * S**2 - 9 * S + 8), M1**3),
    "22b1b": (-(5 * X - 2 * X**3), M1**3),
    "21b2b": (-(5 * X - 2 * X**3), M1**3),
    "22b2b": (-6 * X**5 + 5 * X**3 + 4 * X, M1**2),
    "11b11b": (-2 * S**3 + 12 * S**2 + 42 * S + 8, M1**6),
    "11b12b": (2 * (S**2 - 5 * S - 2), M1**5),
    "11b21b": (2 * (S**2 - 5 * S - 2), M1**5),
    "12b11b": (2 * (S**2 - 5 * S - 2), M1**5),
    "11b22b": (-2 * S**2 + 6 * S + 5, M1**4),
    "12b21b": (-2 * S**2 + 6 * S + 5, M1**4),
    "22b11b": (-2 * S**2 + 6 * S + 5, M1**4),
    "12b12b": (-2 * (S - 4), M1**4),
    "22b12b": (-2 * (3 * S**3 - 9 * S**2 + 7 * S + 2), M1**3),
    "22b21b": (-2 * (3 * S**3 - 9 * S**2 + 7 * S + 2), M1**3),
    "12b22b": (-2 * (3 * S**3 - 9 * S**2 + 7 * S + 2), M1**3),
    "22b22b": (2 * (-9 * S**3 + 6 * S**2 + 5 * S + 4), M1**2),
}
for _lab, (_n, _d) in KERNEL_FORMS.items():
    _reg("dB_" + _lab, _n, _d, pi=-2, doc=f"kernel derivative {_lab} at (x, 0)")

# w-derivatives of B_G2 at (x, 0)
_reg("dBG_1", X * (S - 3), 2 * M1**3, pi=-2)
_reg("dBG_2", -S * M2, M1**3, pi=-2)
_reg("dBG_11b", -(S**2) + 4 * S + 3, 2 * M1**4, pi=-2)
_reg("dBG_12b", X * (S - 4), M1**4, pi=-2)
_reg("dBG_22b", -2 * S**3 + 6 * S**2 - 6 * S + 5, M1**4, pi=-2)

# metric, inverse, determinant
_reg("g11", 6 - 4 * S, (S**2 - 3 * S + 2) ** 2)
_reg("g12", 2 * X * M2, M1**2)
_reg("g22", -2 * E5, M2 * M1**2)
_reg("g_inv_11", M2**2 * E5, 2 * Q8)
_reg("g_inv_12", X * M2**4, 2 * Q8)
_reg("g_inv_22", 2 * S**2 - 7 * S + 6, 2 * Q8)
_reg("det_g", -4 * Q8, M2**3 * M1**2)

# Christoffel symbols Gamma^k_{ij}, named Gamma_k_ij
_reg("Gamma_1_11", 2 * X * (S**3 - 2 * S**2 - S + 3), M2 * M1 * Q8)
_reg("Gamma_2_11", 6 * M2, Q8)
_reg("Gamma_1_12", 2 * S * M2**2, M1 * Q8)
_reg("Gamma_1_22", 2 * X**3 * M2**3, M1 * Q8)
_reg("Gamma_2_12", -X * (S**4 - 10 * S**3 + 37 * S**2 - 62 * S + 39), M2 * Q8)
_reg("Gamma_2_22", 2 * S * (S - 3) * M2**2, Q8)

# curvature R_{a bbar c dbar}, named R_abcd
_reg(
    "R_1111",
    4 * (9 * S**8 - 108 * S**7 + 551 * S**6 - 1552 * S**5 + 2605 * S**4 - 2598 * S**3 + 1410 * S**2 - 300 * S - 18),
    (S**2 - 3 * S + 2) ** 4 * Q8,
)
_reg(
    "R_1122",
    4 * (S**8 - 12 * S**7 + 68 * S**6 - 248 * S**5 + 627 * S**4 - 1074 * S**3 + 1170 * S**2 - 726 * S + 195),
    M2**3 * M1**4 * Q8,
)
_reg(
    "R_1212",
    -4 * S * (S**6 - 12 * S**5 + 59 * S**4 - 160 * S**3 + 245 * S**2 - 198 * S + 66),
    M1**4 * Q8,
)
_reg(
    "R_2111",
    4 * X * (2 * S**5 - 19 * S**4 + 76 * S**3 - 147 * S**2 + 138 * S - 51),
    M2 * M1**4 * Q8,
)
_reg(
    "R_1222",
    4 * X * (S**6 - 10 * S**5 + 47 * S**4 - 130 * S**3 + 207 * S**2 - 174 * S + 60),
    M1**4 * Q8,
)
_reg(
    "R_2222",
    4 * (7 * S**8 - 84 * S**7 + 423 * S**6 - 1156 * S**5 + 1829 * S**4 - 1614 * S**3 + 624 * S**2 + 60 * S - 90),
    M2**2 * M1**4 * Q8,
)

# frame quantities
_reg(
    "H_X",
    9 * S**8 - 108 * S**7 + 551 * S**6 - 1552 * S**5 + 2605 * S**4 - 2598 * S**3 + 1410 * S**2 - 300 * S - 18,
    T3**2 * Q8,
)
_reg("H_Y", HY_NUM, HY_DEN, doc="H(Y) times its polynomial factor equals a degree-28 polynomial")
_reg("f1", F1)
_reg("B_XY", -(M1**2) * F1, T3**2 * Q8**2)
_reg("f2", -Q8, D6)

_F2 = Radical(-Q8, D6, Fraction(1, 2))
_reg(
    "R_XXXY",
    -3 * X * (1 - S) ** 3 * (3 * S**4 - 24 * S**3 + 71 * S**2 - 92 * S + 45),
    T3**2 * D6,
    radicals=(
        Radical(2 - S, ONE, Fraction(5, 2)),
        Radical(ONE, E5 * T3, Fraction(1, 2)),
        Radical(D6, -Q8, Fraction(3, 2)),
    ),
    doc="R(X, Xbar, X, Ybar)",
)
_reg(
    "R_YYYX",
    X * M1**2 * (9 * S**7 - 126 * S**6 + 739 * S**5 - 2335 * S**4 + 4276 * S**3 - 4545 * S**2 + 2610 * S - 630),
    T3**2 * P5**2 * P3,
    radicals=(
        Radical(2 - S, ONE, Fraction(5, 2)),
        Radical(ONE, E5 * T3, Fraction(1, 2)),
        Radical(D6, -Q8, Fraction(1, 2)),
    ),
    doc="R(Y, Ybar, Y, Xbar)",
)
_reg(
    "R_XYXY",
    -3 * S * M2**3 * M1**2 * (3 * S**4 - 27 * S**3 + 89 * S**2 - 124 * S + 62),
    T3**2 * P5**2 * P3,
    doc="R(X, Ybar, X, Ybar)",
)


def closed_form_names() -> list[str]:
    return sorted(_REGISTRY)


def get_closed_form(name: str) -> ClosedForm:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownQuantityError(f"unknown closed form {name!r}") from None


def _check_x(x) -> None:
    if not 0 <= x < 1:
        raise DomainError(f"x={x} is outside [0, 1)")


def eval_closed_form(name: str, x) -> float:
    """Value of a registered form at ``x`` in ``[0, 1)``, as a float."""
    form = get_closed_form(name)
    _check_x(x)
    return form.evaluate(x)


def eval_closed_form_exact(name: str, x) -> Fraction:
    """Exact rational value; raises ``ValueError`` for forms with pi or radicals."""
    form = get_closed_form(name)
    _check_x(x)
    return form.exact(x)


def eval_closed_form_mp(name: str, x, dps: int = EXTENDED_DPS):
    form = get_closed_form(name)
    _check_x(x)
    return form.evaluate_mp(x, dps)


def vectorize(name: str) -> Callable:
    """Elementwise float evaluator, convenient for grids."""
    form = get_closed_form(name)

    def f(xs):
        return [form.evaluate(v) for v in xs]

    return f
