from fractions import Fraction

import numpy as np
import pytest

from g2bergman import closed_forms as cf
from g2bergman.errors import DomainError, UnknownQuantityError
from g2bergman.polynomial import Poly, X

RATIONAL_POINTS = [Fraction(0), Fraction(1, 7), Fraction(1, 2), Fraction(9, 10), Fraction(99, 100)]


def ex(name, x):
    return cf.eval_closed_form_exact(name, x)


@pytest.mark.parametrize(
    "name, value",
    [
        ("g11", Fraction(3, 2)),
        ("g12", Fraction(0)),
        ("g22", Fraction(5)),
        ("det_g", Fraction(15, 2)),
        ("g_inv_11", Fraction(2, 3)),
        ("g_inv_22", Fraction(1, 5)),
        ("Gamma_2_11", Fraction(-4, 5)),
        ("R_1111", Fraction(-3, 10)),
        ("H_X", Fraction(-2, 15)),
        ("H_Y", Fraction(-6, 25)),
        ("B_XY", Fraction(-13, 15)),
        ("f1", Fraction(1755)),
        ("f2", Fraction(1)),
    ],
)
def test_exact_values_at_zero(name, value):
    assert ex(name, 0) == value


def test_bisectional_reference_value():
    assert abs(cf.eval_closed_form("B_XY", 0.9) - 0.00679073) <= 1e-8


def test_registry():
    names = cf.closed_form_names()
    assert len(names) >= 48
    assert names == sorted(names)
    assert "H_Y" in names
    for n in names:
        assert np.isfinite(cf.eval_closed_form(n, 0.5))


@pytest.mark.parametrize("x", RATIONAL_POINTS)
def test_metric_inverse_identity_exact(x):
    g11, g12, g22 = ex("g11", x), ex("g12", x), ex("g22", x)
    i11, i12, i22 = ex("g_inv_11", x), ex("g_inv_12", x), ex("g_inv_22", x)
    assert g11 * i11 + g12 * i12 == 1
    assert g12 * i12 + g22 * i22 == 1
    assert g11 * i12 + g12 * i22 == 0
    assert ex("det_g", x) == g11 * g22 - g12 * g12


@pytest.mark.parametrize("x", RATIONAL_POINTS)
def test_frame_identities_exact(x):
    # H(X) = R_1111 / g11^2 for X = d1/sqrt(g11)
    assert ex("H_X", x) == ex("R_1111", x) / ex("g11", x) ** 2
    s = x * x
    q8 = cf.Q8(x)
    assert ex("B_XY", x) == -((s - 1) ** 2) * ex("f1", x) / ((3 - 2 * s) ** 2 * q8**2)


@pytest.mark.parametrize("x", RATIONAL_POINTS[1:])
def test_parity_in_x(x):
    # forms carrying an odd power of x flip sign, the rest are even
    def r(name, v):
        return cf.get_closed_form(name).rational_part(v)

    for name in ("Gamma_1_11", "Gamma_2_12", "Gamma_1_22", "R_2111", "R_1222", "g12", "g_inv_12"):
        assert r(name, -x) == -r(name, x)
    for name in ("Gamma_2_11", "Gamma_1_12", "Gamma_2_22", "R_1111", "R_1122", "R_2222", "g11", "H_Y"):
        assert r(name, -x) == r(name, x)


def test_denominators_do_not_vanish():
    xs = [Fraction(k, 1000) for k in range(1000)]
    for name in cf.closed_form_names():
        form = cf.get_closed_form(name)
        signs = {(form.denominator(x) > 0) for x in xs}
        assert len(signs) == 1, name
        for rad in form.radicals:
            assert all(rad.base(x) > 0 for x in xs), name


def test_radicals_are_structured():
    form = cf.get_closed_form("R_XXXY")
    assert not form.is_rational
    exps = sorted(r.exponent for r in form.radicals)
    assert exps == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]
    with pytest.raises(ValueError):
        form.exact(Fraction(1, 2))


def test_mp_and_float_agree():
    for name in ("R_XXXY", "R_YYYX", "B", "dB_11b11b"):
        mp = cf.eval_closed_form_mp(name, 0.37)
        assert float(mp) == pytest.approx(cf.eval_closed_form(name, 0.37), rel=1e-15)


def test_errors():
    with pytest.raises(UnknownQuantityError):
        cf.get_closed_form("H_Z")
    with pytest.raises(DomainError):
        cf.eval_closed_form("g11", 1.0)
    with pytest.raises(DomainError):
        cf.eval_closed_form("g11", -0.1)


def test_vectorize():
    f = cf.vectorize("g11")
    assert f([0.0, 0.5]) == [1.5, cf.eval_closed_form("g11", 0.5)]


def test_poly_arithmetic():
    p = (X + 1) ** 3
    assert p.coeffs == (1, 3, 3, 1)
    assert p(Fraction(1, 2)) == Fraction(27, 8)
    assert (p - p).degree == -1
    assert p * 2 == Poly([2, 6, 6, 2])
    assert p(0.5) == pytest.approx(3.375)
    with pytest.raises(ValueError):
        p ** -1
