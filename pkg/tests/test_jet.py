import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from g2bergman import jet
from g2bergman.jet import INDEX, MULTI_INDICES, NCOEFFS, Jet4

small = st.floats(-0.4, 0.4, allow_nan=False)
cplx = st.builds(complex, small, small)


def test_index_layout():
    assert NCOEFFS == 70
    assert MULTI_INDICES[0] == (0, 0, 0, 0)
    assert all(sum(a) <= 4 for a in MULTI_INDICES)
    assert len(set(MULTI_INDICES)) == 70
    assert INDEX[(1, 0, 0, 0)] == 1


def test_taylor_normalization():
    # f = exp(2 z1) has d^4/dz1^4 f(0) = 16
    z1 = Jet4.variable(0, 0.0)
    f = Jet4.constant(1.0)
    term = Jet4.constant(1.0)
    for k in range(1, 5):
        term = term * (2 * z1) / k
        f = f + term
    assert f.coefficient((4, 0, 0, 0)) == pytest.approx(16 / 24)
    assert f.derivative((4, 0, 0, 0)) == pytest.approx(16)


def _poly(z1, z2, c1, c2):
    return (1 + z1 * c1) * (2 - z2 * c2 + z1 * z2) - 3 * c1 * c2


@given(cplx, cplx, cplx, cplx)
def test_product_matches_product_function(a, b, c, d):
    v = [Jet4.variable(k, p) for k, p in enumerate((a, b, c, d))]
    f = _poly(*v)
    g = v[0] * v[1] - v[2] + 0.5
    prod = f * g
    # the product of polynomials is exact through order 4 when degree <= 4
    direct = _poly(*v) * (v[0] * v[1] - v[2] + 0.5)
    np.testing.assert_allclose(prod.coeffs, direct.coeffs, atol=1e-14)
    assert prod.value == pytest.approx(f.value * g.value)


@given(cplx, cplx)
def test_reciprocal_and_log(a, b):
    z1 = Jet4.variable(0, a)
    z2 = Jet4.variable(1, b)
    f = 1 - z1 * z2.__mul__(0.5) + 0.1 * z2
    one = f * f.reciprocal()
    assert abs(one.value - 1) < 1e-14
    assert np.max(np.abs(one.coeffs[1:])) < 1e-13
    # d/dz1 log f = f_z1 / f
    lg = f.log()
    assert lg.derivative((1, 0, 0, 0)) == pytest.approx(f.derivative((1, 0, 0, 0)) / f.value)


def test_reciprocal_fourth_derivative():
    # 1/(1-z) has d^4 = 24 at 0
    z = Jet4.variable(0, 0.0)
    r = (1 - z).reciprocal()
    assert r.derivative((4, 0, 0, 0)) == pytest.approx(24.0)


def test_integer_power_and_errors():
    z = Jet4.variable(2, 0.3)
    assert (z**3).value == pytest.approx(0.027)
    assert (z**-2).value == pytest.approx(1 / 0.09)
    with pytest.raises(TypeError):
        z**0.5
    with pytest.raises(ZeroDivisionError):
        Jet4.variable(0, 0.0).reciprocal()
    with pytest.raises(ValueError):
        Jet4(np.zeros(3))


def test_backends_agree():
    rng = np.random.default_rng(3)
    a = rng.normal(size=NCOEFFS) + 1j * rng.normal(size=NCOEFFS)
    b = rng.normal(size=NCOEFFS) + 1j * rng.normal(size=NCOEFFS)
    ref = jet._mul_numpy(a, b)
    np.testing.assert_allclose(jet._mul(a, b), ref, rtol=1e-14, atol=1e-14)
    with pytest.raises(ValueError):
        jet.use_backend("fortran")


def test_extended_jet_carries_precision():
    import mpmath

    with mpmath.workdps(40):
        z = Jet4.variable(0, mpmath.mpf(1) / 3)
        r = (1 - z).reciprocal()
        assert r.extended
        v = r.derivative((2, 0, 0, 0), raw=True)
        assert abs(v - 2 / (mpmath.mpf(2) / 3) ** 3) < mpmath.mpf(10) ** -35


def test_repr():
    assert "Jet4" in repr(Jet4.constant(2.0))
    assert math.isclose(Jet4.constant(2.0).value.real, 2.0)


def test_pure_python_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    env = dict(os.environ, G2BERGMAN_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from g2bergman import jet; print(jet.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
