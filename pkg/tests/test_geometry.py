import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from g2bergman import closed_forms as cf
from g2bergman import geometry as geo
from g2bergman.errors import DomainError
from g2bergman.fdoracle import central_derivatives

GRID = [round(0.05 * k, 2) for k in range(0, 20)]
xs = st.floats(0.0, 0.99)


def test_metric_at_zero():
    g = geo.metric_at(0.0).g
    np.testing.assert_allclose(g, np.diag([1.5, 5.0]), atol=1e-14)


def test_metric_example():
    assert geo.metric_at(0.5).g[0, 1].real == pytest.approx(-1.75 / 0.5625, rel=1e-12)


@pytest.mark.parametrize("x", GRID + [0.99])
def test_metric_positive_definite_and_inverse(x):
    m = geo.metric_at(x)
    assert m.is_positive_definite()
    assert np.all(np.linalg.eigvalsh(m.g) > 0)
    assert m.identity_residual() <= 1e-10
    assert np.allclose(m.g, m.g.conj().T)


@pytest.mark.parametrize("x", GRID[1:])
def test_determinant_matches_closed_form(x):
    ref = cf.eval_closed_form("det_g", x)
    assert abs(geo.metric_at(x, source="jet").det - ref) <= 1e-9 * abs(ref)


def test_metric_first_derivative_against_fd():
    x = 0.3

    def g11(u, v, a, b):
        return np.array(
            [geo.geometry_at_point((complex(p, q), complex(r, s))).metric.g[0, 0].real for p, q, r, s in zip(u, v, a, b)]
        )

    # d_1 = (d_u - i d_v)/2 along w1 = u + i v
    d = central_derivatives(lambda *a: g11(*(np.real(t) for t in a)), (x, 0, 0, 0), [(1, 0, 0, 0), (0, 1, 0, 0)], h=1e-3)
    fd = 0.5 * (d[(1, 0, 0, 0)] - 1j * d[(0, 1, 0, 0)])
    dg = geo.metric_first_derivative(x)
    assert dg[0, 0, 0] == pytest.approx(fd, rel=1e-4)


def test_metric_derivative_conjugation():
    dg = geo.metric_first_derivative(0.6)
    dgb = geo.metric_antiholomorphic_derivative(0.6)
    assert dgb[0, 0, 0] == pytest.approx(dg[0, 0, 0].conjugate(), rel=1e-12)


def test_metric_derivative_limit_at_zero():
    fd0 = geo.metric_first_derivative(0.0, source="fd")
    near = geo.metric_first_derivative(1e-3, source="jet")
    assert near[0, 1, 1] == pytest.approx(fd0[0, 1, 1], abs=1e-2 * max(1, abs(fd0[0, 1, 1])))


def test_christoffel_at_zero():
    G = geo.christoffel_at(0.0)
    expected = np.zeros((2, 2, 2))
    expected[1, 0, 0] = -0.8
    np.testing.assert_allclose(G, expected, atol=1e-12)


def test_christoffel_symmetric_and_example():
    G = geo.christoffel_at(0.7)
    assert G[0, 1, 0] == pytest.approx(G[0, 0, 1], rel=1e-12)
    x = 0.5
    ref = 2 * x**2 * (x**2 - 3) * (x**2 - 2) ** 2 / (x**8 - 8 * x**6 + 23 * x**4 - 30 * x**2 + 15)
    assert geo.christoffel_at(x, source="jet")[1, 1, 1].real == pytest.approx(ref, rel=1e-9)


def test_curvature_examples():
    R = geo.curvature_at(0.0)
    assert R[0, 0, 0, 0].real == pytest.approx(-0.3, rel=1e-12)
    assert abs(R[1, 0, 0, 0]) < 1e-12
    ref = cf.eval_closed_form("R_1122", 0.5)
    assert geo.curvature_at(0.5, source="jet")[0, 0, 1, 1].real == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("x", GRID[1:] + [0.99])
def test_kaehler_symmetries(x):
    for src in ("jet", "fd"):
        R = geo.curvature_at(x, source=src)
        assert R.symmetry_residual() <= 1e-9 * np.abs(R.R).max()
        assert R.imag_residual() <= 1e-9 * np.abs(R.R).max()


def test_general_point_symmetries():
    g = geo.geometry_at_point((0.3 + 0.2j, -0.1 + 0.15j))
    R = g.curvature
    assert R.symmetry_residual() <= 1e-9 * np.abs(R.R).max()
    assert R.imag_residual() > 1e-6  # components are complex away from normal points


def test_frame_at_zero():
    f = geo.frame_at(0.0)
    assert f.t1 == 0
    assert f.t2 == pytest.approx(1 / math.sqrt(5))
    assert f.X_coeff == pytest.approx(math.sqrt(2 / 3))


@pytest.mark.parametrize("x", [0.3, 0.8, 0.95])
def test_frame_orthonormal(x):
    assert geo.frame_at(x).residual(geo.metric_at(x)) <= 1e-10


def test_near_boundary_residuals_are_at_rounding_level():
    # entries of g are stored in double; near the circle cond(g) ~ 1e8, so
    # products with g only hold to about cond * eps
    m = geo.metric_at(0.9999)
    cond = np.linalg.cond(m.g)
    assert m.is_positive_definite()
    assert m.identity_residual() <= 10 * cond * np.finfo(float).eps
    assert geo.frame_at(0.9999).residual(m) <= 10 * cond * np.finfo(float).eps


def test_sectional_values_at_zero():
    assert geo.hsc(0.0, "X") == pytest.approx(-2 / 15, rel=1e-12)
    assert geo.hsc(0.0, "Y") == pytest.approx(-6 / 25, rel=1e-12)
    assert geo.bisectional(0.0) == pytest.approx(-13 / 15, abs=1e-10)
    with pytest.raises(ValueError):
        geo.hsc(0.5, "Z")


def test_boundary_limits():
    assert -1.01 < geo.hsc(0.9999, "X") < -0.99
    assert -1.01 < geo.hsc(0.9999, "Y") < -0.99
    assert abs(geo.bisectional(0.9999)) < 1e-2


def test_bisectional_reference_value():
    assert abs(geo.bisectional(0.9, source="jet") - 0.00679073) <= 1e-8


def test_mixed_terms():
    m0 = geo.mixed_terms(0.0)
    assert all(abs(v) < 1e-12 for v in m0.values())
    # positive at 0.5, in agreement with the closed form
    m = geo.mixed_terms(0.5, source="jet")
    assert m["R_XXXY"] == pytest.approx(cf.eval_closed_form("R_XXXY", 0.5), rel=1e-9)
    assert m["R_XXXY"] > 0
    fr, R = geo.frame_at(0.6), geo.curvature_at(0.6)
    X, Y = fr.X, fr.Y
    assert R.contract(X, X, X, Y) == pytest.approx(R.contract(X, X, Y, X), rel=1e-10)
    assert R.contract(X, X, X, Y) == pytest.approx(R.contract(X, Y, X, X), rel=1e-10)


def test_hsc_general_examples():
    assert geo.hsc_general(0.4, geo.Direction(1, 0)) == pytest.approx(geo.hsc(0.4, "X"), rel=1e-12)
    assert geo.hsc_general(0.4, geo.Direction(0, 1)) == pytest.approx(geo.hsc(0.4, "Y"), rel=1e-12)
    r = 1 / math.sqrt(2)
    assert geo.hsc_general(0.0, geo.Direction(r, r)) == pytest.approx(-0.96, rel=1e-12)
    with pytest.raises(ValueError):
        geo.Direction(1, 1)


@given(xs, st.floats(0, 1), st.floats(0, 2 * math.pi))
def test_expansion_matches_contraction(x, s, phase):
    d = geo.Direction.from_angles(s, phase)
    e = geo.hsc_general(x, d, method="expansion")
    c = geo.hsc_general(x, d, method="contraction")
    assert abs(e - c) <= 1e-9 * max(1.0, abs(c))


def test_sectional_negative_on_grid():
    for x in (0.0, 0.5, 0.9):
        lo, hi = geo.sectional_extrema(geo.frame_curvatures(x))
        assert -10 <= lo <= hi < 0


def test_pinch_scan_small_and_deterministic():
    a = geo.pinch_scan([0.0, 0.3, 0.6, 0.9], 11, 16, workers=1)
    b = geo.pinch_scan([0.0, 0.3, 0.6, 0.9], 11, 16, workers=2)
    assert a == b
    assert all(a.contained().values())
    assert len(a.per_x) == 4


def test_pinch_scan_single_point_zero():
    res = geo.pinch_scan([0.0], 51, 64, workers=1)
    lo, hi = geo.sectional_extrema(geo.frame_curvatures(0.0))
    assert res.L_min_refined == pytest.approx(9 * lo, rel=1e-6)
    assert res.L_max_refined == pytest.approx(9 * hi, rel=1e-6)
    assert res.L_max.value == pytest.approx(-6 / 5, rel=1e-12)


def test_ricci_methods_agree():
    for x in (0.3, 0.5, 0.9):
        t = geo.ricci_at(x)
        f = geo.ricci_at(x, method="fd")
        np.testing.assert_allclose(f.ric, t.ric, rtol=1e-6, atol=1e-6 * np.abs(t.ric).max())


def test_ricci_properties():
    r = geo.ricci_at(0.5)
    assert r.hermitian_residual <= 1e-6
    assert r.einstein_deviation > 1e-3
    far = geo.ricci_at(0.9999)
    assert np.isfinite(far.einstein_deviation) and far.einstein_deviation < 1.0
    with pytest.raises(DomainError):
        geo.ricci_at(0.0, method="fd")


def test_kernel_scale_is_immaterial():
    g1, G1, R1 = geo.scaled_outputs(0.4, 1.0)
    g2, G2, R2 = geo.scaled_outputs(0.4, 7.5)
    np.testing.assert_allclose(g2, g1, rtol=1e-12)
    np.testing.assert_allclose(G2, G1, rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(R2, R1, rtol=1e-10, atol=1e-12)


def test_sources_agree_and_validate():
    a = geo.frame_curvatures(0.4, source="closed")
    b = geo.frame_curvatures(0.4, source="jet")
    assert a.B_XY == pytest.approx(b.B_XY, rel=1e-9)
    with pytest.raises(DomainError):
        geo.metric_at(1.0)
    with pytest.raises(DomainError):
        geo.point_geometry(0.0, source="jet")
    with pytest.raises(ValueError):
        geo.point_geometry(0.3, source="magic")
