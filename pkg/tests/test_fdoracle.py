import numpy as np
import pytest

from g2bergman import closed_forms as cf
from g2bergman.fdoracle import central_derivatives, fd_kernel_derivatives, fd_w_table, roots_array
from g2bergman.geometry import w_table_jet
from g2bergman.kernel import KERNEL_DERIVATIVE_LABELS, parse_label


def test_central_derivatives_on_polynomial():
    f = lambda a, b, c, d: a**3 * c + 2 * b * d**2  # noqa: E731
    d = central_derivatives(f, (0.3, 0.1, -0.2, 0.4), [(3, 0, 1, 0), (0, 1, 0, 2), (1, 0, 0, 0)], h=0.1)
    assert d[(3, 0, 1, 0)] == pytest.approx(6, rel=1e-10)
    assert d[(0, 1, 0, 2)] == pytest.approx(4, rel=1e-10)
    assert d[(1, 0, 0, 0)] == pytest.approx(3 * 0.09 * -0.2, rel=1e-10)


def test_extended_and_double_paths_agree():
    f = lambda a, b, c, d: 1 / (1 - a * c) ** 2 / (1 - b * d)  # noqa: E731
    alphas = [(1, 0, 1, 0), (2, 0, 2, 0)]
    lo = central_derivatives(f, (0.4, 0.1, 0.4, 0.1), alphas, h=0.02, dps=None)
    hi = central_derivatives(f, (0.4, 0.1, 0.4, 0.1), alphas, h=1e-3, dps=40)
    for a in alphas:
        assert lo[a] == pytest.approx(hi[a], rel=1e-6)


def test_roots_array_both_paths():
    import mpmath

    r1, r2 = roots_array(np.array([1.0, 0.0]), np.array([0.25, -0.25]))
    np.testing.assert_allclose(np.sort_complex(np.r_[r1[1], r2[1]]).real, [-0.5, 0.5])
    with mpmath.workdps(30):
        m1, m2 = roots_array(np.array([mpmath.mpc(0.9)], dtype=object), np.array([mpmath.mpc(0)], dtype=object))
    assert {complex(m1[0]), complex(m2[0])} == {0.9, 0}


@pytest.mark.parametrize("x", [0.0, 0.5, 0.9])
def test_kernel_derivatives_match_closed_forms(x):
    alphas = sorted({parse_label(lab) for lab in KERNEL_DERIVATIVE_LABELS})
    d = fd_kernel_derivatives(x, 0.0, alphas)
    for lab in KERNEL_DERIVATIVE_LABELS:
        ref = cf.eval_closed_form("dB_" + lab, x)
        assert abs(d[parse_label(lab)].real - ref) <= 1e-4 * max(abs(ref), 1.0), lab


@pytest.mark.parametrize("x", [0.05, 0.3, 0.6, 0.95])
def test_w_table_matches_pushforward(x):
    T_fd = fd_w_table((x, 0.0)).values
    T_jet = w_table_jet((x, 0.0)).values
    np.testing.assert_allclose(T_fd, T_jet, rtol=1e-4, atol=1e-4 * np.abs(T_jet).max())


def test_w_table_at_branch_point():
    T = fd_w_table((0.0, 0.0))
    assert T.d().real == pytest.approx(1 / np.pi**2, rel=1e-10)
    assert T.d((0,), (0,)).real == pytest.approx(cf.eval_closed_form("dBG_11b", 0.0), rel=1e-8)


def test_w_table_general_point_symmetry():
    T = fd_w_table((0.2 + 0.1j, -0.1 + 0.05j))
    assert T.conjugation_residual() < 1e-9 * np.abs(T.values).max()
