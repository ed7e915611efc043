import math

import numpy as np
import pytest

from g2bergman import closed_forms as cf
from g2bergman.errors import DomainError, SingularConfigurationError
from g2bergman.kernel import (
    KERNEL_DERIVATIVE_LABELS,
    PolarizedKernelArgs,
    derivative_table,
    eval_kernel,
    kernel_jet,
    parse_label,
    swap_label,
)

PI2 = math.pi**2


def test_kernel_at_x0():
    x = 0.5
    val = eval_kernel(PolarizedKernelArgs.diagonal(x, 0))
    assert val.real == pytest.approx((2 - x * x) / (2 * PI2 * (1 - x * x) ** 2), rel=1e-14)
    assert val.real == pytest.approx(0.1576107, abs=5e-7)


def test_kernel_at_origin():
    assert eval_kernel(PolarizedKernelArgs.diagonal(0, 0)).real == pytest.approx(1 / PI2, rel=1e-14)
    near = eval_kernel(PolarizedKernelArgs.diagonal(1e-4, -1e-4)).real
    assert near == pytest.approx(1 / PI2, rel=1e-7)


def test_kernel_swap_symmetry():
    args = PolarizedKernelArgs(0.3 + 0.1j, -0.2j, 0.1, 0.4 - 0.2j)
    swapped = PolarizedKernelArgs(args.z2, args.z1, args.c2, args.c1)
    assert eval_kernel(args) == pytest.approx(eval_kernel(swapped), rel=1e-14)


def test_kernel_domain():
    with pytest.raises(DomainError):
        eval_kernel(PolarizedKernelArgs.diagonal(1.0, 0))


def test_jet_first_derivative_example():
    x = 0.5
    j = kernel_jet(PolarizedKernelArgs.diagonal(x, 0))
    expected = x * (x * x - 3) / (2 * PI2 * (x * x - 1) ** 3)
    assert j.derivative((1, 0, 0, 0)).real == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(0.1651160, abs=5e-7)


def test_jet_fourth_order_example():
    x = 0.5
    j = kernel_jet(PolarizedKernelArgs.diagonal(x, 0))
    expected = (-2 * x**6 + 12 * x**4 + 42 * x**2 + 8) / (PI2 * (x * x - 1) ** 6)
    assert j.derivative((2, 0, 2, 0)).real == pytest.approx(expected, rel=1e-10)


def test_jet_refuses_coincident_roots():
    with pytest.raises(SingularConfigurationError):
        kernel_jet(PolarizedKernelArgs.diagonal(0.3, 0.3))


def test_labels():
    assert len(KERNEL_DERIVATIVE_LABELS) == 37
    assert parse_label("11b2") == (1, 1, 1, 0)
    assert parse_label("22b22b") == (0, 2, 0, 2)
    assert swap_label("11b2") == "22b1"
    with pytest.raises(ValueError):
        parse_label("13")


@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.7, 0.95])
def test_table_matches_closed_forms(x):
    at_x0, _ = derivative_table(x)
    for lab, v in at_x0.items():
        ref = cf.eval_closed_form("dB_" + lab, x)
        assert abs(v.real - ref) <= 1e-10 * max(abs(ref), 1.0), lab
        assert abs(v.imag) <= 1e-10 * max(abs(ref), 1.0)


def test_table_example_11b():
    x = 0.5
    at_x0, _ = derivative_table(x)
    expected = (-(x**4) + 4 * x * x + 3) / (2 * PI2 * (x * x - 1) ** 4)
    assert at_x0["11b"].real == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.2, 0.7, 0.9])
def test_tables_at_x0_and_0x_coincide(x):
    a, b = derivative_table(x)
    for lab in KERNEL_DERIVATIVE_LABELS:
        assert abs(a[lab] - b[lab]) <= 1e-10 * max(abs(a[lab]), 1.0)


def test_table_at_zero():
    a, _ = derivative_table(0.0)
    assert a["22b"].real == pytest.approx(3 / (2 * PI2), rel=1e-14)
    assert a["1"] == 0


def test_table_scale_is_linear():
    a, _ = derivative_table(0.4)
    b, _ = derivative_table(0.4, scale=3.0)
    for lab in a:
        assert b[lab] == pytest.approx(3 * a[lab], rel=1e-13)
