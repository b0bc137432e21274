from fractions import Fraction

import pytest

from dyangian.scalars import HSeries
from dyangian.spectral import (
    BiSeries,
    Chart,
    ChartError,
    DiffOpSeries,
    Poly,
    WindowError,
    apply_cartan_op,
    apply_shift,
    delta_coeff,
    expand_rational,
    op_one_minus_qdinv_over_hd,
    op_one_plus_qd_inv,
    op_one_plus_qdinv_inv,
    op_qd_minus_one_over_hd,
    op_tanh_half_over_d,
)

N = 4
Z = Poly.var("z")
W = Poly.var("w")
H = Poly.var("h")
ONE = Poly.const(1)
WIN = ((-6, 6), (-6, 6))


def test_geometric_series_dominant_chart():
    s = expand_rational(ONE, Z - W, Chart("z", "w"), WIN, N)
    assert s.coeff(-1, 0) == HSeries.one(N)
    assert s.coeff(-3, 2) == HSeries.one(N)
    assert s.coeff(0, -1).is_zero()


def test_prefactor_long_division():
    # (z - w + h)/(z - w) in |z|>|w|; coefficient of z^-1 w^0 is hbar
    s = expand_rational(Z - W + H, Z - W, Chart("z", "w"), WIN, N)
    assert s.coeff(-1, 0) == HSeries.hbar(1, N)
    assert s.coeff(0, 0) == HSeries.one(N)
    # long-division oracle: 1 + h*sum_j w^j z^(-j-1), so z^-2 w^1 carries h
    assert s.coeff(-2, 1) == HSeries.hbar(1, N)


def test_opposite_chart():
    s = expand_rational(ONE, Z - W, Chart("w", "z"), WIN, N, vars=("z", "w"))
    assert s.coeff(-1, 0).is_zero()
    assert s.coeff(0, -1) == HSeries.const(-1, N)


def test_window_query_raises():
    s = expand_rational(ONE, Z - W, Chart("z", "w"), ((-2, 2), (-2, 2)), N)
    with pytest.raises(WindowError):
        s.coeff(-5, 0)


def test_chart_mismatch_is_error():
    a = expand_rational(ONE, Z - W, Chart("z", "w"), WIN, N)
    b = expand_rational(ONE, Z - W, Chart("w", "z"), WIN, N, vars=("z", "w"))
    with pytest.raises(ChartError):
        a + b


def test_chart_coherence_multiply_back():
    # expanding p/q then multiplying by q returns p on interior coefficients
    den = Z - W - H
    s = expand_rational(Z + W, den, Chart("z", "w"), ((-8, 8), (-8, 8)), N)
    q = expand_rational(den, ONE, Chart("z", "w"), ((-8, 8), (-8, 8)), N)
    p = s.mul(q, window=((-3, 3), (-3, 3)))
    assert p.coeff(1, 0) == HSeries.one(N)
    assert p.coeff(0, 1) == HSeries.one(N)
    for a in range(-3, 2):
        for b in range(-3, 2):
            if (a, b) not in ((1, 0), (0, 1)):
                assert p.coeff(a, b).is_zero(), (a, b)


def test_delta_coeff():
    assert delta_coeff(3, -4) == 1
    assert delta_coeff(0, 0) == 0
    assert delta_coeff(-1, 0) == 1


def test_apply_shift_binomial():
    s = {-1: HSeries.one(2)}
    out = apply_shift(s, 1, 2)
    assert out[-1] == HSeries.one(2)
    assert out[-2] == HSeries.hbar(1, 2, -1)
    assert out[-3] == HSeries.hbar(2, 2, 1)


def test_apply_shift_zero_and_const():
    s = {0: HSeries.one(N)}
    assert apply_shift(s, 3, N) == s
    assert apply_shift({2: HSeries.one(N)}, 0, N) == {2: HSeries.one(N)}


def test_shift_roundtrip():
    s = {-2: HSeries.one(N), 1: HSeries.const(Fraction(1, 3), N)}
    back = apply_shift(apply_shift(s, 2, N), -2, N)
    for k, v in s.items():
        assert back[k].eq_values(v)
    for k, v in back.items():
        if k not in s:
            assert v.is_zero()


def test_cartan_op_on_constant():
    op = op_one_plus_qd_inv(N)
    out = apply_cartan_op(op, 0)
    # (1+q^d)^(-1) 1 = 1/2 ; the paper's printed numerator 2 makes this 1
    assert out == {0: HSeries.const(Fraction(1, 2), N)}
    two = op.scale(HSeries.const(2, N))
    assert apply_cartan_op(two, 0) == {0: HSeries.one(N)}


def test_cartan_op_spec_example():
    # ((1-q^(-d))/(hbar d)) z^-1 = z^-1 + (h/2) z^-2 + O(h^2)
    op = op_one_minus_qdinv_over_hd(1)
    out = apply_cartan_op(op, -1)
    assert out[-1] == HSeries.one(1)
    assert out[-2] == HSeries.hbar(1, 1, Fraction(1, 2))


def test_tanh_form_on_constant():
    op = op_tanh_half_over_d(3)
    out = apply_cartan_op(op, 0)
    assert out == {0: HSeries.hbar(1, 3, Fraction(1, 2))}


def test_closed_form_integral_identity():
    # (1 - q^(-d))/(hbar d) applied to z^-1 equals -(1/h) ln(1 - h/z):
    # coefficient of z^(-1-k) must be h^k/(k+1)
    op = op_one_minus_qdinv_over_hd(6)
    out = apply_cartan_op(op, -1)
    for k in range(0, 6):
        assert out[-1 - k] == HSeries.hbar(k, 6, Fraction(1, k + 1))


def test_cartan_op_vs_direct_exponential():
    # independent oracle: q^(+d) z^n must equal the binomial (z+h)^n
    q = DiffOpSeries.q_shift(1, 6)
    for n in range(-8, 9):
        out = q.apply(n)
        shifted = apply_shift({n: HSeries.one(6)}, 1, 6)
        assert set(out) == set(shifted)
        for k in out:
            assert out[k].eq_values(shifted[k])


def test_operator_linearity_and_composition():
    a = op_one_plus_qd_inv(5)
    b = op_one_plus_qdinv_inv(5)
    # (1+q^d)^(-1) + (1+q^(-d))^(-1) = 1 exactly
    s = a + b
    assert s.coeffs == DiffOpSeries.identity(5).coeffs
    # (1-q^(-d))/(hd) + (q^d-1)/(hd) = 2 sinh(hd)/(hd): even series
    c = op_one_minus_qdinv_over_hd(5) + op_qd_minus_one_over_hd(5)
    assert all(k % 2 == 0 for k in c.coeffs)
    assert c.coeffs[0] == HSeries.const(2, 5)
    assert c.coeffs[2] == HSeries.hbar(2, 5, Fraction(1, 3))


def test_d_pole_error():
    op = DiffOpSeries.identity(3)
    with pytest.raises(ValueError, match="d-pole"):
        op.divide_by_d()
