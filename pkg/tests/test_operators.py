import math

import pytest
from hypothesis import given, strategies as st

import oracles
from qfrac.core import q_bracket, q_gamma, qpochhammer
from qfrac.errors import DivergencePolicyExceeded, DomainError, NonRealPrefactor
from qfrac.operators import (
    FractionalOrder,
    ScalarFunction,
    Variant,
    apply,
    dq_inverse_derivative,
    dq_inverse_n,
    dq_inverse_n_descending,
    dq_inverse_power_amplitude,
    dq_inverse_star_derivative,
    dq_n,
    fractional_q_integral,
    gl_derivative,
    power_rule_dq,
    power_rule_dq_inverse,
    rl_derivative,
)

Q = 0.5


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def power(mu):
    return ScalarFunction.power(mu)


def nested(step, f, n, q):
    g = f
    for _ in range(n):
        g = (lambda h: lambda t: step(h, t, q))(g)
    return g


def dq_step(h, t, q):
    return (h(t) - h(q * t)) / ((1 - q) * t)


def dq_inv_step(h, t, q):
    return (h(t) - h(t / q)) / ((1 - 1 / q) * t)


def inv_neg_poch():
    # 1/(-x;q)_inf truncated to a polynomial
    coeffs = [(-1) ** n / qpochhammer(Q, Q, n) for n in range(60)]
    return ScalarFunction.from_series(0.0, coeffs, label="1/(-x;q)_inf")


# -- declared series -------------------------------------------------------------------


def test_declared_series_is_validated():
    with pytest.raises(DomainError):
        ScalarFunction(lambda x: x**2, ScalarFunction.power(3).series)
    f = ScalarFunction.from_series(0.5, [1.0, 2.0])
    assert rel(f(0.3), 0.3**0.5 * 1.6) < 1e-15


# -- Grunwald-Letnikov D_q^alpha ---------------------------------------------------------


def test_gl_examples():
    for x in (0.3, 1.0, 2.5):
        assert abs(gl_derivative(power(1), 1, x, Q) - 1.0) < 1e-14
    expect = q_gamma(2.5, Q) / q_gamma(2.0, Q)
    assert rel(gl_derivative(power(1.5), 0.5, 1.0, Q), expect) < 1e-12


def test_gl_half_twice_is_first_derivative():
    inner = ScalarFunction(lambda t: gl_derivative(power(1), 0.5, t, Q))
    assert abs(gl_derivative(inner, 0.5, 0.7, Q) - 1.0) < 1e-10


@pytest.mark.parametrize("alpha,mu,x", [(0.5, 1.2, 0.6), (0.3, 2.0, 1.4), (1.7, 0.4, 0.9)])
def test_gl_matches_mpmath_raw_sum(alpha, mu, x):
    ref = oracles.gl(lambda t: t**mu, alpha, x, Q)
    assert rel(gl_derivative(power(mu), alpha, x, Q), float(ref)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("fn", ["x2", "x3", "poch"])
def test_gl_integer_order_is_nested_difference(n, fn):
    f = {"x2": power(2), "x3": power(3), "poch": inv_neg_poch()}[fn]
    x = 0.7
    expect = nested(dq_step, f, n, Q)(x)
    got = gl_derivative(f, n, x, Q)
    assert abs(got - expect) <= 1e-10 * max(1.0, abs(expect))


@given(st.floats(0.05, 3.0), st.floats(0.0, 4.0), st.floats(0.2, 2.0))
def test_gl_raw_and_termwise_agree_on_powers(alpha, mu, x):
    d = alpha - mu
    if abs(d - round(d)) < 1e-6 and d > 0.5:
        return
    raw = gl_derivative(power(mu), alpha, x, Q, method="raw")
    tw = gl_derivative(power(mu), alpha, x, Q, method="termwise")
    assert abs(raw - tw) <= 1e-9 * max(1.0, abs(tw))


# -- power rules ---------------------------------------------------------------------


def test_power_rule_dq_examples():
    assert power_rule_dq(1, 1, 0.8, 0, Q) == 1.0
    assert rel(power_rule_dq(0.3, 0.5, 1, 0, Q), q_gamma(1.3, Q) / q_gamma(0.8, Q)) < 1e-14
    assert power_rule_dq(0.5, 1.5, 0.7, 0, Q) == 0.0
    with pytest.raises(DomainError):
        power_rule_dq(-2, 0.5, 1, 0, Q)


def test_power_rule_dq_inverse_examples():
    x = 1.0
    expect = (x**2.5 - (x / Q) ** 2.5) / ((1 - 1 / Q) * x)
    assert rel(power_rule_dq_inverse(2.5, 1, x, Q), expect) < 1e-13
    two = nested(dq_inv_step, lambda t: t**0.5, 2, Q)(x)
    assert rel(power_rule_dq_inverse(0.5, 2, x, Q), two) < 1e-12
    assert rel(power_rule_dq_inverse(1.7, 0, 0.6, Q), 0.6**1.7) < 1e-15


def test_power_rule_dq_inverse_excluded_points():
    with pytest.raises(DomainError):
        power_rule_dq_inverse(2.0, 0.5, 1.0, Q, "magnitude")
    # alpha - lambda a nonnegative integer: vanishing denominator, not a zero
    with pytest.raises(DomainError):
        power_rule_dq_inverse(1.5, 0.5, 1.0, Q, "magnitude")
    with pytest.raises(NonRealPrefactor):
        power_rule_dq_inverse(0.3, 0.5, 1.0, Q)


def test_sign_conventions():
    amp = dq_inverse_power_amplitude(0.3, 0.5, 0.8, Q)
    assert power_rule_dq_inverse(0.3, 0.5, 0.8, Q, "magnitude") == amp
    assert rel(power_rule_dq_inverse(0.3, 0.5, 0.8, Q, "real"), math.cos(math.pi * 0.5) * amp) < 1e-15 or \
        abs(power_rule_dq_inverse(0.3, 0.5, 0.8, Q, "real")) < 1e-15 * abs(amp)
    assert power_rule_dq_inverse(0.3, 3, 0.8, Q) == -dq_inverse_power_amplitude(0.3, 3, 0.8, Q)


# -- D_{1/q}^alpha -------------------------------------------------------------------------


def test_dq_inverse_examples():
    assert rel(dq_inverse_derivative(power(2), 1, 1.0, Q), 3.0) < 1e-14
    assert abs(dq_inverse_derivative(power(1), 2, 0.6, Q)) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_dq_inverse_integer_on_cube_is_nested_difference(n):
    x = 0.9
    expect = nested(dq_inv_step, lambda t: t**3, n, Q)(x)
    got = dq_inverse_derivative(power(3), n, x, Q)
    assert abs(got - expect) <= 1e-10 * max(1.0, abs(expect))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("fn", ["x2", "x3", "poch"])
def test_dq_inverse_integer_order_is_nested_difference(n, fn):
    f = {"x2": power(2), "x3": power(3), "poch": inv_neg_poch()}[fn]
    x = 0.4
    expect = nested(dq_inv_step, f, n, Q)(x)
    got = dq_inverse_derivative(f, n, x, Q)
    assert abs(got - expect) <= 1e-10 * max(1.0, abs(expect))


@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("x", [0.3, 1.1])
def test_integer_inverse_formulas_agree(n, x):
    f = inv_neg_poch()
    a = dq_inverse_n(f, n, x, Q)
    b = dq_inverse_n_descending(f, n, x, Q)
    assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1.0)


def test_dq_inverse_non_integer_needs_convention():
    with pytest.raises(NonRealPrefactor):
        dq_inverse_derivative(power(-1.5), 0.5, 1.0, Q)


@pytest.mark.parametrize("alpha_exp,lam", [(-1.5, 0.5), (-0.7, 0.4), (-2.2, 1.3)])
def test_dq_inverse_series_matches_power_rule_where_it_converges(alpha_exp, lam):
    x = 0.8
    f = ScalarFunction(lambda t: t**alpha_exp)
    raw = dq_inverse_derivative(f, lam, x, Q, sign_convention="magnitude")
    closed = power_rule_dq_inverse(alpha_exp, lam, x, Q, "magnitude")
    assert rel(raw, closed) < 1e-8


def test_dq_inverse_divergence_is_diagnosed():
    f = ScalarFunction(lambda t: t**2.3)
    with pytest.raises(DivergencePolicyExceeded) as err:
        dq_inverse_derivative(f, 0.5, 1.0, Q, sign_convention="magnitude")
    assert "power" in str(err.value)
    # with a declared series the power rule takes over
    v = dq_inverse_derivative(power(2.3), 0.5, 1.0, Q, sign_convention="magnitude")
    assert rel(v, power_rule_dq_inverse(2.3, 0.5, 1.0, Q, "magnitude")) < 1e-14


# -- starred variant -------------------------------------------------------------------------


def test_star_examples():
    assert rel(dq_inverse_star_derivative(power(1), 1, 0.8, Q), 1.0) < 1e-14
    assert dq_inverse_star_derivative(power(1.3), 0, 0.8, Q) == 0.8**1.3


def test_star_half_order_matches_direct_sum():
    x, alpha = 1.0, 0.5
    w, terms = 1.0, []
    for k in range(200):
        terms.append(w * Q**k * (Q ** (k - alpha) * x))
        w *= (1 - Q ** (-alpha) * Q**k) / (1 - Q ** (k + 1))
    expect = Q ** (alpha * (alpha + 1) / 2) * ((1 - Q) * x) ** (-alpha) * math.fsum(terms)
    assert rel(dq_inverse_star_derivative(power(1), alpha, x, Q), expect) < 1e-13


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_star_integer_orders_match_inverse_operator(n):
    f = inv_neg_poch()
    assert rel(dq_inverse_star_derivative(f, n, 0.5, Q), dq_inverse_n(f, n, 0.5, Q)) < 1e-11


# -- fractional integral and Riemann-Liouville ------------------------------------------------


def test_integral_examples():
    assert rel(fractional_q_integral(power(0), 1, 0, 0.7, Q), 0.7) < 1e-14
    assert rel(fractional_q_integral(power(0.3), 0.5, 0, 1.0, Q), q_gamma(1.3, Q) / q_gamma(1.8, Q)) < 1e-12


def test_integral_domain():
    with pytest.raises(DomainError):
        fractional_q_integral(power(1), 0.0, 0, 1.0, Q)
    with pytest.raises(DomainError):
        fractional_q_integral(power(1), 0.5, 1.0, 0.5, Q)


def _integral_fn(f, alpha):
    return ScalarFunction(lambda t: fractional_q_integral(f, alpha, 0.0, t, Q))


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.2])
@pytest.mark.parametrize("beta", [0.3, 0.7, 1.2])
def test_semigroup(alpha, beta):
    x, f = 0.8, power(1)
    lhs = fractional_q_integral(_integral_fn(f, beta), alpha, 0.0, x, Q)
    rhs = fractional_q_integral(f, alpha + beta, 0.0, x, Q)
    assert rel(lhs, rhs) < 1e-8


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.3])
@pytest.mark.parametrize("alpha", [0.4, 1.5])
def test_left_inverse(mu, alpha):
    x = 0.7
    got = rl_derivative(_integral_fn(power(mu), alpha), alpha, 0.0, x, Q)
    assert rel(got, x**mu) < 1e-8


def test_rl_examples():
    assert rel(rl_derivative(power(2), 1, 0, 0.6, Q), q_bracket(2, Q) * 0.6) < 1e-14
    assert rel(rl_derivative(power(1.2), 0.5, 0, 1.0, Q), q_gamma(2.2, Q) / q_gamma(1.7, Q)) < 1e-10


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 1.5])
@pytest.mark.parametrize("mu", [0.8, 1.2, 2.0])
def test_gl_and_rl_coincide(alpha, mu):
    x = 0.6
    assert rel(rl_derivative(power(mu), alpha, 0, x, Q), gl_derivative(power(mu), alpha, x, Q)) < 1e-8


def test_rl_order_validation():
    with pytest.raises(DomainError):
        FractionalOrder(-0.5, Variant.RL)
    with pytest.raises(DomainError):
        FractionalOrder(65.5, Variant.RL)
    with pytest.raises(DomainError):
        FractionalOrder(0.5, Variant.INTEGRAL, c=-1.0)


def test_apply_dispatch():
    f, x = power(1.5), 0.9
    assert apply(f, FractionalOrder(0.5, Variant.GL_DQ), x, Q) == gl_derivative(f, 0.5, x, Q)
    assert apply(f, FractionalOrder(0.5, Variant.INTEGRAL), x, Q) == fractional_q_integral(f, 0.5, 0.0, x, Q)
    assert apply(f, FractionalOrder(2, Variant.DQ_INVERSE), x, Q) == dq_inverse_derivative(f, 2, x, Q)


def test_dq_n_matches_nested():
    f = lambda t: math.exp(t)  # noqa: E731
    assert rel(dq_n(f, 3, 0.8, Q), nested(dq_step, f, 3, Q)(0.8)) < 1e-11
