"""Fractional q-difference operators.

Operands are :class:`ScalarFunction` values: a callable plus an optional
power-series form ``sum_n c_n x^(mu + n)``.  Operators evaluate their
defining weighted sums directly; when such a sum diverges and a series form
is declared they act termwise through the closed power rules instead.

The inverse-base operator carries the factor ``(q - 1)^(-alpha)``, complex
for non-integer ``alpha``.  ``sign_convention`` selects how it is reported:

* ``"strict"``: non-integer orders raise :class:`NonRealPrefactor`;
* ``"magnitude"``: the factor is replaced by ``(1 - q)^(-alpha)``;
* ``"real"``: the real part of the principal value, ``cos(pi alpha) (1 - q)^(-alpha)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from .core import (
    DEFAULT_POLICY,
    INT_TOL,
    BaseLike,
    Real,
    TruncationPolicy,
    as_q,
    is_integer,
    is_nonpositive_integer,
    q_binomial,
    q_gamma,
    q_gamma_ratio,
    q_shifted_power,
    qpochhammer,
    sum_terms,
)
from .errors import DivergencePolicyExceeded, DomainError, NonRealPrefactor

SIGN_CONVENTIONS = ("strict", "magnitude", "real")
SERIES_CHECK_TOL = 1e-10
MAX_RL_CEILING = 64


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum_n coeffs[n] * x**(offset + n)``."""

    offset: float
    coeffs: Tuple[float, ...]

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x**self.offset

    def terms(self):
        for n, c in enumerate(self.coeffs):
            if c != 0.0:
                yield self.offset + n, c


class ScalarFunction:
    """A real function of a positive argument with an optional declared power series.

    A declared series is checked against the callable at ``sample_points``
    (relative error below 1e-10) when the object is built.
    """

    __slots__ = ("_f", "series", "label")

    def __init__(self, f: Callable[[float], float], series: Optional[PowerSeries] = None,
                 sample_points: Sequence[float] = (0.1, 0.3, 0.5), label: str = ""):
        self._f = f
        self.series = series
        self.label = label
        if series is not None:
            for x in sample_points:
                want = f(x)
                got = series(x)
                if abs(got - want) > SERIES_CHECK_TOL * max(1.0, abs(want)):
                    raise DomainError(
                        f"declared series of {label or 'function'} disagrees with its values at x={x!r}: "
                        f"{got!r} vs {want!r}"
                    )

    def __call__(self, x: float) -> float:
        return self._f(x)

    @classmethod
    def power(cls, mu: float) -> "ScalarFunction":
        return cls(lambda x: x**mu, PowerSeries(float(mu), (1.0,)), label=f"x^{mu}")

    @classmethod
    def from_series(cls, offset: float, coeffs: Sequence[float], label: str = "") -> "ScalarFunction":
        s = PowerSeries(float(offset), tuple(float(c) for c in coeffs))
        return cls(s, s, label=label)


class Variant(enum.Enum):
    GL_DQ = "gl"
    DQ_INVERSE = "dq_inverse"
    DQ_INVERSE_STAR = "dq_inverse_star"
    RL = "rl"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class FractionalOrder:
    """Real order of a fractional operator with its variant; ``c`` is the RL/integral lower limit."""

    value: float
    variant: Variant
    c: float = 0.0

    def __post_init__(self):
        if self.variant in (Variant.RL, Variant.INTEGRAL):
            if self.value <= 0:
                raise DomainError(f"{self.variant.value} order must be positive, got {self.value!r}", flag="--lambda")
            if self.c < 0:
                raise DomainError(f"lower limit c must be nonnegative, got {self.c!r}", flag="--c")
        if self.variant is Variant.RL and _ceil(self.value) > MAX_RL_CEILING:
            raise DomainError(f"RL order ceiling exceeds {MAX_RL_CEILING}", flag="--lambda")


def apply(f: ScalarFunction, order: FractionalOrder, x: float, base: BaseLike,
          policy: TruncationPolicy = DEFAULT_POLICY, **kw) -> float:
    """Dispatch on ``order.variant``."""
    v = order.variant
    if v is Variant.GL_DQ:
        return gl_derivative(f, order.value, x, base, policy, **kw)
    if v is Variant.DQ_INVERSE:
        return dq_inverse_derivative(f, order.value, x, base, policy, **kw)
    if v is Variant.DQ_INVERSE_STAR:
        return dq_inverse_star_derivative(f, order.value, x, base, policy)
    if v is Variant.RL:
        return rl_derivative(f, order.value, order.c, x, base, policy)
    return fractional_q_integral(f, order.value, order.c, x, base, policy)


# -- helpers ---------------------------------------------------------------------


def _ceil(alpha: float) -> int:
    return int(round(alpha)) if is_integer(alpha) else math.ceil(alpha)


def _check_x(x: float) -> None:
    if not x > 0:
        raise DomainError(f"evaluation point must be positive, got x={x!r}", flag="--x")


def _check_convention(sign_convention: str) -> None:
    if sign_convention not in SIGN_CONVENTIONS:
        raise DomainError(f"unknown sign convention {sign_convention!r}", flag="--sign")


def inverse_base_sign(alpha: float, sign_convention: str) -> float:
    """Real factor standing in for ``(-1)^(-alpha)`` under ``sign_convention``."""
    _check_convention(sign_convention)
    if is_integer(alpha):
        return -1.0 if int(round(alpha)) % 2 else 1.0
    if sign_convention == "strict":
        raise NonRealPrefactor(
            f"(q-1)^(-alpha) is not real for non-integer alpha={alpha!r}; "
            "choose the magnitude or real sign convention",
            flag="--sign",
        )
    if sign_convention == "magnitude":
        return 1.0
    return math.cos(math.pi * alpha)


def _weights(alpha: float, q: float, extra: float):
    # (q^-alpha;q)_k / (q;q)_k * extra^k, k = 0, 1, ...
    w = 1.0
    qa = q ** (-alpha)
    k = 0
    while True:
        yield w
        w *= (1.0 - qa * q**k) / (1.0 - q ** (k + 1)) * extra
        k += 1


def _finite_or_series(alpha: float, term: Callable[[int, float], float], extra: float, q: float,
                      policy: TruncationPolicy, detect_growth: bool, what: str) -> float:
    if is_integer(alpha) and alpha > -0.5:
        n = int(round(alpha))
        gen = _weights(float(n), q, extra)
        return math.fsum(term(k, next(gen)) for k in range(n + 1))

    def terms():
        for k, w in enumerate(_weights(alpha, q, extra)):
            yield term(k, w)

    return sum_terms(terms(), policy, detect_growth=detect_growth, what=what).value


# -- Grunwald-Letnikov type D_q^alpha -----------------------------------------------


def gl_derivative(f: ScalarFunction, alpha: float, x: float, base: BaseLike,
                  policy: TruncationPolicy = DEFAULT_POLICY, method: str = "auto") -> float:
    """``x^-alpha (1-q)^-alpha sum_n (q^-alpha;q)_n/(q;q)_n q^n f(q^n x)``.

    Integer orders reduce to a finite sum.  ``method`` is ``"raw"``,
    ``"termwise"`` (needs a declared series) or ``"auto"`` (raw, falling back
    to termwise on divergence).
    """
    q = as_q(base)
    _check_x(x)
    if method == "termwise":
        return _termwise(f, lambda mu: power_rule_dq(mu, alpha, x, 0.0, q))
    try:
        s = _finite_or_series(alpha, lambda k, w: w * f(q**k * x), q, q, policy, False,
                              "Grunwald-Letnikov q-derivative")
    except DivergencePolicyExceeded:
        if method == "auto" and f.series is not None:
            return _termwise(f, lambda mu: power_rule_dq(mu, alpha, x, 0.0, q))
        raise
    return s * (x * (1.0 - q)) ** (-alpha)


def _termwise(f: ScalarFunction, rule: Callable[[float], float]) -> float:
    if f.series is None:
        raise DomainError("termwise application needs a declared power series")
    return math.fsum(c * rule(mu) for mu, c in f.series.terms())


# -- the inverse-base operator D_{1/q}^alpha -----------------------------------------


def dq_inverse_derivative(f: ScalarFunction, alpha: float, x: float, base: BaseLike,
                          policy: TruncationPolicy = DEFAULT_POLICY, sign_convention: str = "strict",
                          method: str = "auto") -> float:
    """``q^alpha (q-1)^-alpha x^-alpha sum_k (q^-alpha;q)_k/(q;q)_k q^(alpha k) f(x q^-k)``.

    The arguments ``x q^-k`` grow, so the sum is watched for non-decaying
    terms; on divergence a declared series is used termwise (``method="auto"``).
    """
    q = as_q(base)
    _check_x(x)
    sign = inverse_base_sign(alpha, sign_convention)
    if method == "termwise":
        return sign * _termwise(f, lambda mu: dq_inverse_power_amplitude(mu, alpha, x, q))
    try:
        s = _finite_or_series(alpha, lambda k, w: w * f(x * q ** (-k)), q**alpha, q, policy, True,
                              "inverse-base q-derivative")
    except (DivergencePolicyExceeded, OverflowError) as exc:
        if method == "auto" and f.series is not None:
            return sign * _termwise(f, lambda mu: dq_inverse_power_amplitude(mu, alpha, x, q))
        raise DivergencePolicyExceeded(
            f"{exc}; the defining sum diverges here, declare a power series to use the closed power rule"
        ) from None
    return sign * q**alpha * ((1.0 - q) * x) ** (-alpha) * s


def dq_inverse_star_derivative(f: ScalarFunction, alpha: float, x: float, base: BaseLike,
                               policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``q^(alpha(alpha+1)/2) (1-q)^-alpha x^-alpha sum_k (q^-alpha;q)_k/(q;q)_k q^k f(q^(k-alpha) x)``.

    The prefactor exponent ``alpha(alpha+1)/2`` reproduces the integer-order
    formula at ``alpha = n``.
    """
    q = as_q(base)
    _check_x(x)
    s = _finite_or_series(alpha, lambda k, w: w * f(q ** (k - alpha) * x), q, q, policy, False,
                          "starred inverse-base q-derivative")
    return q ** (alpha * (alpha + 1) / 2) * ((1.0 - q) * x) ** (-alpha) * s


# -- fractional q-integral and Riemann-Liouville derivative ----------------------------


def _rl_integral(f: Callable[[float], float], alpha: float, c: float, x: float, q: float,
                 policy: TruncationPolicy) -> float:
    # x^(alpha-1)/Gamma_q(alpha) * int_c^x (qt/x;q)_(alpha-1) f(t) d_q t, any ordering of c and x.
    lam = Real(alpha - 1.0)

    def side(b: float) -> float:
        if b == 0.0:
            return 0.0

        def terms():
            p = 1.0
            while True:
                t = p * b
                yield p * qpochhammer(q * t / x, q, lam, policy) * f(t)
                p *= q

        return (1.0 - q) * b * sum_terms(terms(), policy, what="fractional q-integral").value

    return x ** (alpha - 1.0) / q_gamma(alpha, q, policy) * (side(x) - side(c))


def fractional_q_integral(f: ScalarFunction, alpha: float, c: float, x: float, base: BaseLike,
                          policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Fractional q-integral of order ``alpha > 0`` with lower limit ``c`` at ``x > c``."""
    q = as_q(base)
    if alpha <= 0:
        raise DomainError(f"integral order must be positive, got {alpha!r}", flag="--lambda")
    if c < 0 or not x > c:
        raise DomainError(f"need 0 <= c < x, got c={c!r}, x={x!r}", flag="--x")
    return _rl_integral(f, alpha, c, x, q, policy)


def dq_n(f: Callable[[float], float], n: int, x: float, base: BaseLike) -> float:
    """n-th power of D_q as one finite sum over ``f(q^k x)``."""
    q = as_q(base)
    s = math.fsum(
        (-1) ** k * q_binomial(n, k, q) * q ** (k * (k - 1) / 2 - (n - 1) * k) * f(q**k * x)
        for k in range(n + 1)
    )
    return s / ((1.0 - q) * x) ** n


def rl_derivative(f: ScalarFunction, alpha: float, c: float, x: float, base: BaseLike,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Riemann-Liouville type derivative: ``D_q^m`` of the order ``m - alpha`` integral, ``m = ceil(alpha)``."""
    q = as_q(base)
    order = FractionalOrder(alpha, Variant.RL, c)
    if not x > c:
        raise DomainError(f"need x > c, got c={c!r}, x={x!r}", flag="--x")
    m = _ceil(order.value)
    rest = m - alpha
    if abs(rest) < INT_TOL:
        return dq_n(f, m, x, q)
    return dq_n(lambda y: _rl_integral(f, rest, c, y, q, policy), m, x, q)


# -- closed power rules -----------------------------------------------------------------


def power_rule_dq(lam_exp: float, alpha: float, x: float, c: float, base: BaseLike) -> float:
    """Fractional q-derivative of the q-shifted power ``(x - c)_q^lam_exp``."""
    q = as_q(base)
    if is_nonpositive_integer(lam_exp + 1.0):
        raise DomainError(f"exponent {lam_exp!r} is a negative integer", flag="--lambda")
    d = alpha - lam_exp
    if d > 0.5 and is_integer(d):
        return 0.0
    return q_gamma_ratio(lam_exp + 1.0, lam_exp - alpha + 1.0, q) * q_shifted_power(x, c, lam_exp - alpha, q)


def dq_inverse_power_amplitude(alpha_exp: float, lam: float, x: float, base: BaseLike,
                               policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``q^lam (1-q)^-lam (q^-alpha_exp;q)_lam x^(alpha_exp - lam)``.

    This is the inverse-base power rule with the factor ``(-1)^(-lam)`` left
    out; callers apply the sign convention.
    """
    q = as_q(base)
    _check_x(x)
    if not is_integer(lam):
        if alpha_exp > 0.5 and is_integer(alpha_exp):
            raise DomainError(
                f"power rule excludes positive integer exponents for non-integer order (alpha={alpha_exp!r})"
            )
        d = alpha_exp - lam
        if d > -0.5 and is_integer(d):
            raise DomainError(
                f"alpha - lambda = {round(d)} is a nonnegative integer: the closed form has a "
                "vanishing denominator (q^(lambda-alpha);q)_inf with nonzero numerator"
            )
    else:
        lam = float(round(lam))
    return q**lam * (1.0 - q) ** (-lam) * qpochhammer(q ** (-alpha_exp), q, Real(lam), policy) * x ** (alpha_exp - lam)


def power_rule_dq_inverse(alpha_exp: float, lam: float, x: float, base: BaseLike,
                          sign_convention: str = "strict",
                          policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Closed form of ``D_{1/q}^lam x^alpha_exp``, the analytic continuation of its defining sum."""
    sign = inverse_base_sign(lam, sign_convention)
    return sign * dq_inverse_power_amplitude(alpha_exp, lam, x, base, policy)


# -- integer-order inverse-base formulas ------------------------------------------------


def dq_inverse_n(f: Callable[[float], float], n: int, x: float, base: BaseLike) -> float:
    """n-th power of D_{1/q} as a finite sum over ``f(q^(k-n) x)`` (ascending node form)."""
    q = as_q(base)
    s = math.fsum(
        (-1) ** k * q_binomial(n, k, q) * q ** (k * (k - 1) / 2 - (n - 1) * k) * f(q ** (k - n) * x)
        for k in range(n + 1)
    )
    return q ** (n * (n + 1) / 2) * s / ((1.0 - q) * x) ** n


def dq_inverse_n_descending(f: Callable[[float], float], n: int, x: float, base: BaseLike) -> float:
    """n-th power of D_{1/q} as a finite sum over ``f(x q^-k)`` (descending node form)."""
    q = as_q(base)
    s = math.fsum(
        (-1) ** k * q_binomial(n, k, q) * q ** (k * (k - 1) / 2) * f(x * q ** (-k))
        for k in range(n + 1)
    )
    return q**n * s / ((q - 1.0) * x) ** n
