"""Foundational q-arithmetic.

q-Pochhammer symbols of finite, infinite and real order, the q-Gamma function,
q-brackets, generalized q-binomial coefficients, the two q-exponentials,
q-shifted powers and the Jackson q-integral.  Everything here works on real
double-precision scalars with a fixed real base ``0 < q < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Union

from .errors import (
    DivergencePolicyExceeded,
    DomainError,
    PochhammerPole,
    PoleError,
)

# |v - round(v)| below this counts as an integer ("alpha - lambda in N" style tests).
INT_TOL = 1e-9
# a*q^lam is a pole of the real-order symbol when |a*q^lam*q^m - 1| < POLE_TOL.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class Base:
    """The base ``q`` of every q-operation, restricted to the open interval (0, 1)."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0) or math.isnan(q):
            raise DomainError(f"base q must satisfy 0 < q < 1, got {self.q!r}", flag="--q")
        object.__setattr__(self, "q", q)


BaseLike = Union[Base, float]


def as_q(base: BaseLike) -> float:
    if isinstance(base, Base):
        return base.q
    return Base(base).q


@dataclass(frozen=True)
class TruncationPolicy:
    """Error-control contract for infinite sums and products.

    A sum stops once the latest terms and the geometric tail estimate fall
    below ``rel_tol`` times the running value (or below ``abs_floor``).
    """

    rel_tol: float = 1e-14
    abs_floor: float = 1e-300
    max_terms: int = 10000
    min_terms: int = 5

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}", flag="--tol")
        if self.abs_floor < 0:
            raise DomainError("abs_floor must be nonnegative")
        if self.min_terms < 0 or self.min_terms > self.max_terms:
            raise DomainError(
                f"need 0 <= min_terms <= max_terms, got {self.min_terms} and {self.max_terms}",
                flag="--max-terms",
            )

    def tightened(self, rel_tol: float) -> "TruncationPolicy":
        return replace(self, rel_tol=min(self.rel_tol, rel_tol))


DEFAULT_POLICY = TruncationPolicy()


# -- Pochhammer orders -------------------------------------------------------


@dataclass(frozen=True)
class Finite:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"finite Pochhammer order must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class Infinite:
    pass


@dataclass(frozen=True)
class Real:
    lam: float


PochhammerOrder = Union[Finite, Infinite, Real]


def _coerce_order(order) -> PochhammerOrder:
    if isinstance(order, (Finite, Infinite, Real)):
        return order
    if order is None or order == math.inf:
        return Infinite()
    if isinstance(order, int):
        return Finite(order)
    return Real(float(order))


# -- helpers ---------------------------------------------------------------


def is_integer(value: float, tol: float = INT_TOL) -> bool:
    return abs(value - round(value)) < tol


def is_nonpositive_integer(value: float, tol: float = INT_TOL) -> bool:
    return value < 0.5 and is_integer(value, tol)


def q_power_index(param: float, q: float, max_n: int = 512, tol: float = POLE_TOL) -> Optional[int]:
    """Return the smallest ``n <= max_n`` with ``param == q**-n`` (relative tolerance), else None."""
    if param <= 0.0:
        return None
    n = round(-math.log(param) / math.log(q))
    for m in (n - 1, n, n + 1):
        if 0 <= m <= max_n and abs(param - q ** (-m)) < tol * q ** (-m):
            return m
    return None


class _Product:
    """Running product kept as mantissa and binary exponent so partial products never overflow."""

    __slots__ = ("mant", "exp")

    def __init__(self):
        self.mant = 1.0
        self.exp = 0

    def mul(self, factor: float) -> None:
        self.mant *= factor
        m = abs(self.mant)
        if m != 0.0 and (m > 1e150 or m < 1e-150):
            self.mant, e = math.frexp(self.mant)
            self.exp += e

    def div(self, factor: float) -> None:
        self.mul(1.0 / factor)

    def merge(self, other: "_Product", invert: bool = False) -> None:
        if invert:
            self.mul(1.0 / other.mant)
            self.exp -= other.exp
        else:
            self.mul(other.mant)
            self.exp += other.exp

    def value(self) -> float:
        try:
            return math.ldexp(self.mant, self.exp)
        except OverflowError:
            raise DomainError("result overflows double precision") from None


def _infinite_product(a: float, q: float, policy: TruncationPolicy) -> _Product:
    # Stops once the tail bound sum_{k>=j} |a| q^k = |a q^j| / (1 - q) drops below rel_tol.
    acc = _Product()
    if a == 0.0:
        return acc
    p = 1.0
    for j in range(policy.max_terms):
        t = a * p
        if j >= policy.min_terms and abs(t) / (1.0 - q) < policy.rel_tol:
            return acc
        acc.mul(1.0 - t)
        if acc.mant == 0.0:
            return acc
        p *= q
    raise DivergencePolicyExceeded(
        f"infinite product (a;q)_inf with a={a!r}, q={q!r} did not reach rel_tol within {policy.max_terms} factors"
    )


def _ratio_product(a: float, b: float, q: float, policy: TruncationPolicy) -> _Product:
    # (a;q)_inf / (b;q)_inf, factor by factor so that huge partial products cancel early.
    acc = _Product()
    scale = max(abs(a), abs(b))
    p = 1.0
    for j in range(policy.max_terms):
        if j >= policy.min_terms and scale * p / (1.0 - q) < policy.rel_tol:
            return acc
        den = 1.0 - b * p
        if abs(den) < POLE_TOL:
            raise PochhammerPole(
                f"(b;q)_inf vanishes: b*q^{j} = 1 for b={b!r}, q={q!r}"
            )
        acc.mul((1.0 - a * p) / den)
        p *= q
    raise DivergencePolicyExceeded(
        f"ratio (a;q)_inf/(b;q)_inf did not converge within {policy.max_terms} factors"
    )


def pochhammer_ratio(a: float, b: float, base: BaseLike, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``(a;q)_inf / (b;q)_inf`` evaluated factor-wise."""
    return _ratio_product(a, b, as_q(base), policy).value()


def _finite_product(a: float, q: float, n: int) -> float:
    acc = _Product()
    for j in range(n):
        acc.mul(1.0 - a * q**j)
    return acc.value()


def qpochhammer(a: float, base: BaseLike, order=None, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """The q-Pochhammer symbol ``(a;q)_order``.

    ``order`` may be a :class:`Finite`, :class:`Infinite` or :class:`Real`
    instance, or a plain value: ``None``/``inf`` means infinite order, an
    ``int`` a finite order and a ``float`` a real order.  Real orders use
    ``(a;q)_lam = (a;q)_inf / (a q^lam;q)_inf``; integral real orders reduce
    to the finite product (negative ones to ``1/(a q^-m;q)_m``).
    """
    q = as_q(base)
    order = _coerce_order(order)
    if isinstance(order, Finite):
        return _finite_product(a, q, order.n)
    if isinstance(order, Infinite):
        return _infinite_product(a, q, policy).value()
    lam = float(order.lam)
    if a == 0.0:
        return 1.0
    if is_integer(lam):
        m = int(round(lam))
        if m >= 0:
            return _finite_product(a, q, m)
        den = _finite_product(a * q ** m, q, -m)
        if abs(den) < POLE_TOL:
            raise PochhammerPole(f"(a;q)_{m} has a vanishing denominator for a={a!r}")
        return 1.0 / den
    return _ratio_product(a, a * q**lam, q, policy).value()


def q_bracket(a: float, base: BaseLike) -> float:
    """The q-number ``[a]_q = (1 - q^a)/(1 - q)``."""
    q = as_q(base)
    return -math.expm1(a * math.log(q)) / (1.0 - q)


def q_gamma(x: float, base: BaseLike, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``Gamma_q(x) = (q;q)_inf / (q^x;q)_inf * (1-q)^(1-x)`` for ``0 < q < 1``."""
    q = as_q(base)
    if is_nonpositive_integer(x, POLE_TOL * 10):
        raise PoleError(f"Gamma_q has a pole at x={x!r}", flag="--x")
    acc = _infinite_product(q, q, policy)
    den = _infinite_product(q**x, q, policy)
    if den.mant == 0.0:
        raise PoleError(f"Gamma_q has a pole at x={x!r}", flag="--x")
    acc.merge(den, invert=True)
    # (1-q)^(1-x) folded in through its binary exponent to stay in range for large |x|.
    lg = (1.0 - x) * math.log1p(-q) / math.log(2.0)
    e = math.floor(lg)
    acc.mul(2.0 ** (lg - e))
    acc.exp += int(e)
    return acc.value()


def q_gamma_ratio(x: float, y: float, base: BaseLike, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``Gamma_q(x) / Gamma_q(y)``; a pole of the denominator gives exactly 0."""
    q = as_q(base)
    if is_nonpositive_integer(x, POLE_TOL * 10):
        raise PoleError(f"Gamma_q has a pole at x={x!r}")
    if is_nonpositive_integer(y, POLE_TOL * 10):
        return 0.0
    return (1.0 - q) ** (y - x) * qpochhammer(q**y, q, Real(x - y), policy)


def q_binomial(n: int, k: int, base: BaseLike) -> float:
    """Classical Gaussian binomial ``(q;q)_n / ((q;q)_k (q;q)_{n-k})``; zero outside ``0 <= k <= n``."""
    q = as_q(base)
    if k < 0 or k > n:
        return 0.0
    return _finite_product(q, q, n) / (_finite_product(q, q, k) * _finite_product(q, q, n - k))


def q_binomial_general(alpha: float, k: int, base: BaseLike) -> float:
    """Generalized q-binomial coefficient for real upper index ``alpha``."""
    q = as_q(base)
    if k < 0:
        return 0.0
    val = _finite_product(q ** (-alpha), q, k) / _finite_product(q, q, k)
    return (-1) ** k * val * q ** (alpha * k - k * (k - 1) / 2)


def q_exponential(z: float, base: BaseLike, variant: str = "small_e",
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``e_q(z) = 1/(z;q)_inf`` (``variant="small_e"``, needs ``|z| < 1``) or ``E_q(z) = (-z;q)_inf``."""
    q = as_q(base)
    if variant == "small_e":
        if abs(z) >= 1.0:
            raise DomainError(f"e_q(z) requires |z| < 1, got z={z!r}", flag="--x")
        return 1.0 / qpochhammer(z, q, Infinite(), policy)
    if variant == "big_E":
        return qpochhammer(-z, q, Infinite(), policy)
    raise DomainError(f"unknown q-exponential variant {variant!r}", flag="--variant")


def q_shifted_power(x: float, c: float, order: float, base: BaseLike,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """The q-shifted power ``(x - c)_q^order := x^order (c/x;q)_order`` for ``x > 0``."""
    q = as_q(base)
    if x <= 0:
        raise DomainError(f"q_shifted_power needs x > 0, got {x!r}", flag="--x")
    return x**order * qpochhammer(c / x, q, Real(order), policy)


# -- series summation --------------------------------------------------------


@dataclass(frozen=True)
class SeriesSum:
    value: float
    n_terms: int
    last_term: float
    tail_estimate: float


def sum_terms(terms: Iterable[float], policy: TruncationPolicy = DEFAULT_POLICY, *,
              detect_growth: bool = False, what: str = "series") -> SeriesSum:
    """Sum a lazily generated series under ``policy``.

    Stops after two consecutive terms that are small relative to the running
    sum and whose geometric tail estimate is small as well.  With
    ``detect_growth`` the sum aborts after three consecutive non-decreasing
    term magnitudes past ``min_terms``.
    """
    total = 0.0
    comp = 0.0
    prev = None
    quiet = 0
    growing = 0
    n = 0
    for n, t in enumerate(terms):
        if n >= policy.max_terms:
            raise DivergencePolicyExceeded(f"{what} did not converge within {policy.max_terms} terms")
        # Neumaier compensated summation.
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
        at = abs(t)
        scale = max(abs(total + comp) * policy.rel_tol, policy.abs_floor)
        if prev is None or prev == 0.0:
            tail = 0.0 if at == 0.0 else math.inf
        else:
            r = at / prev
            tail = at * r / (1.0 - r) if r < 1.0 else math.inf
        if detect_growth and n >= policy.min_terms and prev is not None and at >= prev and at > scale:
            growing += 1
            if growing >= 3:
                raise DivergencePolicyExceeded(f"{what}: term magnitudes stopped decaying after {n + 1} terms")
        else:
            growing = 0
        if at <= scale and tail <= scale:
            quiet += 1
        else:
            quiet = 0
        prev = at
        if quiet >= 2 and n + 1 >= policy.min_terms:
            return SeriesSum(total + comp, n + 1, t, tail)
    return SeriesSum(total + comp, n + 1 if n or prev is not None else 0, prev or 0.0, 0.0)


def _jackson_from_zero(f: Callable[[float], float], b: float, q: float, policy: TruncationPolicy) -> float:
    if b == 0.0:
        return 0.0

    def terms():
        p = 1.0
        while True:
            yield p * f(p * b)
            p *= q

    return (1.0 - q) * b * sum_terms(terms(), policy, what="Jackson integral").value


def jackson_integral(f: Callable[[float], float], lower: float, upper: float, base: BaseLike,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Jackson q-integral of ``f`` over ``[lower, upper]`` with ``0 <= lower <= upper``."""
    q = as_q(base)
    if lower < 0 or upper < lower:
        raise DomainError(f"Jackson integral needs 0 <= lower <= upper, got [{lower!r}, {upper!r}]")
    if lower == upper:
        return 0.0
    return _jackson_from_zero(f, upper, q, policy) - _jackson_from_zero(f, lower, q, policy)


def q_derivative(f: Callable[[float], float], x: float, base: BaseLike) -> float:
    """Exact q-difference quotient ``(f(x) - f(qx)) / ((1-q) x)``."""
    q = as_q(base)
    return (f(x) - f(q * x)) / ((1.0 - q) * x)


def q_inverse_derivative(f: Callable[[float], float], x: float, base: BaseLike) -> float:
    """Exact ``D_{1/q}`` quotient ``(f(x) - f(x/q)) / ((1 - 1/q) x)``."""
    q = as_q(base)
    return (f(x) - f(x / q)) / ((1.0 - 1.0 / q) * x)
