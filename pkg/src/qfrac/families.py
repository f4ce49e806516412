"""Fractional-order extensions of eight q-orthogonal polynomial families.

Each family is evaluated two ways.  The Rodrigues path applies a fractional
q-derivative to a weight function (termwise on the weight's power series, or
by the raw defining sum where that converges).  The hypergeometric path sums
an equivalent closed basic hypergeometric form.

Non-integer powers of negative quantities make some prefactors complex.  A
path therefore returns a :class:`FamilyValue`: a real amplitude and a formal
phase ``phi`` such that the principal value is ``exp(i pi phi) * amplitude``.
With ``sign_convention="real"`` (default) the reported value is the real part
``cos(pi phi) * amplitude``, which is exact ``(-1)^n * amplitude`` at integer
phase.  ``"magnitude"`` reports the amplitude alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    DEFAULT_POLICY,
    BaseLike,
    Infinite,
    Real,
    TruncationPolicy,
    as_q,
    is_integer,
    qpochhammer,
    sum_terms,
)
from .errors import DomainError, SeriesDivergence
from .hyper import phi
from .operators import (
    ScalarFunction,
    dq_inverse_n_descending,
    dq_inverse_power_amplitude,
    gl_derivative,
    power_rule_dq,
)

FIXTURE_FORMAT = "qfrac-family-fixtures"
FIXTURE_VERSION = 1
MAX_CLASSICAL_DEGREE = 100
# The termwise Rodrigues path is used when |x| is below this fraction of the weight series radius.
TERMWISE_RADIUS_FRACTION = 0.5


class FamilyId(enum.Enum):
    BIG_Q_JACOBI = "big_q_jacobi"
    BIG_Q_LAGUERRE = "big_q_laguerre"
    LITTLE_Q_JACOBI = "little_q_jacobi"
    LITTLE_Q_LAGUERRE = "little_q_laguerre"
    Q_LAGUERRE = "q_laguerre"
    AL_SALAM_CARLITZ_I = "al_salam_carlitz_i"
    AL_SALAM_CARLITZ_II = "al_salam_carlitz_ii"
    STIELTJES_WIGERT = "stieltjes_wigert"


class Path(enum.Enum):
    RODRIGUES = "rodrigues"
    HYPERGEOMETRIC = "hyper"


# -- parameters ------------------------------------------------------------------------


@dataclass(frozen=True)
class BigQJacobiParams:
    a: float
    b: float
    c: float


@dataclass(frozen=True)
class BigQLaguerreParams:
    a: float
    b: float


@dataclass(frozen=True)
class LittleQJacobiParams:
    alpha: float
    beta: float


@dataclass(frozen=True)
class LittleQLaguerreParams:
    alpha: float


@dataclass(frozen=True)
class QLaguerreParams:
    alpha: float


@dataclass(frozen=True)
class AlSalamCarlitzIParams:
    a: float


@dataclass(frozen=True)
class AlSalamCarlitzIIParams:
    a: float


@dataclass(frozen=True)
class StieltjesWigertParams:
    pass


PARAMS_TYPE = {
    FamilyId.BIG_Q_JACOBI: BigQJacobiParams,
    FamilyId.BIG_Q_LAGUERRE: BigQLaguerreParams,
    FamilyId.LITTLE_Q_JACOBI: LittleQJacobiParams,
    FamilyId.LITTLE_Q_LAGUERRE: LittleQLaguerreParams,
    FamilyId.Q_LAGUERRE: QLaguerreParams,
    FamilyId.AL_SALAM_CARLITZ_I: AlSalamCarlitzIParams,
    FamilyId.AL_SALAM_CARLITZ_II: AlSalamCarlitzIIParams,
    FamilyId.STIELTJES_WIGERT: StieltjesWigertParams,
}


def param_names(family: FamilyId) -> Tuple[str, ...]:
    return tuple(f.name for f in fields(PARAMS_TYPE[family]))


def make_params(family: FamilyId, values: Mapping[str, float]):
    """Build the parameter record of ``family`` from a name -> value mapping."""
    names = param_names(family)
    unknown = sorted(set(values) - set(names))
    missing = [n for n in names if n not in values]
    if unknown or missing:
        raise DomainError(
            f"{family.value} takes parameters {list(names)}; "
            + (f"missing {missing}" if missing else f"unknown {unknown}"),
            flag="--params",
        )
    return PARAMS_TYPE[family](**{n: float(values[n]) for n in names})


def _check_params(family: FamilyId, params) -> None:
    if not isinstance(params, PARAMS_TYPE[family]):
        raise DomainError(f"{family.value} needs {PARAMS_TYPE[family].__name__}, got {type(params).__name__}")


def admissibility_warnings(family: FamilyId, params, base: BaseLike) -> List[str]:
    """Advisory notes when parameters leave the classical orthogonality window."""
    q = as_q(base)
    out = []
    p = params
    if family is FamilyId.BIG_Q_JACOBI:
        if not 0 < p.a * q < 1:
            out.append("classical window needs 0 < aq < 1")
        if not 0 <= p.b * q < 1:
            out.append("classical window needs 0 <= bq < 1")
        if not p.c < 0:
            out.append("classical window needs c < 0")
    elif family is FamilyId.BIG_Q_LAGUERRE:
        if not 0 < p.a * q < 1:
            out.append("classical window needs 0 < aq < 1")
        if not p.b < 0:
            out.append("classical window needs b < 0")
    elif family is FamilyId.LITTLE_Q_JACOBI:
        if not p.alpha > -1:
            out.append("classical window needs alpha > -1")
        if not p.beta > -1:
            out.append("classical window needs beta > -1")
    elif family in (FamilyId.LITTLE_Q_LAGUERRE, FamilyId.Q_LAGUERRE):
        if not p.alpha > -1:
            out.append("classical window needs alpha > -1")
    elif family is FamilyId.AL_SALAM_CARLITZ_I:
        if not p.a < 0:
            out.append("classical window needs a < 0")
    elif family is FamilyId.AL_SALAM_CARLITZ_II:
        if not 0 < p.a * q < 1:
            out.append("classical window needs 0 < aq < 1")
    return out


# -- values with a formal phase ---------------------------------------------------------


@dataclass(frozen=True)
class FamilyValue:
    """Principal value ``exp(i pi phase) * amplitude``."""

    amplitude: float
    phase: float

    def real(self) -> float:
        if is_integer(self.phase, 1e-12):
            return -self.amplitude if int(round(self.phase)) % 2 else self.amplitude
        return math.cos(math.pi * self.phase) * self.amplitude

    def report(self, sign_convention: str = "real") -> float:
        if sign_convention == "real":
            return self.real()
        if sign_convention == "magnitude":
            return self.amplitude
        raise DomainError(f"unknown sign convention {sign_convention!r}", flag="--sign")


def _pow(base: float, lam: float) -> Tuple[float, float]:
    # base^lam as (amplitude, phase); a negative base contributes phase lam.
    if base > 0:
        return base**lam, 0.0
    if base == 0:
        if lam > 0:
            return 0.0, 0.0
        if lam == 0:
            return 1.0, 0.0
        raise DomainError("zero raised to a negative power")
    return (-base) ** lam, lam


def _xpow(x: float, lam: float) -> float:
    if not x > 0:
        raise DomainError(f"x^lambda needs x > 0, got x={x!r}", flag="--x")
    return x**lam


# -- weight power series ----------------------------------------------------------------


class LazySeries:
    """Coefficients ``c_n`` of ``x^offset * sum_n c_n x^n``, generated on demand and cached."""

    def __init__(self, coef: Callable[[int], float], offset: float = 0.0, radius: float = math.inf):
        self._coef = coef
        self._cache: List[float] = []
        self.offset = offset
        self.radius = radius

    def coef(self, n: int) -> float:
        while len(self._cache) <= n:
            self._cache.append(self._coef(len(self._cache)))
        return self._cache[n]

    def __call__(self, x: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        if abs(x) >= self.radius:
            raise DomainError(f"x={x!r} is outside the series radius {self.radius!r}")

        def terms():
            n = 0
            while True:
                yield self.coef(n) * x**n
                n += 1

        s = sum_terms(_skip_zeros(terms()), policy, what="weight series").value
        return s * _xpow(x, self.offset) if self.offset else s

    def scalar_function(self, n_terms: int, label: str = "") -> ScalarFunction:
        """A :class:`ScalarFunction` backed by the first ``n_terms`` coefficients."""
        return ScalarFunction.from_series(self.offset, [self.coef(n) for n in range(n_terms)], label=label)


def product_series(num: Sequence[float], den: Sequence[float], base: BaseLike,
                   offset: float = 0.0) -> LazySeries:
    """Maclaurin coefficients of ``prod_i (u_i x;q)_inf / prod_j (v_j x;q)_inf``."""
    q = as_q(base)
    factors = []
    for u in num:
        # (ux;q)_inf = sum (-1)^n q^C(n,2) u^n x^n / (q;q)_n
        factors.append(LazySeries(_ratio_coef(lambda n, u=u: -u * q ** n, q)))
    for v in den:
        factors.append(LazySeries(_ratio_coef(lambda n, v=v: v, q)))
    radius = min((1.0 / abs(v) for v in den if v != 0), default=math.inf)

    if not factors:
        return LazySeries(lambda n: 1.0 if n == 0 else 0.0, offset, radius)

    acc = factors[0]
    for f in factors[1:]:
        acc = _cauchy(acc, f)
    return LazySeries(acc.coef, offset, radius)


def _ratio_coef(step: Callable[[int], float], q: float) -> Callable[[int], float]:
    # c_0 = 1, c_{n+1} = c_n * step(n) / (1 - q^{n+1})
    cache = [1.0]

    def coef(n: int) -> float:
        while len(cache) <= n:
            k = len(cache) - 1
            cache.append(cache[k] * step(k) / (1.0 - q ** (k + 1)))
        return cache[n]

    return coef


def _cauchy(s: LazySeries, t: LazySeries) -> LazySeries:
    return LazySeries(lambda n: math.fsum(s.coef(k) * t.coef(n - k) for k in range(n + 1)))


@dataclass(frozen=True)
class RodriguesWeight:
    """The function differentiated on the Rodrigues path, in closed form and as a series."""

    closed: Callable[[float], float]
    series: Optional[LazySeries]


def _pinf(a: float, q: float, policy: TruncationPolicy) -> float:
    return qpochhammer(a, q, Infinite(), policy)


def rodrigues_weight(family: FamilyId, params, lam: float, base: BaseLike,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> RodriguesWeight:
    """The operand of the fractional derivative in the Rodrigues-type definition at order ``lam``."""
    q = as_q(base)
    _check_params(family, params)
    p = params
    ql = q**lam
    if family is FamilyId.BIG_Q_JACOBI:
        u = (1 / (p.a * ql), 1 / (p.c * ql))
        v = (1.0, p.b / p.c)
        return RodriguesWeight(
            lambda t: _pinf(u[0] * t, q, policy) * _pinf(u[1] * t, q, policy)
            / (_pinf(t, q, policy) * _pinf(v[1] * t, q, policy)),
            product_series(u, v, q),
        )
    if family is FamilyId.BIG_Q_LAGUERRE:
        u = (1 / (p.a * ql), 1 / (p.b * ql))
        return RodriguesWeight(
            lambda t: _pinf(u[0] * t, q, policy) * _pinf(u[1] * t, q, policy) / _pinf(t, q, policy),
            product_series(u, (1.0,), q),
        )
    if family is FamilyId.LITTLE_Q_JACOBI:
        al, be = p.alpha + lam, p.beta + lam
        return RodriguesWeight(
            lambda t: _xpow(t, al) * _pinf(q * t, q, policy) / _pinf(q ** (be + 1) * t, q, policy),
            little_q_jacobi_weight_series(p.alpha, p.beta, lam, q),
        )
    if family is FamilyId.LITTLE_Q_LAGUERRE:
        al = p.alpha + lam
        return RodriguesWeight(
            lambda t: _xpow(t, al) * _pinf(q * t, q, policy),
            little_q_laguerre_weight_series(p.alpha, lam, q),
        )
    if family is FamilyId.Q_LAGUERRE:
        al = p.alpha + lam
        return RodriguesWeight(
            lambda t: _xpow(t, al) / _pinf(-t, q, policy),
            product_series((), (-1.0,), q, offset=al),
        )
    if family is FamilyId.AL_SALAM_CARLITZ_I:
        return RodriguesWeight(
            lambda t: _pinf(q * t, q, policy) * _pinf(q * t / p.a, q, policy),
            product_series((q, q / p.a), (), q),
        )
    if family is FamilyId.AL_SALAM_CARLITZ_II:
        return RodriguesWeight(
            lambda t: 1.0 / (_pinf(t, q, policy) * _pinf(t / p.a, q, policy)),
            product_series((), (1.0, 1.0 / p.a), q),
        )
    # Stieltjes-Wigert: w(q^lam t) with w(t) = 1/(-t, -q/t;q)_inf has no Maclaurin series.
    return RodriguesWeight(
        lambda t: 1.0 / (_pinf(-ql * t, q, policy) * _pinf(-q / (ql * t), q, policy)),
        None,
    )


def little_q_jacobi_weight_series(alpha: float, beta: float, lam: float, base: BaseLike) -> LazySeries:
    """``x^(alpha+lam) (qx;q)_inf/(q^(beta+lam+1)x;q)_inf`` by the q-binomial theorem."""
    q = as_q(base)
    s = beta + lam
    return LazySeries(
        _ratio_coef(lambda n: (1.0 - q ** (n - s)) * q ** (s + 1), q),
        offset=alpha + lam,
        radius=q ** (-(s + 1)),
    )


def little_q_laguerre_weight_series(alpha: float, lam: float, base: BaseLike) -> LazySeries:
    """``x^(alpha+lam) (qx;q)_inf = sum (-1)^n q^C(n+1,2)/(q;q)_n x^(n+alpha+lam)``."""
    q = as_q(base)
    return LazySeries(_ratio_coef(lambda n: -(q ** (n + 1)), q), offset=alpha + lam)


def _skip_zeros(gen):
    for t in gen:
        if t != 0.0:
            yield t


def _termwise_dq(series: LazySeries, lam: float, x: float, q: float, policy: TruncationPolicy) -> float:
    def terms():
        n = 0
        while True:
            c = series.coef(n)
            yield c * power_rule_dq(series.offset + n, lam, x, 0.0, q) if c else 0.0
            n += 1

    return sum_terms(_skip_zeros(terms()), policy, what="termwise fractional derivative").value


def _termwise_dq_inverse(series: LazySeries, lam: float, x: float, q: float,
                         policy: TruncationPolicy) -> float:
    # Amplitude only: every term carries the same formal factor (-1)^(-lam).
    def terms():
        n = 0
        while True:
            c = series.coef(n)
            yield c * dq_inverse_power_amplitude(series.offset + n, lam, x, q, policy) if c else 0.0
            n += 1

    return sum_terms(_skip_zeros(terms()), policy, what="termwise inverse-base derivative").value


# -- the two paths ---------------------------------------------------------------------------


def _nonzero(w: float, what: str) -> float:
    if w == 0.0:
        raise DomainError(f"{what} vanishes at this point")
    return w


def _gl_of_weight(weight: RodriguesWeight, lam: float, x: float, q: float,
                  policy: TruncationPolicy, method: str) -> float:
    s = weight.series
    use_series = s is not None and (
        method == "termwise" or (method == "auto" and abs(x) < TERMWISE_RADIUS_FRACTION * s.radius)
    )
    if use_series:
        return _termwise_dq(s, lam, x, q, policy)
    if method == "termwise":
        raise DomainError("this weight has no declared power series; use the raw Rodrigues sum")
    return gl_derivative(ScalarFunction(weight.closed), lam, x, q, policy, method="raw")


def _rodrigues(family: FamilyId, p, lam: float, x: float, q: float, policy: TruncationPolicy,
               method: str) -> FamilyValue:
    w = rodrigues_weight(family, p, lam, q, policy)
    ql = q**lam
    if family is FamilyId.BIG_Q_JACOBI:
        (ma, pa), (mc, pc) = _pow(p.a, lam), _pow(p.c, lam)
        pref = (ma * mc * q ** (lam * (lam + 1)) * (1 - q) ** lam
                * _pinf(x, q, policy) * _pinf(p.b * x / p.c, q, policy)
                / (qpochhammer(p.a * q, q, Real(lam), policy) * qpochhammer(p.c * q, q, Real(lam), policy)
                   * _nonzero(_pinf(x / p.a, q, policy) * _pinf(x / p.c, q, policy), "the weight")))
        return FamilyValue(pref * _gl_of_weight(w, lam, x, q, policy, method), pa + pc)
    if family is FamilyId.BIG_Q_LAGUERRE:
        (ma, pa), (mb, pb) = _pow(p.a, lam), _pow(p.b, lam)
        pref = (ma * mb * q ** (lam * (lam + 1)) * (1 - q) ** lam * _pinf(x, q, policy)
                / (qpochhammer(p.a * q, q, Real(lam), policy) * qpochhammer(p.b * q, q, Real(lam), policy)
                   * _nonzero(_pinf(x / p.a, q, policy) * _pinf(x / p.b, q, policy), "the weight")))
        return FamilyValue(pref * _gl_of_weight(w, lam, x, q, policy, method), pa + pb)
    if family in (FamilyId.LITTLE_Q_JACOBI, FamilyId.LITTLE_Q_LAGUERRE):
        base_w = rodrigues_weight(family, p, 0.0, q, policy).closed(x)
        pref = (q ** (lam * p.alpha + lam * (lam - 1) / 2) * (1 - q) ** lam
                / (_nonzero(base_w, "the weight") * qpochhammer(q ** (p.alpha + 1), q, Real(lam), policy)))
        if w.series is None or abs(x) >= w.series.radius:
            raise DomainError(f"x={x!r} is outside the weight series radius")
        return FamilyValue(pref * _termwise_dq_inverse(w.series, lam, x, q, policy), -lam)
    if family is FamilyId.Q_LAGUERRE:
        pref = (1 - q) ** lam * _pinf(-x, q, policy) / (qpochhammer(q, q, Real(lam), policy) * _xpow(x, p.alpha))
        return FamilyValue(pref * _gl_of_weight(w, lam, x, q, policy, method), 0.0)
    if family is FamilyId.AL_SALAM_CARLITZ_I:
        n = _integer_order(family, lam)
        d = dq_inverse_n_descending(w.closed, n, x, q)
        val = p.a**n * q ** (n * (n - 3) / 2) * (1 - q) ** n * d / _nonzero(w.closed(x), "the weight")
        return FamilyValue(val, 0.0)
    if family is FamilyId.AL_SALAM_CARLITZ_II:
        ma, pa = _pow(p.a, lam)
        pref = (ma * q ** (-lam * (lam - 1) / 2) * (1 - q) ** lam
                * _pinf(x, q, policy) * _pinf(x / p.a, q, policy))
        return FamilyValue(pref * _gl_of_weight(w, lam, x, q, policy, method), lam + pa)
    # Stieltjes-Wigert
    _xpow(x, 1.0)
    wx = 1.0 / (_pinf(-x, q, policy) * _pinf(-q / x, q, policy))
    pref = ql * (1 - q) ** lam / (qpochhammer(q, q, Real(lam), policy) * wx)
    return FamilyValue(pref * _gl_of_weight(w, lam, x, q, policy, method), 0.0)


def _integer_order(family: FamilyId, lam: float) -> int:
    if not is_integer(lam) or lam < -0.5:
        raise SeriesDivergence(
            f"{family.value} is evaluated at nonnegative integer orders only: its closed form is a "
            f"nonterminating 3phi0 series and its defining sum diverges at lambda={lam!r}",
            flag="--lambda",
        )
    return int(round(lam))


def _little_amplitude(alpha: float, lam: float, q: float, policy: TruncationPolicy) -> float:
    # q^(lam alpha + lam(lam+1)/2) (q^-(alpha+lam);q)_inf / ((q^(alpha+1);q)_lam (q^-alpha;q)_inf)
    return (q ** (lam * alpha + lam * (lam + 1) / 2)
            * qpochhammer(q ** (-(alpha + lam)), q, Real(lam), policy)
            / qpochhammer(q ** (alpha + 1), q, Real(lam), policy))


def _hypergeometric(family: FamilyId, p, lam: float, x: float, q: float,
                    policy: TruncationPolicy) -> FamilyValue:
    qml = q ** (-lam)
    if family is FamilyId.BIG_Q_JACOBI:
        (ma, pa), (mc, pc) = _pow(p.a, lam), _pow(p.c, lam)
        pref = (ma * mc * q ** (lam * (lam + 1)) / _xpow(x, lam)
                / (qpochhammer(p.a * q, q, Real(lam), policy) * qpochhammer(p.c * q, q, Real(lam), policy)
                   * qpochhammer(x / p.a, q, Real(-lam), policy) * qpochhammer(x / p.c, q, Real(-lam), policy)))
        s = phi((qml, x, p.b * x / p.c), (x * qml / p.a, x * qml / p.c), q, q, policy)
        return FamilyValue(pref * s, pa + pc)
    if family is FamilyId.BIG_Q_LAGUERRE:
        (ma, pa), (mb, pb) = _pow(p.a, lam), _pow(p.b, lam)
        pref = (ma * mb * q ** (lam * (lam + 1)) / _xpow(x, lam)
                / (qpochhammer(p.a * q, q, Real(lam), policy) * qpochhammer(p.b * q, q, Real(lam), policy)
                   * qpochhammer(x / p.a, q, Real(-lam), policy) * qpochhammer(x / p.b, q, Real(-lam), policy)))
        s = phi((qml, x, 0.0), (x * qml / p.a, x * qml / p.b), q, q, policy)
        return FamilyValue(pref * s, pa + pb)
    if family is FamilyId.LITTLE_Q_JACOBI:
        s = phi((qml, q ** (p.alpha + p.beta + lam + 1)), (q ** (p.alpha + 1),), q, q * x, policy)
        return FamilyValue(_little_amplitude(p.alpha, lam, q, policy) * s, lam)
    if family is FamilyId.LITTLE_Q_LAGUERRE:
        s = phi((qml, 0.0), (q ** (p.alpha + 1),), q, q * x, policy)
        return FamilyValue(_little_amplitude(p.alpha, lam, q, policy) * s, lam)
    if family is FamilyId.Q_LAGUERRE:
        s = phi((qml, -x), (0.0,), q, q ** (p.alpha + lam + 1), policy)
        return FamilyValue(s / qpochhammer(q, q, Real(lam), policy), 0.0)
    if family is FamilyId.AL_SALAM_CARLITZ_I:
        n = _integer_order(family, lam)
        if x == 0:
            raise DomainError("x must be nonzero", flag="--x")
        s = phi((q ** (-n), 1 / x, p.a / x), (), q, q**n * x * x / p.a, policy)
        return FamilyValue((-p.a) ** n * q ** (n * (n - 1) / 2) * x ** (-n) * s, 0.0)
    if family is FamilyId.AL_SALAM_CARLITZ_II:
        _xpow(x, 1.0)
        ma, pa = _pow(p.a / x, lam)
        s = phi((qml, x, x / p.a), (0.0, 0.0), q, q, policy)
        return FamilyValue(q ** (-lam * (lam - 1) / 2) * ma * s, lam + pa)
    # Stieltjes-Wigert
    pref = (qpochhammer(-x, q, Real(lam), policy) * qpochhammer(-q / x, q, Real(-lam), policy)
            / qpochhammer(q, q, Real(lam), policy) * (q / x) ** lam)
    _xpow(x, 1.0)
    return FamilyValue(pref * phi((qml,), (0.0,), q, -x * q ** (lam + 1), policy), 0.0)


# -- public evaluation -------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyEvalRequest:
    """One family evaluation.

    ``rodrigues_method`` is ``"auto"`` (termwise on the weight series inside
    half its radius, else the raw defining sum), ``"termwise"`` or ``"raw"``.
    """

    family: FamilyId
    params: object
    lam: float
    x: float
    path: Path = Path.HYPERGEOMETRIC
    policy: TruncationPolicy = DEFAULT_POLICY
    sign_convention: str = "real"
    rodrigues_method: str = "auto"


def eval_family_value(req: FamilyEvalRequest, base: BaseLike) -> FamilyValue:
    """Amplitude and formal phase of the requested family value."""
    q = as_q(base)
    _check_params(req.family, req.params)
    if req.rodrigues_method not in ("auto", "termwise", "raw"):
        raise DomainError(f"unknown Rodrigues method {req.rodrigues_method!r}", flag="--method")
    if req.path is Path.RODRIGUES:
        return _rodrigues(req.family, req.params, float(req.lam), float(req.x), q, req.policy, req.rodrigues_method)
    return _hypergeometric(req.family, req.params, float(req.lam), float(req.x), q, req.policy)


def eval_family(req: FamilyEvalRequest, base: BaseLike) -> float:
    """Real value of the family function under ``req.sign_convention``."""
    return eval_family_value(req, base).report(req.sign_convention)


def eval_classical(family: FamilyId, n: int, params, x: float, base: BaseLike,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Classical degree-``n`` polynomial from its terminating hypergeometric form."""
    q = as_q(base)
    _check_params(family, params)
    if int(n) != n or n < 0 or n > MAX_CLASSICAL_DEGREE:
        raise DomainError(f"degree must be an integer in [0, {MAX_CLASSICAL_DEGREE}], got {n!r}", flag="--n")
    n = int(n)
    p = params
    qmn = q ** (-n)
    if family is FamilyId.BIG_Q_JACOBI:
        return phi((qmn, p.a * p.b * q ** (n + 1), x), (p.a * q, p.c * q), q, q, policy)
    if family is FamilyId.BIG_Q_LAGUERRE:
        return phi((qmn, 0.0, x), (p.a * q, p.b * q), q, q, policy)
    if family is FamilyId.LITTLE_Q_JACOBI:
        return phi((qmn, q ** (p.alpha + p.beta + n + 1)), (q ** (p.alpha + 1),), q, q * x, policy)
    if family is FamilyId.LITTLE_Q_LAGUERRE:
        return phi((qmn, 0.0), (q ** (p.alpha + 1),), q, q * x, policy)
    if family is FamilyId.Q_LAGUERRE:
        return (qpochhammer(q ** (p.alpha + 1), q, n) / qpochhammer(q, q, n)
                * phi((qmn,), (q ** (p.alpha + 1),), q, -(q ** (n + p.alpha + 1)) * x, policy))
    if family is FamilyId.AL_SALAM_CARLITZ_I:
        if x == 0:
            raise DomainError("x must be nonzero", flag="--x")
        return (-p.a) ** n * q ** (n * (n - 1) / 2) * phi((qmn, 1 / x), (0.0,), q, q * x / p.a, policy)
    if family is FamilyId.AL_SALAM_CARLITZ_II:
        return (-p.a) ** n * q ** (-n * (n - 1) / 2) * phi((qmn, x), (), q, q**n / p.a, policy)
    return phi((qmn,), (0.0,), q, -(q ** (n + 1)) * x, policy) / qpochhammer(q, q, n)


def classical_target(family: FamilyId, n: int, params, x: float, base: BaseLike,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Value the fractional family takes at integer order ``n``.

    This is the classical polynomial, times ``q^C(n+1,2)`` for Stieltjes-Wigert.
    """
    v = eval_classical(family, n, params, x, base, policy)
    if family is FamilyId.STIELTJES_WIGERT:
        v *= as_q(base) ** (n * (n + 1) / 2)
    return v


# -- limit transitions -------------------------------------------------------------------

LIMIT_FAMILIES = (FamilyId.LITTLE_Q_JACOBI, FamilyId.LITTLE_Q_LAGUERRE, FamilyId.STIELTJES_WIGERT)


@dataclass(frozen=True)
class LimitRecord:
    lam: float
    error: float


@dataclass(frozen=True)
class LimitReport:
    family: FamilyId
    n: int
    target: float
    records: Tuple[LimitRecord, ...]

    def monotone_tail(self, k: int = 4) -> bool:
        errs = [r.error for r in self.records[-k:]]
        return all(b < a for a, b in zip(errs, errs[1:]))

    @property
    def final_error(self) -> float:
        return self.records[-1].error


def default_steps(n: int, side: int = 1) -> Tuple[float, ...]:
    """``n + side * 10^-k`` for ``k = 2..5``."""
    return tuple(n + side * 10.0 ** (-k) for k in range(2, 6))


def limit_transition_report(family: FamilyId, n: int, params, x: float, base: BaseLike,
                            steps: Optional[Sequence[float]] = None,
                            policy: TruncationPolicy = DEFAULT_POLICY,
                            path: Path = Path.HYPERGEOMETRIC) -> LimitReport:
    """Distance between the fractional function and its integer-order limit along ``steps``."""
    if family not in LIMIT_FAMILIES:
        raise DomainError(
            f"limit transitions are stated for {[f.value for f in LIMIT_FAMILIES]}, not {family.value}",
            flag="--family",
        )
    steps = default_steps(n) if steps is None else tuple(steps)
    if not steps or any(abs(b - n) >= abs(a - n) for a, b in zip(steps, steps[1:])):
        raise DomainError("steps must approach n strictly", flag="--steps")
    target = classical_target(family, n, params, x, base, policy)
    records = []
    for lam in steps:
        v = eval_family(FamilyEvalRequest(family, params, lam, x, path, policy), base)
        records.append(LimitRecord(lam, abs(v - target)))
    return LimitReport(family, n, target, tuple(records))


# -- fixture document ---------------------------------------------------------------------

_FIXTURES: Dict[FamilyId, Dict[str, str]] = {
    FamilyId.BIG_Q_JACOBI: {
        "operator": "D_q",
        "weight": "w(x;a,b,c) = (x/a, x/c;q)_inf / (x, bx/c;q)_inf",
        "rodrigues": "a^l c^l q^(l(l+1)) (1-q)^l (x, bx/c;q)_inf / ((aq, cq;q)_l (x/a, x/c;q)_inf)"
                     " * D_q^l[(x/(aq^l), x/(cq^l);q)_inf / (x, bx/c;q)_inf]",
        "hypergeometric": "a^l c^l q^(l(l+1)) x^-l / ((aq, cq;q)_l (x/a, x/c;q)_-l)"
                          " * 3phi2(q^-l, x, bx/c; xq^-l/a, xq^-l/c; q, q)",
        "classical": "3phi2(q^-n, abq^(n+1), x; aq, cq; q, q)",
        "weight_series": "Cauchy product of the q-binomial expansions of each infinite product",
    },
    FamilyId.BIG_Q_LAGUERRE: {
        "operator": "D_q",
        "weight": "w(x;a,b) = (x/a, x/b;q)_inf / (x;q)_inf",
        "rodrigues": "a^l b^l q^(l(l+1)) (1-q)^l (x;q)_inf / ((aq, bq;q)_l (x/a, x/b;q)_inf)"
                     " * D_q^l[(x/(aq^l), x/(bq^l);q)_inf / (x;q)_inf]",
        "hypergeometric": "a^l b^l q^(l(l+1)) x^-l / ((aq, bq;q)_l (x/a, x/b;q)_-l)"
                          " * 3phi2(q^-l, x, 0; xq^-l/a, xq^-l/b; q, q)",
        "classical": "3phi2(q^-n, 0, x; aq, bq; q, q)",
        "weight_series": "Cauchy product of the q-binomial expansions of each infinite product",
    },
    FamilyId.LITTLE_Q_JACOBI: {
        "operator": "D_{1/q}",
        "weight": "w(x;alpha,beta) = x^alpha (qx;q)_inf / (q^(beta+1)x;q)_inf",
        "rodrigues": "q^(l alpha + l(l-1)/2) (1-q)^l / (w(x;alpha,beta) (q^(alpha+1);q)_l)"
                     " * D_{1/q}^l[w(x;alpha+l,beta+l)]",
        "hypergeometric": "(-1)^l q^(l alpha + l(l+1)/2) (q^-(alpha+l);q)_inf / ((q^(alpha+1);q)_l (q^-alpha;q)_inf)"
                          " * 2phi1(q^-l, q^(alpha+beta+l+1); q^(alpha+1); q, qx)",
        "classical": "2phi1(q^-n, q^(alpha+beta+n+1); q^(alpha+1); q, qx)",
        "weight_series": "sum_n (q^-(beta+l);q)_n/(q;q)_n q^(n(beta+l+1)) x^(n+alpha+l)",
    },
    FamilyId.LITTLE_Q_LAGUERRE: {
        "operator": "D_{1/q}",
        "weight": "w(x;alpha) = x^alpha (qx;q)_inf",
        "rodrigues": "q^(l alpha + l(l-1)/2) (1-q)^l / (w(x;alpha) (q^(alpha+1);q)_l) * D_{1/q}^l[w(x;alpha+l)]",
        "hypergeometric": "(-1)^l q^(l alpha + l(l+1)/2) (q^-(alpha+l);q)_inf / ((q^(alpha+1);q)_l (q^-alpha;q)_inf)"
                          " * 2phi1(q^-l, 0; q^(alpha+1); q, qx)",
        "classical": "2phi1(q^-n, 0; q^(alpha+1); q, qx)",
        "weight_series": "sum_n (-1)^n q^C(n+1,2)/(q;q)_n x^(n+alpha+l)",
    },
    FamilyId.Q_LAGUERRE: {
        "operator": "D_q",
        "weight": "w(x;alpha) = x^alpha / (-x;q)_inf",
        "rodrigues": "(1-q)^l (-x;q)_inf / ((q;q)_l x^alpha) * D_q^l[x^(alpha+l) / (-x;q)_inf]",
        "hypergeometric": "2phi1(q^-l, -x; 0; q, q^(alpha+l+1)) / (q;q)_l",
        "classical": "(q^(alpha+1);q)_n/(q;q)_n * 1phi1(q^-n; q^(alpha+1); q, -q^(n+alpha+1)x)",
        "weight_series": "x^(alpha+l) sum_n (-1)^n x^n/(q;q)_n, |x| < 1",
    },
    FamilyId.AL_SALAM_CARLITZ_I: {
        "operator": "D_{1/q}",
        "weight": "w(x;a) = (qx, qx/a;q)_inf",
        "rodrigues": "a^n q^(n(n-3)/2) (1-q)^n D_{1/q}^n[w(x;a)] / w(x;a), integer n only",
        "hypergeometric": "(-a)^n q^(n(n-1)/2) x^-n 3phi0(q^-n, 1/x, a/x; -; q, q^n x^2/a)",
        "classical": "(-a)^n q^C(n,2) 2phi1(q^-n, 1/x; 0; q, qx/a)",
        "weight_series": "Cauchy product of the two finite-radius-free expansions of (qx;q)_inf and (qx/a;q)_inf",
    },
    FamilyId.AL_SALAM_CARLITZ_II: {
        "operator": "D_q",
        "weight": "w(x;a) = 1 / (x, x/a;q)_inf",
        "rodrigues": "a^l q^(-l(l-1)/2) (q-1)^l (x, x/a;q)_inf D_q^l[1 / (x, x/a;q)_inf]",
        "hypergeometric": "(-1)^l q^(-l(l-1)/2) (a/x)^l 3phi2(q^-l, x, x/a; 0, 0; q, q)",
        "classical": "(-a)^n q^-C(n,2) 2phi0(q^-n, x; -; q, q^n/a)",
        "weight_series": "Cauchy product of 1/(x;q)_inf and 1/(x/a;q)_inf",
    },
    FamilyId.STIELTJES_WIGERT: {
        "operator": "D_q",
        "weight": "w(x) = 1 / (-x, -q/x;q)_inf",
        "rodrigues": "q^l (1-q)^l / (q;q)_l * D_q^l[w(q^l x)] / w(x), raw defining sum",
        "hypergeometric": "(-x;q)_l (-q/x;q)_-l / (q;q)_l (q/x)^l 1phi1(q^-l; 0; q, -x q^(l+1))",
        "classical": "1phi1(q^-n; 0; q, -q^(n+1)x) / (q;q)_n; integer order gives q^C(n+1,2) times it",
        "weight_series": "none (Laurent-type weight)",
    },
}


def fixture_document() -> dict:
    """Versioned description of every family: parameters, weight, both paths and the classical form."""
    return {
        "format": FIXTURE_FORMAT,
        "version": FIXTURE_VERSION,
        "families": [
            {"id": fam.value, "params": list(param_names(fam)), **_FIXTURES[fam]}
            for fam in FamilyId
        ],
    }
