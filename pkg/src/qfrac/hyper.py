"""Basic hypergeometric series and a catalog of checkable q-series identities.

:func:`eval_phi` sums an r-phi-s series with termination detection and a
truncation policy.  The identity catalog stores each classical identity as
two independent evaluation recipes plus a parameter grid, so that every
entry can be verified numerically with :func:`verify_identity`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    DEFAULT_POLICY,
    Base,
    BaseLike,
    Infinite,
    TruncationPolicy,
    as_q,
    q_binomial_general,
    q_bracket,
    q_exponential,
    q_gamma,
    q_power_index,
    qpochhammer,
    sum_terms,
)
from .errors import DenominatorPole, DivergentSeries, DomainError, UnknownIdentity

CATALOG_FORMAT = "qfrac-identity-catalog"
CATALOG_VERSION = 1
IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class PhiSeriesSpec:
    """Parameters of ``r phi s (numerator; denominator; q, z)``."""

    numerator: Tuple[float, ...]
    denominator: Tuple[float, ...]
    base: BaseLike
    z: float

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(float(a) for a in self.numerator))
        object.__setattr__(self, "denominator", tuple(float(b) for b in self.denominator))
        if not isinstance(self.base, Base):
            object.__setattr__(self, "base", Base(self.base))

    @property
    def r(self) -> int:
        return len(self.numerator)

    @property
    def s(self) -> int:
        return len(self.denominator)


def terminating_index(spec: PhiSeriesSpec, max_n: int = 512) -> Optional[int]:
    """Smallest ``n`` such that some numerator parameter equals ``q**-n``, or None."""
    q = spec.base.q
    found = [n for n in (q_power_index(a, q, max_n) for a in spec.numerator) if n is not None]
    return min(found) if found else None


def _terms(spec: PhiSeriesSpec):
    q = spec.base.q
    k = 1 + spec.s - spec.r
    t = 1.0
    qn = 1.0
    n = 0
    while True:
        yield t
        num = 1.0
        for a in spec.numerator:
            num *= 1.0 - a * qn
        den = 1.0 - q * qn
        for b in spec.denominator:
            den *= 1.0 - b * qn
        if k:
            num *= (-qn) ** k
        t = t * num * spec.z / den
        qn *= q
        n += 1


def eval_phi(spec: PhiSeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Evaluate the basic hypergeometric series described by ``spec``.

    Terminating series (a numerator parameter equal to ``q**-n``) are summed
    exactly over ``n + 1`` terms.  Otherwise the series must converge: ``r <=
    s`` always does, ``r == s + 1`` needs ``|z| < 1`` and ``r > s + 1`` is
    rejected.
    """
    q = spec.base.q
    stop = terminating_index(spec)
    for b in spec.denominator:
        m = q_power_index(b, q)
        if m is not None and (stop is None or stop > m):
            raise DenominatorPole(
                f"denominator parameter {b!r} equals q^-{m}; (b;q)_n vanishes from n={m + 1}"
            )
    if spec.z == 0.0:
        return 1.0
    if stop is not None:
        return math.fsum(itertools.islice(_terms(spec), stop + 1))
    if spec.r > spec.s + 1:
        raise DivergentSeries(
            f"nonterminating {spec.r}phi{spec.s} series diverges for every z != 0"
        )
    if spec.r == spec.s + 1 and abs(spec.z) >= 1.0:
        raise DivergentSeries(
            f"{spec.r}phi{spec.s} series needs |z| < 1, got z={spec.z!r}"
        )
    return sum_terms(_terms(spec), policy, what=f"{spec.r}phi{spec.s} series").value


def phi(numerator: Sequence[float], denominator: Sequence[float], base: BaseLike, z: float,
        policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Shorthand for ``eval_phi(PhiSeriesSpec(...))``."""
    return eval_phi(PhiSeriesSpec(tuple(numerator), tuple(denominator), base, z), policy)


def _pinf(a: float, q: float, policy: TruncationPolicy) -> float:
    return qpochhammer(a, q, Infinite(), policy)


# -- q-difference equation of the q-Gauss function -------------------------------


@dataclass(frozen=True)
class KoornwinderPair:
    u1: float
    u2: Optional[float]


def koornwinder_solutions(a: float, b: float, c: float, base: BaseLike, z: float,
                          policy: TruncationPolicy = DEFAULT_POLICY) -> KoornwinderPair:
    """The two particular solutions of the q-hypergeometric difference equation.

    ``u2`` is None where it is not a real, well-defined function value (``c``
    an integer or ``z <= 0`` with a singular power).
    """
    q = as_q(base)
    if abs(z) >= 1.0:
        raise DivergentSeries(f"solutions need |z| < 1, got z={z!r}")
    u1 = phi((q**a, q**b), (q**c,), q, z, policy)
    u2 = None
    if abs(c - round(c)) > 1e-9:
        if z > 0:
            u2 = z ** (1.0 - c) * phi((q ** (1 + a - c), q ** (1 + b - c)), (q ** (2 - c),), q, z, policy)
        elif z == 0.0 and c < 1.0:
            u2 = 0.0
    return KoornwinderPair(u1, u2)


def koornwinder_residual(u: Callable[[float], float], a: float, b: float, c: float,
                         base: BaseLike, z: float) -> float:
    """Left side of the q-hypergeometric difference equation with exact q-differences."""
    q = as_q(base)

    def d(f):
        return lambda t: (f(t) - f(q * t)) / ((1.0 - q) * t)

    du = d(u)
    d2u = d(du)
    qa, qb = q_bracket(a, q), q_bracket(b, q)
    return (z * (q**c - q ** (a + b + 1) * z) * d2u(z)
            + (q_bracket(c, q) - (q**b * qa + q**a * q_bracket(b + 1, q)) * z) * du(z)
            - qa * qb * u(z))


# -- identity catalog ------------------------------------------------------------

Point = Mapping[str, float]
Recipe = Callable[[Point, TruncationPolicy], float]


@dataclass(frozen=True)
class IdentityCase:
    """One identity: two evaluation recipes, a domain and a default grid."""

    id: str
    lhs_text: str
    rhs_text: str
    domain_text: str
    lhs: Recipe
    rhs: Recipe
    grid: Tuple[Dict[str, float], ...]
    domain: Callable[[Point], Optional[str]] = lambda p: None
    note: str = ""
    group: Optional[str] = None

    def check_domain(self, point: Point) -> None:
        if "q" not in point:
            raise DomainError(f"{self.id}: point is missing the base q", flag="--q")
        Base(point["q"])
        problem = self.domain(point)
        if problem:
            raise DomainError(f"{self.id}: {problem}")


@dataclass(frozen=True)
class IdentityResult:
    lhs: float
    rhs: float
    rel_residual: float


def rel_residual(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-30)


def _grid(**axes: Sequence[float]) -> Tuple[Dict[str, float], ...]:
    names = list(axes)
    return tuple(dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names)))


def _needs(**bounds: float) -> Callable[[Point], Optional[str]]:
    # Each keyword is an expression key; the value bounds |expr| from above.
    exprs = {
        "z": lambda p: p["z"],
        "az": lambda p: p["a"] * p["z"],
        "bz": lambda p: p["b"] * p["z"],
        "b": lambda p: p["b"],
        "abz_c": lambda p: p["a"] * p["b"] * p["z"] / p["c"],
        "alpha_z": lambda p: p["alpha"] * p["z"],
        "beta_z": lambda p: p["beta"] * p["z"],
    }

    def check(p: Point) -> Optional[str]:
        for key, bound in bounds.items():
            if abs(exprs[key](p)) >= bound:
                return f"need |{key}| < {bound}"
        return None

    return check


def _double_sum(coeff: Callable[[int, int, float], float], scale: float, q: float,
                policy: TruncationPolicy) -> float:
    # sum_n [sum_k coeff(n, k, [n,k]_q)] scale^n / (q;q)_n, Gaussian binomials by the q-Pascal rule.
    def terms():
        n = 0
        qq = 1.0
        row = [1.0]
        while True:
            inner = math.fsum(coeff(n, k, row[k]) for k in range(n + 1))
            yield inner * scale**n / qq
            n += 1
            qq *= 1.0 - q**n
            row = [1.0] + [row[k - 1] + q**k * row[k] for k in range(1, n)] + [1.0]

    return sum_terms(terms(), policy, what="double series").value


def _c2(n: int) -> int:
    return n * (n - 1) // 2


def _ee_rhs(p, pol):
    q, al, be, z = p["q"], p["alpha"], p["beta"], p["z"]
    return _double_sum(lambda n, k, b: b * (al / be) ** k, be * z, q, pol)


def _EE_rhs(p, pol):
    q, al, be, z = p["q"], p["alpha"], p["beta"], p["z"]
    return _double_sum(lambda n, k, b: b * (al / be) ** k * q ** (_c2(k) + _c2(n - k)), be * z, q, pol)


def _quot_eE_rhs(p, pol):
    q, al, be, z = p["q"], p["alpha"], p["beta"], p["z"]
    return _double_sum(lambda n, k, b: b * (-al / be) ** k, -be * z, q, pol)


def _phi10_product_rhs(p, pol):
    q, a, b, z = p["q"], p["a"], p["b"], p["z"]
    pa = [1.0]
    pb = [1.0]

    def coeff(n, k, binom):
        while len(pa) <= n:
            pa.append(pa[-1] * (1.0 - a * q ** (len(pa) - 1)))
            pb.append(pb[-1] * (1.0 - b * q ** (len(pb) - 1)))
        return binom * pa[k] * pb[n - k]

    return _double_sum(coeff, z, q, pol)


def _build_catalog() -> Dict[str, IdentityCase]:
    Q3 = (0.3, 0.5, 0.7)
    cases = [
        IdentityCase(
            "QBinomialTheorem",
            "1phi0(a; -; q, z)", "(az;q)_inf / (z;q)_inf", "|z| < 1",
            lambda p, pol: phi((p["a"],), (), p["q"], p["z"], pol),
            lambda p, pol: _pinf(p["a"] * p["z"], p["q"], pol) / _pinf(p["z"], p["q"], pol),
            _grid(a=(-0.6, 0.2, 0.7), z=(-0.5, 0.3, 0.6), q=Q3),
            _needs(z=1.0),
        ),
        IdentityCase(
            "OnePhiOneEvaluation",
            "1phi1(a; c; q, c/a)", "(c/a;q)_inf / (c;q)_inf", "a != 0, c not in q^-N",
            lambda p, pol: phi((p["a"],), (p["c"],), p["q"], p["c"] / p["a"], pol),
            lambda p, pol: _pinf(p["c"] / p["a"], p["q"], pol) / _pinf(p["c"], p["q"], pol),
            _grid(a=(-0.8, 0.6, 1.5), c=(-0.3, 0.2, 0.45), q=Q3),
            lambda p: "a must be nonzero" if p["a"] == 0 else None,
        ),
        IdentityCase(
            "Heine1",
            "2phi1(a, b; c; q, z)", "(az, b;q)_inf / (c, z;q)_inf * 2phi1(c/b, z; az; q, b)",
            "|z| < 1, |b| < 1",
            lambda p, pol: phi((p["a"], p["b"]), (p["c"],), p["q"], p["z"], pol),
            lambda p, pol: (
                _pinf(p["a"] * p["z"], p["q"], pol) * _pinf(p["b"], p["q"], pol)
                / (_pinf(p["c"], p["q"], pol) * _pinf(p["z"], p["q"], pol))
                * phi((p["c"] / p["b"], p["z"]), (p["a"] * p["z"],), p["q"], p["b"], pol)
            ),
            _grid(a=(0.3, -0.4), b=(0.5, -0.35), c=(0.7, 0.15), z=(0.2, -0.45), q=(0.3, 0.5)),
            _needs(z=1.0, b=1.0),
        ),
        IdentityCase(
            "Heine2Euler",
            "2phi1(a, b; c; q, z)", "(abz/c;q)_inf / (z;q)_inf * 2phi1(c/a, c/b; c; q, abz/c)",
            "|z| < 1, |abz/c| < 1",
            lambda p, pol: phi((p["a"], p["b"]), (p["c"],), p["q"], p["z"], pol),
            lambda p, pol: (
                _pinf(p["a"] * p["b"] * p["z"] / p["c"], p["q"], pol) / _pinf(p["z"], p["q"], pol)
                * phi((p["c"] / p["a"], p["c"] / p["b"]), (p["c"],), p["q"],
                      p["a"] * p["b"] * p["z"] / p["c"], pol)
            ),
            _grid(a=(0.3, -0.4), b=(0.5, -0.35), c=(0.7, 0.45), z=(0.2, -0.45), q=(0.3, 0.5)),
            _needs(z=1.0, abz_c=1.0),
            group="heine2",
        ),
        IdentityCase(
            "Heine2AsPrinted",
            "2phi1(a, b; c; q, z)", "(abz/c;q)_inf / (z;q)_inf * 2phi1(c/a, b/a; c; q, abz/c)",
            "|z| < 1, |abz/c| < 1",
            lambda p, pol: phi((p["a"], p["b"]), (p["c"],), p["q"], p["z"], pol),
            lambda p, pol: (
                _pinf(p["a"] * p["b"] * p["z"] / p["c"], p["q"], pol) / _pinf(p["z"], p["q"], pol)
                * phi((p["c"] / p["a"], p["b"] / p["a"]), (p["c"],), p["q"],
                      p["a"] * p["b"] * p["z"] / p["c"], pol)
            ),
            _grid(a=(0.3, -0.4), b=(0.5, -0.35), c=(0.7, 0.45), z=(0.2, -0.45), q=(0.3, 0.5)),
            _needs(z=1.0, abz_c=1.0),
            note="second numerator parameter b/a in place of c/b",
            group="heine2",
        ),
        IdentityCase(
            "Heine2Phi2",
            "2phi1(a, b; c; q, z)", "(az;q)_inf / (z;q)_inf * 2phi2(a, c/b; c, az; q, bz)",
            "|z| < 1",
            lambda p, pol: phi((p["a"], p["b"]), (p["c"],), p["q"], p["z"], pol),
            lambda p, pol: (
                _pinf(p["a"] * p["z"], p["q"], pol) / _pinf(p["z"], p["q"], pol)
                * phi((p["a"], p["c"] / p["b"]), (p["c"], p["a"] * p["z"]), p["q"], p["b"] * p["z"], pol)
            ),
            _grid(a=(0.3, -0.4), b=(0.5, -0.35), c=(0.7, 0.15), z=(0.2, -0.45), q=(0.3, 0.5)),
            _needs(z=1.0),
        ),
        IdentityCase(
            "Heine3",
            "2phi1(a, b; 0; q, z)", "(az;q)_inf / (z;q)_inf * 1phi1(a; az; q, bz)",
            "|z| < 1",
            lambda p, pol: phi((p["a"], p["b"]), (0.0,), p["q"], p["z"], pol),
            lambda p, pol: (
                _pinf(p["a"] * p["z"], p["q"], pol) / _pinf(p["z"], p["q"], pol)
                * phi((p["a"],), (p["a"] * p["z"],), p["q"], p["b"] * p["z"], pol)
            ),
            _grid(a=(0.3, -0.4, 0.9), b=(0.5, -0.35, 1.2), z=(0.2, -0.45, 0.6), q=(0.3, 0.5)),
            _needs(z=1.0),
        ),
        IdentityCase(
            "ExpProductInverse",
            "e_q(z) E_q(-z)", "1", "|z| < 1",
            lambda p, pol: q_exponential(p["z"], p["q"], "small_e", pol)
            * q_exponential(-p["z"], p["q"], "big_E", pol),
            lambda p, pol: 1.0,
            _grid(z=(-0.9, -0.6, -0.3, 0.0, 0.1, 0.3, 0.5, 0.7, 0.95), q=Q3),
            _needs(z=1.0),
        ),
        IdentityCase(
            "SmallExpSeries",
            "sum_n z^n / (q;q)_n", "1 / (z;q)_inf", "|z| < 1",
            lambda p, pol: phi((0.0,), (), p["q"], p["z"], pol),
            lambda p, pol: q_exponential(p["z"], p["q"], "small_e", pol),
            _grid(z=(-0.9, -0.6, -0.3, 0.0, 0.1, 0.3, 0.5, 0.7, 0.9), q=Q3),
            _needs(z=1.0),
        ),
        IdentityCase(
            "BigExpSeries",
            "sum_n q^C(n,2) z^n / (q;q)_n", "(-z;q)_inf", "any real z",
            lambda p, pol: phi((), (), p["q"], -p["z"], pol),
            lambda p, pol: q_exponential(p["z"], p["q"], "big_E", pol),
            _grid(z=(-3.0, -1.5, -0.5, 0.0, 0.4, 1.0, 2.5, 5.0, 9.0), q=Q3),
        ),
        IdentityCase(
            "ExpProduct_ee",
            "e_q(alpha z) e_q(beta z)",
            "sum_n [sum_k [n,k]_q (alpha/beta)^k] (beta z)^n / (q;q)_n",
            "|alpha z| < 1, |beta z| < 1, beta != 0",
            lambda p, pol: q_exponential(p["alpha"] * p["z"], p["q"], "small_e", pol)
            * q_exponential(p["beta"] * p["z"], p["q"], "small_e", pol),
            _ee_rhs,
            _grid(alpha=(-0.8, 0.5, 1.1), beta=(0.6, -0.9, 1.3), z=(0.3, -0.4, 0.7), q=(0.5,)),
            _needs(alpha_z=1.0, beta_z=1.0),
        ),
        IdentityCase(
            "ExpProduct_eE",
            "e_q(alpha z) E_q(beta z)", "1phi0(-beta/alpha; -; q, alpha z)",
            "|alpha z| < 1, alpha != 0",
            lambda p, pol: q_exponential(p["alpha"] * p["z"], p["q"], "small_e", pol)
            * q_exponential(p["beta"] * p["z"], p["q"], "big_E", pol),
            lambda p, pol: phi((-p["beta"] / p["alpha"],), (), p["q"], p["alpha"] * p["z"], pol),
            _grid(alpha=(-0.8, 0.5, 1.1), beta=(0.6, -0.9, 1.3), z=(0.3, -0.4, 0.7), q=(0.5,)),
            _needs(alpha_z=1.0),
        ),
        IdentityCase(
            "ExpProduct_EE",
            "E_q(alpha z) E_q(beta z)",
            "sum_n [sum_k [n,k]_q (alpha/beta)^k q^(C(k,2)+C(n-k,2))] (beta z)^n / (q;q)_n",
            "beta != 0",
            lambda p, pol: q_exponential(p["alpha"] * p["z"], p["q"], "big_E", pol)
            * q_exponential(p["beta"] * p["z"], p["q"], "big_E", pol),
            _EE_rhs,
            _grid(alpha=(-0.8, 0.5, 1.1), beta=(0.6, -0.9, 1.3), z=(0.3, -0.4, 1.7), q=(0.5,)),
        ),
        IdentityCase(
            "Quotient_ee",
            "e_q(alpha z) / e_q(beta z)", "1phi0(beta/alpha; -; q, alpha z)",
            "|alpha z| < 1, |beta z| < 1, alpha != 0",
            lambda p, pol: q_exponential(p["alpha"] * p["z"], p["q"], "small_e", pol)
            / q_exponential(p["beta"] * p["z"], p["q"], "small_e", pol),
            lambda p, pol: phi((p["beta"] / p["alpha"],), (), p["q"], p["alpha"] * p["z"], pol),
            _grid(alpha=(-0.8, 0.5, 1.1), beta=(0.6, -0.9, 1.3), z=(0.3, -0.4, 0.7), q=(0.5,)),
            _needs(alpha_z=1.0, beta_z=1.0),
        ),
        IdentityCase(
            "Quotient_eE",
            "e_q(alpha z) / E_q(beta z)",
            "sum_n [sum_k [n,k]_q (-alpha/beta)^k] (-beta z)^n / (q;q)_n",
            "|alpha z| < 1, |beta z| < 1, beta != 0",
            lambda p, pol: q_exponential(p["alpha"] * p["z"], p["q"], "small_e", pol)
            / q_exponential(p["beta"] * p["z"], p["q"], "big_E", pol),
            _quot_eE_rhs,
            _grid(alpha=(-0.8, 0.5, 1.1), beta=(0.6, -0.9, 1.3), z=(0.3, -0.4, 0.7), q=(0.5,)),
            _needs(alpha_z=1.0, beta_z=1.0),
        ),
        IdentityCase(
            "Phi10Product",
            "1phi0(a; -; q, z) 1phi0(b; -; q, z)",
            "sum_n [sum_k [n,k]_q (a;q)_k (b;q)_(n-k)] z^n / (q;q)_n",
            "|z| < 1",
            lambda p, pol: phi((p["a"],), (), p["q"], p["z"], pol) * phi((p["b"],), (), p["q"], p["z"], pol),
            _phi10_product_rhs,
            _grid(a=(-0.6, 0.2, 0.7), b=(0.4, -1.2, 2.0), z=(0.3, -0.5, 0.6), q=(0.5,)),
            _needs(z=1.0),
        ),
        IdentityCase(
            "Phi10ProductMerge",
            "1phi0(a; -; q, bz) 1phi0(b; -; q, z)", "1phi0(ab; -; q, z)",
            "|z| < 1, |bz| < 1",
            lambda p, pol: phi((p["a"],), (), p["q"], p["b"] * p["z"], pol)
            * phi((p["b"],), (), p["q"], p["z"], pol),
            lambda p, pol: phi((p["a"] * p["b"],), (), p["q"], p["z"], pol),
            _grid(a=(-0.6, 0.2, 0.7), b=(0.4, -1.2, 1.5), z=(0.3, -0.5, 0.6), q=(0.5,)),
            _needs(z=1.0, bz=1.0),
        ),
        IdentityCase(
            "PochhammerFiniteInfinite",
            "(a;q)_n", "(a;q)_inf / (aq^n;q)_inf", "n >= 0 integer, aq^n not in q^-N",
            lambda p, pol: qpochhammer(p["a"], p["q"], int(p["n"])),
            lambda p, pol: _pinf(p["a"], p["q"], pol) / _pinf(p["a"] * p["q"] ** int(p["n"]), p["q"], pol),
            _grid(a=(-1.5, 0.3, 0.8), n=(0, 3, 7), q=Q3),
            lambda p: None if p["n"] >= 0 and p["n"] == int(p["n"]) else "n must be a nonnegative integer",
        ),
        IdentityCase(
            "QBinomialGammaForm",
            "(q^-alpha;q)_k / (q;q)_k (-1)^k q^(alpha k - C(k,2))",
            "Gamma_q(alpha+1) / (Gamma_q(k+1) Gamma_q(alpha-k+1))",
            "alpha+1 and alpha-k+1 not in {0,-1,-2,...}",
            lambda p, pol: q_binomial_general(p["alpha"], int(p["k"]), p["q"]),
            lambda p, pol: q_gamma(p["alpha"] + 1, p["q"], pol)
            / (q_gamma(p["k"] + 1, p["q"], pol) * q_gamma(p["alpha"] - p["k"] + 1, p["q"], pol)),
            _grid(alpha=(0.3, 2.5, 4.7), k=(0, 1, 3), q=Q3),
            group="q-binomial-gamma",
        ),
        IdentityCase(
            "QBinomialGammaFormAsPrinted",
            "(q^-alpha;q)_k / (q;q)_k (-1)^k q^(alpha k - C(k,2))",
            "Gamma_q(alpha+1) / (Gamma_q(k+1) Gamma_q(alpha-1))",
            "alpha+1 and alpha-1 not in {0,-1,-2,...}",
            lambda p, pol: q_binomial_general(p["alpha"], int(p["k"]), p["q"]),
            lambda p, pol: q_gamma(p["alpha"] + 1, p["q"], pol)
            / (q_gamma(p["k"] + 1, p["q"], pol) * q_gamma(p["alpha"] - 1, p["q"], pol)),
            _grid(alpha=(0.3, 2.5, 4.7), k=(0, 1, 3), q=Q3),
            note="denominator Gamma_q(alpha-1) in place of Gamma_q(alpha-k+1)",
            group="q-binomial-gamma",
        ),
        IdentityCase(
            "QGammaFunctional",
            "Gamma_q(x+1)", "[x]_q Gamma_q(x)", "x not in {0,-1,-2,...}",
            lambda p, pol: q_gamma(p["x"] + 1, p["q"], pol),
            lambda p, pol: q_bracket(p["x"], p["q"]) * q_gamma(p["x"], p["q"], pol),
            _grid(x=(-2.5, -0.7, 0.3, 0.5, 1.0, 1.7, 2.5, 4.2, 7.9), q=(0.3, 0.5, 0.9)),
        ),
        IdentityCase(
            "QGammaPochhammerForm",
            "Gamma_q(x)", "(1-q)^(1-x) (q;q)_(x-1)", "x not in {0,-1,-2,...}",
            lambda p, pol: q_gamma(p["x"], p["q"], pol),
            lambda p, pol: (1 - p["q"]) ** (1 - p["x"]) * qpochhammer(p["q"], p["q"], float(p["x"] - 1), pol),
            _grid(x=(-2.5, -0.7, 0.3, 0.5, 1.0, 1.7, 2.5, 4.2, 7.9), q=(0.3, 0.5, 0.9)),
        ),
    ]
    return {c.id: c for c in cases}


CATALOG: Dict[str, IdentityCase] = _build_catalog()


def get_identity(case_id: str) -> IdentityCase:
    try:
        return CATALOG[case_id]
    except KeyError:
        raise UnknownIdentity(f"unknown identity id {case_id!r}", flag="--id") from None


def verify_identity(case_id: str, point: Point, policy: TruncationPolicy = DEFAULT_POLICY) -> IdentityResult:
    """Evaluate both sides of a cataloged identity at ``point``."""
    case = get_identity(case_id)
    case.check_domain(point)
    lhs = case.lhs(point, policy)
    rhs = case.rhs(point, policy)
    return IdentityResult(lhs, rhs, rel_residual(lhs, rhs))


@dataclass(frozen=True)
class IdentityReport:
    id: str
    n_points: int
    max_rel_residual: float
    worst_point: Dict[str, float]
    passed: bool
    group: Optional[str]


def verify_case(case_id: str, grid: Optional[Sequence[Point]] = None,
                policy: TruncationPolicy = DEFAULT_POLICY, tol: float = IDENTITY_TOL) -> IdentityReport:
    """Verify one identity over ``grid`` (the case's default grid when omitted)."""
    case = get_identity(case_id)
    points = case.grid if grid is None else grid
    worst, worst_point = 0.0, {}
    for p in points:
        r = verify_identity(case_id, p, policy).rel_residual
        if r > worst or not worst_point:
            worst, worst_point = r, dict(p)
    return IdentityReport(case_id, len(points), worst, worst_point, worst < tol, case.group)


def variant_verdicts(reports: Sequence[IdentityReport]) -> Dict[str, Dict[str, List[str]]]:
    """For each group of competing variants, list the passing ones and the detected misprints."""
    out: Dict[str, Dict[str, List[str]]] = {}
    for r in reports:
        if r.group is None:
            continue
        entry = out.setdefault(r.group, {"passing": [], "misprints": []})
        entry["passing" if r.passed else "misprints"].append(r.id)
    return out


def catalog_document(reports: Optional[Sequence[IdentityReport]] = None) -> dict:
    """Versioned JSON-ready description of the catalog; status comes from ``reports`` when given."""
    by_id = {r.id: r for r in reports} if reports else {}
    entries = []
    for case in CATALOG.values():
        if case.id in by_id:
            status = "verified" if by_id[case.id].passed else "misprint-detected"
        else:
            status = "unverified"
        entries.append({
            "id": case.id,
            "lhs": case.lhs_text,
            "rhs": case.rhs_text,
            "domain": case.domain_text,
            "grid_size": len(case.grid),
            "group": case.group,
            "status": status,
            "note": case.note,
        })
    return {"format": CATALOG_FORMAT, "version": CATALOG_VERSION, "identities": entries}
