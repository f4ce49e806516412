"""Fractional q-Gauss difference equation and its Frobenius-type solutions.

The equation, for ``0 < lam <= 1``, reads

    z^lam (q^c - q^(a+b+1) z^lam) D^(2 lam) u
        + ([c] - (q^b [a] + q^a [b+1]) z^lam) D^lam u - [a][b] u = 0,

where ``D^mu`` is the fractional q-derivative with base point 0 (``D^(2 lam)``
is a single derivative of order ``2 lam``, not the square of ``D^lam``).

Substituting ``u = sum_n d_n z^(rho + n lam)`` and matching powers of ``z``
with the power rule gives, for ``G1(k) = Gq(k lam+rho+1)/Gq((k-1) lam+rho+1)``
and ``G2(k) = Gq(k lam+rho+1)/Gq((k-2) lam+rho+1)``::

    f_k = q^c G2(k) + [c] G1(k)
    g_k = q^(a+b+1) G2(k) + (q^b [a] + q^a [b+1]) G1(k) + [a][b]
    f_0(rho) = 0                     (indicial equation)
    d_(k+1) f_(k+1) = g_k d_k        (coefficient recurrence)

so ``d_n = d_0 prod_(k=0)^(n-1) g_k / f_(k+1)``.  Truncating after ``d_N``
leaves exactly one unmatched power, so the residual of a truncated solution is
``|g_N d_N| z^(rho + N lam)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

from .core import DEFAULT_POLICY, TruncationPolicy, as_q, q_bracket, q_gamma_ratio
from .errors import DomainError, InvalidScan, PoleError, ResonanceError
from .operators import power_rule_dq

SOLUTION_FORMAT = "qfrac-gauss-solution"
SOLUTION_VERSION = 1
ROOT_TOL = 1e-10
RESONANCE_TOL = 1e-12
RECURRENCE_TOL = 1e-12
TRUNCATION_TOL = 1e-10
DEDUP_TOL = 1e-9
RECURRENCE_TEXT = "d[k+1] * f(k+1) = g(k) * d[k], d[0] = u0"


@dataclass(frozen=True)
class GaussParams:
    a: float
    b: float
    c: float
    lam: float
    q: float

    def __post_init__(self):
        q = as_q(self.q)
        object.__setattr__(self, "q", q)
        for name in ("a", "b", "c", "lam"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}", flag="--params")
        if not 0 < self.lam <= 1:
            raise DomainError(f"the equation is defined for 0 < lambda <= 1, got {self.lam!r}", flag="--lambda")


@dataclass(frozen=True)
class _Parts:
    g1: float
    g2: float


def _gamma_parts(p: GaussParams, rho: float, k: int) -> _Parts:
    top = k * p.lam + rho + 1.0
    try:
        return _Parts(q_gamma_ratio(top, top - p.lam, p.q), q_gamma_ratio(top, top - 2 * p.lam, p.q))
    except PoleError as exc:
        raise PoleError(f"q-Gamma pole at argument {top!r} (rho={rho!r}, k={k})", flag="--rho") from exc


def f_qk(p: GaussParams, rho: float, k: int) -> float:
    """``f_k(rho)``, the coefficient multiplying ``d_k`` at power ``z^(rho+(k-1) lam)``."""
    g = _gamma_parts(p, rho, k)
    return p.q**p.c * g.g2 + q_bracket(p.c, p.q) * g.g1


def g_qk(p: GaussParams, rho: float, k: int) -> float:
    """``g_k(rho)``, the coefficient multiplying ``d_k`` at power ``z^(rho+k lam)``."""
    g = _gamma_parts(p, rho, k)
    q = p.q
    mid = q**p.b * q_bracket(p.a, q) + q**p.a * q_bracket(p.b + 1, q)
    return q ** (p.a + p.b + 1) * g.g2 + mid * g.g1 + q_bracket(p.a, q) * q_bracket(p.b, q)


def _f_scale(p: GaussParams, rho: float, k: int) -> float:
    g = _gamma_parts(p, rho, k)
    return max(abs(p.q**p.c * g.g2) + abs(q_bracket(p.c, p.q) * g.g1), 1e-300)


@dataclass(frozen=True)
class IndicialValue:
    f0: float
    scale: float


def indicial_values(p: GaussParams, rho: float) -> IndicialValue:
    """``f_0(rho)`` and the magnitude scale its terms are measured against."""
    if not rho > -1:
        raise DomainError(f"rho must exceed -1, got {rho!r}", flag="--rho")
    return IndicialValue(f_qk(p, rho, 0), _f_scale(p, rho, 0))


# -- root finding ---------------------------------------------------------------------


@dataclass(frozen=True)
class Scan:
    rho_min: float = -0.999
    rho_max: float = 3.0
    step: float = 0.005

    def __post_init__(self):
        if not (math.isfinite(self.rho_min) and math.isfinite(self.rho_max) and math.isfinite(self.step)):
            raise InvalidScan("scan bounds must be finite", flag="--scan")
        if not self.rho_min > -1:
            raise InvalidScan(f"scan must start above -1, got {self.rho_min!r}", flag="--scan")
        if not self.rho_max > self.rho_min:
            raise InvalidScan("scan needs rho_max > rho_min", flag="--scan")
        if not self.step > 0:
            raise InvalidScan("scan step must be positive", flag="--scan")
        if (self.rho_max - self.rho_min) / self.step > 1e6:
            raise InvalidScan("scan has more than a million points", flag="--scan")

    def points(self) -> List[float]:
        n = int(math.floor((self.rho_max - self.rho_min) / self.step + 1e-9))
        pts = [self.rho_min + i * self.step for i in range(n + 1)]
        if pts[-1] < self.rho_max:
            pts.append(self.rho_max)
        return pts


@dataclass(frozen=True)
class IndicialRoot:
    rho: float
    multiplicity: int
    residual: float


def _bisect(f, lo: float, hi: float, flo: float) -> float:
    # Runs to float resolution: the truncated-series residual is floored by |f0(rho)|.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_indicial_roots(p: GaussParams, scan: Scan = Scan()) -> List[IndicialRoot]:
    """Roots of ``f_0`` in the scan window, sorted ascending.

    Sign changes are refined by bisection.  A local minimum of ``|f_0|`` that
    touches zero without a sign change is reported as a double root.
    """
    from scipy.optimize import minimize_scalar

    def f(r):
        return indicial_values(p, r).f0

    def rel(r):
        v = indicial_values(p, r)
        return abs(v.f0) / v.scale

    pts = scan.points()
    vals = [f(r) for r in pts]
    found: List[IndicialRoot] = []

    for i, (r, v) in enumerate(zip(pts, vals)):
        if v == 0.0:
            found.append(IndicialRoot(r, 1, 0.0))
        elif i + 1 < len(pts) and vals[i + 1] != 0.0 and (v < 0) != (vals[i + 1] < 0):
            root = _bisect(f, r, pts[i + 1], v)
            found.append(IndicialRoot(root, 1, rel(root)))

    # Tangential roots: |f0| dips between neighbours with no sign change.
    for i in range(1, len(pts) - 1):
        a, m, b = abs(vals[i - 1]), abs(vals[i]), abs(vals[i + 1])
        if not (m <= a and m <= b) or (vals[i - 1] < 0) != (vals[i + 1] < 0):
            continue
        if any(abs(r.rho - pts[i]) <= scan.step for r in found):
            continue
        res = minimize_scalar(rel, bounds=(pts[i - 1], pts[i + 1]), method="bounded",
                              options={"xatol": 1e-13})
        if res.fun < ROOT_TOL:
            found.append(IndicialRoot(float(res.x), 2, float(res.fun)))

    found.sort(key=lambda r: r.rho)
    out: List[IndicialRoot] = []
    for r in found:
        if out and abs(r.rho - out[-1].rho) <= DEDUP_TOL:
            continue
        if r.residual < ROOT_TOL:
            out.append(r)
    return out


# -- Frobenius solutions ----------------------------------------------------------------


@dataclass(frozen=True)
class FrobeniusSolution:
    rho: float
    u0: float
    coeffs: Tuple[float, ...]
    params: GaussParams

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.rho > -1:
            raise DomainError(f"rho must exceed -1, got {self.rho!r}", flag="--rho")
        if not self.coeffs or self.coeffs[0] != self.u0:
            raise DomainError("coefficient list must start with u0")

    def recurrence_mismatch(self) -> float:
        """Largest relative error when re-deriving each ``d_(k+1)`` from ``d_k``."""
        worst = 0.0
        for k in range(self.N):
            expect = g_qk(self.params, self.rho, k) * self.coeffs[k] / f_qk(self.params, self.rho, k + 1)
            got = self.coeffs[k + 1]
            worst = max(worst, abs(got - expect) / max(abs(expect), abs(got), 1e-300))
        return worst

    def to_json(self) -> dict:
        p = self.params
        return {
            "format": SOLUTION_FORMAT,
            "version": SOLUTION_VERSION,
            "rho": self.rho,
            "u0": self.u0,
            "lambda": p.lam,
            "a": p.a,
            "b": p.b,
            "c": p.c,
            "q": p.q,
            "N": self.N,
            "coeffs": list(self.coeffs),
            "metadata": {
                "recurrence": RECURRENCE_TEXT,
                "indicial_f0": indicial_values(p, self.rho).f0,
            },
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FrobeniusSolution":
        """Rebuild a stored solution, re-checking its recurrence."""
        if not isinstance(doc, dict) or doc.get("format") != SOLUTION_FORMAT:
            raise DomainError("not a stored q-Gauss solution", flag="--in")
        if doc.get("version") != SOLUTION_VERSION:
            raise DomainError(f"unsupported solution version {doc.get('version')!r}", flag="--in")
        try:
            p = GaussParams(float(doc["a"]), float(doc["b"]), float(doc["c"]), float(doc["lambda"]), float(doc["q"]))
            sol = cls(float(doc["rho"]), float(doc["u0"]), tuple(doc["coeffs"]), p)
            n = int(doc["N"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed solution document: {exc}", flag="--in") from exc
        if n != sol.N:
            raise DomainError(f"N={n} disagrees with {len(sol.coeffs)} stored coefficients", flag="--in")
        bad = sol.recurrence_mismatch()
        if bad > RECURRENCE_TOL:
            raise DomainError(f"stored coefficients break the recurrence (relative mismatch {bad:.3g})", flag="--in")
        return sol


def frobenius_coefficients(p: GaussParams, rho: float, u0: float = 1.0, N: int = 40) -> FrobeniusSolution:
    """Coefficients ``d_0 .. d_N`` of the solution with leading exponent ``rho``."""
    if int(N) != N or N < 0:
        raise DomainError(f"N must be a nonnegative integer, got {N!r}", flag="--N")
    ind = indicial_values(p, rho)
    if abs(ind.f0) > ROOT_TOL * ind.scale:
        raise DomainError(f"rho={rho!r} is not an indicial root (|f0|/scale = {abs(ind.f0) / ind.scale:.3g})",
                          flag="--rho")
    d = [float(u0)]
    for k in range(int(N)):
        fk1 = f_qk(p, rho, k + 1)
        if abs(fk1) <= RESONANCE_TOL * _f_scale(p, rho, k + 1):
            raise ResonanceError(f"f_{k + 1}(rho) vanishes: resonant exponent rho + {k + 1} lambda", flag="--rho")
        d.append(g_qk(p, rho, k) * d[k] / fk1)
    return FrobeniusSolution(float(rho), float(u0), tuple(d), p)


@dataclass(frozen=True)
class Evaluation:
    value: float
    last_term: float
    truncation_warning: bool


def _check_z(z: float) -> None:
    if not 0 < z < 1:
        raise DomainError(f"z must lie in (0, 1), got {z!r}", flag="--z")


def evaluate_solution(sol: FrobeniusSolution, z: float) -> Evaluation:
    """Partial sum ``sum_n d_n z^(rho + n lam)`` with a truncation diagnostic."""
    _check_z(z)
    lam = sol.params.lam
    terms = [d * z ** (sol.rho + n * lam) for n, d in enumerate(sol.coeffs)]
    value = math.fsum(terms)
    last = abs(terms[-1])
    if sol.N >= 1:
        ratio = abs(terms[-1]) / abs(terms[-2]) if terms[-2] else 0.0
        warn = last > TRUNCATION_TOL * abs(value) or ratio >= 1.0
    else:
        warn = False
    return Evaluation(value, last, warn)


def _termwise(sol: FrobeniusSolution, order: float, z: float) -> float:
    lam, q = sol.params.lam, sol.params.q
    return math.fsum(d * power_rule_dq(sol.rho + n * lam, order, z, 0.0, q) for n, d in enumerate(sol.coeffs) if d)


def residual_check(sol: FrobeniusSolution, z: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Absolute residual of the equation at ``z`` for the truncated series.

    Both fractional derivatives are applied termwise with the power rule.
    """
    _check_z(z)
    p = sol.params
    q = p.q
    zl = z**p.lam
    u = evaluate_solution(sol, z).value
    d1 = _termwise(sol, p.lam, z)
    d2 = _termwise(sol, 2 * p.lam, z)
    mid = q**p.b * q_bracket(p.a, q) + q**p.a * q_bracket(p.b + 1, q)
    r = math.fsum([
        zl * q**p.c * d2,
        -zl * zl * q ** (p.a + p.b + 1) * d2,
        q_bracket(p.c, q) * d1,
        -mid * zl * d1,
        -q_bracket(p.a, q) * q_bracket(p.b, q) * u,
    ])
    return abs(r)


def truncation_residual(sol: FrobeniusSolution, z: float) -> float:
    """The residual predicted by the recurrence: ``|g_N d_N| z^(rho + N lam)``."""
    _check_z(z)
    p = sol.params
    return abs(g_qk(p, sol.rho, sol.N) * sol.coeffs[-1]) * z ** (sol.rho + sol.N * p.lam)
