import json
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from qfrac.core import q_bracket
from qfrac.errors import DomainError, InvalidScan, ResonanceError
from qfrac.gauss import (
    SOLUTION_FORMAT,
    FrobeniusSolution,
    GaussParams,
    Scan,
    evaluate_solution,
    f_qk,
    find_indicial_roots,
    frobenius_coefficients,
    g_qk,
    indicial_values,
    residual_check,
    truncation_residual,
)
from qfrac.hyper import koornwinder_residual, koornwinder_solutions

GOLDEN_ROOT = -0.2610156569676717


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def roots(p, **scan):
    return [r.rho for r in find_indicial_roots(p, Scan(**scan))]


# -- parameters and the indicial equation ------------------------------------------------------


def test_params_validation():
    for lam in (0.0, -0.5, 1.5):
        with pytest.raises(DomainError):
            GaussParams(0.5, 0.7, 1.3, lam, 0.5)
    with pytest.raises(DomainError):
        GaussParams(0.5, 0.7, 1.3, 0.5, 1.0)


def test_indicial_at_lambda_one_factorises():
    # f_0(rho) = [rho] [rho + c - 1] at lambda = 1
    q = 0.5
    for c in (0.6, 1.3, 2.2):
        p = GaussParams(0.5, 0.7, c, 1.0, q)
        for rho in (-0.5, 0.3, 1.7):
            expect = q_bracket(rho, q) * q_bracket(rho + c - 1, q)
            assert abs(indicial_values(p, rho).f0 - expect) < 1e-13


def test_indicial_needs_rho_above_minus_one():
    with pytest.raises(DomainError):
        indicial_values(GaussParams(0.5, 0.7, 1.3, 0.5, 0.5), -1.0)


@pytest.mark.parametrize("c,expect", [(0.6, [0.0, 0.4]), (1.3, [-0.3, 0.0])])
def test_lambda_one_roots(c, expect):
    got = roots(GaussParams(0.5, 0.7, c, 1.0, 0.5))
    assert len(got) == 2
    for g, e in zip(got, expect):
        assert abs(g - e) < 1e-9


def test_lambda_one_double_root():
    found = find_indicial_roots(GaussParams(0.5, 0.7, 1.0, 1.0, 0.5))
    assert len(found) == 1
    assert abs(found[0].rho) < 1e-6 and found[0].multiplicity == 2


def test_golden_root():
    for a, b in ((0.5, 0.7), (1.1, -0.3)):
        got = roots(GaussParams(a, b, 0.6, 0.5, 0.5))
        assert any(abs(r - GOLDEN_ROOT) < 1e-12 for r in got), got


@pytest.mark.parametrize("lam", [0.5, 0.75])
def test_roots_have_small_residual(lam):
    p = GaussParams(0.5, 0.7, 1.3, lam, 0.5)
    found = find_indicial_roots(p)
    assert found
    for r in found:
        ind = indicial_values(p, r.rho)
        assert abs(ind.f0) <= 1e-10 * ind.scale


def test_invalid_scans():
    for kw in ({"rho_min": -1.0}, {"rho_min": 1.0, "rho_max": 0.5}, {"step": 0.0}, {"step": float("nan")},
               {"rho_min": -0.9, "rho_max": 1e6, "step": 1e-3}):
        with pytest.raises(InvalidScan):
            Scan(**kw)


def test_empty_scan_window_finds_nothing():
    assert roots(GaussParams(0.5, 0.7, 0.6, 1.0, 0.5), rho_min=1.0, rho_max=2.0) == []


# -- lambda = 1 reduces to the q-hypergeometric equation ---------------------------------------------


def koornwinder_coefficients(a, b, c, q, n):
    return float(oracles.poch(q**a, q, n) * oracles.poch(q**b, q, n) / (oracles.poch(q**c, q, n) * oracles.poch(q, q, n)))


RANDOM_TRIPLES = [(round(r.uniform(-0.8, 1.5), 3), round(r.uniform(-0.8, 1.5), 3), round(r.uniform(0.2, 2.8), 3))
                  for r in [random.Random(7)] for _ in range(5)]


def coefficient_mismatch(a, b, c, q=0.5, N=15):
    worst = 0.0
    p = GaussParams(a, b, c, 1.0, q)
    for rho, (aa, bb, cc) in ((0.0, (a, b, c)), (1 - c, (1 + a - c, 1 + b - c, 2 - c))):
        sol = frobenius_coefficients(p, rho, N=N)
        for n in range(N + 1):
            expect = koornwinder_coefficients(aa, bb, cc, q, n)
            worst = max(worst, abs(sol.coeffs[n] - expect) / max(1.0, abs(expect)))
    return worst


@pytest.mark.parametrize("abc", RANDOM_TRIPLES + [(0.5, 0.7, 1.3), (0.2, 1.4, 0.6)])
def test_lambda_one_coefficients_match(abc):
    assert coefficient_mismatch(*abc) < 1e-10


@pytest.mark.parametrize("z", [0.1, 0.25, 0.4])
def test_lambda_one_values_match(z):
    a, b, c, q = 0.5, 0.7, 1.3, 0.5
    p = GaussParams(a, b, c, 1.0, q)
    pair = koornwinder_solutions(a, b, c, q, z)
    u1 = evaluate_solution(frobenius_coefficients(p, 0.0, N=60), z).value
    u2 = evaluate_solution(frobenius_coefficients(p, 1 - c, N=60), z).value
    assert rel(u1, pair.u1) < 1e-12
    assert rel(u2, pair.u2) < 1e-12


def difference_residual(a, b, c, rho, z, q=0.5, N=60):
    sol = frobenius_coefficients(GaussParams(a, b, c, 1.0, q), rho, N=N)
    return abs(koornwinder_residual(lambda t: evaluate_solution(sol, t).value, a, b, c, q, z))


@pytest.mark.parametrize("z", [0.1, 0.25, 0.4])
def test_lambda_one_solutions_satisfy_difference_equation(z):
    for rho in (0.0, -0.3):
        assert difference_residual(0.5, 0.7, 1.3, rho, z) < 1e-8


def test_constant_function_residual_is_ab():
    a, b, q = 0.5, 0.7, 0.5
    sol = FrobeniusSolution(0.0, 1.0, (1.0,), GaussParams(a, b, 1.3, 1.0, q))
    assert rel(residual_check(sol, 0.3), q_bracket(a, q) * q_bracket(b, q)) < 1e-14


# -- fractional orders ------------------------------------------------------------------------


def residual_sequence(lam, z, ns=(10, 20, 40)):
    p = GaussParams(0.5, 0.7, 1.3, lam, 0.5)
    out = []
    for r in find_indicial_roots(p):
        seq = []
        for n in ns:
            sol = frobenius_coefficients(p, r.rho, N=n)
            u = evaluate_solution(sol, z).value
            seq.append((residual_check(sol, z), u))
        out.append((r.rho, seq))
    return out


@pytest.mark.parametrize("lam", [0.5, 0.75])
@pytest.mark.parametrize("z", [0.1, 0.2])
def test_residual_decreases_with_N(lam, z):
    results = residual_sequence(lam, z)
    assert results
    for rho, seq in results:
        res = [s[0] for s in seq]
        assert all(b < a for a, b in zip(res, res[1:])), (rho, res)
        assert res[-1] < 1e-6 * (1 + abs(seq[-1][1]))


def test_residual_tracks_truncation_estimate():
    p = GaussParams(0.5, 0.7, 1.3, 0.5, 0.5)
    rho = find_indicial_roots(p)[-1].rho
    for n in (5, 10):
        sol = frobenius_coefficients(p, rho, N=n)
        assert rel(residual_check(sol, 0.2), truncation_residual(sol, 0.2)) < 1e-6


def test_recurrence_holds_exactly():
    p = GaussParams(0.5, 0.7, 1.3, 0.75, 0.5)
    rho = find_indicial_roots(p)[0].rho
    sol = frobenius_coefficients(p, rho, N=30)
    for k in range(30):
        lhs = sol.coeffs[k + 1] * f_qk(p, rho, k + 1)
        rhs = g_qk(p, rho, k) * sol.coeffs[k]
        assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), abs(rhs), 1e-300)


def test_degree_zero_solution():
    p = GaussParams(0.5, 0.7, 0.6, 0.5, 0.5)
    sol = frobenius_coefficients(p, GOLDEN_ROOT, u0=2.0, N=0)
    assert sol.coeffs == (2.0,)
    assert evaluate_solution(sol, 0.3).value == 2.0 * 0.3**GOLDEN_ROOT


def test_u0_scales_linearly():
    p = GaussParams(0.5, 0.7, 0.6, 0.5, 0.5)
    s1 = frobenius_coefficients(p, GOLDEN_ROOT, u0=1.0, N=20)
    s3 = frobenius_coefficients(p, GOLDEN_ROOT, u0=3.0, N=20)
    assert all(abs(3 * x - y) <= 1e-15 * abs(y) for x, y in zip(s1.coeffs, s3.coeffs))


def test_non_root_rejected():
    with pytest.raises(DomainError):
        frobenius_coefficients(GaussParams(0.5, 0.7, 0.6, 0.5, 0.5), 0.1)


def test_resonance_detected():
    # c = 0, lambda = 1: roots 0 and 1 differ by one step
    with pytest.raises(ResonanceError):
        frobenius_coefficients(GaussParams(0.5, 0.7, 0.0, 1.0, 0.5), 0.0, N=5)


def test_evaluation_needs_unit_interval():
    sol = frobenius_coefficients(GaussParams(0.5, 0.7, 0.6, 1.0, 0.5), 0.0, N=5)
    for z in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            evaluate_solution(sol, z)


def test_truncation_warning():
    p = GaussParams(0.5, 0.7, 1.3, 0.5, 0.5)
    rho = find_indicial_roots(p)[-1].rho
    assert evaluate_solution(frobenius_coefficients(p, rho, N=3), 0.5).truncation_warning
    assert not evaluate_solution(frobenius_coefficients(p, rho, N=60), 0.05).truncation_warning


# -- storage ------------------------------------------------------------------------------------


def test_json_round_trip():
    p = GaussParams(0.5, 0.7, 1.3, 0.5, 0.5)
    rho = find_indicial_roots(p)[0].rho
    sol = frobenius_coefficients(p, rho, N=20)
    doc = json.loads(json.dumps(sol.to_json()))
    assert doc["format"] == SOLUTION_FORMAT and doc["version"] == 1 and doc["N"] == 20
    back = FrobeniusSolution.from_json(doc)
    assert back == sol
    assert residual_check(back, 0.2) == residual_check(sol, 0.2)


def test_json_tampering_detected():
    p = GaussParams(0.5, 0.7, 1.3, 0.5, 0.5)
    doc = frobenius_coefficients(p, find_indicial_roots(p)[0].rho, N=10).to_json()
    bad = dict(doc, coeffs=doc["coeffs"][:5] + [doc["coeffs"][5] * (1 + 1e-6)] + doc["coeffs"][6:])
    with pytest.raises(DomainError):
        FrobeniusSolution.from_json(bad)
    with pytest.raises(DomainError):
        FrobeniusSolution.from_json(dict(doc, N=9))
    with pytest.raises(DomainError):
        FrobeniusSolution.from_json(dict(doc, version=2))
    with pytest.raises(DomainError):
        FrobeniusSolution.from_json({k: v for k, v in doc.items() if k != "q"})


@given(st.floats(0.1, 0.9), st.floats(0.1, 0.9))
def test_lambda_one_root_zero_always_exists(a, c):
    got = roots(GaussParams(a, 0.7, c + 0.05, 1.0, 0.5))
    assert any(abs(r) < 1e-9 for r in got)
