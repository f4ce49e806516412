import json

import pytest
from hypothesis import given, strategies as st

import oracles
from qfrac.core import TruncationPolicy, qpochhammer
from qfrac.errors import DenominatorPole, DivergentSeries, UnknownIdentity
from qfrac.hyper import (
    CATALOG,
    IDENTITY_TOL,
    PhiSeriesSpec,
    catalog_document,
    eval_phi,
    koornwinder_residual,
    koornwinder_solutions,
    phi,
    terminating_index,
    variant_verdicts,
    verify_case,
    verify_identity,
)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# -- series evaluation --------------------------------------------------------------------


def test_z_zero_gives_one():
    assert phi((0.3, 0.4, 0.5), (0.2,), 0.5, 0.0) == 1.0


def test_unit_numerator_kills_series():
    assert phi((1.0, 0.4), (0.3,), 0.5, 0.7) == 1.0


def test_q_binomial_theorem_example():
    assert rel(phi((0.4,), (), 0.5, 0.3), qpochhammer(0.12, 0.5) / qpochhammer(0.3, 0.5)) < 1e-14


def test_one_phi_one_evaluation_example():
    a, c, q = 0.6, 0.2, 0.5
    assert rel(phi((a,), (c,), q, c / a), qpochhammer(c / a, q) / qpochhammer(c, q)) < 1e-14


@pytest.mark.parametrize(
    "num,den,z",
    [
        ((0.3, 0.5), (0.7,), 0.4),
        ((0.2, -0.4, 0.6), (0.3, 0.9), 0.5),
        ((0.3,), (0.5,), -2.0),
        ((0.4,), (0.0, 0.3), 1.5),
        ((0.5, 0.3, 0.2), (0.0, 0.0), 0.5),
    ],
)
def test_phi_matches_oracle(num, den, z):
    assert rel(phi(num, den, 0.5, z), float(oracles.phi(num, den, 0.5, z))) < 1e-13


def test_nonterminating_divergent_series_rejected():
    with pytest.raises(DivergentSeries):
        phi((0.3, 0.4, 0.5), (), 0.5, 0.1)
    with pytest.raises(DivergentSeries):
        phi((0.3, 0.4), (0.5,), 0.5, 1.0)


def test_terminating_series_ignores_radius():
    q = 0.5
    v = phi((q**-3, 0.4, 0.2), (), q, 5.0)
    assert rel(v, float(oracles.phi((q**-3, 0.4, 0.2), (), q, 5.0))) < 1e-13


def test_denominator_pole():
    q = 0.5
    with pytest.raises(DenominatorPole):
        phi((0.3,), (q**-2,), q, 0.2)
    # terminates at n = 1 before the denominator vanishes at n = 3; 1phi1 carries a -1 at n = 1
    expect = 1 - (1 - q**-1) / ((1 - q**-2) * (1 - q)) * 0.2
    assert rel(phi((q**-1,), (q**-2,), q, 0.2), expect) < 1e-15


@given(st.integers(0, 20), st.floats(0.1, 0.9), st.floats(-0.9, 0.9))
def test_terminating_series_sum_exactly_n_plus_one_terms(n, b, z):
    q = 0.5
    spec = PhiSeriesSpec((q**-n, b), (0.3,), q, z)
    assert terminating_index(spec) == n
    v1 = eval_phi(spec)
    v2 = eval_phi(spec, TruncationPolicy(max_terms=10**6))
    assert v1 == v2


@given(st.floats(0.1, 0.9), st.floats(0.1, 0.6), st.sampled_from([0.3, 0.5, 0.7]))
def test_q_binomial_theorem_property(a, z, q):
    assert rel(phi((a,), (), q, z), qpochhammer(a * z, q) / qpochhammer(z, q)) < 1e-11


# -- difference equation ------------------------------------------------------------------


def test_koornwinder_trivial_cases():
    assert koornwinder_solutions(0.5, 0.7, 1.3, 0.5, 0.0).u1 == 1.0
    for z in (0.1, 0.5, -0.4):
        assert koornwinder_solutions(0.0, 0.0, 1.3, 0.5, z).u1 == 1.0


@pytest.mark.parametrize("abc", [(0.5, 0.7, 1.3), (0.2, 1.4, 0.6), (-0.3, 0.8, 2.5)])
def test_koornwinder_solutions_satisfy_equation(abc):
    a, b, c = abc
    q, z = 0.5, 0.25
    for which in ("u1", "u2"):
        def u(t, which=which):
            return getattr(koornwinder_solutions(a, b, c, q, t), which)

        scale = max(1.0, abs(u(z)))
        assert abs(koornwinder_residual(u, a, b, c, q, z)) < 1e-8 * scale


def test_koornwinder_integer_c_has_no_second_solution():
    assert koornwinder_solutions(0.5, 0.7, 1.0, 0.5, 0.3).u2 is None


# -- identity catalog ---------------------------------------------------------------------


def test_catalog_is_large_enough():
    ids = set(CATALOG)
    assert len(ids) == len(CATALOG) >= 14
    for required in ("QBinomialTheorem", "OnePhiOneEvaluation", "Heine1", "Heine3", "Heine2Euler",
                     "Heine2AsPrinted", "Heine2Phi2", "ExpProduct_ee", "ExpProduct_eE", "ExpProduct_EE",
                     "Quotient_ee", "Quotient_eE", "Phi10Product", "Phi10ProductMerge",
                     "PochhammerFiniteInfinite"):
        assert required in ids


def test_verify_identity_examples():
    assert verify_identity("QBinomialTheorem", {"a": 0.4, "q": 0.5, "z": 0.3}).rel_residual < 1e-12
    assert verify_identity("ExpProductInverse", {"z": 0.3, "q": 0.5}).rel_residual < 1e-13
    assert verify_identity("Heine1", {"a": 0.3, "b": 0.5, "c": 0.7, "z": 0.2, "q": 0.5}).rel_residual < 1e-11


def test_unknown_identity():
    with pytest.raises(UnknownIdentity) as err:
        verify_identity("NoSuchIdentity", {})
    assert err.value.flag == "--id"


@pytest.mark.parametrize("case", list(CATALOG.values()), ids=lambda c: c.id)
def test_every_identity_over_its_grid(case):
    report = verify_case(case.id)
    assert report.n_points >= 27
    misprint = case.group is not None and "AsPrinted" in case.id
    if misprint:
        assert not report.passed, f"{case.id} was expected to fail"
    else:
        assert report.max_rel_residual < IDENTITY_TOL, report


def test_variant_groups_have_exactly_one_winner():
    reports = [verify_case(i) for i in CATALOG]
    verdicts = variant_verdicts(reports)
    assert verdicts["heine2"]["passing"] == ["Heine2Euler"]
    assert verdicts["heine2"]["misprints"] == ["Heine2AsPrinted"]
    for group, v in verdicts.items():
        assert len(v["passing"]) == 1, group


def test_catalog_document_is_json_and_versioned():
    reports = [verify_case(i) for i in CATALOG]
    doc = json.loads(json.dumps(catalog_document(reports)))
    assert doc["format"] == "qfrac-identity-catalog" and doc["version"] == 1
    status = {e["id"]: e["status"] for e in doc["identities"]}
    assert status["Heine2AsPrinted"] == "misprint-detected"
    assert status["QBinomialTheorem"] == "verified"
    assert catalog_document()["identities"][0]["status"] == "unverified"
