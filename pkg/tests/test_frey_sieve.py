import io

import pytest
from sympy.ntheory import n_order

from app.config import settings
from app.exceptions import (
    DomainError,
    MissingEigendataError,
    MissingEigenvalueError,
    OutOfRangeError,
    SieveProblemError,
    SingularCurveError,
)
from app.frey_sieve import (
    admissible_ells,
    admissible_levels,
    ap_from_model,
    ap_point_count,
    build_B,
    cm_discriminant,
    compute_C,
    compute_D,
    d_values,
    export_eigendata,
    frey_curve,
    load_eigendata,
    reduction_trace_check,
    require_levels,
    run_sieve,
    small_prime_hits,
)
from app.models.newform import CurveModEll, NewformEigenData
from app.models.sieve import TAU_P3_ELLS, SieveKind, SieveProblem, SieveResult

P4_CLOSURE_PRIMES = (11, 19, 29, 31, 41, 59, 61, 71, 79, 89)


def test_point_counting():
    assert ap_point_count(CurveModEll(5, 0, -1)) == -2
    assert ap_from_model((0, 0, 0, -1, 0), 5) == -2
    with pytest.raises(SingularCurveError):
        CurveModEll(5, 0, 0)
    with pytest.raises(SingularCurveError):
        ap_from_model((0, 0, 0, 0, 0), 7)
    with pytest.raises(DomainError):
        ap_point_count(CurveModEll(9, 0, 1))


def test_point_count_matches_long_model():
    # Y^2 = X^3 + a2 X^2 + a4 X as a long Weierstrass model
    for a2, a4 in ((1, 3), (2, 5), (4, 1)):
        assert ap_point_count(CurveModEll(13, a2, a4)) == ap_from_model((0, a2, 0, a4, 0), 13)


def test_rational_eigenvalues(rational_forms):
    assert rational_forms["32a2"].rational_ap(5) == -2
    assert rational_forms["96a1"].rational_ap(11) == 4
    assert rational_forms["200b1"].rational_ap(11) == -4
    assert rational_forms["96a1"].charpoly(11) == (-4, 1)
    # bad primes carry no data
    with pytest.raises(MissingEigenvalueError):
        rational_forms["200b1"].charpoly(5)


def test_cm_detection(curves):
    assert cm_discriminant(curves["32a2"]) == -4
    assert cm_discriminant(curves["256a1"]) == -8
    assert cm_discriminant(curves["256b1"]) == -4
    assert cm_discriminant(curves["256d1"]) == -8
    assert cm_discriminant(curves["200c1"]) is None
    assert cm_discriminant(curves["96a1"]) is None
    assert cm_discriminant(curves["40a1"]) is None


def test_build_B():
    assert build_B(3, SieveKind.TAU_P2) == {(2, 0)}
    with pytest.raises(SieveProblemError):
        build_B(11, SieveKind.TAU_P2)
    with pytest.raises(SieveProblemError):
        build_B(5, SieveKind.TAU_P4)
    for s, t in build_B(13, SieveKind.TAU_P4):
        assert s != 0
        assert d_values(13, SieveKind.TAU_P4)[s, t] != 0


def test_frey_curve_coefficients():
    curve = frey_curve(2, 3, 13, SieveKind.TAU_P2, j=1)
    assert (curve.a2, curve.a4) == (6, (9 - pow(2, 11, 13)) % 13)
    curve = frey_curve(2, 3, 13, SieveKind.TAU_P4, j=1)
    assert curve.a2 == (3 * pow(2, 11, 13) - 18) % 13
    curve = frey_curve(1, 1, 13, SieveKind.TAU_P3)
    assert (curve.a2, curve.a4) == (2, 2)
    with pytest.raises(DomainError):
        frey_curve(1, 1, 13, SieveKind.TAU_P2, j=2)


def test_C_and_D_agree(rational_forms):
    f = rational_forms["96a1"]
    pairs = compute_C(f, 13, 1, SieveKind.TAU_P2)
    assert pairs <= build_B(13, SieveKind.TAU_P2)
    values = d_values(13, SieveKind.TAU_P2)
    assert compute_D(f, 13, 1, SieveKind.TAU_P2) == frozenset(int(values[s, t]) for s, t in pairs)


def test_problem_validation():
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P2, kappa=2, q=11)
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P2, kappa=1, q=2)
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P2, kappa=1, q=11, modulus=100)
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P4, kappa=1, q=5)
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P4, kappa=25, q=11)
    with pytest.raises(SieveProblemError):
        SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11, ells=(3,))


def test_levels():
    assert SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11).levels() == {1056: False, 96: True}
    assert SieveProblem(kind=SieveKind.TAU_P4, kappa=5, q=11).levels() == {2200: False, 200: True}
    assert SieveProblem(kind=SieveKind.TAU_P4, kappa=1, q=11).levels() == {440: False, 40: True}
    assert sorted(SieveProblem(kind=SieveKind.TAU_P3).levels()) == [256, 1280, 2816, 14080]
    assert admissible_levels(SieveProblem(kind=SieveKind.TAU_P4, kappa=-5, q=13)) == {2600: False, 200: True}


def test_admissible_ells():
    ells = admissible_ells(SieveKind.TAU_P2, 3, 11, 396, 200)
    assert 5 in ells and 7 in ells
    assert not {2, 3, 11} & set(ells)
    assert all(396 % n_order(11, ell) == 0 for ell in ells)
    assert 5 not in admissible_ells(SieveKind.TAU_P4, 1, 11, 396, 200)
    assert 13 not in admissible_ells(SieveKind.TAU_P2, 1, 11, 396, 200, p=13)


def test_level_96_campaign(rational_forms):
    problem = SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11, modulus=settings.sieve_modulus)
    result = run_sieve(problem, rational_forms["96a1"], 200)
    assert result.h1 == frozenset(range(0, 396, 22))
    assert len(result.h1) == 18
    assert result.h3 == frozenset()
    other = run_sieve(problem, rational_forms["96b1"], 200)
    assert other.empty
    assert reduction_trace_check(rational_forms["96a1"], 11) is False


def test_level_40_closure(rational_forms, curves):
    for q in P4_CLOSURE_PRIMES:
        assert not reduction_trace_check(rational_forms["40a1"], q, curves["40a1"])


LEVEL_200_LABELS = ["200a1", "200b1", "200b1-tw5", "200c1", "200c1-tw5"]


def test_level_200_forms_are_distinct(rational_forms):
    level_200 = sorted(label for label, f in rational_forms.items() if f.level == 200)
    assert level_200 == LEVEL_200_LABELS
    assert {label: rational_forms[label].rational_ap(3) for label in level_200} == {
        "200a1": 0, "200b1": -2, "200b1-tw5": 2, "200c1": 3, "200c1-tw5": -3,
    }


def test_level_200_campaign(rational_forms, curves):
    level_200 = sorted(label for label, f in rational_forms.items() if f.level == 200)
    assert len(level_200) == 5
    survivors = []
    results = {}
    for kappa in (5, -5):
        problem = SieveProblem(kind=SieveKind.TAU_P4, kappa=kappa, q=11)
        for label in level_200:
            result = run_sieve(problem, rational_forms[label], 200)
            results[(kappa, label)] = result
            if not result.empty:
                survivors.append((kappa, label))
    assert survivors == [(5, "200b1")]
    assert 0 in results[(5, "200b1")].h1
    assert not reduction_trace_check(rational_forms["200b1"], 11, curves["200b1"])


def test_tau_p3_cm_forms_survive(rational_forms):
    problem = SieveProblem(kind=SieveKind.TAU_P3)
    for label in ("256a1", "256b1", "256c1"):
        result = run_sieve(problem, rational_forms[label])
        assert sorted(result.pairs) == list(TAU_P3_ELLS)
        assert not result.empty


def test_tau_p3_level_256(rational_forms, curves):
    problem = SieveProblem(kind=SieveKind.TAU_P3)
    level_256 = sorted(label for label, f in rational_forms.items() if f.level == 256)
    assert level_256 == ["256a1", "256b1", "256c1", "256d1"]
    survivors = [label for label in level_256 if not run_sieve(problem, rational_forms[label]).empty]
    assert survivors == ["256a1", "256b1", "256c1"]
    # a_3 = 2 against Frey traces -2 and 0 at ell = 3
    assert rational_forms["256d1"].rational_ap(3) == 2
    assert compute_C(rational_forms["256d1"], 3, 1, SieveKind.TAU_P3) == set()
    assert all(cm_discriminant(curves[label]) is not None for label in survivors)


def test_sieve_result_payload(rational_forms):
    problem = SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11)
    result = run_sieve(problem, rational_forms["96a1"], 200)
    assert SieveResult.from_payload(result.to_payload()) == result
    assert SieveProblem.from_payload(problem.to_payload()) == problem


def test_reduction_check_needs_rational_form():
    f = NewformEigenData(2200, "2200.2.a.x", 2, {13: (-2, 0, 1)})
    with pytest.raises(DomainError):
        reduction_trace_check(f, 13)


def test_require_levels(rational_forms):
    grouped = require_levels(rational_forms.values(), [96, 200])
    assert sorted(f.label for f in grouped[96]) == ["96a1", "96b1"]
    with pytest.raises(MissingEigendataError) as excinfo:
        require_levels(rational_forms.values(), [96, 2200])
    assert excinfo.value.levels == [2200]


def test_export_then_load(rational_forms):
    stream = io.StringIO()
    forms = [rational_forms["96a1"], rational_forms["40a1"]]
    assert export_eigendata(forms, stream) == 2
    assert load_eigendata(stream.getvalue()) == forms


def test_small_prime_hits(table):
    hits = small_prime_hits(SieveProblem(kind=SieveKind.TAU_P3), table)
    assert 2 not in hits
    with pytest.raises(OutOfRangeError):
        small_prime_hits(SieveProblem(kind=SieveKind.TAU_P3), table.truncate(100))


@pytest.mark.slow
def test_tau_p3_campaign_with_eigendata(eigendata_dir):
    forms = []
    for path in sorted(eigendata_dir.glob("*.txt")):
        forms.extend(load_eigendata(path.read_text(encoding="utf-8")))
    grouped = require_levels(forms, [256, 1280, 2816, 14080])
    problem = SieveProblem(kind=SieveKind.TAU_P3)
    survivors = [
        f.label for level in sorted(grouped) for f in grouped[level] if not run_sieve(problem, f).empty
    ]
    assert len(survivors) == 3
