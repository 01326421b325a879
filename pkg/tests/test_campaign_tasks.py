import pytest

from app.exceptions import DomainError
from app.models.sieve import SieveKind, SieveProblem
from app.tasks.campaign_tasks import (
    evaluate_work_item,
    evaluate_work_item_inline,
    run_work_items,
)

SMOOTH_P2 = {"p": 2, "tau_p": -24, "m_max": 5, "p_limit": 11}


def test_smooth_item_rows():
    outcome = evaluate_work_item_inline("smooth", SMOOTH_P2)
    assert outcome["ok"] and outcome["kind"] == "smooth"
    # tau(4), tau(8), tau(16)
    assert [(row["m"], row["smooth"]) for row in outcome["rows"]] == [(3, False), (4, True), (5, False)]


def test_smooth_item_with_factoring():
    outcome = evaluate_work_item_inline("smooth", dict(SMOOTH_P2, factor=True))
    assert [row["pf"] for row in outcome["rows"]] == [23, 11, 241]
    assert all(row["complete"] for row in outcome["rows"])


def test_smooth_item_zero_trace():
    outcome = evaluate_work_item_inline("smooth", {"p": 3, "tau_p": 0, "m_max": 4, "p_limit": 11})
    assert [row["zero"] for row in outcome["rows"]] == [False, True]


def test_powerful_item():
    outcome = evaluate_work_item_inline("powerful", {"items": [[4, -1472], [8, 84480]], "p_limit": 11})
    assert [(row["n"], row["smooth"]) for row in outcome["rows"]] == [(4, False), (8, True)]


def test_sieve_item(rational_forms):
    payload = {
        "problem": SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11).to_payload(),
        "form": rational_forms["96b1"].to_payload(),
        "ell_bound": 200,
    }
    outcome = evaluate_work_item_inline("sieve", payload)
    assert outcome["ok"]
    assert outcome["result"]["h1"] == [] and outcome["result"]["h3"] == []


def test_failed_item_is_reported_not_raised(rational_forms):
    payload = {
        "problem": {"kind": "TAU_P2", "kappa": 3, "q": 2, "modulus": 396, "ells": None},
        "form": rational_forms["96b1"].to_payload(),
    }
    outcome = evaluate_work_item_inline("sieve", payload)
    assert outcome["ok"] is False
    assert "odd prime" in outcome["error"]


def test_unknown_kind():
    with pytest.raises(DomainError):
        evaluate_work_item_inline("nothing", {})


@pytest.mark.parametrize("backend", ["inline", "threads"])
def test_backends_keep_order(backend):
    payloads = [{"p": p, "tau_p": t, "m_max": 4, "p_limit": 11} for p, t in ((2, -24), (3, 252), (5, 4830))]
    outcomes = run_work_items("smooth", payloads, backend=backend, threads=2)
    assert [o["p"] for o in outcomes] == [2, 3, 5]


def test_unknown_backend():
    with pytest.raises(DomainError):
        run_work_items("smooth", [SMOOTH_P2], backend="mpi")
    assert run_work_items("smooth", [], backend="mpi") == []


def test_celery_task_runs_eagerly():
    result = evaluate_work_item.apply(args=("smooth", SMOOTH_P2))
    assert result.get()["rows"][1]["smooth"]
