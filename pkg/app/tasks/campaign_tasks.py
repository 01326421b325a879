"""
Campaign work items.

A work item is a (kind, payload) pair with a JSON-safe payload, so the same
core runs inline, on a thread pool or on a Celery worker.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

from celery import group

from app.config import settings
from app.exceptions import DomainError, FactorizationBudgetExceeded, TauVerifierError
from app.frey_sieve import run_sieve
from app.models.newform import NewformEigenData
from app.models.qexpansion import FactorBudget
from app.models.sieve import SieveProblem
from app.tasks.celery_app import celery_app
from app.tau_core import largest_prime_factor, smooth_part, tau_prime_power, tau_zero_prime_power

logger = logging.getLogger(__name__)


def _budget(payload: dict) -> FactorBudget:
    return FactorBudget(
        trial_limit=int(payload.get("trial_limit", settings.trial_limit)),
        rho_rounds=int(payload.get("rho_rounds", settings.rho_rounds)),
    )


def _classify(value: int, p_limit: int, factor: bool, budget: FactorBudget) -> dict:
    """Smoothness verdict for one value, plus P(value) when asked for."""
    row = {"zero": value == 0, "smooth": False, "pf": None, "complete": True}
    if value == 0 or abs(value) == 1:
        return row
    smooth, cofactor = smooth_part(value, p_limit)
    row["smooth"] = cofactor == 1
    if factor:
        try:
            pf = largest_prime_factor(value, budget)
            row["pf"], row["complete"] = pf.value, pf.complete
        except FactorizationBudgetExceeded:
            row["complete"] = False
    return row


def _sieve_item(payload: dict) -> dict:
    problem = SieveProblem.from_payload(payload["problem"])
    form = NewformEigenData.from_payload(payload["form"])
    result = run_sieve(problem, form, int(payload.get("ell_bound", settings.ell_bound)))
    return {"result": result.to_payload()}


def _smooth_item(payload: dict) -> dict:
    p, tau_p = int(payload["p"]), int(payload["tau_p"])
    p_limit, factor = int(payload["p_limit"]), bool(payload.get("factor", False))
    budget = _budget(payload)
    rows = []
    for m in range(3, int(payload["m_max"]) + 1):
        if tau_p == 0:
            value = tau_zero_prime_power(p, m - 1)
        else:
            value = tau_prime_power(tau_p, p, m - 1)
        row = _classify(value, p_limit, factor, budget)
        row["m"] = m
        rows.append(row)
    return {"p": p, "rows": rows}


def _powerful_item(payload: dict) -> dict:
    p_limit, factor = int(payload["p_limit"]), bool(payload.get("factor", False))
    budget = _budget(payload)
    rows = []
    for n, value in payload["items"]:
        row = _classify(int(value), p_limit, factor, budget)
        row["n"] = int(n)
        rows.append(row)
    return {"rows": rows}


WORK_KINDS: Dict[str, Callable[[dict], dict]] = {
    "sieve": _sieve_item,
    "smooth": _smooth_item,
    "powerful": _powerful_item,
}


def _evaluate_work_item_core(kind: str, payload: dict, celery_task_id: Optional[str] = None) -> dict:
    """
    Core work-item logic shared by the Celery task and inline processing.
    """
    handler = WORK_KINDS.get(kind)
    if handler is None:
        raise DomainError(f"unknown work item kind {kind!r}; valid kinds: {sorted(WORK_KINDS)}")
    try:
        outcome = handler(payload)
        outcome["ok"] = True
    except TauVerifierError as e:
        logger.warning("Work item %s failed%s: %s", kind,
                       f" (task {celery_task_id})" if celery_task_id else "", e)
        outcome = {"ok": False, "error": str(e)}
    outcome["kind"] = kind
    return outcome


@celery_app.task(bind=True, name="evaluate_work_item")
def evaluate_work_item(self, kind: str, payload: dict) -> dict:
    """
    Celery task wrapper for work-item evaluation.
    """
    return _evaluate_work_item_core(kind, payload, celery_task_id=self.request.id)


def evaluate_work_item_inline(kind: str, payload: dict) -> dict:
    """
    Evaluate a work item synchronously (without Celery).
    """
    return _evaluate_work_item_core(kind, payload)


def run_work_items(kind: str, payloads: List[dict], backend: Optional[str] = None,
                   threads: Optional[int] = None) -> List[dict]:
    """
    Evaluate work items on the chosen backend; results keep submission order.

    Args:
        kind: Work item kind
        payloads: JSON-safe payloads
        backend: inline, threads or celery (defaults to settings.campaign_backend)
        threads: Pool size for the threads backend
    """
    backend = backend or settings.campaign_backend
    if not payloads:
        return []
    logger.info("Evaluating %s %s work items on the %s backend", len(payloads), kind, backend)
    if backend == "inline":
        return [evaluate_work_item_inline(kind, payload) for payload in payloads]
    if backend == "threads":
        workers = min(threads or settings.campaign_threads, len(payloads))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda payload: evaluate_work_item_inline(kind, payload), payloads))
    if backend == "celery":
        job = group(evaluate_work_item.s(kind, payload) for payload in payloads)
        return job.apply_async().get(timeout=settings.campaign_task_time_limit)
    raise DomainError(f"unknown campaign backend {backend!r}")
