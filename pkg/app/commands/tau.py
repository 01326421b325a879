"""
tau, powerful-check and smooth-search commands.
"""
import logging
from math import isqrt
from typing import List

from sympy import primerange

from app.commands.common import (
    largest_needed_prime,
    name_width,
    new_report,
    parse_tau_target,
)
from app.schemas import CampaignConfig, CampaignReport
from app.tasks.campaign_tasks import run_work_items
from app.tau_core import default_budget, load_or_build_qexpansion, powerful_numbers, tau
from app.utils.factorization import factorize

logger = logging.getLogger(__name__)

LEHMER_BOUND = 816212624008487344127999
POWERFUL_CHUNK = 200
EXPECTED_POWERFUL_EXCEPTION = 8
EXPECTED_SMOOTH_HIT = (2, 4)


def _budget_fields() -> dict:
    budget = default_budget()
    return {"trial_limit": budget.trial_limit, "rho_rounds": budget.rho_rounds}


def cmd_tau(config: CampaignConfig) -> CampaignReport:
    """tau(n) with its factorization and largest prime factor."""
    report = new_report(config)
    values = parse_tau_target(config.target or "1")
    table = load_or_build_qexpansion(max(largest_needed_prime(values), 2))
    width = name_width(max(values))
    for n in values:
        name = f"tau/{n:0{width}d}"
        value = tau(n, table)
        if abs(value) <= 1:
            report.add(name, "pass", f"tau({n}) = {value}, P undefined")
            continue
        fact = factorize(value, default_budget())
        sign = "-" if value < 0 else ""
        detail = f"tau({n}) = {value} = {sign}{fact.format()}"
        if fact.complete:
            report.add(name, "pass", f"{detail}, P={max(fact.primes)}")
        else:
            report.add(name, "inconclusive", f"{detail}, factorization incomplete")
    return report


def _lehmer_alarm(report: CampaignReport, table) -> None:
    zeros = [int(p) for p in primerange(2, table.limit + 1) if table[p] == 0]
    for p in zeros:
        report.add(
            f"powerful/lehmer-alarm/{p}", "fail",
            f"tau({p}) = 0, yet any prime with tau(p) = 0 must exceed {LEHMER_BOUND}",
        )
    if not zeros:
        report.add("powerful/lehmer", "pass", f"tau(p) != 0 for every prime p <= {table.limit}")


def cmd_powerful_check(config: CampaignConfig) -> CampaignReport:
    """
    P(tau(n)) >= 13 for every powerful n <= bound, except n = 1 and n = 8.

    The verdict uses the 11-smooth part of tau(n), which is exact; --factor
    additionally reports P(tau(n)) under the factorization budget.
    """
    report = new_report(config)
    bound = config.bound or 10 ** 6
    table = load_or_build_qexpansion(max(isqrt(bound), 2))
    _lehmer_alarm(report, table)

    items = [[n, tau(n, table)] for n in powerful_numbers(bound) if n > 1]
    payloads = [
        {"items": items[i:i + POWERFUL_CHUNK], "p_limit": config.p_limit, "factor": config.factor,
         **_budget_fields()}
        for i in range(0, len(items), POWERFUL_CHUNK)
    ]
    outcomes = run_work_items("powerful", payloads, config.backend, config.threads)

    exceptions: List[int] = []
    width = name_width(bound)
    for index, outcome in enumerate(outcomes):
        if not outcome["ok"]:
            report.add(f"powerful/chunk/{index:04d}", "inconclusive", outcome["error"])
            continue
        for row in outcome["rows"]:
            n = row["n"]
            if row["zero"]:
                report.add(f"powerful/zero/{n:0{width}d}", "fail", f"tau({n}) = 0")
            elif row["smooth"]:
                exceptions.append(n)
                ok = n == EXPECTED_POWERFUL_EXCEPTION or config.p_limit != 11
                report.add(f"powerful/exception/{n:0{width}d}", "pass" if ok else "fail",
                           f"P(tau({n})) <= {config.p_limit}")
            if config.factor and not row["complete"]:
                report.add(f"powerful/factor/{n:0{width}d}", "inconclusive",
                           f"factorization of tau({n}) incomplete")
    if config.p_limit == 11:
        expected = [EXPECTED_POWERFUL_EXCEPTION] if bound >= EXPECTED_POWERFUL_EXCEPTION else []
        report.check(
            "powerful/unique-exception", sorted(exceptions) == expected,
            f"exceptions {sorted(exceptions)}, expected {expected}",
        )
    report.notes.append(f"{len(items)} powerful n in [2, {bound}] examined")
    logger.info("Powerful check to %s: %s values, exceptions %s", bound, len(items), exceptions)
    return report


def cmd_smooth_search(config: CampaignConfig) -> CampaignReport:
    """(p, m) with P(tau(p^(m-1))) <= P_limit for p <= p_max, 3 <= m <= m_max."""
    report = new_report(config)
    p_max = config.p_max or 100
    m_max = config.m_max or 9
    table = load_or_build_qexpansion(p_max)
    payloads = [
        {"p": int(p), "tau_p": table[p], "m_max": m_max, "p_limit": config.p_limit,
         "factor": config.factor, **_budget_fields()}
        for p in primerange(2, p_max + 1)
    ]
    outcomes = run_work_items("smooth", payloads, config.backend, config.threads)

    hits = []
    width = name_width(p_max)
    for payload, outcome in zip(payloads, outcomes):
        p = payload["p"]
        if not outcome["ok"]:
            report.add(f"smooth/p={p:0{width}d}", "inconclusive", outcome["error"])
            continue
        for row in outcome["rows"]:
            m = row["m"]
            name = f"smooth/p={p:0{width}d}/m={m:02d}"
            if row["zero"]:
                report.add(name, "fail", f"tau({p}^{m - 1}) = 0")
                continue
            if config.factor and not row["complete"]:
                report.add(name, "inconclusive", f"factorization of tau({p}^{m - 1}) incomplete")
            if row["smooth"]:
                hits.append((p, m))
                ok = (p, m) == EXPECTED_SMOOTH_HIT or config.p_limit != 11
                detail = f"P(tau({p}^{m - 1})) <= {config.p_limit}"
                if row["pf"] is not None:
                    detail += f", P={row['pf']}"
                report.add(name, "pass" if ok else "fail", detail)
    if config.p_limit == 11:
        expected = [EXPECTED_SMOOTH_HIT] if m_max >= 4 else []
        report.check("smooth/only-(2,4)", hits == expected, f"hits {hits}, expected {expected}")
    else:
        report.add("smooth/only-(2,4)", "skipped", "expected hits are only known for P_limit=11")
    report.notes.append(f"primes p <= {p_max}, 3 <= m <= {m_max}, P_limit={config.p_limit}")
    return report


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("tau", parents=parents, help="tau(n) with factorization")
    parser.add_argument("target", help="n, a^k or a..b")
    parser.set_defaults(handler=cmd_tau)

    parser = subparsers.add_parser("powerful-check", parents=parents,
                                   help="P(tau(n)) >= 13 for powerful n")
    parser.add_argument("--bound", type=int, default=10 ** 6)
    parser.add_argument("--p-limit", dest="p_limit", type=int, default=11)
    parser.add_argument("--factor", action="store_true", help="also report P(tau(n))")
    parser.set_defaults(handler=cmd_powerful_check)

    parser = subparsers.add_parser("smooth-search", parents=parents,
                                   help="smooth values of tau(p^(m-1))")
    parser.add_argument("--p-max", dest="p_max", type=int, default=100)
    parser.add_argument("--m-max", dest="m_max", type=int, default=9)
    parser.add_argument("--p-limit", dest="p_limit", type=int, default=11)
    parser.add_argument("--factor", action="store_true", help="also report P(tau(p^(m-1)))")
    parser.set_defaults(handler=cmd_smooth_search)
