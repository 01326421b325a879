"""
Diophantine commands: fixture verification, box search, power scans and the
explicit bound calculators.
"""
import logging
from typing import List

import mpmath
from sympy import factorint

from app.commands.common import new_report, record_bundled
from app.dioph import (
    bg_constant,
    box_search,
    fib_lucas_power_scan,
    lenstra_log_hr_bound,
    qm_pairs,
    s_regulator_log_bound,
    smooth_pairs_check,
    threshold_check,
    verify_solution_list,
)
from app.schemas import CampaignConfig, CampaignReport
from app.utils.fixture_parser import Fixture, load_fixture
from app.utils.report_writer import record_digests

logger = logging.getLogger(__name__)

QM_PAIRS_BELOW_100 = 20
BUNDLED_FIXTURES = ("tm_83_7", "tm_83_41", "thue_deg11", "f7_smooth37")


def _fixtures(config: CampaignConfig, report: CampaignReport) -> List[Fixture]:
    if config.fixture:
        record_digests(report, [config.fixture])
        return [load_fixture(config.fixture)]
    fixtures = []
    for name in BUNDLED_FIXTURES:
        fixtures.append(load_fixture(record_bundled(report, "fixtures", f"{name}.txt")))
    return fixtures


def _format_factored(value: int) -> str:
    return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(factorint(value).items()))


def cmd_verify_solutions(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    for fixture in _fixtures(config, report):
        name = fixture.name or "fixture"
        if fixture.solutions:
            result = verify_solution_list(fixture.instance, fixture.solutions)
            for check in result.failures:
                report.add(f"{name}/solution/{check.solution.x},{check.solution.y}", "fail", check.reason)
            report.check(f"{name}/solutions", result.ok,
                         f"{len(result.checks) - len(result.failures)} of {len(result.checks)} listed solutions verify")
            for sol in result.eleventh_powers:
                report.notes.append(f"{name}: x = {sol.x} is the 11th power of a prime")
        if fixture.pairs:
            bad = smooth_pairs_check(fixture.instance, fixture.pairs)
            report.check(f"{name}/pairs", not bad,
                         f"{len(fixture.pairs)} pairs and negatives; failing {bad}")
        if fixture.threshold is not None:
            report.notes.append(
                f"{name}: solutions with max(|x|, |y|) < {fixture.threshold} are covered by box search only"
            )
    return report


def cmd_box_search(config: CampaignConfig) -> CampaignReport:
    """Exhaustive search in |x|, |y| <= box, compared against the listed solutions."""
    report = new_report(config)
    box = config.box or 50
    for fixture in _fixtures(config, report):
        name = fixture.name or "fixture"
        found = box_search(fixture.instance, box, config.exp_cap, config.threads or 1)
        found_xy = {(s.x, s.y) for s in found}
        if fixture.solutions:
            listed = {(s.x, s.y) for s in fixture.solutions if max(abs(s.x), abs(s.y)) <= box}
            unlisted, missed = sorted(found_xy - listed), sorted(listed - found_xy)
            report.check(f"{name}/box-{box}", not unlisted and not missed,
                         f"{len(found)} found; unlisted {unlisted}; missed {missed}")
        elif fixture.threshold is not None and box >= fixture.threshold:
            gap = threshold_check(fixture.instance, fixture.pairs, fixture.threshold, box, config.threads or 1)
            report.check(f"{name}/box-{box}", gap.ok,
                         f"{len(gap.below)} below {gap.threshold}; unlisted {gap.unlisted}; missed {gap.missed}")
        else:
            report.add(f"{name}/box-{box}", "pass", f"{len(found)} found: {sorted(found_xy)}")
    report.notes.append(f"box search covers |x|, |y| <= {box} only")
    return report


def cmd_fib_lucas_scan(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    n_max = config.n_max or 200
    scan = fib_lucas_power_scan(n_max)
    report.check("fibonacci/perfect-powers", not any(k == "F" for k, _, _ in scan.unexpected),
                 f"F_n perfect powers for n <= {n_max}: {scan.fibonacci_powers}")
    report.check("lucas/perfect-powers", not any(k == "L" for k, _, _ in scan.unexpected),
                 f"L_n perfect powers for n <= {n_max}: {scan.lucas_powers}")
    report.check("eleventh-prime-powers", not scan.eleventh_prime_powers,
                 f"F_2n and L_n that are 11th powers of primes: {scan.eleventh_prime_powers}")
    return report


def cmd_qm_pairs(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    bound = config.bound or 100
    pairs = qm_pairs(bound)
    if bound == 100:
        report.check("qm-pairs/100", len(pairs) == QM_PAIRS_BELOW_100,
                     f"{len(pairs)} pairs, expected {QM_PAIRS_BELOW_100}")
    else:
        report.add(f"qm-pairs/{bound}", "pass", f"{len(pairs)} pairs")
    for q, m in pairs:
        report.notes.append(f"q={q} m={m}")
    return report


def cmd_bg_constant(config: CampaignConfig) -> CampaignReport:
    """c(n, s), and the log(hR) and log R_S estimates when --m is given."""
    report = new_report(config)
    n, s = config.n or 3, config.s or 1
    c = bg_constant(n, s)
    with mpmath.workdps(30):
        log10 = mpmath.log10(c)
    report.add(f"bg-constant/n={n}/s={s}", "pass",
               f"c({n}, {s}) = {_format_factored(c)}, log10 = {mpmath.nstr(log10, 12)}")
    if config.m is not None:
        log_hr = lenstra_log_hr_bound(config.m)
        report.add(f"lenstra/m={config.m}", "pass", f"log(hR) <= {mpmath.nstr(log_hr, 12)}")
        if config.p_max is not None:
            log_rs = s_regulator_log_bound(log_hr, s, config.p_max)
            report.add(f"s-regulator/m={config.m}/t={s}", "pass",
                       f"log R_S <= {mpmath.nstr(log_rs, 12)} with P_S = {config.p_max}")
    return report


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("verify-solutions", parents=parents,
                                   help="plug listed solutions into their equations")
    parser.add_argument("--fixture", help="fixture file (default: the bundled fixtures)")
    parser.set_defaults(handler=cmd_verify_solutions)

    parser = subparsers.add_parser("box-search", parents=parents, help="bounded Thue-Mahler search")
    parser.add_argument("--fixture", help="fixture file (default: the bundled fixtures)")
    parser.add_argument("--box", type=int, default=50)
    parser.add_argument("--exp-cap", dest="exp_cap", type=int)
    parser.set_defaults(handler=cmd_box_search)

    parser = subparsers.add_parser("fib-lucas-scan", parents=parents,
                                   help="perfect powers in Fibonacci and Lucas numbers")
    parser.add_argument("--n-max", dest="n_max", type=int, default=200)
    parser.set_defaults(handler=cmd_fib_lucas_scan)

    parser = subparsers.add_parser("qm-pairs", parents=parents, help="the (q, m) table")
    parser.add_argument("--bound", type=int, default=100, help="q < bound")
    parser.set_defaults(handler=cmd_qm_pairs)

    parser = subparsers.add_parser("bg-constant", parents=parents, help="explicit bound calculator")
    parser.add_argument("--n", type=int, default=3, help="degree of the form")
    parser.add_argument("--s", type=int, default=1, help="number of primes")
    parser.add_argument("--m", type=int, help="conductor of the real cyclotomic field")
    parser.add_argument("--p-max", dest="p_max", type=int, help="largest prime of S")
    parser.set_defaults(handler=cmd_bg_constant)
