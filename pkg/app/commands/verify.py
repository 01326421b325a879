"""
verify-all and congruences: the desk-scale acceptance suites.

Each suite appends entries to the shared report and never raises on a failed
check; only usage and data errors propagate.
"""
import logging
from typing import Callable, List

from sympy import primerange

from app.commands.common import new_report, record_bundled, timed
from app.commands.dioph import QM_PAIRS_BELOW_100
from app.commands.sieve import EXPECTED_FORM_COUNTS, format_residues
from app.config import settings
from app.congruence import mod7_auxiliary_holds, taup2_clauses, verify_congruences
from app.dioph import (
    bg_constant,
    box_search,
    fib_lucas_power_scan,
    qm_pairs,
    is_prime_eleventh_power,
    smooth_pairs_check,
    threshold_check,
    verify_solution_list,
)
from app.exceptions import TauVerifierError
from app.frey_sieve import forms_from_curves, load_curves, reduction_trace_check, run_sieve
from app.lucas import (
    check_carmichael,
    divisibility_holds,
    has_primitive_divisor,
    make_lucas,
    tau_relation_holds,
    term,
)
from app.models.poly import forms_equal
from app.models.qexpansion import QExpansion
from app.models.sieve import SieveKind, SieveProblem
from app.polyfam import (
    coeff_bound_check,
    f_coefficient_formula,
    f_poly,
    fh_identity_holds,
    psi_divisibility_report,
    psi_lucas_identity_check,
    psi_poly,
    psi_product_holds,
    psi_root_check,
    tau_fm_identity_check,
)
from app.schemas import CampaignConfig, CampaignReport
from app.tau_core import (
    deligne_violations,
    load_or_build_qexpansion,
    multiplicativity_violations,
    nonordinary_primes,
    oddness_violations,
    tau,
    tau_prime_power,
)
from app.utils.fixture_parser import load_fixture

logger = logging.getLogger(__name__)

TAU_251_SQUARED = -80561663527802406257321747
NONORDINARY_PRIMES = (2, 3, 5, 7, 2411)
LUCAS_P2_TERMS = (-3, -23, 165, 241, -6003, 10297, 161205)
BG_CONSTANT_3_1 = 3 ** 169 * 2 ** 45
P4_CLOSURE_PRIMES = (11, 19, 29, 31, 41, 59, 61, 71, 79, 89)
SMOOTH_BOX = 130
ELEVENTH_POWER_BOX = 100


def _failures(label: str, bad: List) -> str:
    if not bad:
        return label
    shown = ", ".join(map(str, bad[:10]))
    more = f" and {len(bad) - 10} more" if len(bad) > 10 else ""
    return f"{label}; failures: {shown}{more}"


def tau_table_suite(report: CampaignReport, table: QExpansion) -> None:
    n = table.limit
    report.check("tau/values", (table[2], table[3]) == (-24, 252), f"tau(2)={table[2]}, tau(3)={table[3]}")
    if n >= 251:
        value = tau(251 ** 2, table)
        report.check("tau/251^2", value == TAU_251_SQUARED, f"tau(251^2) = {value}")
    bad = oddness_violations(table)
    report.check("tau/oddness", not bad, _failures(f"tau(n) odd iff n is an odd square, n <= {n}", bad))
    bad = deligne_violations(table)
    report.check("tau/deligne", not bad, _failures(f"|tau(p)| <= 2 p^(11/2), p <= {n}", bad))
    bad = multiplicativity_violations(table)
    report.check("tau/multiplicative", not bad, _failures(f"tau(ab) = tau(a) tau(b), ab <= {n}", bad))
    found = nonordinary_primes(table)
    expected = [p for p in NONORDINARY_PRIMES if p <= n]
    report.check("tau/nonordinary", found == expected, f"p | tau(p) for p in {found}")


def congruence_suite(report: CampaignReport, table: QExpansion) -> None:
    n = table.limit
    result = verify_congruences(n, table)
    for family, count in sorted(result.checked.items(), key=lambda item: item[0].value):
        bad = [v.format() for v in result.violations if v.family is family]
        report.check(f"congruence/{family.value}", not bad, _failures(f"{count} values of n <= {n}", bad))
    clause_failures = {5: [], 7: [], 9: []}
    mod7_failures = []
    for p in primerange(2, n + 1):
        value = tau_prime_power(table[p], p, 2)
        for modulus, ok in taup2_clauses(p, value).items():
            if ok is False:
                clause_failures[modulus].append(int(p))
        if p != 7 and not mod7_auxiliary_holds(p):
            mod7_failures.append(int(p))
    for modulus, bad in clause_failures.items():
        report.check(f"congruence/tau-p2-not-divisible-by-{modulus}", not bad,
                     _failures(f"primes p <= {n}", bad))
    report.check("congruence/mod7-auxiliary", not mod7_failures,
                 _failures(f"p^18 = 1 and p^9 = +-1 mod 7, p <= {n}", mod7_failures))


def lucas_suite(report: CampaignReport, table: QExpansion) -> None:
    seq = make_lucas(2, table[2])
    terms = tuple(term(seq, k) for k in range(2, 9))
    report.check("lucas/p2-terms", terms == LUCAS_P2_TERMS, f"u_2..u_8 = {terms}")
    no_primitive, carmichael, relation, divisibility = [], [], [], []
    for p in primerange(2, 51):
        p = int(p)
        seq = make_lucas(p, table[p])
        no_primitive.extend((p, k) for k in range(5, 31) if k != 6 and not has_primitive_divisor(seq, k))
        carmichael.extend((p, int(ell)) for ell in primerange(2, 100) if not check_carmichael(seq, int(ell)))
        relation.extend((p, k) for k in range(1, 21) if not tau_relation_holds(seq, k))
        if not divisibility_holds(seq, 30):
            divisibility.append(p)
    report.check("lucas/primitive-divisors", not no_primitive,
                 _failures("u_n has a primitive divisor, p <= 50, 5 <= n <= 30, n != 6", no_primitive))
    report.check("lucas/carmichael", not carmichael, _failures("ranks of apparition, ell < 100", carmichael))
    report.check("lucas/tau-relation", not relation,
                 _failures("p^(r(n-1)) u_n = tau(p^(n-1)), n <= 20", relation))
    report.check("lucas/divisibility", not divisibility, _failures("u_k | u_n for k | n <= 30", divisibility))


def polynomial_suite(report: CampaignReport, table: QExpansion) -> None:
    f7 = load_fixture(record_bundled(report, "fixtures", "tm_83_7.txt")).instance.form
    psi41 = load_fixture(record_bundled(report, "fixtures", "tm_83_41.txt")).instance.form
    report.check("poly/F7-printed", forms_equal(f_poly(7), f7), "F_7 against the printed form")
    report.check("poly/Psi41-printed", forms_equal(psi_poly(41), psi41), "Psi_41 against the printed form")

    ms = range(3, 21)
    bad = [m for m in ms if not psi_product_holds(m)]
    report.check("poly/psi-product", not bad, _failures("prod Psi_d = F_m, 3 <= m <= 20", bad))
    bad = [m for m in ms if not fh_identity_holds(m)]
    report.check("poly/fh-identity", not bad, _failures("F_m(ZW, (Z+W)^2) = H_m, m <= 20", bad))
    bad = [m for m in range(1, 41) if not forms_equal(f_coefficient_formula(m), f_poly(m))]
    report.check("poly/closed-form", not bad, _failures("binomial closed form of F_m, m <= 40", bad))

    tau_fm, psi_lucas = [], []
    for p in primerange(2, 21):
        for m in ms:
            if not tau_fm_identity_check(int(p), m, table):
                tau_fm.append((int(p), m))
            if not psi_lucas_identity_check(int(p), m, table):
                psi_lucas.append((int(p), m))
    report.check("poly/tau-Fm", not tau_fm, _failures("tau(p^(m-1)) from F_m, p <= 20, m <= 20", tau_fm))
    report.check("poly/psi-lucas", not psi_lucas,
                 _failures("Psi_m against the Lucas cyclotomic part, p <= 20, m <= 20", psi_lucas))
    bad = [m for m in range(3, 101) if not coeff_bound_check(m)]
    report.check("poly/coeff-bound", not bad, _failures("|coeff(Psi_m)| <= 5^(phi(m)/2), m <= 100", bad))
    bad = [m for m in range(3, 41) if not psi_root_check(m)]
    report.check("poly/psi-roots", not bad, _failures("roots 4 cos^2(pi j/m), m <= 40", bad))

    divisibility = psi_divisibility_report(30)
    report.check("poly/divisibility", divisibility.consistent,
                 "F_m | F_n and Psi_m | F_n for m | n <= 30")
    report.notes.append(
        f"literal Psi_m | Psi_n fails for {len(divisibility.literal_failures)} proper divisor pairs "
        f"up to 30 and holds for {len(divisibility.literal_holds)}; distinct Psi are coprime"
    )


def dioph_suite(report: CampaignReport) -> None:
    for name, box in (("tm_83_7", 50), ("tm_83_41", 50)):
        fixture = load_fixture(record_bundled(report, "fixtures", f"{name}.txt"))
        result = verify_solution_list(fixture.instance, fixture.solutions)
        report.check(f"dioph/{name}/listed", result.ok,
                     _failures(f"{len(result.checks)} listed solutions", [c.solution.as_triple() for c in result.failures]))
        found = {(s.x, s.y) for s in box_search(fixture.instance, box, threads=settings.campaign_threads)}
        listed = {(s.x, s.y) for s in fixture.solutions if max(abs(s.x), abs(s.y)) <= box}
        report.check(f"dioph/{name}/box", found == listed,
                     f"box {box}: {len(found)} found, {len(listed)} listed in box; "
                     f"unlisted {sorted(found - listed)}, missed {sorted(listed - found)}")

    psi7 = load_fixture(record_bundled(report, "fixtures", "tm_83_7.txt"))
    wide = box_search(psi7.instance, ELEVENTH_POWER_BOX, threads=settings.campaign_threads)
    powers = [(s.x, s.y) for s in wide if is_prime_eleventh_power(s.x)]
    report.check("dioph/tm_83_7/no-eleventh-powers", not powers,
                 _failures(f"box {ELEVENTH_POWER_BOX}: {len(wide)} solutions", powers))

    thue = load_fixture(record_bundled(report, "fixtures", "thue_deg11.txt"))
    found = [(s.x, s.y) for s in box_search(thue.instance, 20)]
    report.check("dioph/thue_deg11/box", found == [(1, 0)], f"box 20: {found}")

    smooth = load_fixture(record_bundled(report, "fixtures", "f7_smooth37.txt"))
    bad = smooth_pairs_check(smooth.instance, smooth.pairs)
    report.check("dioph/f7_smooth37/pairs", not bad, _failures(f"{len(smooth.pairs)} listed pairs and negatives", bad))
    gap = threshold_check(smooth.instance, smooth.pairs, smooth.threshold, SMOOTH_BOX, settings.campaign_threads)
    report.check("dioph/f7_smooth37/threshold", gap.ok,
                 f"box {gap.box}: {len(gap.below)} solutions below {gap.threshold}; "
                 f"unlisted {gap.unlisted}, missed {gap.missed}")

    pairs = qm_pairs(100)
    report.check("dioph/qm-pairs", len(pairs) == QM_PAIRS_BELOW_100, f"{len(pairs)} pairs: {pairs}")
    scan = fib_lucas_power_scan(200)
    report.check(
        "dioph/fib-lucas-powers", scan.ok,
        f"F powers {sorted({v for _, v in scan.fibonacci_powers})}, "
        f"L powers {sorted({v for _, v in scan.lucas_powers})}",
    )
    report.check("dioph/bg-constant", bg_constant(3, 1) == BG_CONSTANT_3_1, "c(3, 1) = 3^169 2^45")


def sieve_suite(report: CampaignReport) -> None:
    """The sieve campaigns that need only the bundled rational forms."""
    curves = load_curves(record_bundled(report, "curves.txt").read_text(encoding="utf-8"))
    forms = {f.label: f for f in forms_from_curves(curves, settings.ell_bound)}
    models = {c.label: c for c in curves}

    problem = SieveProblem(kind=SieveKind.TAU_P2, kappa=3, q=11, modulus=settings.sieve_modulus)
    expected_h1 = frozenset(range(0, settings.sieve_modulus, 22))
    for label, h1 in (("96a1", expected_h1), ("96b1", frozenset())):
        result = run_sieve(problem, forms[label], settings.ell_bound)
        report.check(f"sieve/TAU_P2/kappa=3/{label}", result.h1 == h1 and not result.h3,
                     f"H1={format_residues(result.h1)} H3={format_residues(result.h3)}")
    survives = reduction_trace_check(forms["96a1"], 11, models["96a1"])
    report.check("sieve/TAU_P2/96a1-closed", not survives, "a_11 = 4 rules out q = 11")

    bad = [q for q in P4_CLOSURE_PRIMES if reduction_trace_check(forms["40a1"], q, models["40a1"])]
    report.check("sieve/TAU_P4/40a1-closed", not bad, _failures(f"q in {P4_CLOSURE_PRIMES}", bad))
    level_200 = sorted(f.label for f in forms.values() if f.level == 200)
    report.check("sieve/TAU_P4/level-200/form-count", len(level_200) == EXPECTED_FORM_COUNTS[200],
                 f"{len(level_200)} forms, expected {EXPECTED_FORM_COUNTS[200]}")
    survivors = []
    for kappa in (5, -5):
        problem = SieveProblem(kind=SieveKind.TAU_P4, kappa=kappa, q=11, modulus=settings.sieve_modulus)
        for label in level_200:
            result = run_sieve(problem, forms[label], settings.ell_bound)
            if not result.empty:
                survivors.append((kappa, label))
    report.check("sieve/TAU_P4/level-200", survivors == [(5, "200b1")], f"survivors {survivors}")
    survives = reduction_trace_check(forms["200b1"], 11, models["200b1"])
    report.check("sieve/TAU_P4/200b1-closed", not survives, "a_11 = -4 rules out q = 11")


def _run_suite(report: CampaignReport, name: str, suite: Callable, *args) -> None:
    """Run one suite; a data error becomes a named failure instead of aborting the run."""
    with timed(report, name):
        try:
            suite(report, *args)
        except TauVerifierError as e:
            logger.warning("Suite %s aborted: %s", name, e)
            report.add(f"{name}/aborted", "fail", str(e))


def cmd_verify_all(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    limit = config.limit or settings.default_series_limit
    with timed(report, "series"):
        table = load_or_build_qexpansion(limit)
    _run_suite(report, "tau", tau_table_suite, table)
    _run_suite(report, "congruence", congruence_suite, table)
    _run_suite(report, "lucas", lucas_suite, table)
    _run_suite(report, "poly", polynomial_suite, table)
    _run_suite(report, "dioph", dioph_suite)
    if config.with_sieves:
        _run_suite(report, "sieve", sieve_suite)
    else:
        report.add("sieve", "skipped", "run with --with-sieves")
    return report


def cmd_congruences(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    table = load_or_build_qexpansion(config.limit or settings.default_series_limit)
    congruence_suite(report, table)
    return report


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("verify-all", parents=parents, help="run every desk-scale suite")
    parser.add_argument("--limit", type=int, default=settings.default_series_limit)
    parser.add_argument("--with-sieves", dest="with_sieves", action="store_true")
    parser.set_defaults(handler=cmd_verify_all)

    parser = subparsers.add_parser("congruences", parents=parents, help="tau congruence suite")
    parser.add_argument("--limit", type=int, default=settings.default_series_limit)
    parser.set_defaults(handler=cmd_congruences)
