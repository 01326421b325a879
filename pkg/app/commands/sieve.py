"""
Sieve campaigns and eigendata export.

Forms come from the bundled curve models (rational forms, by point counting)
plus any eigendata files named with --eigendata or dropped into the bundled
eigendata directory.
"""
import argparse
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from app.commands.common import new_report, record_bundled
from app.config import settings
from app.exceptions import DomainError, MissingEigendataError, SieveProblemError, TauVerifierError
from app.frey_sieve import (
    SMALL_PRIME_BOUND,
    admissible_levels,
    cm_discriminant,
    export_eigendata,
    forms_from_curves,
    load_curves,
    load_eigendata,
    reduction_trace_check,
    require_levels,
    small_prime_hits,
)
from app.models.newform import CurveModel, NewformEigenData
from app.models.sieve import TAU_P3_LEVELS, SieveKind, SieveProblem, SieveResult
from app.schemas import CampaignConfig, CampaignReport
from app.tasks.campaign_tasks import run_work_items
from app.tau_core import load_or_build_qexpansion
from app.utils.report_writer import file_digest, record_digests

logger = logging.getLogger(__name__)

# Galois orbits of newforms the campaigns expect in complete data
EXPECTED_FORM_COUNTS = {200: 5, 2200: 25}
EXPECTED_TAU_P3_FORMS = 123


def format_residues(values: Iterable[int]) -> str:
    values = sorted(values)
    if not values:
        return "{}"
    if len(values) <= 8:
        return "{" + ",".join(map(str, values)) + "}"
    head = ",".join(map(str, values[:4]))
    return f"{{{head},...,{values[-1]}}} ({len(values)} residues)"


def _eigendata_files(paths: Iterable[str]) -> List[Path]:
    files = []
    for path in map(Path, paths):
        files.extend(sorted(path.glob("*.txt")) if path.is_dir() else [path])
    return files


def load_campaign_data(config: CampaignConfig, report: CampaignReport,
                       ell_bound: int) -> Tuple[List[NewformEigenData], Dict[str, CurveModel]]:
    """All forms for a campaign plus the curve models behind the rational ones."""
    curves_path = record_bundled(report, "curves.txt")
    curves = load_curves(curves_path.read_text(encoding="utf-8"))
    for path in config.curves:
        curves.extend(load_curves(Path(path).read_text(encoding="utf-8")))
    record_digests(report, config.curves)

    by_label = {curve.label: curve for curve in curves}
    forms = {f.label: f for f in forms_from_curves(curves, ell_bound)}

    default_dir = Path(settings.data_dir, "eigendata")
    sources = _eigendata_files(config.eigendata or [str(default_dir)])
    for path in sources:
        with open(path, "r", encoding="utf-8") as handle:
            for f in load_eigendata(handle):
                if f.label in forms:
                    logger.warning("Eigendata for %s replaces the curve-derived form", f.label)
                forms[f.label] = f
    record_digests(report, config.eigendata)
    if not config.eigendata:
        for path in sources:
            report.digests[f"bundled/eigendata/{path.name}"] = file_digest(path)
    return sorted(forms.values(), key=lambda f: (f.level, f.label)), by_label


def _selected_levels(problem: SieveProblem, requested: List[int]) -> List[int]:
    levels = admissible_levels(problem)
    if not requested:
        return sorted(levels)
    unknown = [level for level in requested if level not in levels]
    if unknown:
        raise SieveProblemError(
            f"levels {unknown} are not admissible for {problem.kind.value}; choose from {sorted(levels)}"
        )
    return sorted(set(requested))


def _run(problem: SieveProblem, forms: List[NewformEigenData], config: CampaignConfig,
         ell_bound: int) -> List[Tuple[NewformEigenData, dict]]:
    payloads = [
        {"problem": problem.to_payload(), "form": f.to_payload(), "ell_bound": ell_bound}
        for f in forms
    ]
    outcomes = run_work_items("sieve", payloads, config.backend, config.threads)
    return list(zip(forms, outcomes))


def _close_survivor(f: NewformEigenData, q: int, curve: Optional[CurveModel]) -> Tuple[bool, str]:
    """Whether the reduction argument at q rules f out."""
    if f.level % q == 0:
        return False, f"q={q} divides the level, reduction argument unavailable"
    if not f.is_rational:
        return False, "survivor is not rational"
    try:
        survives = reduction_trace_check(f, q, curve)
    except TauVerifierError as e:
        return False, f"reduction check failed: {e}"
    a_q = f.rational_ap(q) if q in f.charpolys else None
    where = f"a_{q}={a_q}" if a_q is not None else f"a_{q} from the curve model"
    if survives:
        return False, f"+-({q}+1) = {where} mod 11, not closed"
    return True, f"closed by {where}"


def _check_small_primes(report: CampaignReport, prefix: str, problem: SieveProblem) -> None:
    table = load_or_build_qexpansion(SMALL_PRIME_BOUND)
    hits = small_prime_hits(problem, table)
    report.check(f"{prefix}/small-primes", not hits,
                 f"primes p < {SMALL_PRIME_BOUND} settled directly; hits {hits}")


def _check_counts(report: CampaignReport, prefix: str, grouped: Dict[int, List[NewformEigenData]],
                  levels: List[int]) -> None:
    for level in levels:
        if level in EXPECTED_FORM_COUNTS:
            count = len(grouped.get(level, []))
            report.check(f"{prefix}/form-count/{level}", count == EXPECTED_FORM_COUNTS[level],
                         f"{count} forms, expected {EXPECTED_FORM_COUNTS[level]}")


def residue_campaign(report: CampaignReport, problem: SieveProblem, forms: List[NewformEigenData],
                     curves: Dict[str, CurveModel], config: CampaignConfig, ell_bound: int,
                     levels: List[int]) -> Dict[str, SieveResult]:
    """TAU_P2 / TAU_P4 campaign for one kappa; returns the raw results by label."""
    prefix = f"{problem.kind.value}/kappa={problem.kappa}/q={problem.q}"
    grouped = require_levels(forms, levels)
    _check_counts(report, prefix, grouped, levels)
    selected = [f for level in levels for f in grouped[level]]
    results = {}
    for f, outcome in _run(problem, selected, config, ell_bound):
        name = f"{prefix}/{f.level}/{f.label}"
        if not outcome["ok"]:
            report.add(name, "inconclusive", outcome["error"])
            continue
        result = SieveResult.from_payload(outcome["result"])
        results[f.label] = result
        sets = f"H1={format_residues(result.h1)} H3={format_residues(result.h3)}"
        if result.empty:
            report.add(name, "pass", sets)
            continue
        closed, why = _close_survivor(f, problem.q, curves.get(f.label))
        report.add(name, "pass" if closed else "fail", f"{sets}; {why}")
    _check_small_primes(report, prefix, problem)
    return results


def tau_p3_campaign(report: CampaignReport, problem: SieveProblem, forms: List[NewformEigenData],
                    curves: Dict[str, CurveModel], config: CampaignConfig, ell_bound: int,
                    levels: List[int]) -> List[str]:
    """Returns the labels of surviving forms."""
    prefix = SieveKind.TAU_P3.value
    grouped = require_levels(forms, levels)
    selected = [f for level in levels for f in grouped[level]]
    if set(levels) == set(TAU_P3_LEVELS):
        report.check(f"{prefix}/form-count", len(selected) == EXPECTED_TAU_P3_FORMS,
                     f"{len(selected)} forms, expected {EXPECTED_TAU_P3_FORMS}")
    survivors = []
    for f, outcome in _run(problem, selected, config, ell_bound):
        name = f"{prefix}/{f.level}/{f.label}"
        if not outcome["ok"]:
            report.add(name, "inconclusive", outcome["error"])
            continue
        result = SieveResult.from_payload(outcome["result"])
        empty_at = sorted(ell for ell, pairs in result.pairs.items() if not pairs)
        if empty_at:
            report.add(name, "pass", f"killed: C_ell empty at ell={empty_at}")
            continue
        survivors.append(f.label)
        curve = curves.get(f.label)
        disc = cm_discriminant(curve) if curve is not None else None
        if disc is None:
            report.add(name, "fail", "survives every ell and has no known CM curve")
        else:
            report.add(name, "pass", f"survives every ell; CM by discriminant {disc}")
            report.notes.append(f"{f.label} survives the sieve and has CM by {disc}")
    report.notes.append(f"{len(selected) - len(survivors)} of {len(selected)} forms killed")
    _check_small_primes(report, prefix, problem)
    return survivors


SIEVE_EPILOG = """\
bundled curve models cover levels 32, 40, 96, 200 and 256. Every other level needs
--eigendata. Without --level the campaign runs at every admissible level, so for
example TAU_P2 with --kappa 3 --q 11 needs eigendata at level 1056; pass --level 96
to run on the bundled forms alone.
"""


def _with_level_hint(error: MissingEigendataError, problem: SieveProblem,
                     forms: List[NewformEigenData]) -> MissingEigendataError:
    covered = sorted({f.level for f in forms} & set(admissible_levels(problem)))
    if covered:
        hint = f"pass --eigendata, or --level {' --level '.join(map(str, covered))} for the data at hand"
    else:
        hint = "pass --eigendata with forms at these levels"
    return MissingEigendataError(error.levels, hint)


def cmd_sieve(config: CampaignConfig) -> CampaignReport:
    if config.kind is None:
        raise DomainError("--kind is required")
    report = new_report(config)
    ell_bound = config.ell_bound or settings.ell_bound
    modulus = config.modulus or settings.sieve_modulus
    forms, curves = load_campaign_data(config, report, ell_bound)
    if config.kind is SieveKind.TAU_P3:
        problem = SieveProblem(kind=SieveKind.TAU_P3)
        levels = _selected_levels(problem, config.levels)
        try:
            tau_p3_campaign(report, problem, forms, curves, config, ell_bound, levels)
        except MissingEigendataError as e:
            raise _with_level_hint(e, problem, forms) from e
        return report
    if config.q is None:
        raise DomainError(f"--q is required for {config.kind.value}")
    for kappa in config.kappa or [1]:
        problem = SieveProblem(kind=config.kind, kappa=kappa, q=config.q, modulus=modulus)
        levels = _selected_levels(problem, config.levels)
        try:
            residue_campaign(report, problem, forms, curves, config, ell_bound, levels)
        except MissingEigendataError as e:
            raise _with_level_hint(e, problem, forms) from e
    if config.kind is SieveKind.TAU_P2:
        report.notes.append(
            "assumption: the branch 11 | b at the level without q rests on an external "
            "generalized Fermat result and is not verified here"
        )
    return report


def cmd_export_eigendata(config: CampaignConfig) -> CampaignReport:
    """Write eigendata for the bundled (and any extra) curve models."""
    report = new_report(config)
    ell_bound = config.ell_bound or settings.ell_bound
    curves = load_curves(record_bundled(report, "curves.txt").read_text(encoding="utf-8"))
    for path in config.curves:
        curves.extend(load_curves(Path(path).read_text(encoding="utf-8")))
    record_digests(report, config.curves)
    forms = forms_from_curves(curves, ell_bound)
    if not config.output:
        raise DomainError("--output is required")
    with open(config.output, "w", encoding="utf-8", newline="\n") as stream:
        count = export_eigendata(forms, stream)
    for f in forms:
        report.add(f"export/{f.level}/{f.label}", "pass", f"{len(f.charpolys)} primes below {ell_bound}")
    report.notes.append(f"{count} records written to {config.output}")
    return report


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("sieve", parents=parents, help="Frey-curve sieve campaign",
                                   epilog=SIEVE_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--kind", choices=[k.value for k in SieveKind], required=True)
    parser.add_argument("--kappa", type=int, action="append", help="repeat for several kappa")
    parser.add_argument("--q", type=int)
    parser.add_argument("--modulus", type=int, default=settings.sieve_modulus, help="M")
    parser.add_argument("--ell-bound", dest="ell_bound", type=int, default=settings.ell_bound)
    parser.add_argument("--level", dest="levels", type=int, action="append",
                        help="restrict to this level (repeatable); levels without bundled curves need --eigendata")
    parser.add_argument("--eigendata", action="append", help="eigendata file or directory")
    parser.add_argument("--curves", action="append", help="extra curve-model file")
    parser.set_defaults(handler=cmd_sieve)

    parser = subparsers.add_parser("export-eigendata", parents=parents,
                                   help="eigendata from curve models")
    parser.add_argument("--curves", action="append", help="extra curve-model file")
    parser.add_argument("--ell-bound", dest="ell_bound", type=int, default=settings.ell_bound)
    parser.add_argument("--output", required=True, help="output file")
    parser.set_defaults(handler=cmd_export_eigendata)
