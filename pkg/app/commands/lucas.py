"""
lucas: terms, ranks of apparition and primitive divisors for one prime.
"""
from sympy import isprime, primerange

from app.commands.common import new_report
from app.exceptions import DomainError, FactorizationBudgetExceeded
from app.lucas import check_carmichael, make_lucas, primitive_divisors, rank_of_apparition, term
from app.schemas import CampaignConfig, CampaignReport
from app.tau_core import load_or_build_qexpansion


def cmd_lucas(config: CampaignConfig) -> CampaignReport:
    report = new_report(config)
    p = config.p or 2
    if not isprime(p):
        raise DomainError(f"--p must be prime, got {p}")
    n_max = config.n_max or 12
    ell_bound = config.ell_bound or 100
    table = load_or_build_qexpansion(p)
    seq = make_lucas(p, table[p])
    report.notes.append(
        f"p={p} tau(p)={table[p]} r={seq.r} trace={seq.trace} norm={seq.norm} disc={seq.disc}"
    )
    for n in range(1, n_max + 1):
        name = f"lucas/p={p}/n={n:03d}"
        u_n = term(seq, n)
        try:
            primitive = sorted(primitive_divisors(seq, n))
        except FactorizationBudgetExceeded as e:
            report.add(name, "inconclusive", f"u_{n} = {u_n}; {e}")
            continue
        report.add(name, "pass", f"u_{n} = {u_n}, primitive divisors {primitive}")
    for ell in primerange(2, ell_bound):
        ell = int(ell)
        rank = rank_of_apparition(seq, ell)
        report.check(f"lucas/p={p}/rank/ell={ell:03d}", check_carmichael(seq, ell),
                     f"rank of apparition {rank if rank is not None else 'none (ell | norm)'}")
    return report


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("lucas", parents=parents, help="Lucas data for one prime")
    parser.add_argument("--p", type=int, default=2)
    parser.add_argument("--n-max", dest="n_max", type=int, default=12)
    parser.add_argument("--ell-bound", dest="ell_bound", type=int, default=100)
    parser.set_defaults(handler=cmd_lucas)
