"""
The Lucas sequence attached to (p, tau(p)).

With r = ord_p(tau(p)), the roots of X^2 - (tau(p)/p^r) X + p^(11-2r) form a
Lucas pair and u_n = tau(p^(n-1)) / p^(r(n-1)).
"""
import logging
from fractions import Fraction
from math import gcd
from typing import List, Optional, Set

from sympy import divisors, legendre_symbol, mobius, multiplicity, primefactors

from app.exceptions import FactorizationBudgetExceeded, LucasPairError, ZeroTraceError
from app.models.lucas_seq import LucasSeq
from app.models.qexpansion import FactorBudget
from app.tau_core import default_budget, tau_prime_power
from app.utils.factorization import factorize

logger = logging.getLogger(__name__)


def make_lucas(p: int, tau_p: int) -> LucasSeq:
    """
    Build the Lucas data for (p, tau(p)).

    Raises:
        ZeroTraceError: tau(p) = 0; use tau_zero_prime_power instead
        LucasPairError: the data violates a Lucas-pair invariant
    """
    if tau_p == 0:
        raise ZeroTraceError(f"tau({p}) = 0 has no associated Lucas pair")
    r = multiplicity(p, tau_p)
    if r > 5:
        raise LucasPairError(f"ord_{p}(tau({p})) = {r} exceeds 5")
    trace = tau_p // p ** r
    norm = p ** (11 - 2 * r)
    disc = trace * trace - 4 * norm
    if gcd(trace, norm) != 1:
        raise LucasPairError(f"trace {trace} and norm {norm} are not coprime")
    if disc >= 0:
        raise LucasPairError(f"discriminant {disc} for p={p} is not negative")
    return LucasSeq(p=p, r=r, trace=trace, norm=norm, disc=disc)


def term(seq: LucasSeq, n: int) -> int:
    """u_n, extending the memo as needed."""
    if n < 0:
        raise ValueError(f"Lucas index must be nonnegative, got {n}")
    terms = seq.terms
    while len(terms) <= n:
        terms.append(seq.trace * terms[-1] - seq.norm * terms[-2])
    return terms[n]


def _residues(seq: LucasSeq, ell: int, count: int) -> List[int]:
    """u_0, ..., u_count reduced mod ell."""
    out = [0, 1 % ell]
    t, nm = seq.trace % ell, seq.norm % ell
    while len(out) <= count:
        out.append((t * out[-1] - nm * out[-2]) % ell)
    return out[: count + 1]


def carmichael_ceiling(seq: LucasSeq, ell: int) -> int:
    if ell == 2:
        return 3
    if seq.disc % ell == 0:
        return ell
    return ell + 1


def rank_of_apparition(seq: LucasSeq, ell: int) -> Optional[int]:
    """Smallest m >= 1 with ell | u_m, or None when ell divides the norm."""
    if seq.norm % ell == 0:
        return None
    ceiling = carmichael_ceiling(seq, ell)
    residues = _residues(seq, ell, ceiling)
    for m in range(1, ceiling + 1):
        if residues[m] == 0:
            return m
    # unreachable for a genuine Lucas pair
    raise LucasPairError(f"no rank of apparition for ell={ell} up to {ceiling}")


def check_carmichael(seq: LucasSeq, ell: int, m_max: int = 60) -> bool:
    """Check the case analysis for m_ell and that ell | u_m exactly when m_ell | m."""
    rank = rank_of_apparition(seq, ell)
    residues = _residues(seq, ell, m_max)
    if rank is None:
        return all(residues[m] != 0 for m in range(1, m_max + 1))
    if ell == 2:
        case_ok = rank in (2, 3)
    elif seq.disc % ell == 0:
        case_ok = rank == ell
    elif legendre_symbol(seq.disc % ell, ell) == 1:
        case_ok = (ell - 1) % rank == 0
    else:
        case_ok = (ell + 1) % rank == 0
    if not case_ok:
        logger.warning("Rank %s of ell=%s violates the Carmichael cases for p=%s", rank, ell, seq.p)
        return False
    return all((residues[m] == 0) == (m % rank == 0) for m in range(1, m_max + 1))


def cyclotomic_part(seq: LucasSeq, n: int) -> int:
    """prod_{d | n} u_d^mu(n/d), an exact integer."""
    value = Fraction(1)
    for d in divisors(n):
        mu = int(mobius(n // d))
        if mu == 1:
            value *= term(seq, d)
        elif mu == -1:
            value /= term(seq, d)
    if value.denominator != 1:
        raise LucasPairError(f"cyclotomic part of u_{n} for p={seq.p} is not integral")
    return int(value)


def primitive_divisors(seq: LucasSeq, n: int, budget: Optional[FactorBudget] = None) -> Set[int]:
    """
    Primes dividing u_n but neither the discriminant nor any earlier term.

    Every primitive divisor of u_n divides its cyclotomic part, so only that
    part is factored.
    """
    if n < 1:
        raise ValueError(f"Lucas index must be positive, got {n}")
    phi = cyclotomic_part(seq, n)
    if abs(phi) == 1:
        return set()
    fact = factorize(phi, budget or default_budget())
    if not fact.complete:
        raise FactorizationBudgetExceeded(
            f"cyclotomic part of u_{n} for p={seq.p} did not factor within budget",
            fact.primes,
            fact.composites,
        )
    found = set()
    for ell in fact.primes:
        if seq.disc % ell == 0:
            continue
        residues = _residues(seq, ell, n - 1)
        if all(residues[k] != 0 for k in range(1, n)):
            found.add(ell)
    return found


def has_primitive_divisor(seq: LucasSeq, n: int) -> bool:
    """
    True iff u_n has a primitive divisor.

    Non-primitive primes of the cyclotomic part divide n, and primitive ones
    are congruent to +-1 mod n, so the test is whether anything is left once
    the primes of n are removed.
    """
    if n < 2:
        return False
    rest = abs(cyclotomic_part(seq, n))
    for ell in primefactors(n):
        while rest % ell == 0:
            rest //= ell
    return rest > 1


def tau_relation_holds(seq: LucasSeq, n: int) -> bool:
    """p^(r(n-1)) u_n == tau(p^(n-1))."""
    tau_p = seq.trace * seq.p ** seq.r
    return seq.p ** (seq.r * (n - 1)) * term(seq, n) == tau_prime_power(tau_p, seq.p, n - 1)


def divisibility_holds(seq: LucasSeq, n_max: int) -> bool:
    """u_k | u_n for every k | n <= n_max."""
    for n in range(2, n_max + 1):
        un = term(seq, n)
        for k in divisors(n)[:-1]:
            if un % term(seq, k):
                return False
    return True
