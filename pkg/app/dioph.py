"""
Diophantine endgames: Thue-Mahler solution lists, bounded box searches,
perfect powers in the Fibonacci and Lucas sequences, the (q, m) table and
explicit bound calculators.

``box_search`` is exhaustive only inside its box; it never claims more.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial, gcd, prod
from typing import Iterable, List, Optional, Sequence, Tuple

import gmpy2
import mpmath
from sympy import isprime, primerange, totient

from app.exceptions import DomainError
from app.models.thue import TMInstance, TMSolution

logger = logging.getLogger(__name__)


def _split_over(value: int, primes: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Strip the instance primes from |value|: (cofactor, exponents)."""
    rest = abs(value)
    exponents = []
    for p in primes:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        exponents.append(e)
    return rest, tuple(exponents)


def _is_coprime(inst: TMInstance, x: int, y: int) -> bool:
    g = gcd(x, y)
    if not inst.coprime:
        return g != 0
    if g == 0:
        return False
    if not inst.primes:
        return True
    return gcd(g, prod(inst.primes)) == 1


def match_solution(inst: TMInstance, x: int, y: int,
                   exp_cap: Optional[int] = None) -> Optional[TMSolution]:
    """The solution at (x, y), or None if F(x, y) is not of the required shape."""
    if not _is_coprime(inst, x, y):
        return None
    value = inst.form(x, y)
    if value == 0 or value % inst.b:
        return None
    quotient = value // inst.b
    if quotient < 0 and not inst.signed:
        return None
    rest, exponents = _split_over(quotient, inst.primes)
    if rest != 1:
        return None
    if exp_cap is not None and any(e > exp_cap for e in exponents):
        return None
    return TMSolution(x, y, exponents)


def is_prime_eleventh_power(x: int) -> bool:
    if x < 2:
        return False
    root, exact = gmpy2.iroot(gmpy2.mpz(x), 11)
    return bool(exact) and isprime(int(root))


@dataclass
class SolutionCheck:
    solution: TMSolution
    ok: bool
    reason: Optional[str] = None
    eleventh_power: bool = False


@dataclass
class SolutionReport:
    instance: TMInstance
    checks: List[SolutionCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> List[SolutionCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def eleventh_powers(self) -> List[TMSolution]:
        return [c.solution for c in self.checks if c.eleventh_power]


def verify_solution_list(inst: TMInstance, sols: Iterable[TMSolution]) -> SolutionReport:
    """
    Plug every listed solution into the instance.

    A solution fails if the coordinates break coprimality or F(x, y) differs
    from b * prod p_i^z_i (up to sign for signed instances). Solutions whose x
    is the 11th power of a prime are flagged separately.
    """
    report = SolutionReport(instance=inst)
    for sol in sols:
        check = SolutionCheck(solution=sol, ok=True, eleventh_power=is_prime_eleventh_power(sol.x))
        if not _is_coprime(inst, sol.x, sol.y):
            check.ok, check.reason = False, "coordinates are not coprime"
        elif len(sol.exponents) != len(inst.primes):
            check.ok, check.reason = False, f"expected {len(inst.primes)} exponents"
        else:
            value = inst.form(sol.x, sol.y)
            rhs = inst.b * prod(p ** e for p, e in zip(inst.primes, sol.exponents))
            if value != rhs and not (inst.signed and value == -rhs):
                check.ok, check.reason = False, f"F(x, y) = {value}, expected {'+-' if inst.signed else ''}{rhs}"
        report.checks.append(check)
    if not report.ok:
        logger.warning("%s of %s listed solutions fail for %s",
                       len(report.failures), len(report.checks), inst.name or "instance")
    return report


def _scan_rows(inst: TMInstance, xs: Sequence[int], box: int,
               exp_cap: Optional[int]) -> List[TMSolution]:
    found = []
    for x in xs:
        for y in range(-box, box + 1):
            sol = match_solution(inst, x, y, exp_cap)
            if sol is not None:
                found.append(sol)
    return found


def box_search(inst: TMInstance, box: int, exp_cap: Optional[int] = None,
               threads: int = 1) -> List[TMSolution]:
    """
    All solutions with |x|, |y| <= box, sorted lexicographically.

    Args:
        inst: Thue-Mahler instance
        box: Coordinate bound
        exp_cap: Largest exponent allowed on any instance prime (None for no cap)
        threads: Number of worker threads sharing the x-range
    """
    if box < 1:
        raise DomainError(f"box must be at least 1, got {box}")
    xs = list(range(-box, box + 1))
    if threads <= 1:
        found = _scan_rows(inst, xs, box, exp_cap)
    else:
        shards = [xs[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda shard: _scan_rows(inst, shard, box, exp_cap), shards)
            found = [sol for part in parts for sol in part]
    logger.info("Box search |x|,|y| <= %s on %s: %s solutions", box, inst.name or "instance", len(found))
    return sorted(found)


@dataclass
class PowerScanReport:
    n_max: int
    fibonacci_powers: List[Tuple[int, int]] = field(default_factory=list)
    lucas_powers: List[Tuple[int, int]] = field(default_factory=list)
    unexpected: List[Tuple[str, int, int]] = field(default_factory=list)
    eleventh_prime_powers: List[Tuple[str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unexpected and not self.eleventh_prime_powers


FIBONACCI_POWERS = frozenset({0, 1, 8, 144})
LUCAS_POWERS = frozenset({1, 4})


def _is_perfect_power(value: int) -> bool:
    return bool(gmpy2.is_power(gmpy2.mpz(value)))


def fib_lucas_power_scan(n_max: int) -> PowerScanReport:
    """Perfect powers among F_0..F_n_max and L_0..L_n_max, and 11th powers of primes."""
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    report = PowerScanReport(n_max=n_max)
    fib = [int(gmpy2.fib(n)) for n in range(2 * n_max + 1)]
    for n in range(n_max + 1):
        f_n, l_n = fib[n], int(gmpy2.lucas(n))
        if _is_perfect_power(f_n):
            report.fibonacci_powers.append((n, f_n))
            if f_n not in FIBONACCI_POWERS:
                report.unexpected.append(("F", n, f_n))
        if _is_perfect_power(l_n):
            report.lucas_powers.append((n, l_n))
            if l_n not in LUCAS_POWERS:
                report.unexpected.append(("L", n, l_n))
        if is_prime_eleventh_power(fib[2 * n]):
            report.eleventh_prime_powers.append(("F", 2 * n))
        if is_prime_eleventh_power(l_n):
            report.eleventh_prime_powers.append(("L", n))
    return report


def qm_pairs(q_bound: int) -> List[Tuple[int, int]]:
    """Primes 3 <= q < q_bound with primes m >= 7 dividing (q - 1)(q + 1)."""
    if q_bound < 3:
        raise DomainError(f"q_bound must be at least 3, got {q_bound}")
    pairs = []
    for q in primerange(3, q_bound):
        n = (q - 1) * (q + 1)
        pairs.extend((int(q), int(m)) for m in primerange(7, q + 2) if n % m == 0)
    return pairs


def bg_constant(n: int, s: int) -> int:
    """c(n, s) = 3^(n(2s+1)+27) n^(2n(7s+13)+13) (s+1)^(5n(s+1)+15)."""
    if n < 3 or s < 1:
        raise DomainError(f"c(n, s) needs n >= 3 and s >= 1, got n={n}, s={s}")
    return (
        3 ** (n * (2 * s + 1) + 27)
        * n ** (2 * n * (7 * s + 13) + 13)
        * (s + 1) ** (5 * n * (s + 1) + 15)
    )


def log_star(x) -> mpmath.mpf:
    return max(mpmath.mpf(1), mpmath.log(x))


def bg_log_bound(n: int, s: int, P, N: int, H, B, hM, RM, dps: int = 50) -> mpmath.mpf:
    """
    Logarithm of the Thue-Mahler height bound
    c(n, s) P^N (log* P)^(ns+2) R h (log*(R h))^2 (R + s h + log(H B)).
    """
    if min(n, s, P, N, H, B, hM, RM) <= 0:
        raise DomainError("all bound parameters must be positive")
    with mpmath.workdps(dps):
        log_c = (
            (n * (2 * s + 1) + 27) * mpmath.log(3)
            + (2 * n * (7 * s + 13) + 13) * mpmath.log(n)
            + (5 * n * (s + 1) + 15) * mpmath.log(s + 1)
        )
        rh = mpmath.mpf(RM) * hM
        total = (
            log_c
            + N * mpmath.log(P)
            + (n * s + 2) * mpmath.log(log_star(P))
            + mpmath.log(rh)
            + 2 * mpmath.log(log_star(rh))
            + mpmath.log(RM + s * hM + mpmath.log(mpmath.mpf(H) * B))
        )
        return +total


def lenstra_log_hr_bound(m: int, dps: int = 50) -> mpmath.mpf:
    """
    Upper bound for log(hR) of the maximal real subfield of Q(zeta_m).

    Uses hR <= Delta (log Delta)^(d-1) / (d-1)! with Delta = |Disc|^(1/2),
    d = phi(m)/2 and log |Disc| <= phi(m) log(m) / 2.
    """
    phi = int(totient(m))
    d = phi // 2
    if m < 3 or d < 2:
        raise DomainError(f"the real cyclotomic field of conductor {m} has degree < 2")
    with mpmath.workdps(dps):
        log_delta = mpmath.mpf(phi) * mpmath.log(m) / 4
        return +(log_delta + (d - 1) * mpmath.log(log_delta) - mpmath.log(factorial(d - 1)))


def s_regulator_log_bound(log_hr, t: int, p_s, dps: int = 50) -> mpmath.mpf:
    """log R_S <= log(hR) + t log(log* P_S)."""
    with mpmath.workdps(dps):
        return +(mpmath.mpf(log_hr) + t * mpmath.log(log_star(p_s)))


def smooth_pairs_check(inst: TMInstance, pairs: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Pairs (and their negatives) that are not coprime solutions of inst; empty means all pass."""
    bad = []
    for x, y in pairs:
        for sx, sy in ((x, y), (-x, -y)):
            if match_solution(inst, sx, sy) is None:
                bad.append((sx, sy))
    return bad


@dataclass
class ThresholdReport:
    box: int
    threshold: int
    below: List[Tuple[int, int]] = field(default_factory=list)
    unlisted: List[Tuple[int, int]] = field(default_factory=list)
    missed: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unlisted and not self.missed


def threshold_check(inst: TMInstance, pairs: Iterable[Tuple[int, int]], threshold: int,
                    box: int, threads: int = 1) -> ThresholdReport:
    """
    Search the box and hold the result against a "below threshold or listed" claim.

    Every solution with max(|x|, |y|) >= threshold must be a listed pair up to
    sign, and every listed pair inside the box must be found.
    """
    if box < threshold:
        raise DomainError(f"box {box} does not reach threshold {threshold}")
    listed = set()
    for x, y in pairs:
        listed.update({(x, y), (-x, -y)})
    found = {(s.x, s.y) for s in box_search(inst, box, threads=threads)}
    report = ThresholdReport(box=box, threshold=threshold)
    report.below = sorted(p for p in found if max(abs(p[0]), abs(p[1])) < threshold)
    report.unlisted = sorted(p for p in found if max(abs(p[0]), abs(p[1])) >= threshold and p not in listed)
    report.missed = sorted(p for p in listed if max(abs(p[0]), abs(p[1])) <= box and p not in found)
    return report
