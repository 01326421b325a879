"""
Exact values of Ramanujan's tau function.

The q-expansion of Delta = q * prod (1 - q^n)^24 is assembled from the
sparse cube of the eta product (Jacobi's identity puts (-1)^k (2k+1) at the
triangular exponents k(k+1)/2); everything else is derived from the table by
multiplicativity and the Hecke recurrence at prime powers.
"""
import logging
import os
from math import gcd, isqrt
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np
from sympy import divisors, factorint, primerange

from app.config import settings
from app.exceptions import (
    DomainError,
    FactorizationBudgetExceeded,
    OutOfRangeError,
    ResourceLimitError,
)
from app.models.qexpansion import FactorBudget, PFResult, QExpansion
from app.utils.factorization import factorize

logger = logging.getLogger(__name__)

CACHE_MAGIC = "TAUQEXP1"
CACHE_FILENAME = "delta_qexpansion.txt"


def _eta_cube_terms(size: int) -> List[Tuple[int, int]]:
    terms = []
    k = 0
    while k * (k + 1) // 2 < size:
        terms.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    return terms


def _mul_sparse(series: np.ndarray, sparse: List[Tuple[int, int]]) -> np.ndarray:
    size = len(series)
    out = np.zeros(size, dtype=object)
    for exponent, coeff in sparse:
        out[exponent:] += coeff * series[: size - exponent]
    return out


def delta_qexpansion(N: int) -> QExpansion:
    """
    Compute tau(1), ..., tau(N) exactly.

    Args:
        N: Expansion limit

    Returns:
        Immutable QExpansion
    """
    if N < 1:
        raise DomainError(f"expansion limit must be positive, got {N}")
    if N > settings.max_series_limit:
        raise ResourceLimitError(
            f"expansion limit {N} exceeds the configured ceiling {settings.max_series_limit}"
        )
    logger.info("Building Delta q-expansion to %s terms", N)
    # tau(n) is the coefficient of q^(n-1) in (prod (1 - q^n)^3)^8
    sparse = _eta_cube_terms(N)
    series = np.zeros(N, dtype=object)
    for exponent, coeff in sparse:
        series[exponent] = coeff
    for _ in range(7):
        series = _mul_sparse(series, sparse)
    return QExpansion(limit=N, coeffs=(0,) + tuple(int(c) for c in series))


def _cache_path(cache_dir: Optional[str]) -> Optional[Path]:
    directory = cache_dir or settings.tau_cache_dir or os.getenv("TAU_CACHE_DIR")
    return Path(directory) / CACHE_FILENAME if directory else None


def read_qexpansion(path: Path) -> QExpansion:
    with open(path, "r", encoding="ascii") as handle:
        header = handle.readline().split()
        if len(header) != 2 or header[0] != CACHE_MAGIC:
            raise DomainError(f"{path} is not a {CACHE_MAGIC} cache file")
        limit = int(header[1])
        coeffs = [0]
        for line in handle:
            line = line.strip()
            if line:
                coeffs.append(int(line))
    return QExpansion(limit=limit, coeffs=tuple(coeffs))


def write_qexpansion(table: QExpansion, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="ascii", newline="\n") as handle:
        handle.write(f"{CACHE_MAGIC} {table.limit}\n")
        for n in range(1, table.limit + 1):
            handle.write(f"{table[n]}\n")
    os.replace(tmp, path)


def load_or_build_qexpansion(N: int, cache_dir: Optional[str] = None) -> QExpansion:
    """Return tau(1..N), reusing the on-disk cache when it is large enough."""
    path = _cache_path(cache_dir)
    if path is not None and path.exists():
        try:
            cached = read_qexpansion(path)
            if cached.limit >= N:
                return cached.truncate(N)
        except (OSError, ValueError, DomainError) as e:
            logger.warning("Ignoring unreadable q-expansion cache %s: %s", path, e)
    table = delta_qexpansion(N)
    if path is not None:
        write_qexpansion(table, path)
        logger.info("Wrote q-expansion cache %s", path)
    return table


def tau_prime_power(tau_p: int, p: int, m: int) -> int:
    """tau(p^m) by tau(p^m) = tau(p) tau(p^(m-1)) - p^11 tau(p^(m-2))."""
    if m < 0:
        raise DomainError(f"exponent must be nonnegative, got {m}")
    p11 = p ** 11
    prev, cur = 1, tau_p
    if m == 0:
        return 1
    for _ in range(m - 1):
        prev, cur = cur, tau_p * cur - p11 * prev
    return cur


def tau_zero_prime_power(p: int, m: int) -> int:
    """tau(p^m) when tau(p) = 0."""
    if m % 2:
        return 0
    return (-(p ** 11)) ** (m // 2)


def tau(n: int, table: QExpansion) -> int:
    if n < 1:
        raise DomainError(f"tau is defined for positive n, got {n}")
    value = 1
    for p, e in factorint(n).items():
        if p > table.limit:
            raise OutOfRangeError(f"prime factor {p} of {n} exceeds expansion limit {table.limit}")
        value *= tau_prime_power(table[p], p, e)
    return value


def sigma_pow(n: int, v: int, modulus: Optional[int] = None) -> int:
    """Sum of d^v over divisors d of n, optionally reduced mod modulus."""
    if n < 1:
        raise DomainError(f"divisor sums need n >= 1, got {n}")
    if modulus is None:
        return sum(d ** v for d in divisors(n))
    return sum(pow(d, v, modulus) for d in divisors(n)) % modulus


def default_budget() -> FactorBudget:
    return FactorBudget(trial_limit=settings.trial_limit, rho_rounds=settings.rho_rounds)


def largest_prime_factor(x: int, budget: Optional[FactorBudget] = None) -> PFResult:
    if abs(x) <= 1:
        raise DomainError(f"P(x) is undefined for |x| <= 1 (x={x})")
    fact = factorize(x, budget or default_budget())
    if not fact.primes:
        raise FactorizationBudgetExceeded(
            f"no prime factor of a {len(str(abs(x)))}-digit integer found within budget",
            fact.primes,
            fact.composites,
        )
    return PFResult(value=max(fact.primes), complete=fact.complete)


def smooth_part(x: int, bound: int) -> Tuple[int, int]:
    """Split |x| into its bound-smooth part and the cofactor."""
    if x == 0:
        raise DomainError("smooth part of 0 is undefined")
    n = abs(x)
    smooth = 1
    for p in primerange(2, bound + 1):
        while n % p == 0:
            n //= p
            smooth *= p
    return smooth, n


def is_smooth(x: int, bound: int) -> bool:
    return smooth_part(x, bound)[1] == 1


def powerful_numbers(bound: int) -> List[int]:
    """Powerful n <= bound, via the unique form a^2 b^3 with b squarefree."""
    found = set()
    b = 1
    while b ** 3 <= bound:
        if all(e == 1 for e in factorint(b).values()):
            cube = b ** 3
            for a in range(1, isqrt(bound // cube) + 1):
                found.add(a * a * cube)
        b += 1
    return sorted(found)


def nonordinary_primes(table: QExpansion) -> List[int]:
    """Primes p <= limit with p | tau(p)."""
    return [p for p in primerange(2, table.limit + 1) if table[p] % p == 0]


def oddness_violations(table: QExpansion) -> List[int]:
    """n where 'tau(n) odd' disagrees with 'n is an odd square'."""
    bad = []
    for n in range(1, table.limit + 1):
        odd_square = n % 2 == 1 and isqrt(n) ** 2 == n
        if (table[n] % 2 == 1) != odd_square:
            bad.append(n)
    return bad


def deligne_violations(table: QExpansion, primes: Optional[Iterable[int]] = None) -> List[int]:
    """Primes with |tau(p)| > 2 p^(11/2), tested exactly as tau(p)^2 > 4 p^11."""
    primes = primes if primes is not None else primerange(2, table.limit + 1)
    return [p for p in primes if table[p] ** 2 > 4 * p ** 11]


def multiplicativity_violations(table: QExpansion, bound: Optional[int] = None) -> List[Tuple[int, int]]:
    limit = min(bound or table.limit, table.limit)
    bad = []
    for n1 in range(2, isqrt(limit) + 1):
        for n2 in range(n1 + 1, limit // n1 + 1):
            if gcd(n1, n2) == 1 and table[n1 * n2] != table[n1] * table[n2]:
                bad.append((n1, n2))
    return bad
