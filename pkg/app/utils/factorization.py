"""
Integer factorization with an explicit effort budget.

Trial division up to ``budget.trial_limit``, then Pollard's rho with Brent's
cycle detection on whatever survives. Primality certification is a strong
pseudoprime test on the first twelve prime bases (deterministic below
3.3e24, which covers 2^64) and strong BPSW above that.
"""
import logging
from functools import lru_cache
from typing import List, Optional, Tuple

import gmpy2
from sympy import primerange

from app.models.qexpansion import FactorBudget, Factorization

logger = logging.getLogger(__name__)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981
_BRENT_BATCH = 128


@lru_cache(maxsize=8)
def small_primes(limit: int) -> Tuple[int, ...]:
    """All primes <= limit."""
    return tuple(primerange(2, limit + 1))


def is_probable_prime(n: int) -> bool:
    """
    Primality test used to certify factors.

    Args:
        n: Integer to test

    Returns:
        True if n is prime (deterministic below 2^64, BPSW above)
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    n = gmpy2.mpz(n)
    if n < _MR_DETERMINISTIC_BOUND:
        return all(gmpy2.is_strong_prp(n, a) for a in _MR_BASES)
    return bool(gmpy2.is_strong_bpsw_prp(n))


def pollard_brent(n: int, max_rounds: int, seed: int = 1) -> Optional[int]:
    """
    Pollard's rho using Brent's cycle detection and batched gcds.

    Args:
        n: Odd composite to split
        max_rounds: Cap on polynomial evaluations across all restarts
        seed: First additive constant c of x -> x^2 + c

    Returns:
        A nontrivial factor of n, or None if the budget ran out
    """
    n = gmpy2.mpz(n)
    if n % 2 == 0:
        return 2
    spent = 0
    c = seed
    while spent < max_rounds:
        y, r, q = gmpy2.mpz(2), 1, gmpy2.mpz(1)
        g = gmpy2.mpz(1)
        x = ys = y
        while g == 1 and spent < max_rounds:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            spent += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(_BRENT_BATCH, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                spent += min(_BRENT_BATCH, r - k)
                g = gmpy2.gcd(q, n)
                k += _BRENT_BATCH
            r *= 2
        if g == n:
            # batch overshot; step back one evaluation at a time
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
        if 1 < g < n:
            return int(g)
        c += 1
    return None


def factorize(x: int, budget: FactorBudget) -> Factorization:
    """
    Factor |x| as far as the budget allows.

    Args:
        x: Nonzero integer
        budget: Trial-division ceiling and rho effort cap

    Returns:
        Factorization with certified primes and any composite cofactors left over
    """
    result = Factorization()
    n = abs(int(x))
    for p in small_primes(budget.trial_limit):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            result.add_prime(p, e)
    if n == 1:
        return result
    # every prime factor left exceeds trial_limit
    if n <= budget.trial_limit ** 2 or is_probable_prime(n):
        result.add_prime(n)
        return result

    stack: List[int] = [n]
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            result.add_prime(m)
            continue
        root, exact = gmpy2.iroot(gmpy2.mpz(m), 2)
        if exact:
            stack.extend((int(root), int(root)))
            continue
        d = pollard_brent(m, budget.rho_rounds)
        if d is None:
            logger.warning("Rho budget exhausted on a %d-digit cofactor", len(str(m)))
            result.composites.append(m)
        else:
            stack.extend((d, m // d))
    return result
