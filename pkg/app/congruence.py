"""
Classical congruences for tau modulo powers of 2, 3, 5, 7, 23 and 691.

Each family is a predicate for applicability plus a (modulus, residue) rule;
``verify_congruences`` runs all of them against a q-expansion.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from math import isqrt
from typing import Callable, Dict, List, Optional, Tuple

from sympy import isprime, legendre_symbol

from app.exceptions import InapplicableCongruenceError, OutOfRangeError
from app.models.qexpansion import QExpansion
from app.tau_core import sigma_pow

logger = logging.getLogger(__name__)


class FamilyName(str, Enum):
    MOD2 = "MOD2"
    MOD3 = "MOD3"
    MOD5 = "MOD5"
    MOD7 = "MOD7"
    MOD23 = "MOD23"
    MOD691 = "MOD691"


@dataclass(frozen=True)
class CongruenceFamily:
    name: FamilyName
    applies: Callable[[int], bool]
    rule: Callable[[int], Tuple[int, int]]
    description: str = ""

    def predicted(self, n: int) -> Tuple[int, int]:
        if n < 1 or not self.applies(n):
            raise InapplicableCongruenceError(f"{self.name.value} does not apply to n={n}")
        return self.rule(n)


_MOD2_CASES = {1: (1, 2 ** 11), 3: (1217, 2 ** 13), 5: (1537, 2 ** 12), 7: (705, 2 ** 14)}


def _mod2(n: int) -> Tuple[int, int]:
    factor, modulus = _MOD2_CASES[n % 8]
    return modulus, factor * sigma_pow(n, 11, modulus) % modulus


def _mod3(n: int) -> Tuple[int, int]:
    modulus = 3 ** 6 if n % 3 == 1 else 3 ** 7
    return modulus, pow(n, -610, modulus) * sigma_pow(n, 1231, modulus) % modulus


def _mod5(n: int) -> Tuple[int, int]:
    modulus = 5 ** 3
    return modulus, pow(n, -30, modulus) * sigma_pow(n, 71, modulus) % modulus


def _mod7(n: int) -> Tuple[int, int]:
    modulus = 7 if n % 7 in (0, 1, 2, 4) else 7 ** 2
    return modulus, n * sigma_pow(n, 9, modulus) % modulus


def represents_u2_23v2(p: int) -> bool:
    """True iff p = u^2 + 23 v^2 with u != 0, by search over |v| <= sqrt(p / 23)."""
    for v in range(isqrt(p // 23) + 1):
        rest = p - 23 * v * v
        u = isqrt(rest)
        if u and u * u == rest:
            return True
    return False


def _mod23(p: int) -> Tuple[int, int]:
    if legendre_symbol(p % 23, 23) == -1:
        return 23, 0
    if represents_u2_23v2(p):
        return 23, 2
    return 23, 22


def _mod691(n: int) -> Tuple[int, int]:
    return 691, sigma_pow(n, 11, 691)


FAMILIES: Dict[FamilyName, CongruenceFamily] = {
    FamilyName.MOD2: CongruenceFamily(
        FamilyName.MOD2, lambda n: n % 2 == 1, _mod2, "c * sigma_11(n) mod 2^11..2^14 by n mod 8"
    ),
    FamilyName.MOD3: CongruenceFamily(
        FamilyName.MOD3, lambda n: n % 3 != 0, _mod3, "n^-610 sigma_1231(n) mod 3^6 or 3^7"
    ),
    FamilyName.MOD5: CongruenceFamily(
        FamilyName.MOD5, lambda n: n % 5 != 0, _mod5, "n^-30 sigma_71(n) mod 5^3"
    ),
    FamilyName.MOD7: CongruenceFamily(
        FamilyName.MOD7, lambda n: True, _mod7, "n sigma_9(n) mod 7 or 7^2"
    ),
    FamilyName.MOD23: CongruenceFamily(
        FamilyName.MOD23, lambda n: n != 23 and isprime(n), _mod23, "primes p != 23 by splitting type"
    ),
    FamilyName.MOD691: CongruenceFamily(
        FamilyName.MOD691, lambda n: True, _mod691, "sigma_11(n) mod 691"
    ),
}


def predicted_residue(family: FamilyName, n: int) -> Tuple[int, int]:
    """(modulus, residue) predicted for tau(n) by one family."""
    return FAMILIES[FamilyName(family)].predicted(n)


@dataclass(frozen=True)
class Violation:
    family: FamilyName
    n: int
    modulus: int
    predicted: int
    actual: int

    def format(self) -> str:
        return (
            f"{self.family.value} n={self.n}: tau(n) = {self.actual} mod {self.modulus}, "
            f"predicted {self.predicted}"
        )


@dataclass
class CongruenceReport:
    n_max: int
    checked: Dict[FamilyName, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> List[str]:
        return [v.format() for v in self.violations]


def verify_congruences(n_max: int, table: QExpansion) -> CongruenceReport:
    """Check every applicable family for every n <= n_max."""
    if n_max > table.limit:
        raise OutOfRangeError(f"n_max={n_max} exceeds the expansion limit {table.limit}")
    report = CongruenceReport(n_max=n_max)
    for name, family in FAMILIES.items():
        count = 0
        for n in range(1, n_max + 1):
            if not family.applies(n):
                continue
            modulus, residue = family.rule(n)
            actual = table[n] % modulus
            count += 1
            if actual != residue:
                report.violations.append(Violation(name, n, modulus, residue, actual))
        report.checked[name] = count
    if report.violations:
        logger.warning("%s congruence violations up to %s", len(report.violations), n_max)
    return report


def taup2_clauses(p: int, tau_p2: int) -> Dict[int, Optional[bool]]:
    """Per-modulus non-divisibility of tau(p^2) by 5, 7 and 9; None where p is excluded."""
    return {
        5: None if p == 5 else tau_p2 % 5 != 0,
        7: None if p == 7 else tau_p2 % 7 != 0,
        9: None if p == 3 else tau_p2 % 9 != 0,
    }


def taup2_nondivisibility(p: int, tau_p2: int) -> bool:
    return all(v is not False for v in taup2_clauses(p, tau_p2).values())


def mod7_auxiliary_holds(p: int) -> bool:
    """p^18 = 1 and p^9 = +-1 mod 7, for p != 7."""
    if p % 7 == 0:
        return False
    return pow(p, 18, 7) == 1 and pow(p, 9, 7) in (1, 6)
