"""
The polynomial families F_m, H_m and Psi_m.

F_m(p^11, tau(p)^2) carries tau(p^(m-1)); Psi_m is its primitive part,
cut out by the Moebius product over divisors.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import List, Tuple

import mpmath
from sympy import divisors, mobius, totient

from app.exceptions import DomainError
from app.lucas import cyclotomic_part, make_lucas
from app.models.poly import BivariatePoly, forms_equal, format_poly, parse_poly, product
from app.models.qexpansion import QExpansion
from app.tau_core import tau_prime_power

logger = logging.getLogger(__name__)

__all__ = [
    "f_poly",
    "h_expand",
    "psi_poly",
    "psi_root_check",
    "coeff_bound_check",
    "tau_fm_identity_check",
    "psi_lucas_identity_check",
    "admissible_prime_filter",
    "f_coefficient_formula",
    "divides",
    "psi_divisibility_report",
    "format_poly",
    "parse_poly",
]

# X -> ZW, Y -> (Z + W)^2 as forms in (Z, W)
_ZW = BivariatePoly((0, 1, 0))
_Z_PLUS_W_SQ = BivariatePoly((1, 2, 1))
_Y_MINUS_2X = BivariatePoly((1, -2))
_X_SQ = BivariatePoly((0, 0, 1))


@lru_cache(maxsize=None)
def f_poly(m: int) -> BivariatePoly:
    """F_0 = 0, F_1 = F_2 = 1, F_3 = Y - X, F_(m+2) = (Y - 2X) F_m - X^2 F_(m-2)."""
    if m < 0:
        raise DomainError(f"F_m needs m >= 0, got {m}")
    if m == 0:
        return BivariatePoly.zero()
    if m in (1, 2):
        return BivariatePoly.one()
    if m == 3:
        return BivariatePoly((1, -1))
    return _Y_MINUS_2X * f_poly(m - 2) - _X_SQ * f_poly(m - 4)


def f_coefficient_formula(m: int) -> BivariatePoly:
    """F_m from the closed form: X^j Y^(d-j) has coefficient (-1)^j C(m-1-j, j)."""
    if m < 0:
        raise DomainError(f"F_m needs m >= 0, got {m}")
    if m == 0:
        return BivariatePoly.zero()
    d = (m - 1) // 2
    return BivariatePoly(tuple((-1) ** j * comb(m - 1 - j, j) for j in range(d + 1)))


def h_expand(m: int) -> BivariatePoly:
    """H_m(Z, W) as a form with coeffs[i] the coefficient of Z^i W^(d-i)."""
    if m < 0:
        raise DomainError(f"H_m needs m >= 0, got {m}")
    if m == 0:
        return BivariatePoly.zero()
    if m % 2:
        return BivariatePoly((1,) * m)
    # (Z^m - W^m) / (Z^2 - W^2): only even powers of Z
    return BivariatePoly(tuple(1 if i % 2 == 0 else 0 for i in range(m - 1)))


def fh_identity_holds(m: int) -> bool:
    """F_m(ZW, (Z + W)^2) == H_m(Z, W)."""
    return forms_equal(f_poly(m).substitute(_ZW, _Z_PLUS_W_SQ), h_expand(m))


@lru_cache(maxsize=None)
def psi_poly(m: int) -> BivariatePoly:
    """Psi_m = prod_{d | m} F_d^mu(m/d), by exact division."""
    if m < 3:
        raise DomainError(f"Psi_m needs m >= 3, got {m}")
    numerator, denominator = [], []
    for d in divisors(m):
        mu = int(mobius(m // d))
        if mu == 1:
            numerator.append(f_poly(d))
        elif mu == -1:
            denominator.append(f_poly(d))
    return product(numerator) // product(denominator)


def divides(a: BivariatePoly, b: BivariatePoly) -> bool:
    """True iff a | b with an integral quotient."""
    return a.divides(b)


def psi_product_holds(m: int) -> bool:
    """prod_{d | m, d >= 3} Psi_d == F_m."""
    return forms_equal(product(psi_poly(d) for d in divisors(m) if d >= 3), f_poly(m))


def expected_psi_roots(m: int) -> List[mpmath.mpf]:
    return sorted(
        4 * mpmath.cos(mpmath.pi * j / m) ** 2
        for j in range(1, (m - 1) // 2 + 1)
        if gcd(j, m) == 1
    )


def psi_root_check(m: int, tol: float = 1e-9, dps: int = 50) -> bool:
    """
    Compare the roots of Psi_m(1, Y) against 4 cos^2(pi j / m), gcd(j, m) = 1.

    Args:
        m: Index, at least 3
        tol: Allowed distance between matched roots
        dps: Working precision in decimal digits
    """
    poly = psi_poly(m)
    with mpmath.workdps(dps):
        expected = expected_psi_roots(m)
        if poly.degree != len(expected):
            return False
        if poly.degree == 0:
            return True
        roots = mpmath.polyroots(poly.dehomogenize_y(), maxsteps=200, extraprec=4 * dps)
        if any(abs(mpmath.im(r)) > tol for r in roots):
            return False
        found = sorted(mpmath.re(r) for r in roots)
        return all(abs(a - b) <= tol for a, b in zip(found, expected))


def coeff_bound_check(m: int) -> bool:
    """Every coefficient of Psi_m is at most 5^(phi(m)/2) in absolute value."""
    return psi_poly(m).max_abs_coeff() <= 5 ** (int(totient(m)) // 2)


def tau_fm_identity_check(p: int, m: int, table: QExpansion) -> bool:
    """tau(p^(m-1)) == tau(p)^e F_m(p^11, tau(p)^2), e = m + 1 mod 2."""
    if m < 1:
        raise DomainError(f"identity is stated for m >= 1, got {m}")
    tau_p = table[p]
    eps = 0 if m % 2 else 1
    return tau_prime_power(tau_p, p, m - 1) == tau_p ** eps * f_poly(m)(p ** 11, tau_p * tau_p)


def psi_lucas_identity_check(p: int, m: int, table: QExpansion) -> bool:
    """
    Psi_m(x, y) == prod_{d | m} u_d^mu(m/d) with x = p^(11-2r), y = tau(p)^2 / p^(2r).

    Holds for tau(p) != 0; the zero case raises ZeroTraceError.
    """
    seq = make_lucas(p, table[p])
    value = psi_poly(m)(Fraction(seq.norm), Fraction(seq.trace) ** 2)
    return value.denominator == 1 and int(value) == cyclotomic_part(seq, m)


def psi_value_divides_tau(p: int, m: int, table: QExpansion) -> bool:
    """Psi_m(p^11, tau(p)^2) | tau(p^(m-1))."""
    tau_p = table[p]
    value = psi_poly(m)(p ** 11, tau_p * tau_p)
    return tau_prime_power(tau_p, p, m - 1) % value == 0


def admissible_prime_filter(m: int, q: int, a: int) -> bool:
    """Necessary condition for q^a || Psi_m(x, y) with coprime x, y."""
    if m < 5 or m == 6:
        raise DomainError(f"the admissibility criterion does not apply to m={m}")
    return q % m in (1, m - 1) or m % q ** a == 0


@dataclass
class DivisibilityReport:
    n_max: int
    f_failures: List[Tuple[int, int]] = field(default_factory=list)
    psi_in_f_failures: List[Tuple[int, int]] = field(default_factory=list)
    literal_failures: List[Tuple[int, int]] = field(default_factory=list)
    literal_holds: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.f_failures and not self.psi_in_f_failures


def psi_divisibility_report(n_max: int) -> DivisibilityReport:
    """
    For every m | n <= n_max, test F_m | F_n and Psi_m | F_n, and record which
    literal pairs Psi_m | Psi_n hold. Distinct Psi are coprime, so the literal
    relation fails for every m < n.
    """
    report = DivisibilityReport(n_max=n_max)
    for n in range(3, n_max + 1):
        for m in divisors(n):
            if m < 3:
                continue
            if not divides(f_poly(m), f_poly(n)):
                report.f_failures.append((m, n))
            if not divides(psi_poly(m), f_poly(n)):
                report.psi_in_f_failures.append((m, n))
            if m == n:
                continue
            if divides(psi_poly(m), psi_poly(n)):
                report.literal_holds.append((m, n))
            else:
                report.literal_failures.append((m, n))
    logger.info(
        "Psi divisibility up to %s: %s literal pairs fail, %s hold",
        n_max, len(report.literal_failures), len(report.literal_holds),
    )
    return report
