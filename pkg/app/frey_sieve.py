"""
Frey-curve sieve for tau(p^2) = kappa q^b, tau(p^4) = kappa q^b and the
smoothness of tau(p^3).

For each admissible ell the pairs (s, t) = (p, tau(p)) mod ell are narrowed
by the tau congruences, the Frey curve is reduced mod ell, and pairs whose
trace is not congruent to the newform's c_ell modulo a prime above 11 are
discarded. What survives constrains kappa q^b mod ell, hence b mod M.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, TextIO, Tuple, Union

import numpy as np
from sympy import isprime, primerange
from sympy.ntheory import n_order

from app.exceptions import (
    DomainError,
    EigendataParseError,
    EigendataValidationError,
    MissingEigendataError,
    OutOfRangeError,
    SieveProblemError,
    SingularCurveError,
)
from app.models.newform import CurveModEll, CurveModel, NewformEigenData
from app.models.qexpansion import QExpansion
from app.models.sieve import (
    TAU_P3_ELLS,
    SieveKind,
    SieveProblem,
    SieveResult,
    excluded_primes,
)
from app.tau_core import is_smooth, tau_prime_power
from app.utils.eigendata_parser import (
    parse_curve_file_streaming,
    parse_eigendata_streaming,
    validate_curve_row,
    validate_newform_record,
)

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]

MAX_POINT_COUNT_ELL = 1000

# j-invariant -> discriminant of the CM order, for the 13 rational CM j-invariants
CM_J_INVARIANTS: Dict[int, int] = {
    0: -3,
    1728: -4,
    -3375: -7,
    8000: -8,
    -32768: -11,
    54000: -12,
    287496: -16,
    -884736: -19,
    -12288000: -27,
    16581375: -28,
    -884736000: -43,
    -147197952000: -67,
    -262537412640768000: -163,
}


# point counting


@lru_cache(maxsize=None)
def chi_table(ell: int) -> np.ndarray:
    """Quadratic character of F_ell as a lookup array."""
    chi = -np.ones(ell, dtype=np.int64)
    chi[0] = 0
    chi[(np.arange(1, ell, dtype=np.int64) ** 2) % ell] = 1
    chi.flags.writeable = False
    return chi


@lru_cache(maxsize=64)
def ap_table(ell: int) -> np.ndarray:
    """
    a_ell of Y^2 = X^3 + a2 X^2 + a4 X for every (a2, a4) in F_ell^2.

    Singular entries are filled in too; callers only read nonsingular ones.
    """
    chi = chi_table(ell)
    x = np.arange(ell, dtype=np.int64)
    x2 = (x * x) % ell
    x3 = (x2 * x) % ell
    table = np.empty((ell, ell), dtype=np.int64)
    a4 = np.arange(ell, dtype=np.int64)[:, None]
    for a2 in range(ell):
        values = (x3 + a2 * x2 + a4 * x) % ell
        table[a2] = -chi[values].sum(axis=1)
    table.flags.writeable = False
    return table


def _check_ell(ell: int) -> None:
    if ell == 2 or not isprime(ell):
        raise DomainError(f"point counting needs an odd prime, got {ell}")
    if ell > MAX_POINT_COUNT_ELL:
        raise DomainError(f"point counting is limited to ell <= {MAX_POINT_COUNT_ELL}, got {ell}")


def ap_point_count(curve: CurveModEll) -> int:
    """a_ell = ell + 1 - #E(F_ell) for Y^2 = X^3 + a2 X^2 + a4 X."""
    _check_ell(curve.ell)
    return int(ap_table(curve.ell)[curve.a2, curve.a4])


def ap_from_model(a_invariants: Sequence[int], ell: int) -> int:
    """
    a_ell of a general Weierstrass model with good reduction at odd ell.

    Completing the square turns y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
    into (2y + a1 x + a3)^2 = g(x), so a_ell = -sum chi(g(x)).
    """
    _check_ell(ell)
    a1, a2, a3, a4, a6 = a_invariants
    disc = CurveModel(0, "", a1, a2, a3, a4, a6).c4_c6_disc()[2]
    if disc % ell == 0:
        raise SingularCurveError(f"model {tuple(a_invariants)} has bad reduction at {ell}")
    x = np.arange(ell, dtype=np.int64)
    lin = (a1 * x + a3) % ell
    cubic = (((x + a2) * x % ell + a4) * x + a6) % ell
    g = (4 * cubic + lin * lin) % ell
    return int(-chi_table(ell)[g].sum())


# the (s, t) grids


def _power_table(ell: int, k: int) -> np.ndarray:
    return np.array([pow(s, k, ell) for s in range(ell)], dtype=np.int64)


def _grids(ell: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = np.arange(ell, dtype=np.int64)[:, None]
    t = np.arange(ell, dtype=np.int64)[None, :]
    s11 = _power_table(ell, 11)[:, None]
    return s, t, s11


def _quartic(ell: int) -> np.ndarray:
    """t^4 - 3 s^11 t^2 + s^22 mod ell."""
    _, t, s11 = _grids(ell)
    t2 = (t * t) % ell
    return (t2 * t2 - 3 * s11 * t2 + s11 * s11) % ell


def d_values(ell: int, kind: SieveKind) -> np.ndarray:
    """The value kappa q^b takes at (s, t): t^2 - s^11, or the quartic for TAU_P4."""
    kind = SieveKind(kind)
    if kind is SieveKind.TAU_P4:
        return _quartic(ell)
    _, t, s11 = _grids(ell)
    if kind is SieveKind.TAU_P3:
        return (t * t - 2 * s11) % ell
    return (t * t - s11) % ell


def _a_mask(ell: int, kind: SieveKind) -> np.ndarray:
    s, t, _ = _grids(ell)
    mask = (s != 0) & (d_values(ell, kind) != 0)
    if kind is SieveKind.TAU_P3 and ell not in (3, 7):
        mask &= t != 0
    return np.broadcast_to(mask, (ell, ell)).copy()


def _tau_filter(ell: int) -> Optional[np.ndarray]:
    """Congruence restrictions on (p, tau(p)) mod ell; None when there are none."""
    s, t, _ = _grids(ell)
    if ell == 3:
        return t == (s + 1) % 3
    if ell == 5:
        return t == (s * s * (s ** 3 + 1)) % 5
    if ell == 7:
        return t == (s * (s ** 3 + 1)) % 7
    if ell == 23:
        chi = chi_table(23)[np.arange(23)][:, None]
        return ((chi == -1) & (t == 0)) | ((chi == 1) & ((t == 2) | (t == 22)))
    return None


@lru_cache(maxsize=256)
def _b_mask(ell: int, kind: SieveKind) -> np.ndarray:
    mask = _a_mask(ell, kind)
    extra = _tau_filter(ell)
    if extra is not None:
        mask &= extra
    mask.flags.writeable = False
    return mask


def build_B(ell: int, kind: SieveKind) -> Set[Pair]:
    """Pairs (s, t) mod ell compatible with nonsingularity and the tau congruences."""
    kind = SieveKind(kind)
    if ell in excluded_primes(kind, 1, None) or not isprime(ell):
        raise SieveProblemError(f"ell={ell} is not admissible for {kind.value}")
    return {(int(s), int(t)) for s, t in np.argwhere(_b_mask(ell, kind))}


def frey_coefficients(ell: int, kind: SieveKind, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """(a2, a4) grids of the reduced Frey curve Y^2 = X(X^2 + a2 X + a4)."""
    kind = SieveKind(kind)
    if j not in (1, 3):
        raise DomainError(f"j must be 1 or 3, got {j}")
    _, t, s11 = _grids(ell)
    full = (ell, ell)
    if kind is SieveKind.TAU_P2:
        a2 = (2 * t) % ell
        a4 = (t * t - s11) % ell if j == 1 else s11 % ell
    elif kind is SieveKind.TAU_P4:
        quad = (3 * s11 - 2 * t * t) % ell
        a2 = quad if j == 1 else (-quad) % ell
        a4 = _quartic(ell)
    else:
        a2 = (2 * t) % ell
        a4 = (2 * s11) % ell
    return np.broadcast_to(a2, full), np.broadcast_to(a4, full)


def frey_curve(s: int, t: int, ell: int, kind: SieveKind, j: int = 1) -> CurveModEll:
    a2, a4 = frey_coefficients(ell, kind, j)
    return CurveModEll(ell, int(a2[s % ell, t % ell]), int(a4[s % ell, t % ell]))


def _c_mask(f: NewformEigenData, ell: int, j: int, kind: SieveKind) -> np.ndarray:
    kind = SieveKind(kind)
    _check_ell(ell)
    bound = isqrt(4 * ell) + 1
    # 11 | Norm(a - c_ell), tabulated over the Hasse interval
    ok = np.array(
        [f.norm_of_difference(a, ell) % 11 == 0 for a in range(-bound, bound + 1)], dtype=bool
    )
    a2, a4 = frey_coefficients(ell, kind, j)
    traces = ap_table(ell)[a2, a4]
    return _b_mask(ell, kind) & ok[traces + bound]


def compute_C(f: NewformEigenData, ell: int, j: int, kind: SieveKind) -> Set[Pair]:
    """Pairs in B_ell whose Frey trace is congruent to c_ell modulo a prime above 11."""
    return {(int(s), int(t)) for s, t in np.argwhere(_c_mask(f, ell, j, kind))}


def compute_D(f: NewformEigenData, ell: int, j: int, kind: SieveKind) -> FrozenSet[int]:
    """Residues mod ell that kappa q^b can take given f."""
    keep = _c_mask(f, ell, j, kind)
    return frozenset(int(v) for v in np.unique(d_values(ell, kind)[keep]))


# residue sieve


def admissible_ells(kind: SieveKind, kappa: int, q: Optional[int], M: int,
                    ell_bound: int, p: Optional[int] = None) -> Tuple[int, ...]:
    """Primes 3 <= ell < ell_bound satisfying the coprimality and order conditions."""
    kind = SieveKind(kind)
    bad = set(excluded_primes(kind, kappa, q))
    if p is not None:
        bad.add(p)
    ells = []
    for ell in primerange(3, ell_bound):
        if ell in bad:
            continue
        if q is not None and M % n_order(q, ell):
            continue
        ells.append(int(ell))
    return tuple(ells)


def admissible_levels(problem: SieveProblem) -> Dict[int, bool]:
    return problem.levels()


def problem_ells(problem: SieveProblem, ell_bound: int) -> Tuple[int, ...]:
    if problem.ells is not None:
        return problem.ells
    if problem.kind is SieveKind.TAU_P3:
        return TAU_P3_ELLS
    return admissible_ells(problem.kind, problem.kappa, problem.q, problem.modulus, ell_bound)


def e_mask(problem: SieveProblem, j: int) -> np.ndarray:
    """beta in [0, M) with kappa q^beta = 3 (j=1) or 1 (j=3) mod 4; TAU_P4 always uses 1."""
    target = 3 if (problem.kind is SieveKind.TAU_P2 and j == 1) else 1
    return np.array(
        [(problem.kappa * pow(problem.q, beta, 4)) % 4 == target for beta in range(problem.modulus)],
        dtype=bool,
    )


def f_mask(problem: SieveProblem, level: int, j: int) -> np.ndarray:
    levels = problem.levels()
    if level not in levels:
        raise SieveProblemError(
            f"level {level} is not one of the admissible levels {sorted(levels)}"
        )
    beta = np.arange(problem.modulus)
    divisible = beta % 11 == 0
    return e_mask(problem, j) & (divisible if levels[level] else ~divisible)


def g_mask(problem: SieveProblem, f: NewformEigenData, ell: int, j: int) -> np.ndarray:
    d = np.zeros(ell, dtype=bool)
    for v in compute_D(f, ell, j, problem.kind):
        d[v] = True
    residues = np.array(
        [(problem.kappa * pow(problem.q, beta, ell)) % ell for beta in range(problem.modulus)],
        dtype=np.int64,
    )
    return f_mask(problem, f.level, j) & d[residues]


def run_sieve(problem: SieveProblem, f: NewformEigenData, ell_bound: int = 200) -> SieveResult:
    """
    Survivors H_1(f), H_3(f) as residues of b mod M.

    For TAU_P3 the result carries the surviving (s, t) sets per ell instead.
    """
    ells = problem_ells(problem, ell_bound)
    if problem.kind is SieveKind.TAU_P3:
        return SieveResult(label=f.label, level=f.level, pairs=tau_p3_survivors(f, ells))
    survivors = {}
    for j in (1, 3):
        h = f_mask(problem, f.level, j)
        for ell in ells:
            if not h.any():
                break
            h = h & g_mask(problem, f, ell, j)
        survivors[j] = frozenset(int(b) for b in np.flatnonzero(h))
    logger.info(
        "Sieve %s kappa=%s q=%s on %s: |H1|=%s |H3|=%s",
        problem.kind.value, problem.kappa, problem.q, f.label, len(survivors[1]), len(survivors[3]),
    )
    return SieveResult(label=f.label, level=f.level, h1=survivors[1], h3=survivors[3])


def tau_p3_survivors(f: NewformEigenData,
                     ells: Iterable[int] = TAU_P3_ELLS) -> Dict[int, FrozenSet[Pair]]:
    return {ell: frozenset(compute_C(f, ell, 1, SieveKind.TAU_P3)) for ell in ells}


def reduction_trace_check(f: NewformEigenData, q: int, curve: Optional[CurveModel] = None) -> bool:
    """
    True iff +-(q + 1) = a_q mod 11 for some sign.

    True means the multiplicative-versus-good reduction argument at q does
    not rule f out.
    """
    if not f.is_rational:
        raise DomainError(f"{f.label} is not rational")
    a_q = ap_from_model(curve.a_invariants, q) if curve is not None else f.rational_ap(q)
    return any((sign * (q + 1) - a_q) % 11 == 0 for sign in (1, -1))


# curves and eigendata


def j_invariant(curve: CurveModel) -> Fraction:
    c4, _, disc = curve.c4_c6_disc()
    if disc == 0:
        raise SingularCurveError(f"{curve.label} is singular")
    return Fraction(c4 ** 3, disc)


def cm_discriminant(curve: CurveModel) -> Optional[int]:
    """Discriminant of the CM order, or None when the curve has no CM."""
    j = j_invariant(curve)
    if j.denominator != 1:
        return None
    return CM_J_INVARIANTS.get(j.numerator)


def load_curves(source: Union[bytes, str, TextIO]) -> List[CurveModel]:
    curves = []
    for row in parse_curve_file_streaming(source):
        is_valid, error = validate_curve_row(row)
        if not is_valid:
            raise EigendataParseError(row["line_number"], error)
        curve = CurveModel(row["level"], row["label"], *row["a_invariants"])
        if curve.c4_c6_disc()[2] == 0:
            raise EigendataParseError(row["line_number"], f"curve {curve.label} is singular")
        curves.append(curve)
    return curves


def forms_from_curves(curves: Iterable[CurveModel], ell_bound: int = 200) -> List[NewformEigenData]:
    """Rational eigendata from curve models, at odd primes of good reduction below ell_bound."""
    forms = []
    for curve in curves:
        disc = curve.c4_c6_disc()[2]
        charpolys = {
            int(ell): (-ap_from_model(curve.a_invariants, ell), 1)
            for ell in primerange(3, ell_bound)
            if disc % ell
        }
        forms.append(NewformEigenData(curve.level, curve.label, 1, charpolys))
    return forms


def load_eigendata(source: Union[bytes, str, TextIO]) -> List[NewformEigenData]:
    forms = []
    for record in parse_eigendata_streaming(source):
        is_valid, error, ell = validate_newform_record(record)
        if not is_valid:
            raise EigendataValidationError(record["label"], ell, error)
        forms.append(
            NewformEigenData(record["level"], record["label"], record["degree"], record["charpolys"])
        )
    return forms


def export_eigendata(forms: Iterable[NewformEigenData], stream: TextIO) -> int:
    """Write forms in the eigenvalue file format; returns the number of records."""
    count = 0
    for f in forms:
        if count:
            stream.write("\n")
        stream.write(f"NEWFORM {f.level} {f.label} {f.degree}\n")
        for ell in sorted(f.charpolys):
            stream.write(f"AP {ell} {' '.join(str(c) for c in f.charpolys[ell])}\n")
        count += 1
    return count


def group_by_level(forms: Iterable[NewformEigenData]) -> Dict[int, List[NewformEigenData]]:
    grouped: Dict[int, List[NewformEigenData]] = {}
    for f in forms:
        grouped.setdefault(f.level, []).append(f)
    return grouped


def require_levels(forms: Iterable[NewformEigenData], levels: Iterable[int]) -> Dict[int, List[NewformEigenData]]:
    """Forms grouped by level, raising if any required level has no data."""
    grouped = group_by_level(forms)
    missing = [level for level in levels if level not in grouped]
    if missing:
        raise MissingEigendataError(missing)
    return grouped


# small primes


SMALL_PRIME_BOUND = 200
_KIND_EXPONENT = {SieveKind.TAU_P2: 2, SieveKind.TAU_P3: 3, SieveKind.TAU_P4: 4}


def _is_q_power(n: int, q: int) -> bool:
    while n % q == 0:
        n //= q
    return n == 1


def small_prime_hits(problem: SieveProblem, table: QExpansion,
                     bound: int = SMALL_PRIME_BOUND) -> List[int]:
    """
    Primes p < bound where tau(p^e) has the shape the sieve excludes.

    The sieve assumes p > bound, so these are settled directly: tau(p^2) or
    tau(p^4) equal to kappa q^b, or tau(p^3) 11-smooth for odd p.
    """
    if table.limit < bound:
        raise OutOfRangeError(f"small-prime check needs tau up to {bound}, table has {table.limit}")
    e = _KIND_EXPONENT[problem.kind]
    hits = []
    for p in primerange(2, bound):
        p = int(p)
        value = tau_prime_power(table[p], p, e)
        if problem.kind is SieveKind.TAU_P3:
            if p > 2 and value and is_smooth(value, 11):
                hits.append(p)
        elif value and value % problem.kappa == 0:
            quotient = value // problem.kappa
            if quotient > 0 and _is_q_power(quotient, problem.q):
                hits.append(p)
    return hits
