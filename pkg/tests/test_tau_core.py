import pytest

from app.exceptions import DomainError, FactorizationBudgetExceeded, OutOfRangeError, ResourceLimitError
from app.models.qexpansion import FactorBudget, QExpansion
from app.tau_core import (
    CACHE_MAGIC,
    deligne_violations,
    delta_qexpansion,
    is_smooth,
    largest_prime_factor,
    load_or_build_qexpansion,
    multiplicativity_violations,
    nonordinary_primes,
    oddness_violations,
    powerful_numbers,
    read_qexpansion,
    sigma_pow,
    smooth_part,
    tau,
    tau_prime_power,
    tau_zero_prime_power,
)
from app.utils.factorization import factorize, is_probable_prime

FIRST_TAUS = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_first_coefficients(small_table):
    assert [small_table[n] for n in range(1, 11)] == FIRST_TAUS


def test_tau_251_squared(table):
    assert tau(251 ** 2, table) == -80561663527802406257321747


def test_table_properties(table):
    assert oddness_violations(table) == []
    assert deligne_violations(table) == []
    assert nonordinary_primes(table) == [2, 3, 5, 7, 2411]


def test_multiplicativity(small_table):
    assert multiplicativity_violations(small_table) == []


def test_tau_matches_table_for_composites(small_table):
    for n in (4, 8, 12, 36, 100, 243, 499):
        assert tau(n, small_table) == small_table[n]


def test_tau_out_of_range(small_table):
    with pytest.raises(OutOfRangeError):
        tau(503, small_table)
    with pytest.raises(OutOfRangeError):
        small_table[501]
    with pytest.raises(DomainError):
        tau(0, small_table)


def test_expansion_limits():
    with pytest.raises(DomainError):
        delta_qexpansion(0)
    with pytest.raises(ResourceLimitError):
        delta_qexpansion(10 ** 9)


def test_prime_power_recurrence(small_table):
    assert tau_prime_power(-24, 2, 0) == 1
    assert tau_prime_power(-24, 2, 1) == -24
    assert tau_prime_power(-24, 2, 2) == small_table[4]
    assert tau_prime_power(-24, 2, 3) == small_table[8]
    assert tau_prime_power(252, 3, 2) == small_table[9]


def test_zero_trace_prime_power():
    assert tau_zero_prime_power(3, 1) == 0
    assert tau_zero_prime_power(3, 2) == -(3 ** 11)
    assert tau_zero_prime_power(3, 4) == 3 ** 22
    # same recurrence with tau(p) = 0
    assert all(tau_zero_prime_power(5, m) == tau_prime_power(0, 5, m) for m in range(8))


def test_sigma_pow():
    assert sigma_pow(6, 1) == 12
    assert sigma_pow(6, 11, 691) == (1 + 2 ** 11 + 3 ** 11 + 6 ** 11) % 691
    with pytest.raises(DomainError):
        sigma_pow(0, 1)


def test_smooth_part():
    assert smooth_part(-24, 11) == (24, 1)
    assert smooth_part(2 * 3 * 13, 11) == (6, 13)
    assert is_smooth(252, 7)
    assert not is_smooth(252, 5)
    with pytest.raises(DomainError):
        smooth_part(0, 11)


def test_powerful_numbers():
    assert powerful_numbers(100) == [1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]
    assert len(powerful_numbers(10 ** 4)) == len(set(powerful_numbers(10 ** 4)))


def test_largest_prime_factor():
    result = largest_prime_factor(-24)
    assert (result.value, result.complete) == (3, True)
    assert largest_prime_factor(2 ** 61 - 1).value == 2 ** 61 - 1
    with pytest.raises(DomainError):
        largest_prime_factor(1)


def test_factorize_budget():
    semiprime = 1000003 * 1000033
    fact = factorize(semiprime, FactorBudget(trial_limit=100, rho_rounds=0))
    assert not fact.complete
    assert fact.composites == [semiprime]
    with pytest.raises(FactorizationBudgetExceeded):
        largest_prime_factor(semiprime, FactorBudget(trial_limit=100, rho_rounds=0))
    fact = factorize(semiprime, FactorBudget(trial_limit=100, rho_rounds=100_000))
    assert fact.complete
    assert fact.primes == {1000003: 1, 1000033: 1}


def test_is_probable_prime():
    assert is_probable_prime(2411)
    assert not is_probable_prime(561)
    assert is_probable_prime(2 ** 89 - 1)


def test_cache_round_trip(tmp_path, small_table):
    built = load_or_build_qexpansion(50, cache_dir=str(tmp_path))
    cache = tmp_path / "delta_qexpansion.txt"
    assert cache.read_text(encoding="ascii").startswith(f"{CACHE_MAGIC} 50\n")
    assert built == small_table.truncate(50)
    assert read_qexpansion(cache) == built
    assert load_or_build_qexpansion(20, cache_dir=str(tmp_path)).limit == 20


def test_bad_cache_is_rebuilt(tmp_path):
    (tmp_path / "delta_qexpansion.txt").write_text("NOTACACHE 3\n1\n-24\n252\n", encoding="ascii")
    table = load_or_build_qexpansion(5, cache_dir=str(tmp_path))
    assert table[5] == 4830


def test_qexpansion_validation():
    with pytest.raises(DomainError):
        QExpansion(limit=2, coeffs=(0, 1))
    with pytest.raises(OutOfRangeError):
        QExpansion(limit=2, coeffs=(0, 1, -24)).truncate(3)
