import mpmath
import pytest

from app.dioph import (
    bg_constant,
    bg_log_bound,
    box_search,
    fib_lucas_power_scan,
    is_prime_eleventh_power,
    lenstra_log_hr_bound,
    match_solution,
    qm_pairs,
    s_regulator_log_bound,
    smooth_pairs_check,
    threshold_check,
    verify_solution_list,
)
from app.exceptions import DomainError
from app.models.poly import BivariatePoly
from app.models.thue import TMInstance, TMSolution
from app.polyfam import f_poly


@pytest.fixture
def f7_83():
    return TMInstance(form=f_poly(7), primes=(83,), name="f7-83")


def test_listed_solutions_verify(load_bundled_fixture):
    for name in ("tm_83_7", "tm_83_41"):
        fixture = load_bundled_fixture(name)
        result = verify_solution_list(fixture.instance, fixture.solutions)
        assert result.ok, [c.reason for c in result.failures]


@pytest.mark.parametrize("name", ["tm_83_7", "tm_83_41"])
def test_box_search_finds_only_listed(load_bundled_fixture, name):
    fixture = load_bundled_fixture(name)
    found = {(s.x, s.y) for s in box_search(fixture.instance, 50, threads=4)}
    listed = {(s.x, s.y) for s in fixture.solutions if max(abs(s.x), abs(s.y)) <= 50}
    assert found == listed


def test_thue_degree_11(load_bundled_fixture):
    fixture = load_bundled_fixture("thue_deg11")
    assert [(s.x, s.y) for s in box_search(fixture.instance, 20)] == [(1, 0)]


F7_SMOOTH_PAIRS = {
    (31, 105), (33, 107), (33, 109), (41, 124), (67, 219), (74, 115), (74, 117), (76, 119),
    (83, 125), (152, 237), (207, -152), (251, 815), (313, 62), (359, 925), (564, 877), (566, 773),
}


def test_smooth_f7_pairs(load_bundled_fixture):
    fixture = load_bundled_fixture("f7_smooth37")
    assert len(fixture.pairs) == 16
    assert set(fixture.pairs) == F7_SMOOTH_PAIRS
    assert smooth_pairs_check(fixture.instance, fixture.pairs) == []
    assert fixture.threshold == 100


@pytest.mark.slow
def test_smooth_f7_threshold_box(load_bundled_fixture):
    fixture = load_bundled_fixture("f7_smooth37")
    gap = threshold_check(fixture.instance, fixture.pairs, fixture.threshold, 130, threads=4)
    assert gap.ok, (gap.unlisted, gap.missed)
    assert all(max(abs(x), abs(y)) < 100 for x, y in gap.below)
    in_box = {(x, y) for x, y in F7_SMOOTH_PAIRS if max(abs(x), abs(y)) <= 130}
    assert len(in_box) == 8
    found = {(s.x, s.y) for s in box_search(fixture.instance, 130, threads=4)}
    assert in_box | {(-x, -y) for x, y in in_box} <= found
    assert found - set(gap.below) == in_box | {(-x, -y) for x, y in in_box}


def test_threshold_check_needs_box_past_threshold(f7_83):
    with pytest.raises(DomainError):
        threshold_check(f7_83, [], 100, 50)


def test_threshold_check_reports_unlisted(f7_83):
    # (5, 1) and (-7, -1) solve F_7 = +-83^z; a threshold of 2 leaves them unlisted
    gap = threshold_check(f7_83, [(5, 1)], 2, 10)
    assert (5, 1) not in gap.unlisted and (-5, -1) not in gap.unlisted
    assert (-7, -1) in gap.unlisted
    assert not gap.ok


@pytest.mark.slow
def test_psi7_83_box_has_no_eleventh_powers(load_bundled_fixture):
    fixture = load_bundled_fixture("tm_83_7")
    found = box_search(fixture.instance, 100, threads=4)
    assert found
    listed = {(s.x, s.y) for s in fixture.solutions if max(abs(s.x), abs(s.y)) <= 100}
    assert {(s.x, s.y) for s in found} == listed
    assert not any(is_prime_eleventh_power(s.x) for s in found)


def test_match_solution(f7_83):
    assert match_solution(f7_83, 5, 1) == TMSolution(5, 1, (0,))
    assert match_solution(f7_83, -7, -1) == TMSolution(-7, -1, (1,))
    assert match_solution(f7_83, 0, 0) is None
    # shape matches but 83 divides gcd(x, y)
    assert match_solution(f7_83, 83, 0) is None
    assert match_solution(f7_83, -7, -1, exp_cap=0) is None


def test_unsigned_instance_rejects_negative_values():
    inst = TMInstance(form=f_poly(7), primes=(83,), signed=False)
    # F_7(-1, 0) = 1, F_7(1, 0) = -1
    assert match_solution(inst, -1, 0) is not None
    assert match_solution(inst, 1, 0) is None


def test_verify_solution_list_reports_failures(f7_83):
    result = verify_solution_list(
        f7_83, [TMSolution(5, 1, (0,)), TMSolution(5, 1, (1,)), TMSolution(2, 4, (0,)), TMSolution(5, 1)]
    )
    assert not result.ok
    reasons = [c.reason for c in result.failures]
    assert len(reasons) == 3
    assert "expected 1 exponents" in reasons


def test_eleventh_power_flag(f7_83):
    assert is_prime_eleventh_power(2 ** 11)
    assert not is_prime_eleventh_power(6 ** 11)
    assert not is_prime_eleventh_power(1)
    result = verify_solution_list(f7_83, [TMSolution(2 ** 11, 1, (0,))])
    assert result.eleventh_powers == [TMSolution(2 ** 11, 1, (0,))]


def test_box_search_threads_agree(f7_83):
    assert box_search(f7_83, 30, threads=3) == box_search(f7_83, 30, threads=1)
    with pytest.raises(DomainError):
        box_search(f7_83, 0)


def test_instance_validation():
    with pytest.raises(DomainError):
        TMInstance(form=BivariatePoly((1, 0, 1)))
    with pytest.raises(DomainError):
        TMInstance(form=f_poly(7), primes=(83, 7))
    with pytest.raises(DomainError):
        TMInstance(form=f_poly(7), b=0)


def test_fib_lucas_scan():
    scan = fib_lucas_power_scan(200)
    assert scan.ok
    assert {v for _, v in scan.fibonacci_powers} == {0, 1, 8, 144}
    assert {v for _, v in scan.lucas_powers} == {1, 4}
    assert scan.eleventh_prime_powers == []


def test_qm_pairs():
    pairs = qm_pairs(100)
    assert len(pairs) == 20
    assert (13, 7) in pairs
    assert (83, 7) in pairs and (83, 41) in pairs
    assert [m for q, m in pairs if q == 67] == [11, 17]
    with pytest.raises(DomainError):
        qm_pairs(2)


def test_bg_constant():
    assert bg_constant(3, 1) == 3 ** 169 * 2 ** 45
    with pytest.raises(DomainError):
        bg_constant(2, 1)


def test_bg_log_bound_includes_constant():
    value = bg_log_bound(3, 1, 83, 1, 1, 1, 1, 1)
    with mpmath.workdps(50):
        log_c = mpmath.log(bg_constant(3, 1))
        # P^N, (log* P)^(ns+2), R h and the last factor on top of c(n, s)
        expected = log_c + mpmath.log(83) + 5 * mpmath.log(mpmath.log(83)) + mpmath.log(1 + 1)
        assert abs(value - expected) < mpmath.mpf(10) ** -30
    with pytest.raises(DomainError):
        bg_log_bound(3, 1, 83, 0, 1, 1, 1, 1)


def test_lenstra_and_s_regulator():
    with mpmath.workdps(30):
        log_delta = 6 * mpmath.log(7) / 4
        expected = log_delta + 2 * mpmath.log(log_delta) - mpmath.log(2)
        assert abs(lenstra_log_hr_bound(7) - expected) < mpmath.mpf(10) ** -20
        bound = s_regulator_log_bound(expected, 2, 37)
        assert abs(bound - expected - 2 * mpmath.log(mpmath.log(37))) < mpmath.mpf(10) ** -20
    with pytest.raises(DomainError):
        lenstra_log_hr_bound(4)
