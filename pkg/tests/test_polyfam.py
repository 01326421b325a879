import warnings

import pytest
from sympy import primerange

from app.exceptions import DomainError, PolynomialDivisionError, PolynomialParseError
from app.models.poly import BivariatePoly, forms_equal
from app.polyfam import (
    admissible_prime_filter,
    coeff_bound_check,
    divides,
    f_coefficient_formula,
    f_poly,
    fh_identity_holds,
    format_poly,
    parse_poly,
    psi_divisibility_report,
    psi_lucas_identity_check,
    psi_poly,
    psi_product_holds,
    psi_root_check,
    psi_value_divides_tau,
    tau_fm_identity_check,
)

F7_TEXT = "-X^3 + 6 X^2 Y - 5 X Y^2 + Y^3"


def test_small_f_polys():
    assert f_poly(0).is_zero()
    assert f_poly(1) == f_poly(2) == BivariatePoly.one()
    assert f_poly(3).coeffs == (1, -1)
    # Y - 2X
    assert f_poly(4).coeffs == (1, -2)
    assert f_poly(5).coeffs == (1, -3, 1)
    assert f_poly(7).coeffs == (1, -5, 6, -1)


def test_f7_text_and_value():
    assert format_poly(f_poly(7)) == F7_TEXT
    assert forms_equal(parse_poly(F7_TEXT), f_poly(7))
    assert f_poly(7)(31, 105) == 29 ** 3


def test_printed_forms(load_bundled_fixture):
    assert forms_equal(load_bundled_fixture("tm_83_7").instance.form, f_poly(7))
    assert forms_equal(load_bundled_fixture("tm_83_41").instance.form, psi_poly(41))
    assert psi_poly(41).degree == 20


def test_closed_form_matches_recurrence():
    for m in range(0, 41):
        assert forms_equal(f_coefficient_formula(m), f_poly(m))


def test_fh_identity():
    assert all(fh_identity_holds(m) for m in range(1, 21))


def test_psi_polys():
    assert psi_poly(3) == f_poly(3)
    assert psi_poly(4).coeffs == (1, -2)
    assert psi_poly(6).coeffs == (1, -3)
    assert psi_poly(7) == f_poly(7)
    with pytest.raises(DomainError):
        psi_poly(2)
    with pytest.raises(DomainError):
        f_poly(-1)


def test_psi_product_and_roots():
    assert all(psi_product_holds(m) for m in range(3, 31))
    assert all(psi_root_check(m) for m in range(3, 31))


def test_coefficient_bound():
    assert all(coeff_bound_check(m) for m in range(3, 101))


def test_tau_identities(small_table):
    for p in primerange(2, 21):
        for m in range(3, 21):
            assert tau_fm_identity_check(int(p), m, small_table)
            assert psi_lucas_identity_check(int(p), m, small_table)
            assert psi_value_divides_tau(int(p), m, small_table)


def test_exact_division():
    assert f_poly(6) // f_poly(3) == psi_poly(6)
    assert divides(psi_poly(5), f_poly(10))
    assert not divides(f_poly(3), f_poly(5))
    with pytest.raises(PolynomialDivisionError):
        f_poly(5).divmod_exact(f_poly(3))
    with pytest.raises(PolynomialDivisionError):
        f_poly(5).divmod_exact(BivariatePoly.zero())


def test_parse_errors():
    with pytest.raises(PolynomialParseError):
        parse_poly("X^2 + Y")
    with pytest.raises(PolynomialParseError):
        parse_poly("X + Z")
    assert parse_poly("U^2 - 3 U V", ("U", "V")).coeffs == (0, -3, 1)


def test_admissible_prime_filter():
    assert admissible_prime_filter(7, 13, 1)
    assert admissible_prime_filter(7, 83, 1)
    assert admissible_prime_filter(7, 7, 1)
    assert not admissible_prime_filter(7, 5, 1)
    with pytest.raises(DomainError):
        admissible_prime_filter(6, 5, 1)


def test_divisibility_report():
    report = psi_divisibility_report(20)
    assert report.consistent
    # distinct Psi are coprime, so no literal proper pair survives
    assert report.literal_holds == []
    assert (3, 6) in report.literal_failures


def test_psi_poly_raises_no_deprecation_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        psi = psi_poly.__wrapped__(30)
    assert forms_equal(psi, psi_poly(30))
