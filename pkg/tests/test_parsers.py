import pytest

from app.exceptions import EigendataParseError, EigendataValidationError, FixtureError
from app.frey_sieve import load_curves, load_eigendata
from app.utils.eigendata_parser import (
    check_ramanujan_bound,
    parse_curve_file_streaming,
    parse_eigendata_streaming,
    validate_newform_record,
)
from app.utils.fixture_parser import parse_fixture

EIGENDATA = """\
# two records
NEWFORM 2200 2200.2.a.a 1
AP 3 1 1
AP 7 -3 1

NEWFORM 2200 2200.2.a.b 2
AP 3 -2 0 1
"""


def test_parse_eigendata_records():
    records = list(parse_eigendata_streaming(EIGENDATA))
    assert [r["label"] for r in records] == ["2200.2.a.a", "2200.2.a.b"]
    assert records[0]["charpolys"] == {3: (1, 1), 7: (-3, 1)}
    assert records[1]["line_number"] == 6
    forms = load_eigendata(EIGENDATA.encode("utf-8"))
    assert forms[0].rational_ap(3) == -1
    assert forms[1].norm_of_difference(0, 3) == -2


def test_windows_line_endings():
    assert len(load_eigendata(EIGENDATA.replace("\n", "\r\n"))) == 2


@pytest.mark.parametrize(
    "text, line",
    [
        ("AP 3 1 1\n", 1),
        ("NEWFORM 11 11a\n", 1),
        ("NEWFORM 11 11a 1\nAP 3 x 1\n", 2),
        ("NEWFORM 11 11a 1\nAP 3 1 1\nAP 3 1 1\n", 3),
        ("NEWFORM 11 11a 1\nEIGEN 3 1\n", 2),
    ],
)
def test_eigendata_parse_errors(text, line):
    with pytest.raises(EigendataParseError) as excinfo:
        list(parse_eigendata_streaming(text))
    assert excinfo.value.line_number == line


def test_eigendata_validation():
    with pytest.raises(EigendataValidationError) as excinfo:
        load_eigendata("NEWFORM 11 11a 1\nAP 5 -5 1\n")
    assert excinfo.value.ell == 5
    with pytest.raises(EigendataValidationError):
        load_eigendata("NEWFORM 11 11a 1\nAP 3 1 2\n")
    with pytest.raises(EigendataValidationError):
        load_eigendata("NEWFORM 11 11a 2\nAP 3 1 1\n")
    ok, message, ell = validate_newform_record({"level": 0, "label": "x", "degree": 1, "charpolys": {}})
    assert (ok, ell) == (False, None)


def test_ramanujan_bound():
    assert check_ramanujan_bound((-4, 1), 5)[0]
    assert not check_ramanujan_bound((-5, 1), 5)[0]
    assert check_ramanujan_bound((-2, 0, 1), 3)[0]
    assert not check_ramanujan_bound((-16, 0, 1), 3)[0]


def test_curve_file():
    rows = list(parse_curve_file_streaming("CURVE 32 32a2 0 0 0 -1 0  # comment\n\n"))
    assert rows[0]["a_invariants"] == (0, 0, 0, -1, 0)
    with pytest.raises(EigendataParseError):
        load_curves("CURVE 32 32a2 0 0 0 -1\n")
    with pytest.raises(EigendataParseError):
        load_curves("CURVE 32 sing 0 0 0 0 0\n")


FIXTURE = """\
NAME demo
VARIABLES X Y
FORM -X^3 + 6 X^2 Y - 5 X Y^2 + Y^3
PRIMES 83
SOLUTION 5 1 0
PAIR 31 105
THRESHOLD 100
"""


def test_parse_fixture():
    fixture = parse_fixture(FIXTURE)
    assert fixture.name == "demo"
    assert fixture.instance.primes == (83,)
    assert fixture.instance.signed and fixture.instance.coprime
    assert fixture.solutions[0].as_triple() == (5, 1, 0)
    assert fixture.pairs == [(31, 105)]
    assert fixture.threshold == 100


@pytest.mark.parametrize(
    "text",
    [
        "NAME nothing\n",
        FIXTURE + "SOLUTION 5 1\n",
        FIXTURE + "NAME again\n",
        FIXTURE + "BOGUS 1\n",
        FIXTURE.replace("PAIR 31 105", "PAIR 31"),
        FIXTURE + "SIGNED maybe\n",
        FIXTURE.replace("Y^3", "Y^2"),
    ],
)
def test_fixture_errors(text):
    with pytest.raises(FixtureError):
        parse_fixture(text)


def test_bundled_fixtures_load(load_bundled_fixture):
    for name in ("tm_83_7", "tm_83_41", "thue_deg11", "f7_smooth37"):
        assert load_bundled_fixture(name).name == name
