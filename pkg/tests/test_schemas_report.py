import io
import json

import pytest
from pydantic import ValidationError

from app.commands.common import largest_needed_prime, parse_tau_target, record_bundled
from app.exceptions import DomainError
from app.models.sieve import SieveKind
from app.schemas import CampaignConfig, CampaignReport
from app.utils.report_writer import file_digest, record_digests, render_text, write_report

ABC_SHA256 = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def _report():
    report = CampaignReport(command="demo", parameters={"bound": 8}, version="1.0.0")
    report.add("b/second", "fail", "bad")
    report.add("a/first", "pass")
    report.add("c/third", "skipped", "later")
    report.notes.append("a note")
    report.timings["total"] = 1.25
    return report


def test_config_coercion_and_parameters():
    config = CampaignConfig(command="sieve", kind="TAU_P2", q=11, kappa=[3], report="out.txt")
    assert config.kind is SieveKind.TAU_P2
    assert config.parameters() == {"kappa": [3], "kind": "TAU_P2", "q": 11}


@pytest.mark.parametrize(
    "fields",
    [
        {"backend": "gpu"},
        {"kappa": [2]},
        {"levels": [0]},
        {"eigendata": ["/nonexistent/eigendata.txt"]},
        {"fixture": "/nonexistent/fixture.txt"},
        {"modulus": 10},
        {"threads": 0},
    ],
)
def test_config_validation(fields):
    with pytest.raises(ValidationError):
        CampaignConfig(command="x", **fields)


def test_exit_codes():
    report = CampaignReport(command="demo")
    report.check("ok", True)
    assert report.exit_code == 0
    report.add("open", "inconclusive")
    assert report.exit_code == 1
    report = CampaignReport(command="demo")
    report.add("later", "skipped")
    assert report.exit_code == 0


def test_extend_merges_entries():
    report = CampaignReport(command="demo")
    report.extend(_report())
    assert report.count("pass") == 1
    assert report.notes == ["a note"]


def test_render_text_is_sorted():
    lines = render_text(_report()).splitlines()
    assert lines[0] == "# tau-verifier 1.0.0"
    assert lines[1] == "command: demo"
    assert lines[2] == "param bound = 8"
    assert [line.split()[1] for line in lines[3:6]] == ["a/first", "b/second", "c/third"]
    assert lines[4].startswith("FAIL")
    assert "summary: 3 checks, 1 passed, 1 failed, 0 inconclusive, 1 skipped" in lines
    assert lines[lines.index("# timings") + 1] == "total: 1.250s"


def test_write_report_files(tmp_path):
    path = tmp_path / "reports" / "demo.txt"
    write_report(_report(), path)
    assert path.read_text(encoding="utf-8").startswith("# tau-verifier")
    payload = json.loads((tmp_path / "reports" / "demo.txt.json").read_text(encoding="utf-8"))
    assert [c["name"] for c in payload["checks"]] == ["a/first", "b/second", "c/third"]
    assert payload["timings"] == {"total": 1.25}


def test_write_report_stream():
    stream = io.StringIO()
    write_report(_report(), stream=stream)
    assert "note a note" in stream.getvalue()


def test_digests(tmp_path):
    (tmp_path / "a.txt").write_bytes(b"abc")
    (tmp_path / "skip.md").write_bytes(b"ignored")
    assert file_digest(tmp_path / "a.txt") == ABC_SHA256
    report = CampaignReport(command="demo")
    record_digests(report, [tmp_path])
    assert report.digests == {str(tmp_path / "a.txt"): ABC_SHA256}


def test_bundled_digest_names():
    report = CampaignReport(command="demo")
    path = record_bundled(report, "curves.txt")
    assert path.name == "curves.txt"
    assert list(report.digests) == ["bundled/curves.txt"]


def test_parse_tau_target():
    assert parse_tau_target("8") == [8]
    assert parse_tau_target("251^2") == [63001]
    assert parse_tau_target("3..6") == [3, 4, 5, 6]
    assert largest_needed_prime([63001, 12]) == 251
    assert largest_needed_prime([1]) == 1
    for bad in ("x", "0", "5..4", "2^y"):
        with pytest.raises(DomainError):
            parse_tau_target(bad)
