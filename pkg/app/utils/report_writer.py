"""
Line-oriented campaign reports with a parallel JSON file.

Everything above the ``# timings`` line is deterministic for fixed inputs.
"""
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

from app.schemas import CampaignReport

STATUS_TAGS = {"pass": "PASS", "fail": "FAIL", "inconclusive": "INCONCLUSIVE", "skipped": "SKIP"}


def file_digest(path: Union[str, Path], chunk_size: int = 1 << 16) -> str:
    """sha256 of a file, streamed in chunks."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def record_digests(report: CampaignReport, paths: Iterable[Union[str, Path]]) -> None:
    for path in paths:
        path = Path(path)
        files = sorted(path.glob("*.txt")) if path.is_dir() else [path]
        for item in files:
            report.digests[str(item)] = file_digest(item)


def render_text(report: CampaignReport) -> str:
    lines = [f"# tau-verifier {report.version}", f"command: {report.command}"]
    for key, value in report.parameters.items():
        lines.append(f"param {key} = {value}")
    for path, digest in sorted(report.digests.items()):
        lines.append(f"data {path} sha256={digest}")
    for entry in report.sorted_checks():
        line = f"{STATUS_TAGS[entry.status]:<12} {entry.name}"
        if entry.detail:
            line += f"  {entry.detail}"
        lines.append(line)
    for note in report.notes:
        lines.append(f"note {note}")
    lines.append(
        "summary: {} checks, {} passed, {} failed, {} inconclusive, {} skipped".format(
            len(report.checks),
            report.count("pass"),
            report.count("fail"),
            report.count("inconclusive"),
            report.count("skipped"),
        )
    )
    lines.append("# timings")
    for key, seconds in sorted(report.timings.items()):
        lines.append(f"{key}: {seconds:.3f}s")
    return "\n".join(lines) + "\n"


def report_payload(report: CampaignReport) -> dict:
    payload = report.model_dump(mode="json", exclude={"timings"})
    payload["checks"] = [entry.model_dump(mode="json") for entry in report.sorted_checks()]
    payload["digests"] = dict(sorted(report.digests.items()))
    payload["timings"] = dict(sorted(report.timings.items()))
    return payload


def write_report(report: CampaignReport, path: Optional[Union[str, Path]] = None,
                 stream: Optional[TextIO] = None) -> None:
    """
    Write the text report to ``path`` (and ``<path>.json``) or to ``stream``.

    Args:
        report: Finished campaign report
        path: Report file; the JSON file sits next to it
        stream: Text stream used when no path is given
    """
    text = render_text(report)
    if path is None:
        if stream is not None:
            stream.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    json_path = path.with_name(path.name + ".json")
    json_path.write_text(json.dumps(report_payload(report), indent=2) + "\n", encoding="utf-8")
