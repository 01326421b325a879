import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List

from sympy import factorint

from app import __version__
from app.config import settings
from app.exceptions import DomainError
from app.schemas import CampaignConfig, CampaignReport
from app.utils.report_writer import file_digest


def new_report(config: CampaignConfig) -> CampaignReport:
    return CampaignReport(command=config.command, parameters=config.parameters(), version=__version__)


@contextmanager
def timed(report: CampaignReport, key: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        report.timings[key] = time.perf_counter() - start


def bundled_path(*parts: str) -> Path:
    return Path(settings.data_dir, *parts)


def record_bundled(report: CampaignReport, *parts: str) -> Path:
    """Digest a bundled data file under a location-independent name."""
    path = bundled_path(*parts)
    report.digests["bundled/" + "/".join(parts)] = file_digest(path)
    return path


def _parse_int(text: str) -> int:
    text = text.strip()
    if "^" in text:
        base, _, exponent = text.partition("^")
        return int(base) ** int(exponent)
    return int(text)


def parse_tau_target(text: str) -> List[int]:
    """'8', '251^2' or '1..20' as a list of positive integers."""
    try:
        if ".." in text:
            low, _, high = text.partition("..")
            values = list(range(_parse_int(low), _parse_int(high) + 1))
        else:
            values = [_parse_int(text)]
    except ValueError:
        raise DomainError(f"cannot read {text!r}; expected n, a^k or a..b") from None
    if not values or min(values) < 1:
        raise DomainError(f"tau arguments must be positive, got {text!r}")
    return values


def largest_needed_prime(values: List[int]) -> int:
    """Largest prime factor over the values, i.e. the table limit tau needs."""
    largest = 1
    for n in values:
        if n > 1:
            largest = max(largest, max(factorint(n)))
    return largest


def name_width(upper: int) -> int:
    return len(str(upper))
