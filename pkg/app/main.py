import argparse
import logging
import sys
import time
from typing import List, Optional, TextIO

from dotenv import load_dotenv
from pydantic import ValidationError

from app import __version__
from app.commands import COMMAND_MODULES
from app.config import settings
from app.exceptions import TauVerifierError
from app.schemas import BACKENDS, CampaignConfig
from app.utils.report_writer import write_report

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(level=(level or settings.log_level).upper(), format=LOG_FORMAT)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="worker threads (default from settings)")
    common.add_argument("--backend", choices=sorted(BACKENDS), help="campaign backend")
    common.add_argument("--report", help="write the text report here and JSON next to it")

    parser = argparse.ArgumentParser(prog="tau-verifier", description=settings.app_title)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include command groups
    for module in COMMAND_MODULES:
        module.register(subparsers, [common])
    return parser


def run(argv: Optional[List[str]] = None, stream: Optional[TextIO] = None) -> int:
    """Parse, execute and report one command; returns the exit status."""
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    handler = args.handler
    values = {k: v for k, v in vars(args).items() if k != "handler" and v is not None}

    start = time.perf_counter()
    try:
        config = CampaignConfig(**values)
        report = handler(config)
    except ValidationError as e:
        logger.error("Invalid parameters: %s", e)
        return EXIT_USAGE
    except TauVerifierError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_USAGE
    report.timings["total"] = time.perf_counter() - start

    write_report(report, config.report, stream)
    if config.report:
        stream.write(f"report written to {config.report}\n")
    logger.info("%s finished: %s failed, %s inconclusive", config.command,
                report.count("fail"), report.count("inconclusive"))
    return report.exit_code


def main() -> None:
    configure_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
