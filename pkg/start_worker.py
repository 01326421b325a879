#!/usr/bin/env python3
"""
Launch a Celery worker for campaign work items (CAMPAIGN_BACKEND=celery).
"""
import logging
import os
import subprocess
import sys

from app.main import configure_logging

logger = logging.getLogger("start_worker")


def worker_command(concurrency: int, log_level: str) -> list:
    return [
        "celery",
        "-A", "app.tasks.celery_app",
        "worker",
        f"--loglevel={log_level.lower()}",
        f"--concurrency={concurrency}",
        "--without-gossip",
        "--without-mingle",
    ]


def main():
    configure_logging()
    try:
        from app.tasks.celery_app import celery_app
    except Exception as e:
        logger.error("Failed to import celery_app: %s", e)
        sys.exit(1)

    from app.config import settings

    logger.info("Broker %s, result backend %s", celery_app.conf.broker_url, celery_app.conf.result_backend)
    logger.info("Registered work-item task: %s", "evaluate_work_item" in celery_app.tasks)
    sys.stdout.flush()
    sys.stderr.flush()

    cmd = worker_command(settings.worker_concurrency, settings.log_level)
    process = subprocess.Popen(cmd, stdout=sys.stdout, stderr=sys.stderr, env=os.environ.copy())
    returncode = process.wait()
    if returncode != 0:
        logger.error("Celery worker exited with code %s", returncode)
    sys.exit(returncode)


if __name__ == "__main__":
    main()
