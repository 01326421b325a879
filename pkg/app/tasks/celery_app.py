from celery import Celery
from dotenv import load_dotenv

from app.config import settings

load_dotenv()

# Create Celery app for campaign work items
celery_app = Celery(
    "tau_verifier",
    broker=settings.celery_broker_url,
    backend=settings.celery_result_backend,
)

celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_track_started=True,
    task_time_limit=settings.campaign_task_time_limit,
    worker_prefetch_multiplier=1,
    worker_max_tasks_per_child=1000,
    broker_connection_retry_on_startup=True,
    result_backend_always_retry=True,
    result_backend_max_retries=3,
)

# Import tasks to register them
from app.tasks import campaign_tasks  # noqa
