import logging
import uuid
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

try:
    from pbc_compress.constants import (
        FALLBACK_LOG_PATH_DEFAULT,
        ALLOWED_LOG_ROTATION_BYTES,
        ALLOWED_LOG_BACKUPS,
    )
except ImportError:
    FALLBACK_LOG_PATH_DEFAULT = "./logs/pbc_compress.log"
    ALLOWED_LOG_ROTATION_BYTES = 2_000_000
    ALLOWED_LOG_BACKUPS = 3


# --- Constants ---
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


# --- Pydantic Model for Log Records ---
class LogEntry(BaseModel):
    """Defines the structure for structured log entries."""
    model_config = ConfigDict(extra='allow')  # compile counts, seeds, gate totals, ...

    timestamp: datetime = Field(default_factory=_utcnow)
    level: str
    message: str
    logger_name: str
    run_id: uuid.UUID | None = None


# --- Logger Setup ---

def setup_logger(name: str, level: str = "INFO", log_path: str | None = None) -> logging.Logger:
    """Sets up a logger with stderr + rotating file handler."""
    logger = logging.getLogger(name)
    logger.setLevel(level.upper())
    if not logger.handlers:  # Ensure handlers are not added multiple times
        formatter = logging.Formatter(LOG_FORMAT)

        log_file_path = Path(log_path or FALLBACK_LOG_PATH_DEFAULT)
        try:
            log_file_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                filename=str(log_file_path),
                maxBytes=ALLOWED_LOG_ROTATION_BYTES,
                backupCount=ALLOWED_LOG_BACKUPS,
            )
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError:
            # read-only working directories still get console logging
            pass

        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(formatter)
        stream_handler.setLevel(logging.WARNING)
        logger.addHandler(stream_handler)
        logger.propagate = False

    return logger


# Example usage elsewhere:
# from pbc_compress.logging import setup_logger
# from pbc_compress.config import settings
# log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)
