# /pbc-compress/pbc_compress/utils.py
# Generic helpers shared across modules: structured logging, outcome/bit conversion, seeding.

import logging
import secrets
from typing import Iterable

import numpy as np

from .constants import BIT_FOR_OUTCOME, OUTCOME_FOR_BIT, DIST_SIGNIFICANT_DIGITS
from .logging import LogEntry

# Using NullHandler to prevent "No handler found" warnings if not configured upstream.
util_logger = logging.getLogger(__name__)
if not util_logger.handlers:
    util_logger.addHandler(logging.NullHandler())


def outcome_to_bit(outcome: int) -> int:
    """Maps a measurement outcome to its bit label: +1 -> 0, -1 -> 1."""
    try:
        return BIT_FOR_OUTCOME[int(outcome)]
    except KeyError:
        raise ValueError(f"Measurement outcome must be +1 or -1, got {outcome!r}") from None


def bit_to_outcome(bit: int) -> int:
    """Inverse of outcome_to_bit."""
    try:
        return OUTCOME_FOR_BIT[int(bit)]
    except KeyError:
        raise ValueError(f"Bit must be 0 or 1, got {bit!r}") from None


def parity(bits: Iterable[int]) -> int:
    """XOR of an iterable of bits."""
    acc = 0
    for b in bits:
        acc ^= int(b) & 1
    return acc


def make_rng(seed: int | None = None) -> tuple[np.random.Generator, int]:
    """
    Builds a seeded numpy Generator. When no seed is given one is drawn from
    system entropy so that it can be reported and the run reproduced.

    Returns:
        The generator and the seed actually used.
    """
    if seed is None:
        seed = secrets.randbits(63)
    return np.random.default_rng(seed), int(seed)


def format_probability(p: float) -> str:
    """Renders a probability with the fixed number of significant digits used by dumps."""
    return f"{p:.{DIST_SIGNIFICANT_DIGITS}g}"


def log_structured(logger: logging.Logger, level: str, message: str, **kwargs):
    """
    Logs a message using the structured LogEntry model.

    Args:
        logger: The logging.Logger instance to use.
        level: The log level (e.g., "INFO", "WARNING").
        message: The main log message.
        **kwargs: Additional fields to include in the structured log
                  (e.g., run_id, t, s, gate_count).
    """
    level_upper = level.upper()
    log_level_int = getattr(logging, level_upper, logging.INFO)  # Default to INFO if invalid

    if logger.isEnabledFor(log_level_int):
        try:
            log_entry = LogEntry(
                level=level_upper,
                message=message,
                logger_name=logger.name,
                **kwargs,
            )
            logger.log(log_level_int, log_entry.model_dump_json(exclude_none=True))
        except Exception as e:
            logger.error(f"Failed to create or log structured entry: {e}", exc_info=True)


# --- Example Usage ---
# from pbc_compress.utils import log_structured, make_rng
# rng, seed = make_rng(None)
# log_structured(log, "info", "compiled", seed=seed, t=3, s=2)
