# /pbc-compress/pbc_compress/config.py
# Runtime configuration loaded via Pydantic BaseSettings.
# Budgets, tolerances and logging knobs shared by the library and the CLI.

import os
import logging  # Keep for initial setup logging
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Configure a basic logger specifically for config loading issues
# This runs before the package logger is configured via settings
config_log = logging.getLogger(__name__ + ".config_loader")
logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s')

# Path to an optional .env file, relative to the working directory
DOTENV_PATH = os.getenv("PBC_DOTENV_PATH", "./.env")
if not os.path.exists(DOTENV_PATH):
    config_log.debug(f".env file not found at {DOTENV_PATH}. Relying on environment variables.")
    effective_dotenv_path = None
else:
    config_log.info(f"Loading environment variables from: {DOTENV_PATH}")
    effective_dotenv_path = DOTENV_PATH


class Settings(BaseSettings):
    """
    Configuration settings loaded from environment variables (prefix PBC_).
    """

    # --- Logging ---
    LOG_LEVEL: str = Field("INFO", validation_alias="PBC_LOG_LEVEL")
    LOG_PATH: str = Field("./logs/pbc_compress.log", validation_alias="PBC_LOG_PATH")

    # --- Dense oracle budget ---
    # Largest line count the statevector oracle accepts
    MAX_DENSE_LINES: int = Field(14, validation_alias="PBC_MAX_DENSE_LINES")
    # Largest number of simultaneously live measurement branches
    MAX_BRANCHES: int = Field(2 ** 20, validation_alias="PBC_MAX_BRANCHES")
    # Branch probabilities below this are pruned (pruned mass is reported)
    PRUNE_THRESHOLD: float = Field(1e-14, validation_alias="PBC_PRUNE_THRESHOLD")

    # --- Verification ---
    TOLERANCE: float = Field(1e-9, validation_alias="PBC_TOLERANCE")
    PHASE_TOLERANCE: float = Field(1e-9, validation_alias="PBC_PHASE_TOLERANCE")

    # --- Synthesis ---
    # Frozen constant c in the gate-count bound c * n^2
    SYNTH_GATE_CONSTANT: int = Field(12, validation_alias="PBC_SYNTH_GATE_CONSTANT")

    # --- Class generators ---
    # Random Clifford gates per line for the conjugated-Clifford family
    CLIFFORD_LAYER_LENGTH: int = Field(4, validation_alias="PBC_CLIFFORD_LAYER_LENGTH")

    # --- CLI ---
    DEFAULT_SEED: Optional[int] = Field(None, validation_alias="PBC_DEFAULT_SEED")

    model_config = SettingsConfigDict(
        env_file=effective_dotenv_path,  # Load .env if it exists
        env_file_encoding='utf-8',
        extra='ignore',  # Ignore unrelated env vars
        case_sensitive=False,
    )

    @field_validator('LOG_LEVEL')
    @classmethod
    def validate_log_level(cls, value):
        """Ensure log level is a valid logging level name."""
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        upper_value = value.upper()
        if upper_value not in valid_levels:
            raise ValueError(f"Invalid LOG_LEVEL: {value}. Must be one of {valid_levels}")
        return upper_value

    @field_validator('MAX_DENSE_LINES', 'MAX_BRANCHES', 'SYNTH_GATE_CONSTANT', 'CLIFFORD_LAYER_LENGTH')
    @classmethod
    def validate_positive(cls, value):
        """Budgets and sizes must be positive."""
        if value <= 0:
            raise ValueError(f"Expected a positive value, got {value}")
        return value

    @field_validator('TOLERANCE', 'PHASE_TOLERANCE', 'PRUNE_THRESHOLD')
    @classmethod
    def validate_tolerance(cls, value):
        """Tolerances live strictly between 0 and 1."""
        if not 0.0 < value < 1.0:
            raise ValueError(f"Tolerance must lie in (0, 1), got {value}")
        return value


# --- Instantiate settings once for easy import across modules ---
try:
    settings = Settings()
    config_log.debug(f"Settings loaded. Log level: {settings.LOG_LEVEL}")
except Exception as e:
    config_log.critical(f"CRITICAL: Failed to load/validate settings: {e}", exc_info=True)
    raise SystemExit(f"CRITICAL: Failed to load/validate settings: {e}") from e


# --- Example Usage ---
# from pbc_compress.config import settings
#
# if circuit.num_lines > settings.MAX_DENSE_LINES:
#     raise BudgetExceededError(...)
