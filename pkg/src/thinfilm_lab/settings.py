"""Process-wide defaults read from the environment."""

import os

from dotenv import load_dotenv

# Environment variables for configuration
ENV_PREFIX = "THINFILM_LAB_"

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

load_dotenv()


class LabSettings:
    """Defaults shared by the CLI, sweeps and verification suites."""

    def __init__(self):
        """Initialize settings from environment or defaults."""
        self.log_level = os.getenv(f"{ENV_PREFIX}LOG_LEVEL", "INFO").upper()
        self.output_root = os.getenv(f"{ENV_PREFIX}OUTPUT_ROOT", "runs")

        # Resolution and optimizer defaults
        self.default_modes = int(os.getenv(f"{ENV_PREFIX}DEFAULT_MODES", "64"))
        self.multistart_seeds = int(os.getenv(f"{ENV_PREFIX}MULTISTART_SEEDS", "8"))

        # Sweep fan-out
        self.sweep_workers = int(os.getenv(f"{ENV_PREFIX}SWEEP_WORKERS", "1"))

    def to_dict(self) -> dict:
        """Convert settings to dictionary."""
        return {
            "log_level": self.log_level,
            "output_root": self.output_root,
            "default_modes": self.default_modes,
            "multistart_seeds": self.multistart_seeds,
            "sweep_workers": self.sweep_workers,
        }

    def update_from_dict(self, config: dict):
        """Update settings from dictionary."""
        for key, value in config.items():
            if hasattr(self, key):
                setattr(self, key, value)

    def validate(self) -> tuple[bool, list[str]]:
        """Validate settings."""
        errors = []

        if self.log_level not in VALID_LOG_LEVELS:
            errors.append(
                f"Invalid log_level: {self.log_level}. Must be one of {VALID_LOG_LEVELS}"
            )

        if self.default_modes < 8:
            errors.append(f"default_modes must be at least 8, got {self.default_modes}")

        if self.multistart_seeds < 0:
            errors.append(
                f"multistart_seeds must be non-negative, got {self.multistart_seeds}"
            )

        if self.sweep_workers < 1 or self.sweep_workers > 64:
            errors.append(
                f"sweep_workers must be between 1 and 64, got {self.sweep_workers}"
            )

        return len(errors) == 0, errors


# Global settings instance
settings = LabSettings()
