import logging
from pathlib import Path
from typing import Any, List, Tuple

import yaml
from pydantic import BaseModel, Field, field_validator

from automata.determinize import MINIMIZERS

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = Path(__file__).with_name("config.yml")

# ------------------------------
#     ConfigLoader Class
# ------------------------------


class ConfigLoader:
    """Loads and stores configuration from a YAML file."""

    def __init__(self, yaml_file: Path = DEFAULT_CONFIG):
        try:
            with Path(yaml_file).open("r", encoding="utf-8") as file:
                self.config = yaml.safe_load(file) or {}
        except FileNotFoundError:
            logger.error(f"Configuration file not found: {yaml_file}")
            raise
        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML file: {e}")
            raise

    def get(self, key: str, default: Any = None) -> Any:
        """Retrieve a value from the config; dotted keys reach into sections."""
        value = self.config
        for part in key.split("."):
            if not isinstance(value, dict) or part not in value:
                return default
            value = value[part]
        return value


# ------------------------------
#        Harness Settings
# ------------------------------


class HarnessSettings(BaseModel):
    cap: int = Field(default=2_000_000, gt=0)
    bit_cap: int = Field(default=26, gt=0, le=64)
    jobs: int = Field(default=1, ge=1)
    minimizer: str = "hopcroft"
    seed: int = 7
    oracle_words: int = Field(default=500, ge=0)
    oracle_maxlen: int = Field(default=12, ge=0)
    report_format: str = "text"
    timing: bool = True
    diagnostic_labels: int = Field(default=20, ge=0)
    log_level: str = "INFO"
    conjecture_pairs: List[Tuple[int, int]] = [(3, 3), (3, 4), (3, 5)]

    @field_validator("minimizer")
    @classmethod
    def check_minimizer(cls, value: str) -> str:
        if value not in MINIMIZERS:
            raise ValueError(f"minimizer must be one of {', '.join(MINIMIZERS)}, got {value!r}")
        return value

    @field_validator("report_format")
    @classmethod
    def check_format(cls, value: str) -> str:
        if value not in ("text", "csv", "json"):
            raise ValueError(f"report format must be text, csv or json, got {value!r}")
        return value

    @field_validator("conjecture_pairs", mode="before")
    @classmethod
    def parse_pairs(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = value.split(",")
        if isinstance(value, list):
            return [parse_pair(v) if isinstance(v, str) else v for v in value]
        return value

    @classmethod
    def from_config(cls, config: ConfigLoader) -> "HarnessSettings":
        values = {
            "cap": config.get("harness.cap"),
            "bit_cap": config.get("harness.bit_cap"),
            "jobs": config.get("harness.jobs"),
            "minimizer": config.get("harness.minimizer"),
            "seed": config.get("harness.seed"),
            "oracle_words": config.get("oracle.words"),
            "oracle_maxlen": config.get("oracle.maxlen"),
            "report_format": config.get("report.format"),
            "timing": config.get("report.timing"),
            "diagnostic_labels": config.get("report.diagnostic_labels"),
            "log_level": config.get("logging.level"),
            "conjecture_pairs": config.get("conjecture.pairs"),
        }
        return cls(**{key: value for key, value in values.items() if value is not None})


def parse_pair(text: str) -> Tuple[int, int]:
    m, sep, n = text.strip().partition(":")
    if not sep:
        raise ValueError(f"expected a pair m:n, got {text!r}")
    return int(m), int(n)


def load_settings(path: Path = DEFAULT_CONFIG) -> HarnessSettings:
    return HarnessSettings.from_config(ConfigLoader(path))
