"""Configuration manager for command-line runs."""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union, get_args

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from mdivw.config import CONFIG
from mdivw.estimators.registry import parse_methods
from mdivw.estimators.selection import default_lambda
from mdivw.summary_data.schema import ColumnSchema
from mdivw.utils.error_handling import ConfigFileError

logger = logging.getLogger(__name__)

Command = Literal["analyze", "simulate", "sweep", "diagnose"]


class RunConfig(BaseModel):
    """Fully resolved settings for one CLI invocation."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    command: Command
    exposure: Optional[Path] = None
    outcome: Optional[Path] = None
    selection: Optional[Path] = None
    schema_: ColumnSchema = Field(default_factory=ColumnSchema, alias="schema")
    methods: List[str] = ["ivw", "divw", "mdivw"]
    lambda_: Union[float, Literal["auto"]] = Field(0.0, alias="lambda")
    pleiotropy: bool = False
    out: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    seed: int
    reps: int = 1000
    workers: int = 1
    bootstrap_reps: int = 1000
    beta: Optional[float] = None
    tau_in_residuals: bool = False
    grid: Optional[str] = None
    scenario: Dict[str, Any] = {}

    @field_validator("methods", mode="before")
    @classmethod
    def _methods(cls, value: Any) -> List[str]:
        return parse_methods(value)

    @field_validator("schema_", mode="before")
    @classmethod
    def _schema(cls, value: Any) -> ColumnSchema:
        if isinstance(value, ColumnSchema):
            return value
        return ColumnSchema.from_mapping(value)

    @field_validator("lambda_", mode="before")
    @classmethod
    def _lambda(cls, value: Any) -> Union[float, str]:
        if isinstance(value, str) and value.strip().lower() == "auto":
            return "auto"
        number = float(value)
        if number < 0:
            raise ValueError(f"lambda must be nonnegative or 'auto', got {value}")
        return number

    def resolve_lambda(self, p: int) -> float:
        """Numeric threshold; "auto" becomes sqrt(2 log p) for the post-join p."""
        return default_lambda(p) if self.lambda_ == "auto" else float(self.lambda_)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


class ConfigurationManager:
    """Merges environment defaults, an optional YAML run file and CLI flags."""

    def __init__(self):
        """Initialize configuration manager."""
        from dotenv import load_dotenv

        load_dotenv()

        self._yaml_config: Dict[str, Any] = {}
        self._defaults = {
            "seed": self._get_int_env("MDIVW_SEED", CONFIG["DEFAULT_SEED"]),
            "workers": self._get_int_env("MDIVW_WORKERS", CONFIG["WORKERS"]),
            "bootstrap_reps": self._get_int_env("MDIVW_BOOTSTRAP_REPS", CONFIG["BOOTSTRAP_REPS"]),
            "pleiotropy": self._get_bool_env("MDIVW_PLEIOTROPY", False),
        }

    def _get_bool_env(self, key: str, default: bool = False) -> bool:
        """Get boolean environment variable."""
        value = os.getenv(key, str(default)).lower()
        return value in ("true", "1", "yes", "on")

    def _get_int_env(self, key: str, default: int) -> int:
        """Get integer environment variable."""
        try:
            return int(os.getenv(key, str(default)))
        except ValueError:
            logger.warning(f"Invalid integer value for {key}, using default {default}")
            return default

    def load_yaml_config(self, config_path: str):
        """Load configuration from YAML file; a broken file stops the run."""
        try:
            with open(config_path, "r") as file:
                loaded = yaml.safe_load(file)
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"Failed to load YAML configuration from {config_path}: {e}")
            raise ConfigFileError(f"Cannot read configuration file {config_path}: {e}") from e
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigFileError(f"Configuration file {config_path} must contain a mapping")
        self._yaml_config = loaded
        logger.info(f"Loaded YAML configuration from {config_path}")

    def get_yaml_config(self) -> Dict[str, Any]:
        """Get YAML configuration."""
        return dict(self._yaml_config)

    def get_defaults(self) -> Dict[str, Any]:
        return dict(self._defaults)

    def resolve(self, command: str, flags: Dict[str, Any]) -> RunConfig:
        """
        Build the RunConfig for ``command``.

        Precedence: flags (values not None) > YAML file > environment defaults.
        Top-level YAML keys apply to every command; a section named after the
        command overrides them.
        """
        file_values = _normalise({k: v for k, v in self._yaml_config.items() if k not in get_args(Command)})
        file_values.update(_normalise(self._yaml_config.get(command) or {}))
        given = _normalise({k: v for k, v in flags.items() if v is not None})

        scenario = {**(file_values.pop("scenario", None) or {}), **(given.pop("scenario", None) or {})}
        merged = {**self._defaults, **file_values, **given, "command": command, "scenario": scenario}
        if "lambda" in scenario:
            merged.setdefault("lambda", scenario.pop("lambda"))
        logger.debug(f"Resolved {command} configuration: {merged}")
        return RunConfig(**merged)


def _normalise(values: Dict[str, Any]) -> Dict[str, Any]:
    """Map python-safe names and dashed YAML keys onto RunConfig aliases."""
    renamed = {"lambda_": "lambda", "schema_": "schema"}
    out = {}
    for key, value in values.items():
        key = key.replace("-", "_")
        out[renamed.get(key, key)] = value
    return out
