"""
fuzzy-psi configuration and settings management
"""

import json
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import dotenv_values, load_dotenv

OUTPUT_DIR_ENV = "FUZZY_PSI_OUTPUT_DIR"

KNOWN_FORMATS = ("csv", "json")
KNOWN_SUITES = (
    "coeff",
    "weil",
    "basis",
    "orthogonality",
    "norms",
    "associativity",
    "hahn",
    "matrices",
    "geometry",
    "classical",
    "structure",
    "spinor",
)


@dataclass
class AlgebraConfig:
    """Label ranges and the Xi cache"""
    n_max: str = "2"
    hard_cap: str = "4"
    allow_cap_override: bool = False
    warm_cache: bool = True


@dataclass
class PointConfig:
    """Default evaluation point; k sets Rh = eps (k + 1/2) when rhat is unset"""
    eps: str = "1"
    k: Optional[str] = "1"
    rhat: Optional[str] = None


@dataclass
class OutputConfig:
    """Table output"""
    format: str = "csv"
    out_dir: str = "output"
    float_precision: int = 12
    include_float: bool = False


@dataclass
class VerifyConfig:
    """Property-suite parameters"""
    seed: int = 1234
    random_triples: int = 100
    float_tolerance: float = 1e-10
    classical_samples: int = 20
    nullity_margin: int = 2
    suites: List[str] = field(default_factory=list)


@dataclass
class RuntimeConfig:
    """Parallelism"""
    jobs: int = 1
    show_progress: bool = False


@dataclass
class LoggingConfig:
    """Logging configuration"""
    log_level: str = "WARNING"
    log_dir: str = "logs"
    max_log_size: int = 10485760  # 10MB
    backup_count: int = 5


# flat key -> (section, attribute)
FLAT_KEYS = {
    "nmax": ("algebra", "n_max"),
    "hard_cap": ("algebra", "hard_cap"),
    "eps": ("point", "eps"),
    "k": ("point", "k"),
    "rhat": ("point", "rhat"),
    "format": ("output", "format"),
    "out": ("output", "out_dir"),
    "precision": ("output", "float_precision"),
    "jobs": ("runtime", "jobs"),
    "seed": ("verify", "seed"),
    "suite": ("verify", "suites"),
    "log_level": ("logging", "log_level"),
}

SECTIONS = ("algebra", "point", "output", "verify", "runtime", "logging")


def _convert(current: Any, value: Any) -> Any:
    """Coerce a text value to the type of the current setting"""
    if not isinstance(value, str):
        return value
    if isinstance(current, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if isinstance(current, list):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class Settings:
    """
    fuzzy-psi settings

    Defaults come from the dataclasses above, then the optional config file.
    Command-line flags are applied on top by the CLI.
    """

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize settings

        Args:
            config_file: YAML, JSON or flat key = value file
        """
        load_dotenv()

        self.algebra = AlgebraConfig()
        self.point = PointConfig()
        self.output = OutputConfig()
        self.verify = VerifyConfig()
        self.runtime = RuntimeConfig()
        self.logging = LoggingConfig()

        self.app_name = "fuzzy-psi"
        self.app_version = "1.0.0"
        self.unknown_keys: List[str] = []

        output_dir = os.getenv(OUTPUT_DIR_ENV)
        if output_dir:
            self.output.out_dir = output_dir

        if config_file:
            self.load_from_file(config_file)

    def load_from_file(self, config_file: str):
        """
        Load configuration from file

        Args:
            config_file: Path ending in .yaml/.yml, .json, or .conf/.cfg/.env/.txt
        """
        config_path = Path(config_file)

        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_file}")

        if config_path.suffix in [".yaml", ".yml"]:
            with open(config_path, "r") as f:
                self._update_from_dict(yaml.safe_load(f) or {})
        elif config_path.suffix == ".json":
            with open(config_path, "r") as f:
                self._update_from_dict(json.load(f))
        elif config_path.suffix in [".conf", ".cfg", ".env", ".txt"]:
            self.update_from_flat(dotenv_values(config_path))
        else:
            raise ValueError(f"Unsupported config file format: {config_path.suffix}")

    def _update_from_dict(self, config_data: Dict[str, Any]):
        for section in SECTIONS:
            if section in config_data:
                target = getattr(self, section)
                for key, value in (config_data[section] or {}).items():
                    if hasattr(target, key):
                        setattr(target, key, _convert(getattr(target, key), value))
                    else:
                        self.unknown_keys.append(f"{section}.{key}")

    def update_from_flat(self, values: Dict[str, Optional[str]]):
        """Apply flat key = value pairs (config files and CLI overrides)"""
        for key, value in values.items():
            if key not in FLAT_KEYS:
                self.unknown_keys.append(key)
                continue
            if value is None:
                continue
            section, attribute = FLAT_KEYS[key]
            target = getattr(self, section)
            setattr(target, attribute, _convert(getattr(target, attribute), value))

    def save_to_file(self, config_file: str, format: str = "yaml"):
        config_data = self.get_all()
        config_path = Path(config_file)

        if format == "yaml":
            with open(config_path, "w") as f:
                yaml.dump(config_data, f, default_flow_style=False, indent=2)
        elif format == "json":
            with open(config_path, "w") as f:
                json.dump(config_data, f, indent=2)
        else:
            raise ValueError(f"Unsupported format: {format}")

    def get_all(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"app_name": self.app_name, "app_version": self.app_version}
        for section in SECTIONS:
            data[section] = asdict(getattr(self, section))
        return data

    def validate(self) -> Dict[str, Any]:
        """Validate configuration"""
        issues = []

        try:
            n_max = Fraction(self.algebra.n_max)
            hard_cap = Fraction(self.algebra.hard_cap)
            if (n_max * 2).denominator != 1 or n_max < 0:
                issues.append(f"n_max must be a non-negative half-integer, got {self.algebra.n_max}")
            elif n_max > hard_cap and not self.algebra.allow_cap_override:
                issues.append(f"n_max {self.algebra.n_max} exceeds the hard cap {self.algebra.hard_cap}")
        except (ValueError, ZeroDivisionError):
            issues.append(f"n_max/hard_cap are not fractions: {self.algebra.n_max}, {self.algebra.hard_cap}")

        try:
            if Fraction(self.point.eps) < 0:
                issues.append("eps must be non-negative")
            if self.point.rhat is not None and Fraction(self.point.rhat) <= 0:
                issues.append("rhat must be positive")
            if self.point.k is not None and Fraction(self.point.k) < 0:
                issues.append("k must be non-negative")
        except (ValueError, ZeroDivisionError):
            issues.append("eps, k and rhat must be rationals")

        if self.runtime.jobs < 1:
            issues.append("jobs must be at least 1")

        if self.output.format not in KNOWN_FORMATS:
            issues.append(f"Unknown output format: {self.output.format}")

        for suite in self.verify.suites:
            if suite not in KNOWN_SUITES:
                issues.append(f"Unknown verification suite: {suite}")

        for key in self.unknown_keys:
            issues.append(f"Unknown config key: {key}")

        return {"valid": len(issues) == 0, "issues": issues}


# Global settings instance
settings = Settings()
