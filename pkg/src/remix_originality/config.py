import os
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .harmonics import DescriptorParams

# Load environment variables from .env if present
load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.environ.get(name, default).lower() in {"1", "true", "yes", "on"}


class Config:
    """Environment-level defaults for runs of the originality pipeline."""

    # Descriptor pipeline
    GRID_N = int(os.environ.get("REMIX_GRID_N", "64"))
    RADII = int(os.environ["REMIX_RADII"]) if os.environ.get("REMIX_RADII") else None
    MAX_DEGREE = int(os.environ.get("REMIX_MAX_DEGREE", "16"))
    BANDWIDTH = int(os.environ.get("REMIX_BANDWIDTH", "64"))
    DENSITY = float(os.environ.get("REMIX_DENSITY", "5000"))
    SEED = int(os.environ.get("REMIX_SEED", "42"))

    # Analysis
    ORIGINALITY_MODE = os.environ.get("REMIX_ORIGINALITY_MODE", "hybrid")
    CONFIDENCE = float(os.environ.get("REMIX_CONFIDENCE", "0.95"))
    DISTANCE_METRIC = os.environ.get("REMIX_DISTANCE_METRIC", "l2")
    OUTCOME_TRANSFORM = os.environ.get("REMIX_OUTCOME_TRANSFORM", "none")

    # Runtime
    JOBS = int(os.environ.get("REMIX_JOBS", "1"))
    LOG_LEVEL = os.environ.get("REMIX_LOG_LEVEL", "INFO")
    VERBOSE = _flag("REMIX_VERBOSE", "false")


class RunConfig(BaseModel):
    """One run's settings: flags > ``--config`` file > environment > defaults."""

    model_config = ConfigDict(validate_default=True)

    grid_n: int = Field(default_factory=lambda: Config.GRID_N)
    radii: int | None = Field(default_factory=lambda: Config.RADII)
    max_degree: int = Field(default_factory=lambda: Config.MAX_DEGREE)
    bandwidth: int = Field(default_factory=lambda: Config.BANDWIDTH)
    density: float = Field(default_factory=lambda: Config.DENSITY)
    seed: int = Field(default_factory=lambda: Config.SEED)

    mode: Literal["parent-min", "nearest-neighbor", "hybrid"] = Field(default_factory=lambda: Config.ORIGINALITY_MODE)
    confidence: float = Field(default_factory=lambda: Config.CONFIDENCE)
    metric: Literal["l2", "l1"] = Field(default_factory=lambda: Config.DISTANCE_METRIC)
    transform: Literal["none", "log1p"] = Field(default_factory=lambda: Config.OUTCOME_TRANSFORM)
    jobs: int = Field(default_factory=lambda: Config.JOBS, ge=1)

    corpus: Path | None = None
    cache: Path | None = None
    report: Path | None = None
    plot_data: Path | None = None
    figures: Path | None = None
    out: Path | None = None

    @field_validator("density")
    @classmethod
    def _positive_density(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"density must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _check_chain(self) -> "RunConfig":
        if self.grid_n < 8 or self.grid_n % 2:
            raise ValueError(f"grid_n must be even and at least 8, got {self.grid_n}")
        if self.radii is not None and not 1 <= self.radii <= self.grid_n // 2:
            raise ValueError(f"radii must lie in [1, {self.grid_n // 2}], got {self.radii}")
        if self.bandwidth < self.max_degree + 1:
            raise ValueError(f"bandwidth {self.bandwidth} must be at least max_degree+1={self.max_degree + 1}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")
        return self

    @property
    def effective_radii(self) -> int:
        return self.grid_n // 2 if self.radii is None else self.radii

    def descriptor_params(self) -> DescriptorParams:
        return DescriptorParams(
            n=self.grid_n,
            radii=self.effective_radii,
            max_degree=self.max_degree,
            bandwidth=self.bandwidth,
            density=self.density,
            seed=self.seed,
        )

    @classmethod
    def from_sources(cls, file_values: dict[str, Any] | None = None, **flags: Any) -> "RunConfig":
        """Merge config-file values with CLI flags (``None`` flags are ignored)."""
        values: dict[str, Any] = {key: value for key, value in (file_values or {}).items() if key in cls.model_fields}
        values.update({key: value for key, value in flags.items() if value is not None and key in cls.model_fields})
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ConfigError(f"invalid run configuration: {exc}") from exc


SYNTH_KEYS = {
    "designs": "n_designs",
    "remix_fraction": "remix_fraction",
    "original_fraction": "original_fraction",
    "perturbation": "perturbation",
    "likes_original_effect": "likes_original_effect",
    "likes_inherited_effect": "likes_inherited_effect",
    "makes_original_effect": "makes_original_effect",
    "makes_inherited_effect": "makes_inherited_effect",
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment.

    Keys may use dashes or underscores. Unknown keys are a ``ConfigError``.
    """
    known = set(RunConfig.model_fields) | set(SYNTH_KEYS)
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = value.strip()
    return values
