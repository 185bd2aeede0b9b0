"""Configuration loading (YAML -> pydantic)."""

from pathlib import Path
from typing import List, Literal, Optional, Tuple

import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

DEFAULT_CONFIG_PATH = Path("config/default.yml")


class _Section(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)


class PathsConfig(_Section):
    log_file: Optional[Path] = Path("artifacts/run.log")


class NNConfig(_Section):
    reduction_ratio: int = Field(16, ge=1)
    clamp_hidden: bool = True
    head_proto_channels: int = Field(32, ge=1)
    alpha_fn: float = Field(1.1, gt=0)
    alpha_fp: float = Field(0.9, gt=0)
    gradcheck_eps: float = Field(1e-5, gt=0)
    gradcheck_tolerance: float = Field(1e-5, gt=0)
    gradcheck_floor: float = Field(1e-3, gt=0)


class MasksConfig(_Section):
    border_policy: Literal["border-is-background", "border-is-neutral"] = "border-is-background"


class GeometryConfig(_Section):
    orientation: Tuple[float, float, float] = (-3.141592653589793, -1.5707963267948966, 0.0)
    safety_margin: float = Field(0.10, gt=0)
    enclose_offset: float = Field(0.02, ge=0)
    depth_scale: float = Field(0.001, gt=0)
    depth_window: int = Field(5, ge=1)
    segment_duration: float = Field(2.0, gt=0)
    segment_samples: int = Field(11, ge=2)


class EvaluationConfig(_Section):
    iou_thresholds: List[float] = Field(
        default_factory=lambda: [round(0.5 + 0.05 * i, 2) for i in range(10)]
    )
    recall_points: int = Field(101, ge=2)


class AugmentConfig(_Section):
    hflip: bool = True
    vflip: bool = True
    rotation: float = 15.0
    shear: float = 10.0
    exposure: float = 0.15
    noise_fraction: float = 0.0145
    variants_per_image: int = 2


class SynthConfig(_Section):
    width: int = Field(128, ge=16)
    height: int = Field(128, ge=16)
    fruit_radius: Tuple[int, int] = (14, 20)
    occluder: Literal["ellipse", "rect"] = "ellipse"
    tolerance: float = Field(0.02, gt=0)
    max_retries: int = Field(25, ge=1)


class DatasetConfig(_Section):
    augment: AugmentConfig = AugmentConfig()
    synth: SynthConfig = SynthConfig()


class LoggingConfig(_Section):
    level: str = "INFO"
    format: Optional[str] = None
    rotation: str = "10 MB"
    retention: str = "30 days"
    compression: str = "zip"


class AispConfig(_Section):
    """Full configuration tree; every field has a built-in default."""

    paths: PathsConfig = PathsConfig()
    nn: NNConfig = NNConfig()
    masks: MasksConfig = MasksConfig()
    geometry: GeometryConfig = GeometryConfig()
    evaluation: EvaluationConfig = EvaluationConfig()
    dataset: DatasetConfig = DatasetConfig()
    logging: LoggingConfig = LoggingConfig()


def load_config(config_path: Optional[Path] = None) -> AispConfig:
    """
    Load configuration from YAML.

    Args:
        config_path: Explicit config file. If None, ``config/default.yml`` is used
            when present, otherwise the built-in defaults.

    Returns:
        Validated configuration

    Raises:
        FileNotFoundError: If an explicitly given file does not exist
        pydantic.ValidationError: If a value is out of range
    """
    if config_path is None:
        if not DEFAULT_CONFIG_PATH.exists():
            logger.debug("No config/default.yml found, using built-in defaults")
            return AispConfig()
        config_path = DEFAULT_CONFIG_PATH

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    config = AispConfig.model_validate(raw)
    logger.debug(f"Loaded config from {config_path}")
    return config
