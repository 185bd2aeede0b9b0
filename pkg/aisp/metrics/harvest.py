"""
Harvest success per occlusion level: H = N_picked / N_total.

Ratios are kept as exact fractions. Percentages are rendered truncated to two
decimals (46/54 -> 85.18, 52/54 -> 96.29), the way field trial tables report them.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

import pandas as pd
from loguru import logger

from ..errors import ConsistencyError, ParameterError, UndefinedLevelError
from ..schemas.harvest import validate_harvest_df
from .occlusion import OcclusionLevel


@dataclass(frozen=True)
class HarvestCount:
    n_picked: int
    n_total: int
    detection_failures: Optional[int] = None
    localisation_failures: Optional[int] = None

    def __post_init__(self):
        if self.n_picked < 0 or self.n_total < 0:
            raise ParameterError(f"Counts must be >= 0, got {self.n_picked}/{self.n_total}")
        if self.n_picked > self.n_total:
            raise ConsistencyError(f"Picked {self.n_picked} exceeds presented {self.n_total}")
        failures = (self.detection_failures, self.localisation_failures)
        if all(f is not None for f in failures) and sum(failures) != self.n_total - self.n_picked:
            raise ConsistencyError(
                f"Failure counts {failures} do not add up to {self.n_total - self.n_picked} misses"
            )

    @property
    def ratio(self) -> Fraction:
        if self.n_total == 0:
            raise UndefinedLevelError("Harvest ratio is undefined without trials")
        return Fraction(self.n_picked, self.n_total)


@dataclass(frozen=True)
class HarvestLog:
    model: str
    levels: Mapping[OcclusionLevel, HarvestCount] = field(default_factory=dict)

    def total(self) -> HarvestCount:
        return HarvestCount(
            sum(c.n_picked for c in self.levels.values()),
            sum(c.n_total for c in self.levels.values()),
        )

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "model": self.model,
                "level": level.label,
                "n_picked": c.n_picked,
                "n_total": c.n_total,
                "detection_failures": c.detection_failures,
                "localisation_failures": c.localisation_failures,
            }
            for level, c in sorted(self.levels.items())
        ]
        return validate_harvest_df(pd.DataFrame(rows))


def logs_from_frame(df: pd.DataFrame) -> List[HarvestLog]:
    """One HarvestLog per model, in order of first appearance."""
    df = validate_harvest_df(df)
    logs = []
    for model, group in df.groupby("model", sort=False):
        levels = {}
        for row in group.itertuples(index=False):
            levels[OcclusionLevel.from_label(row.level)] = HarvestCount(
                int(row.n_picked),
                int(row.n_total),
                _optional_int(getattr(row, "detection_failures", None)),
                _optional_int(getattr(row, "localisation_failures", None)),
            )
        logs.append(HarvestLog(str(model), levels))
    logger.debug(f"Read harvest logs for {len(logs)} models")
    return logs


def _optional_int(value) -> Optional[int]:
    return None if value is None or pd.isna(value) else int(value)


def format_percent(ratio: Fraction) -> str:
    """Percentage truncated (not rounded) to two decimals."""
    hundredths = (ratio.numerator * 10000) // ratio.denominator
    return f"{hundredths // 100}.{hundredths % 100:02d}"


@dataclass(frozen=True)
class LevelSuccess:
    n_picked: int
    n_total: int
    ratio: Fraction

    @property
    def percent(self) -> str:
        return format_percent(self.ratio)

    def as_dict(self) -> dict:
        return {
            "n_picked": self.n_picked,
            "n_total": self.n_total,
            "ratio": float(self.ratio),
            "percent": self.percent,
        }


@dataclass(frozen=True)
class HarvestReport:
    model: str
    per_level: Dict[OcclusionLevel, LevelSuccess]
    overall: LevelSuccess

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "per_level": {level.label: s.as_dict() for level, s in sorted(self.per_level.items())},
            "overall": self.overall.as_dict(),
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"model": self.model, "level": level.short, "H": s.n_picked, "N": s.n_total, "H (%)": s.percent}
            for level, s in sorted(self.per_level.items())
        ]
        return pd.DataFrame(rows, columns=["model", "level", "H", "N", "H (%)"])


def harvest_success(log: HarvestLog) -> HarvestReport:
    """
    Exact per-level and overall success ratios.

    Raises:
        UndefinedLevelError: If a level has no trials
    """
    per_level = {}
    for level, count in sorted(log.levels.items()):
        if count.n_total == 0:
            raise UndefinedLevelError(f"{log.model}: no trials at {level.label} occlusion")
        per_level[level] = LevelSuccess(count.n_picked, count.n_total, count.ratio)
    total = log.total()
    if total.n_total == 0:
        raise UndefinedLevelError(f"{log.model}: harvest log has no trials")
    return HarvestReport(log.model, per_level, LevelSuccess(total.n_picked, total.n_total, total.ratio))


def compare_harvest(a: HarvestReport, b: HarvestReport) -> Dict[OcclusionLevel, Fraction]:
    """Percentage-point difference ``b - a`` for every level present in both."""
    shared = sorted(set(a.per_level) & set(b.per_level))
    return {level: (b.per_level[level].ratio - a.per_level[level].ratio) * 100 for level in shared}
