"""Pandera schema for harvest trial logs."""

from typing import Optional

import pandas as pd
import pandera as pa
from pandera.typing import Series

LEVEL_LABELS = ["zero", "low", "medium", "high"]


class HarvestLogSchema(pa.DataFrameModel):
    """
    Schema for harvest logs (CSV).

    One row per model and occlusion level.
    """

    model: Series[str] = pa.Field(
        nullable=False,
        description="Model that drove the picking trials"
    )

    level: Series[str] = pa.Field(
        nullable=False,
        isin=LEVEL_LABELS,
        description="Occlusion level of the presented fruits"
    )

    n_picked: Series[int] = pa.Field(
        ge=0,
        description="Fruits picked successfully"
    )

    n_total: Series[int] = pa.Field(
        ge=0,
        description="Fruits presented"
    )

    # Failure breakdown (optional)
    detection_failures: Optional[Series[pd.Int64Dtype]] = pa.Field(
        nullable=True,
        ge=0,
        description="Trials where no mask was produced"
    )

    localisation_failures: Optional[Series[pd.Int64Dtype]] = pa.Field(
        nullable=True,
        ge=0,
        description="Trials where a mask was produced but the gripper missed"
    )

    class Config:
        """Pandera configuration."""
        strict = True
        coerce = True

    @pa.dataframe_check
    def picked_within_total(cls, df: pd.DataFrame) -> Series[bool]:
        return df["n_picked"] <= df["n_total"]

    @pa.dataframe_check
    def one_row_per_level(cls, df: pd.DataFrame) -> Series[bool]:
        return ~df.duplicated(["model", "level"], keep=False)

    @pa.dataframe_check
    def failures_account_for_misses(cls, df: pd.DataFrame) -> Series[bool]:
        """When both failure counts are present they sum to the misses."""
        if "detection_failures" not in df or "localisation_failures" not in df:
            return pd.Series(True, index=df.index)
        both = df["detection_failures"].notna() & df["localisation_failures"].notna()
        misses = df["n_total"] - df["n_picked"]
        total = df["detection_failures"].fillna(0) + df["localisation_failures"].fillna(0)
        return ~both | (total == misses)


def validate_harvest_df(df: pd.DataFrame) -> pd.DataFrame:
    """
    Validate a harvest log DataFrame against schema.

    Raises:
        pandera.errors.SchemaErrors: If validation fails
    """
    return HarvestLogSchema.validate(df, lazy=True)
