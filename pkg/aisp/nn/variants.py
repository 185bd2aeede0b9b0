"""
Ablation variants of the segmentation model.

Each variant toggles the architectural changes: number of global attention
blocks, SPPF kernel, deepened prototype head and asymmetric mask loss. A
second attention block always takes the place of the C2f-PSA block.
"""

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ParameterError
from .head import BASE_WIDTHS, DEEP_WIDTHS

# attention block slots, in the order they are filled
GAM_PLACEMENTS = ("neck_end", "c2psa_replacement")


class ModelVariant(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    gam_count: int = Field(ge=0, le=len(GAM_PLACEMENTS))
    sppf_kernel: int = 5
    deep_head: bool = False
    asym_loss: bool = False
    keeps_c2psa: bool = True

    @model_validator(mode="after")
    def _check(self) -> "ModelVariant":
        if self.sppf_kernel not in (5, 7):
            raise ValueError(f"sppf_kernel must be 5 or 7, got {self.sppf_kernel}")
        if self.keeps_c2psa != (self.gam_count < 2):
            raise ValueError("the second attention block replaces C2f-PSA")
        return self

    @property
    def gam_placements(self) -> Tuple[str, ...]:
        return GAM_PLACEMENTS[: self.gam_count]

    @property
    def head_widths(self) -> Tuple[int, int]:
        """(input, intermediate) channel widths of the prototype stack."""
        return DEEP_WIDTHS if self.deep_head else BASE_WIDTHS


VARIANTS: Dict[str, ModelVariant] = {
    v.name: v
    for v in (
        ModelVariant(name="B", gam_count=0),
        ModelVariant(name="G-v1", gam_count=1),
        ModelVariant(name="G-v2", gam_count=2, keeps_c2psa=False),
        ModelVariant(name="G-v3", gam_count=2, keeps_c2psa=False, sppf_kernel=7),
        ModelVariant(name="G-D-v1", gam_count=2, keeps_c2psa=False, deep_head=True),
        ModelVariant(name="G-D-v2", gam_count=2, keeps_c2psa=False, sppf_kernel=7, deep_head=True),
        ModelVariant(
            name="G-D-A", gam_count=2, keeps_c2psa=False, sppf_kernel=7, deep_head=True, asym_loss=True
        ),
    )
}


def get_variant(name: str) -> ModelVariant:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ParameterError(f"Unknown model variant {name!r}; choose from {', '.join(VARIANTS)}") from None
