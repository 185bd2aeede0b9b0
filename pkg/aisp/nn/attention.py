"""
Global attention block: channel attention followed by spatial attention.

    Mc = sigmoid(MLP(avgpool(F1)) + MLP(maxpool(F1)))        shape C
    Ms = sigmoid(conv7x7([avg_c(F2); max_c(F2)]))             shape 1 x H x W
    F2 = Mc * F1,  F3 = Ms * F2

The MLP is shared between both pooled descriptors.
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..errors import ParameterError, ShapeError
from .tensor import (
    Tensor,
    channel_pool,
    combine,
    conv2d,
    global_pool,
    linear,
    relu,
    sigmoid_map,
)

SPATIAL_KERNEL = 7


def hidden_width(channels: int, reduction_ratio: int, clamp: bool = True) -> int:
    """Bottleneck width ``C // r``; clamped to 1 or rejected when ``C < r``."""
    if channels < 1 or reduction_ratio < 1:
        raise ParameterError(f"channels and reduction ratio must be >= 1 ({channels}, {reduction_ratio})")
    hidden = channels // reduction_ratio
    if hidden < 1:
        if not clamp:
            raise ParameterError(
                f"{channels} channels cannot be reduced by ratio {reduction_ratio}"
            )
        hidden = 1
    return hidden


@dataclass(frozen=True)
class ChannelMlp:
    """Two-layer bottleneck MLP: C -> hidden -> C with ReLU between."""

    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor

    def __post_init__(self):
        hidden, channels = self.w1.shape
        if self.b1.shape != (hidden,) or self.w2.shape != (channels, hidden) or self.b2.shape != (channels,):
            raise ShapeError(
                f"Inconsistent MLP shapes: w1 {self.w1.shape}, b1 {self.b1.shape}, "
                f"w2 {self.w2.shape}, b2 {self.b2.shape}"
            )

    @property
    def channels(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden(self) -> int:
        return self.w1.shape[0]

    @classmethod
    def random(
        cls,
        channels: int,
        reduction_ratio: int,
        rng: np.random.Generator,
        clamp_hidden: bool = True,
    ) -> "ChannelMlp":
        hidden = hidden_width(channels, reduction_ratio, clamp_hidden)
        return cls(
            w1=Tensor(rng.normal(0.0, 1.0 / np.sqrt(channels), (hidden, channels))),
            b1=Tensor(rng.normal(0.0, 0.1, hidden)),
            w2=Tensor(rng.normal(0.0, 1.0 / np.sqrt(hidden), (channels, hidden))),
            b2=Tensor(rng.normal(0.0, 0.1, channels)),
        )


def mlp_channel(z: Tensor, mlp: ChannelMlp) -> Tensor:
    """``W2 relu(W1 z + b1) + b2`` for a channel descriptor ``z``."""
    if z.shape != (mlp.channels,):
        raise ShapeError(f"Descriptor of shape {z.shape} does not fit an MLP over {mlp.channels} channels")
    return linear(relu(linear(z, mlp.w1, mlp.b1)), mlp.w2, mlp.b2)


@dataclass(frozen=True)
class GamParams:
    """Parameters of one global attention block."""

    mlp: ChannelMlp
    spatial_weight: Tensor
    spatial_bias: Tensor
    reduction_ratio: int = 16

    def __post_init__(self):
        if self.spatial_weight.shape != (1, 2, SPATIAL_KERNEL, SPATIAL_KERNEL):
            raise ShapeError(
                f"Spatial kernel must be 1x2x{SPATIAL_KERNEL}x{SPATIAL_KERNEL}, "
                f"got {self.spatial_weight.shape}"
            )
        if self.spatial_bias.shape != (1,):
            raise ShapeError(f"Spatial bias must have shape (1,), got {self.spatial_bias.shape}")
        if self.reduction_ratio < 1:
            raise ParameterError(f"reduction_ratio must be >= 1, got {self.reduction_ratio}")

    @property
    def channels(self) -> int:
        return self.mlp.channels

    @classmethod
    def random(
        cls,
        channels: int,
        reduction_ratio: int = 16,
        seed: int = 0,
        clamp_hidden: bool = True,
    ) -> "GamParams":
        rng = np.random.default_rng(seed)
        mlp = ChannelMlp.random(channels, reduction_ratio, rng, clamp_hidden)
        fan_in = 2 * SPATIAL_KERNEL * SPATIAL_KERNEL
        return cls(
            mlp=mlp,
            spatial_weight=Tensor(rng.normal(0.0, 1.0 / np.sqrt(fan_in), (1, 2, SPATIAL_KERNEL, SPATIAL_KERNEL))),
            spatial_bias=Tensor(rng.normal(0.0, 0.1, 1)),
            reduction_ratio=reduction_ratio,
        )

    def tensors(self) -> Dict[str, Tensor]:
        return {
            "mlp.w1": self.mlp.w1,
            "mlp.b1": self.mlp.b1,
            "mlp.w2": self.mlp.w2,
            "mlp.b2": self.mlp.b2,
            "spatial.weight": self.spatial_weight,
            "spatial.bias": self.spatial_bias,
        }

    def meta(self) -> dict:
        return {"reduction_ratio": self.reduction_ratio}

    @classmethod
    def from_tensors(cls, tensors: Dict[str, Tensor], meta: Optional[dict] = None) -> "GamParams":
        meta = meta or {}
        mlp = ChannelMlp(tensors["mlp.w1"], tensors["mlp.b1"], tensors["mlp.w2"], tensors["mlp.b2"])
        return cls(
            mlp=mlp,
            spatial_weight=tensors["spatial.weight"],
            spatial_bias=tensors["spatial.bias"],
            reduction_ratio=int(meta.get("reduction_ratio", 16)),
        )


def _check_input(f: Tensor, params: GamParams) -> None:
    if f.ndim != 3:
        raise ShapeError(f"Attention input must be C x H x W, got {f.shape}")
    if f.shape[0] != params.channels:
        raise ShapeError(f"Input has {f.shape[0]} channels, block expects {params.channels}")


def gam_channel_attention(f1: Tensor, params: GamParams) -> Tensor:
    """Channel weights in (0, 1), shape C."""
    _check_input(f1, params)
    a = mlp_channel(global_pool(f1, "avg"), params.mlp)
    m = mlp_channel(global_pool(f1, "max"), params.mlp)
    return sigmoid_map(combine(a, m, "add"))


def gam_spatial_attention(f2: Tensor, params: GamParams) -> Tensor:
    """Spatial weights in (0, 1), shape 1 x H x W."""
    _check_input(f2, params)
    descriptor = combine(channel_pool(f2, "avg"), channel_pool(f2, "max"), "concat-channels")
    logits = conv2d(descriptor, params.spatial_weight, params.spatial_bias, padding=SPATIAL_KERNEL // 2)
    return sigmoid_map(logits)


def gam_forward(f1: Tensor, params: GamParams) -> Tensor:
    """Refined map F3, same shape as ``f1``."""
    f2 = combine(f1, gam_channel_attention(f1, params), "mul")
    return combine(f2, gam_spatial_attention(f2, params), "mul")
