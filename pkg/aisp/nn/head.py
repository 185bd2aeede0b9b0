"""Prototype stack of the segmentation head."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import ParameterError, ShapeError
from .tensor import Tensor, conv2d, relu

Trace = List[Tuple[str, Tuple[int, ...]]]

# widened head (deep variants) and the stock head it replaces
DEEP_WIDTHS = (512, 64)
BASE_WIDTHS = (256, 32)
DEFAULT_PROTO_CHANNELS = 32


@dataclass(frozen=True)
class DeepHeadConfig:
    """
    Weights of the prototype stack:
    conv3x3(in -> mid), relu, conv3x3(mid -> mid), relu, conv1x1(mid -> proto).
    """

    conv1_weight: Tensor
    conv1_bias: Tensor
    conv2_weight: Tensor
    conv2_bias: Tensor
    conv3_weight: Tensor
    conv3_bias: Tensor

    def __post_init__(self):
        mid, cin, k1, _ = self.conv1_weight.shape
        if self.conv2_weight.shape != (mid, mid, 3, 3) or k1 != 3:
            raise ShapeError(
                f"Head 3x3 layers must be {mid}x{cin}x3x3 and {mid}x{mid}x3x3, "
                f"got {self.conv1_weight.shape} and {self.conv2_weight.shape}"
            )
        proto = self.conv3_weight.shape[0]
        if self.conv3_weight.shape != (proto, mid, 1, 1):
            raise ShapeError(f"Head output layer must be proto x {mid} x 1 x 1, got {self.conv3_weight.shape}")
        for name, bias, n in (
            ("conv1", self.conv1_bias, mid),
            ("conv2", self.conv2_bias, mid),
            ("conv3", self.conv3_bias, proto),
        ):
            if bias.shape != (n,):
                raise ShapeError(f"{name} bias must have shape ({n},), got {bias.shape}")

    @property
    def in_channels(self) -> int:
        return self.conv1_weight.shape[1]

    @property
    def mid_channels(self) -> int:
        return self.conv1_weight.shape[0]

    @property
    def proto_channels(self) -> int:
        return self.conv3_weight.shape[0]

    @classmethod
    def random(
        cls,
        in_channels: int = DEEP_WIDTHS[0],
        mid_channels: int = DEEP_WIDTHS[1],
        proto_channels: int = DEFAULT_PROTO_CHANNELS,
        seed: int = 0,
    ) -> "DeepHeadConfig":
        if min(in_channels, mid_channels, proto_channels) < 1:
            raise ParameterError("Head channel counts must be >= 1")
        rng = np.random.default_rng(seed)

        def he(shape):
            fan_in = shape[1] * shape[2] * shape[3]
            return Tensor(rng.normal(0.0, np.sqrt(2.0 / fan_in), shape))

        return cls(
            conv1_weight=he((mid_channels, in_channels, 3, 3)),
            conv1_bias=Tensor(rng.normal(0.0, 0.1, mid_channels)),
            conv2_weight=he((mid_channels, mid_channels, 3, 3)),
            conv2_bias=Tensor(rng.normal(0.0, 0.1, mid_channels)),
            conv3_weight=he((proto_channels, mid_channels, 1, 1)),
            conv3_bias=Tensor(rng.normal(0.0, 0.1, proto_channels)),
        )

    def tensors(self) -> Dict[str, Tensor]:
        return {
            "conv1.weight": self.conv1_weight,
            "conv1.bias": self.conv1_bias,
            "conv2.weight": self.conv2_weight,
            "conv2.bias": self.conv2_bias,
            "conv3.weight": self.conv3_weight,
            "conv3.bias": self.conv3_bias,
        }

    def meta(self) -> dict:
        return {}

    @classmethod
    def from_tensors(cls, tensors: Dict[str, Tensor], meta: Optional[dict] = None) -> "DeepHeadConfig":
        return cls(**{key.replace(".", "_"): value for key, value in tensors.items()})


def deep_head_proto_forward(f: Tensor, cfg: DeepHeadConfig, trace: Optional[Trace] = None) -> Tensor:
    """
    Prototype masks from the head input feature map.

    Spatial size is preserved (3x3 layers use padding 1). When ``trace`` is a
    list it receives the shape of every stage.
    """
    if f.ndim != 3 or f.shape[0] != cfg.in_channels:
        raise ShapeError(f"Head expects {cfg.in_channels} x H x W input, got {f.shape}")

    h1 = relu(conv2d(f, cfg.conv1_weight, cfg.conv1_bias, padding=1))
    h2 = relu(conv2d(h1, cfg.conv2_weight, cfg.conv2_bias, padding=1))
    out = conv2d(h2, cfg.conv3_weight, cfg.conv3_bias)

    if trace is not None:
        trace.extend([("input", f.shape), ("conv1", h1.shape), ("conv2", h2.shape), ("proto", out.shape)])
    return out
