"""Spatial pyramid pooling (fast): 1x1 conv, three chained max-pools, concat, 1x1 conv."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import ShapeError
from ..utils.validation import validate_odd_kernel
from .tensor import Tensor, combine, conv2d, window_pool

Trace = List[Tuple[str, Tuple[int, ...]]]


@dataclass(frozen=True)
class SppfConfig:
    """SPPF block parameters; the three pools share ``kernel``."""

    kernel: int
    entry_weight: Tensor
    entry_bias: Tensor
    exit_weight: Tensor
    exit_bias: Tensor

    def __post_init__(self):
        validate_odd_kernel(self.kernel, "SPPF kernel")
        hidden, cin, kh, kw = self.entry_weight.shape
        out, cat, eh, ew = self.exit_weight.shape
        if (kh, kw, eh, ew) != (1, 1, 1, 1):
            raise ShapeError("SPPF entry and exit convolutions must be 1x1")
        if cat != 4 * hidden:
            raise ShapeError(f"Exit conv expects {cat} channels, concat yields {4 * hidden}")
        if self.entry_bias.shape != (hidden,) or self.exit_bias.shape != (out,):
            raise ShapeError("SPPF bias shapes do not match their convolutions")

    @property
    def in_channels(self) -> int:
        return self.entry_weight.shape[1]

    @property
    def hidden_channels(self) -> int:
        return self.entry_weight.shape[0]

    @property
    def out_channels(self) -> int:
        return self.exit_weight.shape[0]

    @classmethod
    def random(
        cls,
        in_channels: int,
        hidden_channels: int,
        out_channels: int,
        kernel: int = 7,
        seed: int = 0,
    ) -> "SppfConfig":
        rng = np.random.default_rng(seed)
        return cls(
            kernel=kernel,
            entry_weight=Tensor(rng.normal(0.0, 1.0 / np.sqrt(in_channels), (hidden_channels, in_channels, 1, 1))),
            entry_bias=Tensor(rng.normal(0.0, 0.1, hidden_channels)),
            exit_weight=Tensor(
                rng.normal(0.0, 1.0 / np.sqrt(4 * hidden_channels), (out_channels, 4 * hidden_channels, 1, 1))
            ),
            exit_bias=Tensor(rng.normal(0.0, 0.1, out_channels)),
        )

    def with_kernel(self, kernel: int) -> "SppfConfig":
        return SppfConfig(kernel, self.entry_weight, self.entry_bias, self.exit_weight, self.exit_bias)

    def tensors(self) -> Dict[str, Tensor]:
        return {
            "entry.weight": self.entry_weight,
            "entry.bias": self.entry_bias,
            "exit.weight": self.exit_weight,
            "exit.bias": self.exit_bias,
        }

    def meta(self) -> dict:
        return {"kernel": self.kernel}

    @classmethod
    def from_tensors(cls, tensors: Dict[str, Tensor], meta: Optional[dict] = None) -> "SppfConfig":
        meta = meta or {}
        return cls(
            kernel=int(meta.get("kernel", 7)),
            entry_weight=tensors["entry.weight"],
            entry_bias=tensors["entry.bias"],
            exit_weight=tensors["exit.weight"],
            exit_bias=tensors["exit.bias"],
        )


def sppf_forward(f: Tensor, cfg: SppfConfig, trace: Optional[Trace] = None) -> Tensor:
    """
    Run the SPPF block.

    Args:
        f: in_channels x H x W feature map
        cfg: Block parameters
        trace: If given, receives ``(stage, shape)`` for every intermediate

    Returns:
        out_channels x H x W tensor
    """
    if f.ndim != 3 or f.shape[0] != cfg.in_channels:
        raise ShapeError(f"SPPF expects {cfg.in_channels} x H x W input, got {f.shape}")

    x = conv2d(f, cfg.entry_weight, cfg.entry_bias)
    stages = [x]
    for _ in range(3):
        stages.append(window_pool(stages[-1], "max", cfg.kernel))

    cat = stages[0]
    for stage in stages[1:]:
        cat = combine(cat, stage, "concat-channels")
    out = conv2d(cat, cfg.exit_weight, cfg.exit_bias)

    if trace is not None:
        trace.append(("entry", x.shape))
        for i, stage in enumerate(stages[1:], start=1):
            trace.append((f"pool{i}", stage.shape))
        trace.append(("concat", cat.shape))
        trace.append(("exit", out.shape))
    return out
