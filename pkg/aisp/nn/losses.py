"""
Training losses: asymmetric mask BCE, class BCE, CIoU box loss and their weighted total.

    L_total = lambda_box * L_ciou + lambda_mask * L_asym_bce + lambda_cls * L_bce
"""

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ParameterError, ShapeError
from .tensor import Tensor, as_tensor

CLAMP_EPS = 1e-7


class AsymConfig(BaseModel):
    """False-negative / false-positive weights of the mask loss."""

    model_config = ConfigDict(frozen=True)

    alpha_fn: float = Field(1.1, gt=0)
    alpha_fp: float = Field(0.9, gt=0)


class LossWeights(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_box: float = Field(1.0, ge=0)
    lambda_mask: float = Field(1.0, ge=0)
    lambda_cls: float = Field(1.0, ge=0)


SYMMETRIC = AsymConfig(alpha_fn=1.0, alpha_fp=1.0)


def asym_bce(p: Tensor, y: Tensor, cfg: AsymConfig = AsymConfig(), eps: float = CLAMP_EPS) -> Tensor:
    """
    Mean of ``-[a_fn * y * log p + a_fp * (1 - y) * log(1 - p)]``.

    ``p`` is clamped to ``[eps, 1 - eps]``; the clamp has zero derivative
    outside that interval.

    Returns:
        0-d tensor (use ``float()`` for the value)
    """
    p, y = as_tensor(p), as_tensor(y)
    if p.shape != y.shape:
        raise ShapeError(f"Prediction shape {p.shape} does not match target {y.shape}")
    if p.size == 0:
        raise ShapeError("Cannot compute a loss over an empty tensor")

    pd, yd = p.data, y.data
    pc = np.clip(pd, eps, 1.0 - eps)
    log_p, log_q = np.log(pc), np.log(1.0 - pc)
    n = pd.size
    value = np.mean(-(cfg.alpha_fn * yd * log_p + cfg.alpha_fp * (1.0 - yd) * log_q))

    def vjp(g: np.ndarray):
        inside = (pd >= eps) & (pd <= 1.0 - eps)
        gp = -(cfg.alpha_fn * yd / pc - cfg.alpha_fp * (1.0 - yd) / (1.0 - pc)) * inside / n
        gy = -(cfg.alpha_fn * log_p - cfg.alpha_fp * log_q) / n
        return (g * gp, g * gy)

    return Tensor.from_op(np.asarray(value), (p, y), vjp)


def bce(p: Tensor, y: Tensor, eps: float = CLAMP_EPS) -> Tensor:
    """Standard binary cross-entropy (asymmetric BCE with unit weights)."""
    return asym_bce(p, y, SYMMETRIC, eps)


def mask_loss(p: Tensor, y: Tensor, asymmetric: bool, cfg: AsymConfig = AsymConfig()) -> Tensor:
    return asym_bce(p, y, cfg) if asymmetric else bce(p, y)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by centre and size."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        values = (self.cx, self.cy, self.w, self.h)
        if not all(math.isfinite(v) for v in values):
            raise ParameterError(f"Box values must be finite: {values}")
        if self.w <= 0 or self.h <= 0:
            raise ParameterError(f"Box width and height must be > 0, got {self.w}x{self.h}")

    @property
    def x0(self) -> float:
        return self.cx - self.w / 2

    @property
    def x1(self) -> float:
        return self.cx + self.w / 2

    @property
    def y0(self) -> float:
        return self.cy - self.h / 2

    @property
    def y1(self) -> float:
        return self.cy + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h


def box_iou(a: Box, b: Box) -> float:
    iw = max(0.0, min(a.x1, b.x1) - max(a.x0, b.x0))
    ih = max(0.0, min(a.y1, b.y1) - max(a.y0, b.y0))
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def ciou_loss(pred: Box, gt: Box) -> float:
    """Complete-IoU loss: ``1 - IoU + rho^2 / c^2 + alpha * v``."""
    iou = box_iou(pred, gt)
    rho2 = (pred.cx - gt.cx) ** 2 + (pred.cy - gt.cy) ** 2
    cw = max(pred.x1, gt.x1) - min(pred.x0, gt.x0)
    ch = max(pred.y1, gt.y1) - min(pred.y0, gt.y0)
    c2 = cw**2 + ch**2
    v = (4.0 / math.pi**2) * (math.atan(gt.w / gt.h) - math.atan(pred.w / pred.h)) ** 2
    alpha = v / ((1.0 - iou) + v) if v > 0 else 0.0
    return 1.0 - iou + rho2 / c2 + alpha * v


def total_loss(box: float, mask: float, cls: float, w: LossWeights = LossWeights()) -> float:
    terms = (float(box), float(mask), float(cls))
    if not all(math.isfinite(t) for t in terms):
        raise ParameterError(f"Loss components must be finite: {terms}")
    return w.lambda_box * terms[0] + w.lambda_mask * terms[1] + w.lambda_cls * terms[2]
