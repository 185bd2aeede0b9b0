"""Finite-difference verification of analytic gradients."""

from dataclasses import asdict, dataclass
from typing import Callable, Optional, Union

import numpy as np
from loguru import logger

from ..errors import EvaluationError, ParameterError, ShapeError
from .tensor import Tensor, gradients


@dataclass(frozen=True)
class GradCheckReport:
    """Outcome of a central-difference gradient check."""

    max_abs_err: float
    max_rel_err: float
    n_elements: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_err <= self.tolerance

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def _scalar(out: Tensor) -> float:
    if not isinstance(out, Tensor) or out.size != 1:
        shape = getattr(out, "shape", None)
        raise ShapeError(f"Checked function must return a scalar tensor, got shape {shape}")
    value = out.item()
    if not np.isfinite(value):
        raise EvaluationError("Checked function returned a non-finite value")
    return value


def grad_check(
    f: Callable[[Tensor], Tensor],
    x: Union[Tensor, np.ndarray],
    eps: float = 1e-5,
    tolerance: float = 1e-5,
    floor: float = 1e-3,
    max_elements: Optional[int] = None,
    seed: int = 0,
) -> GradCheckReport:
    """
    Compare the reverse-mode gradient of ``f`` at ``x`` with central differences.

    The relative error of an element is ``|a - n| / max(|a|, |n|, floor)``;
    the floor keeps near-zero gradients from dominating the maximum.

    Args:
        f: Scalar-valued function of one tensor
        x: Point of evaluation
        eps: Finite-difference step
        tolerance: Pass threshold on the max relative error
        floor: Magnitude floor of the relative error denominator
        max_elements: Check a seeded random subset of this many elements
        seed: Seed of the subset draw

    Returns:
        GradCheckReport
    """
    if not eps > 0 or not tolerance > 0 or not floor > 0:
        raise ParameterError("eps, tolerance and floor must be > 0")

    base = np.array(x.data if isinstance(x, Tensor) else x, dtype=np.float64)
    shape = base.shape
    xt = Tensor(base, requires_grad=True)
    out = f(xt)
    _scalar(out)
    (analytic,) = gradients(out, [xt])
    analytic = analytic.ravel()

    indices = np.arange(base.size)
    if max_elements is not None and max_elements < base.size:
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(base.size, size=max_elements, replace=False))

    work = base.ravel().copy()
    numeric = np.empty(len(indices))
    for n, i in enumerate(indices):
        original = work[i]
        work[i] = original + eps
        f_plus = _scalar(f(Tensor(work.reshape(shape))))
        work[i] = original - eps
        f_minus = _scalar(f(Tensor(work.reshape(shape))))
        work[i] = original
        numeric[n] = (f_plus - f_minus) / (2.0 * eps)

    a = analytic[indices]
    abs_err = np.abs(a - numeric)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(numeric)), floor)
    rel_err = abs_err / denom

    report = GradCheckReport(
        max_abs_err=float(abs_err.max(initial=0.0)),
        max_rel_err=float(rel_err.max(initial=0.0)),
        n_elements=int(len(indices)),
        tolerance=tolerance,
    )
    logger.debug(
        f"grad_check: {report.n_elements} elements, "
        f"max_rel_err={report.max_rel_err:.3e}, passed={report.passed}"
    )
    return report
