"""Check registry: named gradient, shape and loss-law checks for a model variant."""

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from loguru import logger

from ..utils.config import NNConfig
from .attention import GamParams, gam_forward
from .gradcheck import grad_check
from .head import DeepHeadConfig, deep_head_proto_forward
from .losses import AsymConfig, asym_bce, bce, mask_loss
from .sppf import SppfConfig, sppf_forward
from .tensor import Tensor, combine, gradients, sigmoid_map, tensor_sum
from .variants import ModelVariant


@dataclass
class CheckDefinition:
    """Definition of a check."""
    name: str
    version: str
    category: str  # 'gradient', 'shape', 'law'
    run_func: Callable[[], Dict[str, Any]]
    description: str


@dataclass
class CheckResult:
    name: str
    category: str
    passed: bool
    seconds: float
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "category": self.category,
            "passed": self.passed,
            "seconds": round(self.seconds, 4),
            "detail": self.detail,
        }


class CheckRegistry:
    """Registry of verification checks."""

    def __init__(self):
        self._checks: Dict[str, CheckDefinition] = {}

    def register(
        self,
        name: str,
        version: str,
        category: str,
        run_func: Callable[[], Dict[str, Any]],
        description: str,
    ) -> None:
        """
        Register a check.

        Args:
            name: Check name (unique identifier)
            version: Check version
            category: Category (gradient, shape, law)
            run_func: Callable returning a detail dict with a boolean ``passed``
            description: Human-readable description
        """
        if name in self._checks:
            logger.warning(f"Overwriting existing check: {name}")
        self._checks[name] = CheckDefinition(name, version, category, run_func, description)
        logger.debug(f"Registered check: {name} v{version}")

    def get(self, name: str) -> CheckDefinition:
        if name not in self._checks:
            raise KeyError(f"Check not found: {name}")
        return self._checks[name]

    def list_checks(self, category: Optional[str] = None) -> List[CheckDefinition]:
        checks = list(self._checks.values())
        if category:
            checks = [c for c in checks if c.category == category]
        return checks

    def run(self, name: str) -> CheckResult:
        check = self.get(name)
        start = time.perf_counter()
        detail = check.run_func()
        elapsed = time.perf_counter() - start
        result = CheckResult(check.name, check.category, bool(detail.pop("passed")), elapsed, detail)
        level = "DEBUG" if result.passed else "WARNING"
        logger.log(level, f"Check {name}: {'pass' if result.passed else 'FAIL'} ({elapsed:.2f}s)")
        return result

    def run_all(self, category: Optional[str] = None) -> List[CheckResult]:
        results = [self.run(c.name) for c in self.list_checks(category)]
        logger.info(f"Ran {len(results)} checks, {sum(not r.passed for r in results)} failed")
        return results


def _weighted_sum(out: Tensor, weights: np.ndarray) -> Tensor:
    return tensor_sum(combine(out, Tensor(weights), "mul"))


def _report(report) -> Dict[str, Any]:
    return report.as_dict()


def build_registry(variant: ModelVariant, cfg: NNConfig = NNConfig(), seed: int = 0) -> CheckRegistry:
    """Register the checks that apply to ``variant``."""
    registry = CheckRegistry()
    rng = np.random.default_rng(seed)
    tol = dict(eps=cfg.gradcheck_eps, tolerance=cfg.gradcheck_tolerance, floor=cfg.gradcheck_floor)
    asym = AsymConfig(alpha_fn=cfg.alpha_fn, alpha_fp=cfg.alpha_fp)

    if variant.gam_count:
        gam = GamParams.random(16, cfg.reduction_ratio, seed=seed, clamp_hidden=cfg.clamp_hidden)
        gam_x = rng.normal(size=(16, 6, 6))
        gam_w = rng.normal(size=(16, 6, 6))
        registry.register(
            name="gradient.gam_forward",
            version="1.0.0",
            category="gradient",
            run_func=lambda: _report(grad_check(lambda x: _weighted_sum(gam_forward(x, gam), gam_w), gam_x, **tol)),
            description="Global attention block, 16x6x6 input",
        )

    sppf = SppfConfig.random(8, 4, 8, kernel=variant.sppf_kernel, seed=seed)
    sppf_x = rng.normal(size=(8, 6, 6))
    sppf_w = rng.normal(size=(8, 6, 6))
    registry.register(
        name="gradient.sppf_forward",
        version="1.0.0",
        category="gradient",
        run_func=lambda: _report(grad_check(lambda x: _weighted_sum(sppf_forward(x, sppf), sppf_w), sppf_x, **tol)),
        description=f"SPPF block, 8x6x6 input, kernel {variant.sppf_kernel}",
    )

    # reduced widths keep the full finite-difference sweep fast
    in_full, mid_full = variant.head_widths
    small = DeepHeadConfig.random(in_full // 16, mid_full // 8, 4, seed=seed)
    head_x = rng.normal(size=(small.in_channels, 4, 4))
    registry.register(
        name="gradient.deep_head_reduced",
        version="1.0.0",
        category="gradient",
        run_func=lambda: _report(grad_check(lambda x: tensor_sum(deep_head_proto_forward(x, small)), head_x, **tol)),
        description=f"Prototype stack {small.in_channels}-in/{small.mid_channels}-mid",
    )

    def full_head() -> Dict[str, Any]:
        head = DeepHeadConfig.random(in_full, mid_full, cfg.head_proto_channels, seed=seed)
        x = rng.normal(size=(in_full, 8, 8))
        trace: list = []
        out = deep_head_proto_forward(Tensor(x), head, trace=trace)
        sampled = grad_check(
            lambda t: tensor_sum(deep_head_proto_forward(t, head)), x, max_elements=16, seed=seed, **tol
        )
        shapes_ok = out.shape == (cfg.head_proto_channels, 8, 8) and trace[1][1] == (mid_full, 8, 8)
        return {
            "passed": shapes_ok and sampled.passed,
            "trace": [[stage, list(shape)] for stage, shape in trace],
            "sampled_gradient": sampled.as_dict(),
        }

    registry.register(
        name="shape.deep_head_full",
        version="1.0.0",
        category="shape",
        run_func=full_head,
        description=f"Prototype stack at full width {in_full}/{mid_full}, 8x8 input",
    )

    loss_x = rng.normal(size=(4, 6, 6))
    loss_y = (rng.random((4, 6, 6)) > 0.5).astype(np.float64)
    loss_gam = GamParams.random(4, cfg.reduction_ratio, seed=seed + 1, clamp_hidden=cfg.clamp_hidden)

    def end_to_end(x: Tensor) -> Tensor:
        features = gam_forward(x, loss_gam) if variant.gam_count else x
        return mask_loss(sigmoid_map(features), Tensor(loss_y), variant.asym_loss, asym)

    registry.register(
        name="gradient.mask_loss_end_to_end",
        version="1.0.0",
        category="gradient",
        run_func=lambda: _report(grad_check(end_to_end, loss_x, **tol)),
        description="Attention -> sigmoid -> mask loss on a 4x6x6 toy tensor",
    )

    def loss_ratio() -> Dict[str, Any]:
        p = Tensor(rng.uniform(0.01, 0.99, 1000), requires_grad=True)
        ratios = {}
        for label, y in (("foreground", 1.0), ("background", 0.0)):
            target = Tensor(np.full(1000, y))
            a, b = asym_bce(p, target, asym), bce(p, target)
            (ga,), (gb,) = gradients(a, [p]), gradients(b, [p])
            ratios[label] = {"value": float(a) / float(b), "gradient": float(np.max(ga / gb))}
        expected = {"foreground": asym.alpha_fn, "background": asym.alpha_fp}
        passed = all(
            abs(ratios[k]["value"] - v) <= 1e-12 * v and abs(ratios[k]["gradient"] - v) <= 1e-12 * v
            for k, v in expected.items()
        )
        return {"passed": passed, "ratios": ratios}

    registry.register(
        name="law.asymmetric_loss_ratio",
        version="1.0.0",
        category="law",
        run_func=loss_ratio,
        description="Asymmetric/standard BCE ratio equals the class weight",
    )
    return registry
