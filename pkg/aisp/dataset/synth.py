"""
Synthetic occluded scenes with exact amodal and visible ground truth.

Each target ratio gets one elliptical fruit in its own grid cell. An occluder
(disc or square) is centred on a random point of the fruit rim and grown by
bisection until the covered share of the fruit is within tolerance of the
target. Occluders never leave their cell, so fruits do not interact.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import GenerationError
from ..masks.raster import BinaryMask, Polygon, rasterize_polygon
from ..metrics.matching import GroundTruthInstance
from ..metrics.occlusion import OcclusionLevel, occlusion_level, occlusion_ratio
from .annotations import AnnotationSet, ImageRecord, InstanceRecord

ELLIPSE_VERTICES = 48
BISECTION_STEPS = 40

BACKGROUND_LEVEL = 40
FRUIT_LEVEL = 200
OCCLUDER_LEVEL = 90


class SynthParams(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    width: int = Field(128, ge=16)
    height: int = Field(128, ge=16)
    targets: Tuple[float, ...] = (0.0, 0.10, 0.35, 0.60)
    fruit_radius: Tuple[int, int] = (14, 20)
    occluder: Literal["ellipse", "rect"] = "ellipse"
    tolerance: float = Field(0.02, gt=0.0)
    max_retries: int = Field(25, ge=1)

    @field_validator("targets")
    @classmethod
    def targets_in_range(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v:
            raise ValueError("at least one target ratio is required")
        for t in v:
            if not 0.0 <= t < 1.0:
                raise ValueError(f"target ratio must lie in [0, 1), got {t}")
        return v

    @field_validator("fruit_radius")
    @classmethod
    def radius_order(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        if v[0] < 2 or v[1] < v[0]:
            raise ValueError(f"fruit_radius must be (min, max) with 2 <= min <= max, got {v}")
        return v


@dataclass(frozen=True, eq=False)
class SynthFruit:
    outline: Polygon
    amodal: BinaryMask
    visible: BinaryMask
    occluder: Optional[BinaryMask]
    target: float

    @property
    def achieved(self) -> Fraction:
        return occlusion_ratio(self.visible.area, self.amodal.area)

    @property
    def level(self) -> OcclusionLevel:
        return occlusion_level(self.visible.area, self.amodal.area)


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    width: int
    height: int
    fruits: List[SynthFruit]
    seed: int

    def as_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "fruits": [
                {
                    "target": f.target,
                    "achieved": float(f.achieved),
                    "level": f.level.label,
                    "amodal_area": f.amodal.area,
                    "visible_area": f.visible.area,
                }
                for f in self.fruits
            ],
        }


def ellipse_polygon(cx: float, cy: float, rx: float, ry: float, n: int = ELLIPSE_VERTICES) -> Polygon:
    t = np.arange(n) * (2.0 * math.pi / n)
    return Polygon.from_array(np.stack([cx + rx * np.cos(t), cy + ry * np.sin(t)], axis=1))


def _cells(n: int, width: int, height: int) -> List[Tuple[int, int, int, int]]:
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    cw, ch = width // cols, height // rows
    return [((i % cols) * cw, (i // cols) * ch, (i % cols + 1) * cw, (i // cols + 1) * ch) for i in range(n)]


def _occluder_mask(kind: str, ox: float, oy: float, size: float, cell, width: int, height: int) -> np.ndarray:
    ys, xs = np.mgrid[0:height, 0:width]
    dx, dy = xs + 0.5 - ox, ys + 0.5 - oy
    if kind == "ellipse":
        inside = dx * dx + dy * dy <= size * size
    else:
        inside = (np.abs(dx) <= size) & (np.abs(dy) <= size)
    x0, y0, x1, y1 = cell
    region = np.zeros((height, width), dtype=bool)
    region[y0:y1, x0:x1] = True
    return inside & region


def _fit_occluder(
    amodal: BinaryMask, target: float, rim: Tuple[float, float], max_size: float, params: SynthParams, cell
) -> Tuple[np.ndarray, float]:
    """Bisect the occluder size; the covered share grows monotonically with it."""
    area = amodal.area
    lo, hi = 0.0, max_size
    best, best_err = None, math.inf
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        occ = _occluder_mask(params.occluder, rim[0], rim[1], mid, cell, params.width, params.height)
        covered = np.count_nonzero(occ & amodal.bits) / area
        err = abs(covered - target)
        if err < best_err:
            best, best_err = occ, err
        if covered < target:
            lo = mid
        else:
            hi = mid
    return best, best_err


def _make_fruit(target: float, cell, params: SynthParams, rng: np.random.Generator) -> SynthFruit:
    x0, y0, x1, y1 = cell
    cap = max(2.0, min(x1 - x0, y1 - y0) / 2.0 - 2.0)
    rmin, rmax = min(params.fruit_radius[0], cap), min(params.fruit_radius[1], cap)

    for attempt in range(params.max_retries):
        rx, ry = rng.uniform(rmin, rmax), rng.uniform(rmin, rmax)
        cx = rng.uniform(x0 + rx + 1.0, x1 - rx - 1.0) if x1 - x0 > 2 * rx + 2 else (x0 + x1) / 2.0
        cy = rng.uniform(y0 + ry + 1.0, y1 - ry - 1.0) if y1 - y0 > 2 * ry + 2 else (y0 + y1) / 2.0
        outline = ellipse_polygon(cx, cy, rx, ry)
        amodal = rasterize_polygon(outline, params.width, params.height)
        if amodal.is_empty():
            continue
        if target == 0.0:
            return SynthFruit(outline, amodal, amodal, None, target)

        phi = rng.uniform(0.0, 2.0 * math.pi)
        rim = (cx + rx * math.cos(phi), cy + ry * math.sin(phi))
        occ, err = _fit_occluder(amodal, target, rim, 2.0 * max(rx, ry) + 2.0, params, cell)
        if err <= params.tolerance:
            visible = BinaryMask(amodal.bits & ~occ)
            return SynthFruit(outline, amodal, visible, BinaryMask(occ), target)
        logger.debug(f"Target {target}: attempt {attempt + 1} missed by {err:.4f}, retrying")

    raise GenerationError(
        f"Could not reach occlusion ratio {target} within {params.tolerance} after {params.max_retries} attempts"
    )


def synth_scene(params: SynthParams = SynthParams(), seed: int = 0) -> SyntheticScene:
    """
    Generate one scene, deterministic per (params, seed).

    Raises:
        GenerationError: If a target ratio cannot be met on the canvas
    """
    rng = np.random.default_rng(seed)
    cells = _cells(len(params.targets), params.width, params.height)
    fruits = [_make_fruit(t, cell, params, rng) for t, cell in zip(params.targets, cells)]
    logger.debug(
        f"Synthesised scene seed={seed}: "
        + ", ".join(f"{f.target:.2f}->{float(f.achieved):.3f}" for f in fruits)
    )
    return SyntheticScene(params.width, params.height, fruits, seed)


def render_scene_image(scene: SyntheticScene) -> np.ndarray:
    """8-bit grayscale rendering: background, visible fruit, then occluders on top."""
    image = np.full((scene.height, scene.width), BACKGROUND_LEVEL, dtype=np.uint8)
    for fruit in scene.fruits:
        image[fruit.amodal.bits] = FRUIT_LEVEL
        if fruit.occluder is not None:
            image[fruit.occluder.bits] = OCCLUDER_LEVEL
    return image


def to_ground_truth(scene: SyntheticScene, image_id=0, class_id: int = 0) -> List[GroundTruthInstance]:
    return [
        GroundTruthInstance(f.amodal, f.visible, class_id, image_id, f.level)
        for f in scene.fruits
    ]


def to_annotations(scenes: Sequence[SyntheticScene], class_id: int = 0) -> AnnotationSet:
    """
    Annotation set with amodal outlines and occlusion tags.

    Visible regions are raster-only (fruit minus occluder), so they are
    exported as mask files rather than polygons.
    """
    images, instances = [], []
    for scene in scenes:
        image_id = f"synth_{scene.seed}"
        images.append(ImageRecord(id=image_id, width=scene.width, height=scene.height, file=f"{image_id}.pgm"))
        for fruit in scene.fruits:
            instances.append(
                InstanceRecord(
                    image=image_id,
                    class_id=class_id,
                    amodal=[tuple(v) for v in fruit.outline.vertices],
                    occlusion=fruit.level.label,
                )
            )
    return AnnotationSet(images=images, instances=instances)

