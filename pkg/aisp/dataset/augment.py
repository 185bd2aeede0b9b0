"""
Offline augmentation: flips, rotation, shear, exposure and salt-and-pepper noise.

Geometric transforms act on polygon vertices and on the image grid with the
same affine map about the image centre; photometric transforms touch pixels
only. Every variant is drawn from a generator seeded by (seed, image id), so a
run is reproducible regardless of entry order.
"""

import math
import zlib
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from ..masks.raster import Polygon
from .annotations import ImageRecord, InstanceRecord
from .crop import clip_polygon


class AugmentPolicy(BaseModel):
    """Ranges are symmetric bounds; each variant draws uniformly inside them."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    hflip: bool = True
    vflip: bool = True
    rotation: float = Field(15.0, ge=0.0, le=15.0)
    shear: float = Field(10.0, ge=0.0, le=10.0)
    exposure: float = Field(0.15, ge=0.0, le=0.15)
    noise_fraction: float = Field(0.0145, ge=0.0, le=0.0145)
    variants_per_image: int = Field(2, ge=0)
    seed: int = 0


@dataclass(frozen=True)
class GeometricTransform:
    hflip: bool = False
    vflip: bool = False
    rotation: float = 0.0
    shear: float = 0.0

    def matrix(self, width: int, height: int) -> np.ndarray:
        """3x3 homogeneous map, applied as flip, then rotation, then shear, about the centre."""
        cx, cy = width / 2.0, height / 2.0
        to_origin = np.array([[1.0, 0.0, -cx], [0.0, 1.0, -cy], [0.0, 0.0, 1.0]])
        back = np.array([[1.0, 0.0, cx], [0.0, 1.0, cy], [0.0, 0.0, 1.0]])
        flip = np.diag([-1.0 if self.hflip else 1.0, -1.0 if self.vflip else 1.0, 1.0])
        t = math.radians(self.rotation)
        rot = np.array([[math.cos(t), -math.sin(t), 0.0], [math.sin(t), math.cos(t), 0.0], [0.0, 0.0, 1.0]])
        shear = np.array([[1.0, math.tan(math.radians(self.shear)), 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        return back @ shear @ rot @ flip @ to_origin

    def apply_polygon(self, polygon: Polygon, width: int, height: int) -> Polygon:
        return polygon.transform(self.matrix(width, height)[:2])

    def apply_image(self, image: np.ndarray) -> np.ndarray:
        """Nearest-neighbour inverse warp; pixels mapped from outside the source are 0."""
        height, width = image.shape
        inv = np.linalg.inv(self.matrix(width, height))
        ys, xs = np.mgrid[0:height, 0:width]
        centres = np.stack([xs.ravel() + 0.5, ys.ravel() + 0.5, np.ones(xs.size)])
        src = inv @ centres
        sx = np.floor(src[0]).astype(np.int64)
        sy = np.floor(src[1]).astype(np.int64)
        ok = (sx >= 0) & (sx < width) & (sy >= 0) & (sy < height)
        out = np.zeros(width * height, dtype=image.dtype)
        out[ok] = image[sy[ok], sx[ok]]
        return out.reshape(height, width)


@dataclass(frozen=True)
class Photometric:
    exposure: float = 0.0
    noise_fraction: float = 0.0

    def apply(self, image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        out = np.clip(np.rint(image.astype(np.float64) * (1.0 + self.exposure)), 0, 255).astype(np.uint8)
        n_noisy = int(round(self.noise_fraction * out.size))
        if n_noisy:
            idx = rng.choice(out.size, size=n_noisy, replace=False)
            flat = out.reshape(-1)
            flat[idx] = np.where(rng.random(n_noisy) < 0.5, 0, 255).astype(np.uint8)
        return out


@dataclass(frozen=True)
class AugmentEntry:
    """One image record, its instances and (optionally) its 8-bit pixels."""

    record: ImageRecord
    instances: List[InstanceRecord]
    image: Optional[np.ndarray] = None


def _rng_for(policy: AugmentPolicy, image_id) -> np.random.Generator:
    return np.random.default_rng(zlib.crc32(f"{policy.seed}:{image_id}".encode("utf-8")))


def draw_variant(policy: AugmentPolicy, rng: np.random.Generator):
    geo = GeometricTransform(
        hflip=policy.hflip and bool(rng.random() < 0.5),
        vflip=policy.vflip and bool(rng.random() < 0.5),
        rotation=float(rng.uniform(-policy.rotation, policy.rotation)),
        shear=float(rng.uniform(-policy.shear, policy.shear)),
    )
    photo = Photometric(
        exposure=float(rng.uniform(-policy.exposure, policy.exposure)),
        noise_fraction=float(rng.uniform(0.0, policy.noise_fraction)),
    )
    return geo, photo


def _points(polygon: Optional[Polygon]):
    return None if polygon is None else [tuple(v) for v in polygon.vertices]


def transform_entry(
    entry: AugmentEntry,
    geo: GeometricTransform,
    photo: Photometric,
    rng: np.random.Generator,
    new_id,
) -> AugmentEntry:
    """Apply one drawn variant; instances pushed fully off the canvas are dropped."""
    w, h = entry.record.width, entry.record.height
    canvas = (0.0, 0.0, float(w), float(h))
    instances = []
    for inst in entry.instances:
        amodal = clip_polygon(geo.apply_polygon(inst.amodal_polygon(), w, h), canvas)
        if amodal is None:
            continue
        visible_src = inst.visible_polygon()
        visible = None if visible_src is None else clip_polygon(geo.apply_polygon(visible_src, w, h), canvas)
        instances.append(
            InstanceRecord(
                image=new_id,
                class_id=inst.class_id,
                amodal=_points(amodal),
                visible=_points(visible),
                occlusion=inst.occlusion,
            )
        )

    image = None
    if entry.image is not None:
        image = photo.apply(geo.apply_image(entry.image), rng)
    file = None if entry.record.file is None else f"{new_id}.pgm"
    record = ImageRecord(id=new_id, width=w, height=h, file=file)
    return AugmentEntry(record, instances, image)


def augment(entry: AugmentEntry, policy: AugmentPolicy) -> List[AugmentEntry]:
    """The original entry followed by ``policy.variants_per_image`` variants."""
    rng = _rng_for(policy, entry.record.id)
    out = [entry]
    for k in range(1, policy.variants_per_image + 1):
        geo, photo = draw_variant(policy, rng)
        out.append(transform_entry(entry, geo, photo, rng, f"{entry.record.id}_aug{k}"))
        logger.debug(f"{entry.record.id}: variant {k} {geo} {photo}")
    return out


def augment_all(entries: Sequence[AugmentEntry], policy: AugmentPolicy, progress: bool = False) -> List[AugmentEntry]:
    out: List[AugmentEntry] = []
    for entry in tqdm(entries, desc="Augmenting", unit="image", disable=not progress):
        out.extend(augment(entry, policy))
    logger.info(f"Augmented {len(entries)} images into {len(out)} entries")
    return out

