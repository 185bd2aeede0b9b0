"""
Fixed-size crops of annotated images (occlusion subsets).

Polygons are clipped to the window with Sutherland-Hodgman and translated
into crop coordinates. Inside the window, the clipped polygon covers exactly
the pixels the original covered.
"""

from typing import List, Optional, Sequence, Tuple

from loguru import logger

from ..errors import ParameterError, RangeError
from ..masks.raster import Polygon
from .annotations import AnnotationSet, ImageId, ImageRecord, InstanceRecord

Window = Tuple[float, float, float, float]


def _clip_edge(points: List[Tuple[float, float]], inside, intersect) -> List[Tuple[float, float]]:
    out: List[Tuple[float, float]] = []
    if not points:
        return out
    prev = points[-1]
    for cur in points:
        if inside(cur):
            if not inside(prev):
                out.append(intersect(prev, cur))
            out.append(cur)
        elif inside(prev):
            out.append(intersect(prev, cur))
        prev = cur
    return out


def _cross_x(x: float):
    def at(p, q):
        t = (x - p[0]) / (q[0] - p[0])
        return (x, p[1] + t * (q[1] - p[1]))
    return at


def _cross_y(y: float):
    def at(p, q):
        t = (y - p[1]) / (q[1] - p[1])
        return (p[0] + t * (q[0] - p[0]), y)
    return at


def clip_polygon(polygon: Polygon, window: Window) -> Optional[Polygon]:
    """
    Clip to the axis-aligned window ``(x0, y0, x1, y1)``.

    Returns None when nothing with positive area is left.
    """
    x0, y0, x1, y1 = window
    pts = list(polygon.vertices)
    pts = _clip_edge(pts, lambda p: p[0] >= x0, _cross_x(x0))
    pts = _clip_edge(pts, lambda p: p[0] <= x1, _cross_x(x1))
    pts = _clip_edge(pts, lambda p: p[1] >= y0, _cross_y(y0))
    pts = _clip_edge(pts, lambda p: p[1] <= y1, _cross_y(y1))
    if len(pts) < 3:
        return None
    clipped = Polygon(tuple(pts))
    return clipped if clipped.area() > 0 else None


def crop_instance(instance: InstanceRecord, x0: int, y0: int, size: int, image: ImageId) -> Optional[InstanceRecord]:
    """Instance in crop coordinates, or None when its amodal region misses the window."""
    window = (float(x0), float(y0), float(x0 + size), float(y0 + size))
    amodal = clip_polygon(instance.amodal_polygon(), window)
    if amodal is None:
        return None
    visible_src = instance.visible_polygon()
    visible = clip_polygon(visible_src, window) if visible_src is not None else None
    return InstanceRecord(
        image=image,
        class_id=instance.class_id,
        amodal=[tuple(v) for v in amodal.translate(-x0, -y0).vertices],
        visible=None if visible is None else [tuple(v) for v in visible.translate(-x0, -y0).vertices],
        occlusion=instance.occlusion,
    )


def crop_subset(
    annotations: AnnotationSet,
    image_id: ImageId,
    x0: int,
    y0: int,
    size: int = 256,
    new_id: Optional[ImageId] = None,
) -> AnnotationSet:
    """
    Cut a ``size`` x ``size`` window out of one annotated image.

    Raises:
        ParameterError: If ``size`` is not positive or the image is unknown
        RangeError: If the window leaves the image
    """
    if size < 1:
        raise ParameterError(f"Crop size must be >= 1, got {size}")
    img = annotations.image_index().get(str(image_id))
    if img is None:
        raise ParameterError(f"Unknown image {image_id!r}")
    if x0 < 0 or y0 < 0 or x0 + size > img.width or y0 + size > img.height:
        raise RangeError(
            f"Crop ({x0}, {y0}, {size}x{size}) exceeds image {image_id!r} of {img.width}x{img.height}"
        )

    crop_id = new_id if new_id is not None else f"{image_id}_{x0}_{y0}"
    instances = []
    for inst in annotations.instances_of(image_id):
        cropped = crop_instance(inst, x0, y0, size, crop_id)
        if cropped is not None:
            instances.append(cropped)

    file = None if img.file is None else f"{crop_id}.pgm"
    image = ImageRecord(id=crop_id, width=size, height=size, file=file)
    dropped = len(annotations.instances_of(image_id)) - len(instances)
    logger.debug(f"Cropped {image_id!r} at ({x0}, {y0}): kept {len(instances)}, dropped {dropped}")
    return AnnotationSet(images=[image], instances=instances)


def crop_many(annotations: AnnotationSet, windows: Sequence[Tuple[ImageId, int, int]], size: int = 256) -> AnnotationSet:
    """Concatenate several crops into one set."""
    images, instances = [], []
    for image_id, x0, y0 in windows:
        part = crop_subset(annotations, image_id, x0, y0, size)
        images += part.images
        instances += part.instances
    return AnnotationSet(images=images, instances=instances)
