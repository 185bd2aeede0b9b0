"""
Amodal annotation documents.

One JSON document per set::

    {
      "images":    [{"id": 1, "w": 256, "h": 256, "file": "img_001.pgm"}],
      "instances": [{"image": 1, "class": 0,
                     "amodal":  [[x, y], ...],
                     "visible": [[x, y], ...],
                     "occlusion": "low"}]
    }

``visible`` and ``occlusion`` are optional. Predictions use the same image ids::

    {"predictions": [{"image": 1, "class": 0, "confidence": 0.93, "polygon": [[x, y], ...]}]}
"""

from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import orjson
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import AnnotationParseError, ConsistencyError
from ..io.writer import dumps_json, write_atomic
from ..masks.raster import BinaryMask, Polygon, rasterize_polygon
from ..metrics.matching import Detection, GroundTruthInstance
from ..metrics.occlusion import OcclusionLevel
from ..utils.validation import validate_file_exists

ImageId = Union[int, str]
Points = List[Tuple[float, float]]
LevelLabel = Literal["zero", "low", "medium", "high"]


class _Record(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True, allow_inf_nan=False)


def _check_polygon(points: Points) -> Points:
    Polygon(tuple(points))
    return points


class ImageRecord(_Record):
    id: ImageId
    width: int = Field(alias="w", ge=1)
    height: int = Field(alias="h", ge=1)
    file: Optional[str] = None


class InstanceRecord(_Record):
    image: ImageId
    class_id: int = Field(0, alias="class", ge=0)
    amodal: Points
    visible: Optional[Points] = None
    occlusion: Optional[LevelLabel] = None

    @field_validator("amodal", "visible")
    @classmethod
    def check_polygons(cls, v: Optional[Points]) -> Optional[Points]:
        return None if v is None else _check_polygon(v)

    def amodal_polygon(self) -> Polygon:
        return Polygon(tuple(self.amodal))

    def visible_polygon(self) -> Optional[Polygon]:
        return None if self.visible is None else Polygon(tuple(self.visible))


class AnnotationSet(_Record):
    images: List[ImageRecord] = []
    instances: List[InstanceRecord] = []

    def image_index(self) -> Dict[str, ImageRecord]:
        return {str(img.id): img for img in self.images}

    def instances_of(self, image_id: ImageId) -> List[InstanceRecord]:
        key = str(image_id)
        return [inst for inst in self.instances if str(inst.image) == key]

    def masks(self, instance: InstanceRecord) -> Tuple[BinaryMask, Optional[BinaryMask]]:
        """Amodal and (if annotated) visible masks of an instance on its image canvas."""
        img = self.image_index()[str(instance.image)]
        amodal = rasterize_polygon(instance.amodal_polygon(), img.width, img.height)
        visible_poly = instance.visible_polygon()
        visible = None if visible_poly is None else rasterize_polygon(visible_poly, img.width, img.height)
        return amodal, visible

    def to_document(self) -> dict:
        return self.model_dump(by_alias=True, exclude_none=True, mode="json")


class PredictionRecord(_Record):
    image: ImageId
    class_id: int = Field(0, alias="class", ge=0)
    confidence: float = Field(ge=0.0, le=1.0)
    polygon: Points

    @field_validator("polygon")
    @classmethod
    def check_polygons(cls, v: Points) -> Points:
        return _check_polygon(v)


class PredictionSet(_Record):
    predictions: List[PredictionRecord] = []


def _location(error: dict) -> str:
    parts = []
    for item in error["loc"]:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def _load_document(path: Path) -> object:
    path = Path(path)
    validate_file_exists(path, "Annotation file")
    try:
        return orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise AnnotationParseError(f"Invalid JSON: {e.msg}", f"{path}:{e.lineno}:{e.colno}") from e


def _validate(model, doc: object, path: Path):
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        first = e.errors()[0]
        raise AnnotationParseError(
            f"{first['msg']} ({e.error_count()} error(s))", f"{path}:{_location(first)}"
        ) from e


def check_consistency(annotations: AnnotationSet) -> None:
    """
    Cross-record checks pydantic cannot express per record.

    Raises:
        ConsistencyError: Duplicate image ids, dangling image references,
            or a visible mask not contained in its amodal mask
    """
    images = annotations.image_index()
    if len(images) != len(annotations.images):
        raise ConsistencyError("Duplicate image ids in annotation set")
    for i, inst in enumerate(annotations.instances):
        if str(inst.image) not in images:
            raise ConsistencyError(f"instances[{i}] references unknown image {inst.image!r}")
        if inst.visible is not None:
            amodal, visible = annotations.masks(inst)
            if not visible.is_subset_of(amodal):
                raise ConsistencyError(f"instances[{i}]: visible region extends beyond the amodal region")


def parse_annotations(path: Path) -> AnnotationSet:
    """
    Read and validate an annotation document.

    Raises:
        FileNotFoundError: If the file does not exist
        AnnotationParseError: Malformed JSON (line:column) or a bad field (field path)
        ConsistencyError: See ``check_consistency``
    """
    path = Path(path)
    annotations = _validate(AnnotationSet, _load_document(path), path)
    check_consistency(annotations)
    logger.info(f"Parsed {len(annotations.images)} images, {len(annotations.instances)} instances from {path}")
    return annotations


def write_annotations(annotations: AnnotationSet, path: Path) -> None:
    """Atomically write the document that ``parse_annotations`` reads back."""
    write_atomic(Path(path), dumps_json(annotations.to_document()) + b"\n")
    logger.info(f"Wrote {len(annotations.instances)} instances to {path}")


def to_ground_truth(annotations: AnnotationSet) -> List[GroundTruthInstance]:
    """Rasterise every instance into an evaluator ground-truth record."""
    gts = []
    for inst in annotations.instances:
        amodal, visible = annotations.masks(inst)
        level = OcclusionLevel.from_label(inst.occlusion) if inst.occlusion else None
        gts.append(GroundTruthInstance(amodal, visible, inst.class_id, inst.image, level))
    return gts


def parse_predictions(path: Path, annotations: AnnotationSet) -> List[Detection]:
    """
    Read predicted polygons and rasterise them on the canvases of ``annotations``.

    Raises:
        ConsistencyError: If a prediction names an image missing from ``annotations``
    """
    path = Path(path)
    predictions = _validate(PredictionSet, _load_document(path), path)
    images = annotations.image_index()
    dets = []
    for i, pred in enumerate(predictions.predictions):
        img = images.get(str(pred.image))
        if img is None:
            raise ConsistencyError(f"predictions[{i}] references unknown image {pred.image!r}")
        mask = rasterize_polygon(Polygon(tuple(pred.polygon)), img.width, img.height)
        dets.append(Detection(mask, pred.confidence, pred.class_id, pred.image))
    logger.info(f"Parsed {len(dets)} predictions from {path}")
    return dets


def predictions_document(records: List[PredictionRecord]) -> dict:
    return PredictionSet(predictions=records).model_dump(by_alias=True, mode="json")
