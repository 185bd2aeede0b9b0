"""
Calibration text file.

    # comment
    [intrinsics]
    fx fy cx cy
    [hand_eye]
    r11 r12 r13 r21 r22 r23 r31 r32 r33
    tx ty tz
    [ee_to_base]
    ...

Any other ``[name]`` section holding 12 numbers is read as an extra named
transform. Numbers may be spread over lines freely; translations are metres.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..errors import AnnotationParseError
from ..geometry.camera import CameraIntrinsics
from ..geometry.transforms import RigidTransform
from ..utils.validation import validate_file_exists
from .writer import write_atomic

REQUIRED_TRANSFORMS = ("hand_eye", "ee_to_base")


@dataclass(frozen=True)
class Calibration:
    intrinsics: CameraIntrinsics
    hand_eye: RigidTransform
    ee_to_base: RigidTransform
    extra: Dict[str, RigidTransform] = field(default_factory=dict)


def _sections(text: str, source: str) -> Dict[str, Tuple[int, List[float]]]:
    sections: Dict[str, Tuple[int, List[float]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise AnnotationParseError(f"duplicate section [{current}]", location=f"{source}:{lineno}")
            sections[current] = (lineno, [])
            continue
        if current is None:
            raise AnnotationParseError("values before the first section", location=f"{source}:{lineno}")
        try:
            sections[current][1].extend(float(tok) for tok in line.split())
        except ValueError as e:
            raise AnnotationParseError(f"not a number: {e}", location=f"{source}:{lineno}") from e
    return sections


def _transform(name: str, values: List[float], location: str) -> RigidTransform:
    if len(values) != 12:
        raise AnnotationParseError(f"[{name}] needs 12 numbers, found {len(values)}", location=location)
    return RigidTransform(np.array(values[:9]).reshape(3, 3), np.array(values[9:]))


def load_calibration(path: Path) -> Calibration:
    """
    Parse a calibration file.

    Raises:
        FileNotFoundError: If the file does not exist
        AnnotationParseError: Malformed or missing sections
        RotationError: A rotation block is not a proper rotation
    """
    path = Path(path)
    validate_file_exists(path, "Calibration file")
    source = str(path)
    sections = _sections(path.read_text(encoding="utf-8"), source)

    for name in ("intrinsics",) + REQUIRED_TRANSFORMS:
        if name not in sections:
            raise AnnotationParseError(f"missing section [{name}]", location=source)

    line, values = sections.pop("intrinsics")
    if len(values) != 4:
        raise AnnotationParseError(f"[intrinsics] needs 4 numbers, found {len(values)}", location=f"{source}:{line}")
    try:
        intrinsics = CameraIntrinsics(fx=values[0], fy=values[1], cx=values[2], cy=values[3])
    except ValidationError as e:
        raise AnnotationParseError(e.errors()[0]["msg"], location=f"{source}:{line}") from e

    transforms = {
        name: _transform(name, values, f"{source}:{line}") for name, (line, values) in sections.items()
    }
    calibration = Calibration(
        intrinsics=intrinsics,
        hand_eye=transforms.pop("hand_eye"),
        ee_to_base=transforms.pop("ee_to_base"),
        extra=transforms,
    )
    logger.debug(f"Loaded calibration from {path} ({len(transforms)} extra transforms)")
    return calibration


def _format_transform(name: str, t: RigidTransform) -> str:
    rows = [" ".join(f"{v:.17g}" for v in row) for row in t.rotation]
    return "\n".join([f"[{name}]", *rows, " ".join(f"{v:.17g}" for v in t.translation)])


def save_calibration(path: Path, calibration: Calibration) -> None:
    k = calibration.intrinsics
    blocks = [
        "[intrinsics]\n" + " ".join(f"{v:.17g}" for v in (k.fx, k.fy, k.cx, k.cy)),
        _format_transform("hand_eye", calibration.hand_eye),
        _format_transform("ee_to_base", calibration.ee_to_base),
        *(_format_transform(name, t) for name, t in calibration.extra.items()),
    ]
    write_atomic(Path(path), "\n".join(blocks) + "\n")
