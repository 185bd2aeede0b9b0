"""
Readers for tabular and paired inputs.

Handles:
- Harvest logs (CSV, one row per model and occlusion level)
- Paired series for correlation (JSON, three accepted layouts)
"""

from pathlib import Path
from typing import List, Sequence, Tuple

import orjson
import pandas as pd
from loguru import logger
from pandera.errors import SchemaError, SchemaErrors

from ..errors import AnnotationParseError, ConsistencyError
from ..metrics.harvest import HarvestLog, logs_from_frame
from ..utils.validation import validate_file_exists

DEFAULT_ENCODINGS = ("utf-8-sig", "latin-1")


def read_harvest_log(file_path: Path, encodings: Sequence[str] = DEFAULT_ENCODINGS) -> List[HarvestLog]:
    """
    Read a harvest log CSV.

    Columns: model, level, n_picked, n_total and optionally
    detection_failures, localisation_failures.

    Raises:
        FileNotFoundError: If the file does not exist
        ConsistencyError: If the table fails schema validation
    """
    file_path = Path(file_path)
    validate_file_exists(file_path, "Input")
    logger.info(f"Reading harvest log: {file_path}")

    df = None
    for encoding in encodings:
        try:
            df = pd.read_csv(file_path, encoding=encoding, skipinitialspace=True)
            logger.debug(f"Read with encoding: {encoding}")
            break
        except UnicodeDecodeError:
            logger.debug(f"Failed with encoding: {encoding}")
            continue
    if df is None:
        raise AnnotationParseError("Could not decode CSV with any encoding", str(file_path))
    if df.empty:
        raise ConsistencyError(f"Harvest log is empty: {file_path}")

    df.columns = [str(c).strip() for c in df.columns]
    if "level" in df:
        df["level"] = df["level"].astype(str).str.strip().str.lower()
    try:
        return logs_from_frame(df)
    except (SchemaErrors, SchemaError) as e:
        raise ConsistencyError(f"{file_path}: harvest log failed validation:\n{e}") from e


def read_pairs(file_path: Path) -> Tuple[List[float], List[float]]:
    """
    Read paired samples from JSON.

    Accepted layouts::

        {"x": [...], "y": [...]}
        [[x0, y0], [x1, y1], ...]
        {"pairs": [[x0, y0], ...]}

    Raises:
        AnnotationParseError: If the document is not one of the layouts
    """
    file_path = Path(file_path)
    validate_file_exists(file_path, "Input")
    try:
        doc = orjson.loads(file_path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise AnnotationParseError(f"Invalid JSON: {e.msg}", f"{file_path}:{e.lineno}:{e.colno}") from e

    if isinstance(doc, dict) and "pairs" in doc:
        doc = doc["pairs"]
    if isinstance(doc, dict) and "x" in doc and "y" in doc:
        x, y = doc["x"], doc["y"]
    elif isinstance(doc, list) and all(isinstance(p, (list, tuple)) and len(p) == 2 for p in doc):
        x = [p[0] for p in doc]
        y = [p[1] for p in doc]
    else:
        raise AnnotationParseError("Expected {'x', 'y'} arrays or a list of [x, y] pairs", str(file_path))

    if not isinstance(x, list) or not isinstance(y, list):
        raise AnnotationParseError("'x' and 'y' must be arrays", str(file_path))
    try:
        xs = [float(v) for v in x]
        ys = [float(v) for v in y]
    except (TypeError, ValueError) as e:
        raise AnnotationParseError(f"Non-numeric sample: {e}", str(file_path)) from e

    logger.debug(f"Read {len(xs)} pairs from {file_path}")
    return xs, ys
