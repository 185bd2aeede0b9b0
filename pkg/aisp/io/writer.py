"""Atomic file writers (JSON, text, bytes)."""

import os
import tempfile
from pathlib import Path
from typing import Any, Union

import orjson
from loguru import logger

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def write_atomic(output_path: Path, data: Union[bytes, str]) -> None:
    """
    Write a file so that readers see either the old or the new content.

    The payload goes to a temporary file in the target directory, which is
    then renamed over ``output_path``.

    Args:
        output_path: Destination path
        data: File content (str is encoded as UTF-8)
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data

    fd, tmp_name = tempfile.mkstemp(prefix=f".{output_path.name}.", dir=output_path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp_name, output_path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.debug(f"Wrote {len(payload)} bytes to {output_path}")


def dumps_json(obj: Any, pretty: bool = True) -> bytes:
    return orjson.dumps(obj, option=JSON_OPTIONS if pretty else orjson.OPT_SERIALIZE_NUMPY)


def write_json(output_path: Path, obj: Any) -> None:
    """Write ``obj`` as indented, key-sorted JSON."""
    write_atomic(output_path, dumps_json(obj) + b"\n")
    logger.info(f"Wrote JSON to {output_path}")


def read_json(input_path: Path) -> Any:
    """
    Read a JSON file.

    Raises:
        FileNotFoundError: If the file does not exist
        orjson.JSONDecodeError: If the content is not valid JSON
    """
    input_path = Path(input_path)
    if not input_path.exists():
        raise FileNotFoundError(f"JSON file not found: {input_path}")
    return orjson.loads(input_path.read_bytes())
