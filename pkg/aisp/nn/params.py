"""Save and load parameter bundles as flat-text tensors plus a JSON manifest."""

from pathlib import Path
from typing import Dict, Optional, Tuple, Type, Union

from loguru import logger

from ..errors import ConsistencyError, ParameterError
from ..io.tensor_text import load_tensor, save_tensor
from ..io.writer import read_json, write_json
from .attention import GamParams
from .head import DeepHeadConfig
from .sppf import SppfConfig
from .tensor import Tensor

MANIFEST_NAME = "manifest.json"

Bundle = Union[GamParams, SppfConfig, DeepHeadConfig]

BLOCKS: Dict[str, Type] = {
    "gam": GamParams,
    "sppf": SppfConfig,
    "deep_head": DeepHeadConfig,
}


def block_name(bundle: Bundle) -> str:
    for name, cls in BLOCKS.items():
        if isinstance(bundle, cls):
            return name
    raise ParameterError(f"Not a parameter bundle: {type(bundle).__name__}")


def save_params(bundle: Bundle, directory: Path, seed: Optional[int] = None) -> Path:
    """
    Write every tensor of ``bundle`` to ``<directory>/<name>.txt`` and a manifest.

    Returns:
        Path of the manifest
    """
    directory = Path(directory)
    tensors = bundle.tensors()
    for name, tensor in tensors.items():
        save_tensor(directory / f"{name}.txt", tensor)

    manifest = {
        "block": block_name(bundle),
        "seed": seed,
        "meta": bundle.meta(),
        "tensors": {name: list(t.shape) for name, t in tensors.items()},
    }
    manifest_path = directory / MANIFEST_NAME
    write_json(manifest_path, manifest)
    logger.info(f"Saved {manifest['block']} parameters ({len(tensors)} tensors) to {directory}")
    return manifest_path


def load_params(directory: Path) -> Tuple[Bundle, Optional[int]]:
    """
    Rebuild a bundle saved by ``save_params``.

    Returns:
        (bundle, seed) tuple

    Raises:
        ConsistencyError: If a tensor's shape differs from the manifest
    """
    directory = Path(directory)
    manifest = read_json(directory / MANIFEST_NAME)
    block = manifest.get("block")
    if block not in BLOCKS:
        raise ParameterError(f"Unknown block in manifest: {block!r}")

    tensors: Dict[str, Tensor] = {}
    for name, shape in manifest["tensors"].items():
        tensor = load_tensor(directory / f"{name}.txt")
        if list(tensor.shape) != list(shape):
            raise ConsistencyError(f"{name}: manifest shape {shape} but file holds {list(tensor.shape)}")
        tensors[name] = tensor

    bundle = BLOCKS[block].from_tensors(tensors, manifest.get("meta"))
    logger.debug(f"Loaded {block} parameters from {directory}")
    return bundle, manifest.get("seed")
