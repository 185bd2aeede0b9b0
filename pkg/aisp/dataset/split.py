"""Seeded train/validation/test partition of image ids."""

from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from ..errors import ParameterError

SPLIT_NAMES = ("train", "val", "test")


def split_ids(
    ids: Sequence,
    fractions: Tuple[float, float, float] = (0.7, 0.2, 0.1),
    seed: int = 0,
) -> Dict[str, List]:
    """
    Shuffle ``ids`` with ``seed`` and cut them by ``fractions``.

    Counts are floored for train and val; test takes the remainder, so
    1000 ids at (0.7, 0.2, 0.1) give 700/200/100.
    """
    if len(fractions) != 3 or any(f < 0 for f in fractions) or not np.isclose(sum(fractions), 1.0):
        raise ParameterError(f"Fractions must be three non-negative numbers summing to 1, got {fractions}")
    if len(set(map(str, ids))) != len(ids):
        raise ParameterError("Image ids must be unique")

    order = np.random.default_rng(seed).permutation(len(ids))
    n_train = int(np.floor(fractions[0] * len(ids) + 1e-9))
    n_val = int(np.floor(fractions[1] * len(ids) + 1e-9))
    cuts = [order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]]
    out = {name: [ids[i] for i in part] for name, part in zip(SPLIT_NAMES, cuts)}
    logger.debug(f"Split {len(ids)} ids into " + "/".join(str(len(v)) for v in out.values()))
    return out
