"""
Greedy one-to-one matching of detections to ground truth.

Detections are visited in descending confidence (ties: lower detection index
first). Each claims the unclaimed ground-truth instance of the same image and
class with the highest mask IoU at or above the threshold (ties: lower
ground-truth index). Images are independent, so they can be matched in
separate worker processes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from tqdm import tqdm

from ..errors import ConsistencyError, ParameterError, ShapeError
from ..masks.raster import BinaryMask, iou_matrix
from .occlusion import OcclusionLevel, level_of_masks

ImageId = Union[int, str]


@dataclass(frozen=True, eq=False)
class Detection:
    mask: BinaryMask
    confidence: float
    class_id: int = 0
    image_id: ImageId = 0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ParameterError(f"Confidence must lie in [0, 1], got {self.confidence}")


@dataclass(frozen=True, eq=False)
class GroundTruthInstance:
    amodal_mask: BinaryMask
    visible_mask: Optional[BinaryMask] = None
    class_id: int = 0
    image_id: ImageId = 0
    occlusion_level: Optional[OcclusionLevel] = None

    def __post_init__(self):
        if self.visible_mask is not None:
            if self.visible_mask.shape != self.amodal_mask.shape:
                raise ShapeError("Visible and amodal masks differ in size")
            if not self.visible_mask.is_subset_of(self.amodal_mask):
                raise ConsistencyError("Visible mask is not contained in the amodal mask")

    @property
    def level(self) -> Optional[OcclusionLevel]:
        """Explicit tag, else derived from the masks, else None."""
        if self.occlusion_level is not None:
            return self.occlusion_level
        if self.visible_mask is not None:
            return level_of_masks(self.visible_mask, self.amodal_mask)
        return None


@dataclass(frozen=True)
class MatchPair:
    det_index: int
    gt_index: int
    iou: float


@dataclass(frozen=True)
class MatchResult:
    pairs: Tuple[MatchPair, ...]
    unmatched_detections: Tuple[int, ...]
    unmatched_gts: Tuple[int, ...]
    iou_threshold: float

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.unmatched_detections)

    @property
    def fn(self) -> int:
        return len(self.unmatched_gts)

    @property
    def n_gt(self) -> int:
        return self.tp + self.fn

    def matched_detections(self) -> Dict[int, int]:
        """Detection index -> ground-truth index."""
        return {p.det_index: p.gt_index for p in self.pairs}


def confidence_order(dets: Sequence[Detection], indices: Optional[Sequence[int]] = None) -> List[int]:
    indices = range(len(dets)) if indices is None else indices
    return sorted(indices, key=lambda i: (-dets[i].confidence, i))


def validate_thresholds(thresholds: Sequence[float]) -> List[float]:
    if not thresholds:
        raise ParameterError("At least one IoU threshold is required")
    for t in thresholds:
        if not 0.0 < t <= 1.0:
            raise ParameterError(f"IoU threshold must lie in (0, 1], got {t}")
    return [float(t) for t in thresholds]


def _match_image(
    task: Tuple[List[int], List[int], List[Detection], List[GroundTruthInstance], List[float]]
) -> List[List[Tuple[int, int, float]]]:
    """Pairs per threshold for one image; indices are global."""
    det_ids, gt_ids, dets, gts, thresholds = task
    if not det_ids or not gt_ids:
        return [[] for _ in thresholds]

    iou = iou_matrix([d.mask for d in dets], [g.amodal_mask for g in gts])
    same_class = np.array([d.class_id for d in dets])[:, None] == np.array([g.class_id for g in gts])[None, :]
    iou = np.where(same_class, iou, -1.0)
    order = sorted(range(len(dets)), key=lambda r: (-dets[r].confidence, det_ids[r]))

    per_threshold = []
    for thr in thresholds:
        claimed = np.zeros(len(gts), dtype=bool)
        pairs = []
        for r in order:
            candidates = np.where(~claimed & (iou[r] >= thr), iou[r], -1.0)
            c = int(np.argmax(candidates))
            if candidates[c] < thr:
                continue
            claimed[c] = True
            pairs.append((det_ids[r], gt_ids[c], float(iou[r, c])))
        per_threshold.append(pairs)
    return per_threshold


def match_all(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    thresholds: Sequence[float],
    workers: int = 1,
    progress: bool = False,
) -> List[MatchResult]:
    """
    Match at several IoU thresholds at once (one MatchResult per threshold).

    Args:
        dets: Detections over any number of images
        gts: Ground truth over the same images
        thresholds: IoU thresholds in (0, 1]
        workers: Worker processes; images are sharded across them
        progress: Show a progress bar
    """
    thresholds = validate_thresholds(thresholds)
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")

    by_image: Dict[str, Tuple[List[int], List[int]]] = {}
    for i, d in enumerate(dets):
        by_image.setdefault(str(d.image_id), ([], []))[0].append(i)
    for j, g in enumerate(gts):
        by_image.setdefault(str(g.image_id), ([], []))[1].append(j)

    tasks = [
        (di, gi, [dets[i] for i in di], [gts[j] for j in gi], thresholds)
        for _, (di, gi) in sorted(by_image.items())
    ]

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(tqdm(pool.map(_match_image, tasks), total=len(tasks), disable=not progress))
    else:
        outcomes = [_match_image(t) for t in tqdm(tasks, disable=not progress, desc="Matching")]

    results = []
    for k, thr in enumerate(thresholds):
        pairs = sorted(
            (MatchPair(d, g, iou) for outcome in outcomes for d, g, iou in outcome[k]),
            key=lambda p: p.det_index,
        )
        matched_d = {p.det_index for p in pairs}
        matched_g = {p.gt_index for p in pairs}
        results.append(
            MatchResult(
                pairs=tuple(pairs),
                unmatched_detections=tuple(i for i in range(len(dets)) if i not in matched_d),
                unmatched_gts=tuple(j for j in range(len(gts)) if j not in matched_g),
                iou_threshold=thr,
            )
        )
    logger.debug(f"Matched {len(dets)} detections to {len(gts)} instances over {len(tasks)} images")
    return results


def match_detections(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    iou_threshold: float,
) -> MatchResult:
    return match_all(dets, gts, [iou_threshold])[0]


def precision_recall(m: MatchResult) -> Tuple[float, float]:
    """
    Precision and recall of a match.

    With no detections, precision is 1 when there is no ground truth and 0
    otherwise; with no ground truth, recall is 1.
    """
    if m.tp + m.fp == 0:
        precision = 1.0 if m.n_gt == 0 else 0.0
    else:
        precision = m.tp / (m.tp + m.fp)
    recall = 1.0 if m.n_gt == 0 else m.tp / m.n_gt
    return precision, recall
