"""Precision-recall curves and 101-point interpolated average precision."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .matching import Detection, GroundTruthInstance, MatchResult, confidence_order, match_detections

RECALL_POINTS = 101


@dataclass(frozen=True, eq=False)
class PrCurve:
    """Cumulative precision/recall after each detection, in confidence order."""

    confidences: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    n_gt: int

    def __len__(self) -> int:
        return len(self.confidences)

    def best_f1(self) -> Optional[Tuple[float, float, float]]:
        """(precision, recall, confidence) at the first maximum of F1; None if F1 is 0 everywhere."""
        if len(self) == 0:
            return None
        denom = self.precision + self.recall
        f1 = np.where(denom > 0, 2 * self.precision * self.recall / np.where(denom > 0, denom, 1.0), 0.0)
        i = int(np.argmax(f1))
        if f1[i] <= 0:
            return None
        return float(self.precision[i]), float(self.recall[i]), float(self.confidences[i])

    def as_dict(self) -> dict:
        return {
            "confidence": self.confidences.tolist(),
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
        }


def pr_curve(
    dets: Sequence[Detection],
    match: MatchResult,
    n_gt: int,
    subset: Optional[Sequence[int]] = None,
) -> PrCurve:
    """
    Build the curve from a match.

    Args:
        dets: All detections the match was computed on
        match: Matching result
        n_gt: Ground-truth count the recall is relative to
        subset: Restrict to these detection indices (e.g. one class)
    """
    order = confidence_order(dets, subset)
    matched = match.matched_detections()
    tp = np.array([i in matched for i in order], dtype=bool)
    ctp = np.cumsum(tp)
    n = np.arange(1, len(order) + 1)
    precision = ctp / n if len(order) else np.zeros(0)
    recall = ctp / n_gt if n_gt > 0 else np.ones(len(order))
    confidences = np.array([dets[i].confidence for i in order], dtype=float)
    return PrCurve(confidences, precision.astype(float), recall.astype(float), n_gt)


def interpolated_ap(curve: PrCurve, recall_points: int = RECALL_POINTS) -> float:
    """
    Mean of the precision envelope sampled at ``recall_points`` evenly spaced recalls.

    The envelope at recall r is the highest precision reached at any recall >= r;
    recall levels never reached contribute 0.
    """
    if curve.n_gt == 0 or len(curve) == 0:
        return 0.0
    grid = np.arange(recall_points) / (recall_points - 1)
    envelope = np.maximum.accumulate(curve.precision[::-1])[::-1]
    idx = np.searchsorted(curve.recall, grid, side="left")
    sampled = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(sampled.mean())


def average_precision(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    iou_threshold: float,
    recall_points: int = RECALL_POINTS,
) -> float:
    """AP over all detections (matching stays class-aware)."""
    match = match_detections(dets, gts, iou_threshold)
    return interpolated_ap(pr_curve(dets, match, len(gts)), recall_points)
