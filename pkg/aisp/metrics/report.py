"""
Evaluation report: per-class AP, mAP@50, mAP@50:95, best-F1 precision/recall,
optionally broken down by occlusion level.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from .average_precision import RECALL_POINTS, PrCurve, interpolated_ap, pr_curve
from .matching import (
    Detection,
    GroundTruthInstance,
    MatchResult,
    match_all,
    match_detections,
    precision_recall,
    validate_thresholds,
)
from .occlusion import OcclusionLevel

COCO_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))
PRIMARY_THRESHOLD = 0.50


@dataclass(frozen=True)
class ClassAp:
    ap50: float
    ap50_95: float
    n_gt: int
    n_det: int


@dataclass
class EvalReport:
    precision: float
    recall: float
    map50: float
    map50_95: float
    per_class: Dict[int, ClassAp]
    thresholds: List[float]
    curve: PrCurve
    n_gt: int
    n_det: int
    per_occlusion_level: Dict[str, "EvalReport"] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "map50": self.map50,
            "map50_95": self.map50_95,
            "n_gt": self.n_gt,
            "n_det": self.n_det,
        }

    def as_dict(self, include_curve: bool = True) -> dict:
        out = self.summary()
        out["per_class"] = {
            str(c): {"ap50": a.ap50, "ap50_95": a.ap50_95, "n_gt": a.n_gt, "n_det": a.n_det}
            for c, a in sorted(self.per_class.items())
        }
        out["per_occlusion_level"] = {
            label: report.summary() for label, report in self.per_occlusion_level.items()
        }
        out["thresholds"] = list(self.thresholds)
        if include_curve:
            out["pr_curve"] = self.curve.as_dict()
        return out

    def class_table(self) -> pd.DataFrame:
        rows = [
            {"class": c, "n_gt": a.n_gt, "n_det": a.n_det, "AP@50": a.ap50, "AP@50:95": a.ap50_95}
            for c, a in sorted(self.per_class.items())
        ]
        return pd.DataFrame(rows, columns=["class", "n_gt", "n_det", "AP@50", "AP@50:95"])

    def level_table(self) -> pd.DataFrame:
        rows = [
            {"level": label, **r.summary()}
            for label, r in self.per_occlusion_level.items()
        ]
        return pd.DataFrame(rows, columns=["level", "precision", "recall", "map50", "map50_95", "n_gt", "n_det"])

    def render_text(self) -> str:
        """Aligned-column text report."""
        lines = [
            f"precision  {self.precision:.4f}",
            f"recall     {self.recall:.4f}",
            f"mAP@50     {self.map50:.4f}",
            f"mAP@50:95  {self.map50_95:.4f}",
            "",
            self.class_table().to_string(index=False, float_format=lambda v: f"{v:.4f}"),
        ]
        if self.per_occlusion_level:
            lines += ["", self.level_table().to_string(index=False, float_format=lambda v: f"{v:.4f}")]
        return "\n".join(lines)


def _best_point(curve: PrCurve, match: MatchResult) -> tuple:
    best = curve.best_f1()
    if best is None:
        return precision_recall(match)
    return best[0], best[1]


def evaluate(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    thresholds: Sequence[float] = COCO_THRESHOLDS,
    workers: int = 1,
    recall_points: int = RECALL_POINTS,
    progress: bool = False,
) -> EvalReport:
    """
    Score detections against ground truth.

    mAP@50:95 averages over ``thresholds``; mAP@50 always uses IoU 0.5.
    Classes without ground truth are left out of the class mean.
    """
    thresholds = validate_thresholds(thresholds)
    all_thresholds = sorted(set(thresholds) | {PRIMARY_THRESHOLD})
    matches = dict(zip(all_thresholds, match_all(dets, gts, all_thresholds, workers, progress)))

    classes = sorted({g.class_id for g in gts})
    stray = sorted({d.class_id for d in dets} - set(classes))
    if stray:
        logger.warning(f"Detections of classes without ground truth are ignored in the mean: {stray}")

    per_class: Dict[int, ClassAp] = {}
    for c in classes:
        subset = [i for i, d in enumerate(dets) if d.class_id == c]
        n_gt = sum(1 for g in gts if g.class_id == c)
        aps = {t: interpolated_ap(pr_curve(dets, matches[t], n_gt, subset), recall_points) for t in all_thresholds}
        per_class[c] = ClassAp(
            ap50=aps[PRIMARY_THRESHOLD],
            ap50_95=float(np.mean([aps[t] for t in thresholds])),
            n_gt=n_gt,
            n_det=len(subset),
        )

    primary = matches[PRIMARY_THRESHOLD]
    curve = pr_curve(dets, primary, len(gts))
    precision, recall = _best_point(curve, primary)

    if per_class:
        map50 = float(np.mean([a.ap50 for a in per_class.values()]))
        map50_95 = float(np.mean([a.ap50_95 for a in per_class.values()]))
    else:
        logger.warning("No ground truth instances; mAP is reported as 0")
        map50 = map50_95 = 0.0

    report = EvalReport(
        precision=precision,
        recall=recall,
        map50=map50,
        map50_95=map50_95,
        per_class=per_class,
        thresholds=thresholds,
        curve=curve,
        n_gt=len(gts),
        n_det=len(dets),
    )
    logger.info(
        f"Evaluated {len(dets)} detections vs {len(gts)} instances: "
        f"mAP@50={map50:.4f} mAP@50:95={map50_95:.4f}"
    )
    return report


def map_at(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    thresholds: Sequence[float],
) -> EvalReport:
    return evaluate(dets, gts, thresholds)


def evaluate_by_occlusion(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    thresholds: Sequence[float] = COCO_THRESHOLDS,
    workers: int = 1,
    recall_points: int = RECALL_POINTS,
) -> EvalReport:
    """
    Overall report plus one report per occlusion level.

    For level L the ground truth is restricted to level-L instances; a
    detection that matches (at IoU 0.5) an instance of another level is
    ignored rather than counted as a false positive, and only images holding
    level-L instances are scored.
    """
    overall = evaluate(dets, gts, thresholds, workers, recall_points)
    levels: List[Optional[OcclusionLevel]] = [g.level for g in gts]
    if all(level is None for level in levels):
        logger.warning("No occlusion levels in the ground truth; per-level breakdown is empty")
        return overall

    primary = match_detections(dets, gts, PRIMARY_THRESHOLD).matched_detections()
    for level in sorted({lv for lv in levels if lv is not None}):
        level_gts = [g for g, lv in zip(gts, levels) if lv == level]
        images = {str(g.image_id) for g in level_gts}
        kept = [
            d
            for i, d in enumerate(dets)
            if str(d.image_id) in images and (i not in primary or levels[primary[i]] == level)
        ]
        overall.per_occlusion_level[level.label] = evaluate(kept, level_gts, thresholds, workers, recall_points)
    return overall
