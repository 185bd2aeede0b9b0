"""Evaluation metrics: matching, average precision, occlusion levels, harvest success."""
