"""Classification metrics and ROC / PR / calibration curves.

AUROC is computed by trapezoidal integration of the threshold-swept ROC
curve. With thresholds taken at every distinct score (ties move together),
this is identical to positive/negative pair concordance with ties counted
as one half.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

log = logging.getLogger(__name__)


@dataclass
class MetricsRow:
    model: str
    auroc: float
    accuracy: float
    f1: float
    precision: float
    recall: float

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "AUC": self.auroc,
            "Acc": self.accuracy,
            "F1": self.f1,
            "Pre": self.precision,
            "Rec": self.recall,
        }


@dataclass
class CurveSeries:
    kind: str  # ROC | PR | calibration
    x: np.ndarray
    y: np.ndarray
    band_mean: np.ndarray | None = None
    band_std: np.ndarray | None = None
    label: str = ""

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def _check_scores_labels(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValidationError("scores and labels must be 1-D arrays of equal length")
    if not np.all(np.isfinite(scores)):
        raise ValidationError("scores must be finite")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValidationError("labels must be 0/1")
    return scores, labels.astype(np.int64)


def _roc_points(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) swept over distinct score thresholds, anchored at (0,0) and (1,1)."""
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = labels[order]
    # indices where the score changes: complete tie groups move together
    distinct = np.nonzero(np.diff(s))[0]
    cut = np.r_[distinct, s.size - 1]
    tps = np.cumsum(y)[cut].astype(np.float64)
    fps = (cut + 1) - tps
    n_pos = float(labels.sum())
    n_neg = float(labels.size - labels.sum())
    tpr = np.r_[0.0, tps / n_pos]
    fpr = np.r_[0.0, fps / n_neg]
    return fpr, tpr


def auroc_score(scores, labels) -> float:
    scores, labels = _check_scores_labels(scores, labels)
    if labels.min() == labels.max():
        raise ValidationError("AUROC needs both classes present")
    fpr, tpr = _roc_points(scores, labels)
    return float(np.trapezoid(tpr, fpr))


def compute_metrics(scores, labels, threshold: float = 0.5, model: str = "") -> MetricsRow:
    """Metrics row at a fixed decision threshold; score >= threshold predicts positive."""
    scores, labels = _check_scores_labels(scores, labels)
    if labels.min() != labels.max():
        auc = auroc_score(scores, labels)
    else:
        auc = float("nan")
        log.warning("single-class labels: AUROC undefined for model %s", model)
    pred = scores >= threshold
    tp = int(np.sum(pred & (labels == 1)))
    fp = int(np.sum(pred & (labels == 0)))
    fn = int(np.sum(~pred & (labels == 1)))
    accuracy = float(np.mean(pred == (labels == 1)))
    if tp + fp == 0:
        precision = 0.0
        log.info("no positive predictions at threshold %.3g; precision set to 0", threshold)
    else:
        precision = tp / (tp + fp)
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return MetricsRow(model=model, auroc=auc, accuracy=accuracy, f1=f1,
                      precision=precision, recall=recall)


def roc_curve(scores, labels, label: str = "") -> CurveSeries:
    scores, labels = _check_scores_labels(scores, labels)
    if labels.min() == labels.max():
        raise ValidationError("ROC curve needs both classes present")
    fpr, tpr = _roc_points(scores, labels)
    return CurveSeries(kind="ROC", x=fpr, y=tpr, label=label)


def pr_curve(scores, labels, label: str = "") -> CurveSeries:
    scores, labels = _check_scores_labels(scores, labels)
    if labels.min() == labels.max():
        raise ValidationError("PR curve needs both classes present")
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = labels[order]
    distinct = np.nonzero(np.diff(s))[0]
    cut = np.r_[distinct, s.size - 1]
    tps = np.cumsum(y)[cut].astype(np.float64)
    n_pred = (cut + 1).astype(np.float64)
    n_pos = float(labels.sum())
    recall = np.r_[0.0, tps / n_pos]
    precision = np.r_[1.0, tps / n_pred]  # recall 0 anchored at precision 1
    return CurveSeries(kind="PR", x=recall, y=precision, label=label)


def calibration_curve(scores, labels, n_bins: int = 10, label: str = "") -> CurveSeries:
    """Per equal-width score bin: (mean predicted score, observed positive rate)."""
    if n_bins < 2:
        raise ValidationError("n_bins must be >= 2")
    scores, labels = _check_scores_labels(scores, labels)
    if np.any(scores < 0) or np.any(scores > 1):
        raise ValidationError("calibration expects scores in [0,1]")
    bins = np.minimum((scores * n_bins).astype(np.int64), n_bins - 1)
    xs, ys = [], []
    for b in range(n_bins):
        mask = bins == b
        if not mask.any():
            continue
        xs.append(float(scores[mask].mean()))
        ys.append(float(labels[mask].mean()))
    return CurveSeries(kind="calibration", x=np.array(xs), y=np.array(ys), label=label)


COMMON_GRID_POINTS = 101


def aggregate_curves(series: list[CurveSeries], label: str = "") -> CurveSeries:
    """Resample curves of one kind onto a shared x grid; emit per-x mean and std.

    Std uses the population convention (divide by the number of scenarios).
    """
    if not series:
        raise ValidationError("need at least one curve to aggregate")
    kinds = {s.kind for s in series}
    if len(kinds) != 1:
        raise ValidationError(f"cannot aggregate mixed curve kinds: {sorted(kinds)}")
    kind = series[0].kind
    grid = np.linspace(0.0, 1.0, COMMON_GRID_POINTS)
    resampled = np.empty((len(series), grid.size))
    for i, s in enumerate(series):
        order = np.argsort(s.x, kind="mergesort")
        resampled[i] = np.interp(grid, s.x[order], s.y[order])
    mean = resampled.mean(axis=0)
    std = resampled.std(axis=0)
    return CurveSeries(kind=kind, x=grid, y=mean, band_mean=mean, band_std=std,
                       label=label or f"mean {kind}")
