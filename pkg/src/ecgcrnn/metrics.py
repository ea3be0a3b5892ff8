"""Evaluation metrics: accuracy, per-class F1, challenge score, majority vote."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import CLASS_ORDER


@dataclass
class ConfusionMatrix:
    """K x K counts, rows = true class, columns = predicted class.

    Class order is fixed as (normal, afib, other, noise) truncated to K.
    """

    counts: np.ndarray
    classes: tuple = ()

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = self.counts.shape[0]
        if self.counts.shape != (k, k):
            raise ValueError(f"confusion matrix must be square, got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("confusion matrix entries must be non-negative")
        if not self.classes:
            self.classes = CLASS_ORDER[:k]

    @classmethod
    def empty(cls, k: int) -> "ConfusionMatrix":
        return cls(np.zeros((k, k), dtype=np.int64))

    @classmethod
    def from_predictions(cls, y_true, y_pred, k: int) -> "ConfusionMatrix":
        cm = cls.empty(k)
        for t, p in zip(y_true, y_pred):
            cm.counts[t, p] += 1
        return cm

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def f1_per_class(cm: ConfusionMatrix) -> np.ndarray:
    """F1_k = 2 TP / (2 TP + FP + FN); 0 when the denominator is 0."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    tp = np.diag(cm.counts).astype(float)
    fp = cm.counts.sum(axis=0) - tp
    fn = cm.counts.sum(axis=1) - tp
    denom = 2 * tp + fp + fn
    return np.divide(2 * tp, denom, out=np.zeros_like(tp), where=denom > 0)


def cinc_score(cm: ConfusionMatrix) -> float:
    """Challenge score: mean F1 of normal, afib, other (noise excluded)."""
    if cm.counts.shape[0] != 4:
        raise ValueError("challenge score requires the 4-class confusion matrix")
    return float(f1_per_class(cm)[:3].mean())


def majority_vote(predictions) -> int:
    """Modal class index; ties broken by the fixed class order."""
    preds = list(predictions)
    if not preds:
        raise ValueError("empty prediction list")
    counts = np.bincount(preds)
    return int(counts.argmax())  # argmax takes the lowest index on ties


def precision_recall(cm: ConfusionMatrix):
    tp = np.diag(cm.counts).astype(float)
    pred = cm.counts.sum(axis=0)
    true = cm.counts.sum(axis=1)
    prec = np.divide(tp, pred, out=np.zeros_like(tp), where=pred > 0)
    rec = np.divide(tp, true, out=np.zeros_like(tp), where=true > 0)
    return prec, rec


def format_report(cm: ConfusionMatrix) -> str:
    """Human-readable metrics report with the full matrix."""
    prec, rec = precision_recall(cm)
    f1 = f1_per_class(cm)
    lines = [f"records: {cm.total}", f"accuracy: {accuracy(cm):.4f}"]
    if cm.counts.shape[0] == 4:
        lines.append(f"challenge_score: {cinc_score(cm):.4f}")
    lines.append("")
    lines.append(f"{'class':<10} {'precision':>9} {'recall':>9} {'f1':>9}")
    for i, name in enumerate(cm.classes):
        lines.append(f"{name:<10} {prec[i]:>9.4f} {rec[i]:>9.4f} {f1[i]:>9.4f}")
    lines.append("")
    lines.append("confusion matrix (rows: true, cols: predicted):")
    header = " ".join(f"{c:>8}" for c in cm.classes)
    lines.append(f"{'':<10}{header}")
    for i, name in enumerate(cm.classes):
        row = " ".join(f"{cm.counts[i, j]:>8d}" for j in range(len(cm.classes)))
        lines.append(f"{name:<10}{row}")
    return "\n".join(lines) + "\n"
