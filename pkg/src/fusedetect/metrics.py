"""Binary classification metrics: accuracy and Matthews correlation.

The genai class is the positive class throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyError, LengthError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")
        if self.total < 1:
            raise ValueError("confusion matrix must count at least one pair")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(labels, predictions) -> ConfusionMatrix:
    """Tally a prediction run against ground truth (1 = genai, 0 = natural)."""
    y = np.asarray(labels)
    p = np.asarray(predictions)
    if y.shape != p.shape or y.ndim != 1:
        raise LengthError(f"labels {y.shape} and predictions {p.shape} must be equal-length 1-d")
    if y.size == 0:
        raise EmptyError("no label/prediction pairs")
    bad = ~np.isin(y, (0, 1)) | ~np.isin(p, (0, 1))
    if np.any(bad):
        raise ValueError("labels and predictions must be 0 or 1")
    return ConfusionMatrix(
        tp=int(np.sum((y == 1) & (p == 1))),
        tn=int(np.sum((y == 0) & (p == 0))),
        fp=int(np.sum((y == 0) & (p == 1))),
        fn=int(np.sum((y == 1) & (p == 0))),
    )


def accuracy(c: ConfusionMatrix) -> float:
    return (c.tp + c.tn) / c.total


def mcc(c: ConfusionMatrix) -> float:
    """Matthews correlation coefficient; 0 when the denominator degenerates."""
    tp, tn, fp, fn = c.tp, c.tn, c.fp, c.fn
    f1, f2, f3, f4 = tp + fp, tp + fn, tn + fp, tn + fn
    if f1 == 0 or f2 == 0 or f3 == 0 or f4 == 0:
        return 0.0
    num = tp * tn - fp * fn
    # pairwise products keep perfect matrices exact and dodge overflow on
    # huge counts (python ints never overflow; the sqrt rounds once per pair)
    return num / (math.sqrt(f1 * f2) * math.sqrt(f3 * f4))
