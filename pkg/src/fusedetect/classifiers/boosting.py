"""Gradient boosted regression trees for binary log-loss.

Each stage fits an mse tree to the current residuals y - sigmoid(F) and
then replaces every leaf value with a single Newton step (residual sum
over hessian sum), the classic logistic boosting recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .tree import MSE, Tree, grow_tree

GB_DEFAULTS = {"n_stages": 100, "learning_rate": 0.1, "max_depth": 3}

_HESSIAN_FLOOR = 1e-12


@dataclass
class GbModel:
    """Additive log-odds model F(x) = f0 + learning_rate * sum of trees."""

    f0: float
    learning_rate: float
    trees: list

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        s = np.full(x.shape[0], self.f0)
        for tree in self.trees:
            s += self.learning_rate * tree.predict(x)
        return s

    def proba(self, x: np.ndarray) -> np.ndarray:
        return expit(self.scores(x))

    def to_json_dict(self) -> dict:
        return {
            "f0": self.f0,
            "learning_rate": self.learning_rate,
            "trees": [t.to_json_dict() for t in self.trees],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GbModel":
        return cls(
            f0=float(d["f0"]),
            learning_rate=float(d["learning_rate"]),
            trees=[Tree.from_json_dict(t) for t in d["trees"]],
        )


def _log_loss(y, scores) -> float:
    margins = np.where(y == 1, scores, -scores)
    return float(np.mean(np.logaddexp(0.0, -margins)))


def train_gradient_boosting(x, y, hp: dict):
    """Boost hp["n_stages"] trees; requires both classes present.

    Returns (model, staged_losses) where staged_losses[t] is the mean
    training log-loss after stage t has been applied. The base score f0 is
    the prior log-odds, so stage 0 starts from the best constant model.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    pos = float(np.sum(y))
    f0 = math.log(pos / (n - pos))
    scores = np.full(n, f0)
    lr = float(hp["learning_rate"])
    trees = []
    losses = []
    for _ in range(int(hp["n_stages"])):
        p = expit(scores)
        residual = y - p
        tree = grow_tree(x, residual, MSE, max_depth=hp["max_depth"])
        leaf = tree.apply(x)
        hessian = p * (1.0 - p)
        for node in np.unique(leaf):
            rows = leaf == node
            tree.value[node] = float(residual[rows].sum()) / max(
                float(hessian[rows].sum()), _HESSIAN_FLOOR
            )
        trees.append(tree)
        scores = scores + lr * tree.value[leaf]
        losses.append(_log_loss(y, scores))
    return GbModel(f0=f0, learning_rate=lr, trees=trees), losses
