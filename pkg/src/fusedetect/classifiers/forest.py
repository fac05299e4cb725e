"""Bootstrap-aggregated gini trees with per-node feature subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tree import GINI, Tree, grow_tree

RF_DEFAULTS = {"n_trees": 100, "max_depth": None, "max_features": "sqrt"}


def _resolve_max_features(spec, d: int) -> int:
    if spec == "sqrt":
        return max(1, int(math.sqrt(d)))
    if spec is None:
        return d
    return max(1, min(int(spec), d))


@dataclass
class RfModel:
    """A trained forest; probability is the fraction of positive votes."""

    trees: list

    def proba(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        votes = np.zeros(x.shape[0], dtype=np.float64)
        for tree in self.trees:
            # a tree votes positive when its leaf fraction exceeds one half;
            # an exactly split leaf votes negative
            votes += tree.predict(x) > 0.5
        return votes / len(self.trees)

    def to_json_dict(self) -> dict:
        return {"trees": [t.to_json_dict() for t in self.trees]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "RfModel":
        return cls(trees=[Tree.from_json_dict(t) for t in d["trees"]])


def train_random_forest(x, y, hp: dict, seed: int) -> RfModel:
    """Fit hp["n_trees"] gini trees on bootstrap resamples of (x, y).

    Tree t draws its bootstrap rows and per-node feature subsets from a
    counter-based generator keyed (seed, t), so the forest comes out the
    same regardless of how training is scheduled.
    """
    n, d = x.shape
    m = _resolve_max_features(hp["max_features"], d)
    trees = []
    for t in range(int(hp["n_trees"])):
        rng = np.random.Generator(np.random.Philox(key=[seed, t]))
        boot = rng.integers(0, n, size=n)
        trees.append(
            grow_tree(
                x[boot],
                y[boot],
                GINI,
                max_depth=hp["max_depth"],
                rng=rng,
                max_features=m,
            )
        )
    return RfModel(trees=trees)
