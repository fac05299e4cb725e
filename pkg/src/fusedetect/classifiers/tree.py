"""Deterministic binary decision trees shared by the ensemble trainers.

Split search is exhaustive over candidate thresholds (midpoints between
consecutive distinct sorted feature values). Ties break toward the lowest
feature index, then the lowest threshold, so a tree grown from the same
data is identical on any platform. Growth and prediction are iterative so
deep trees cannot hit the interpreter recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GINI = "gini"
MSE = "mse"

_NO_CHILD = -1


@dataclass
class Tree:
    """Flat array form of a grown tree; row i describes node i.

    Leaves have feature == -1 and child links == -1. `value` is the mean
    target of the node's training rows: the positive-class fraction for
    gini trees, the mean residual for mse trees. Boosting overwrites leaf
    values with Newton steps after growth, addressing leaves by node index.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Leaf node index for every row of x."""
        x = np.asarray(x, dtype=np.float64)
        ids = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            active = np.nonzero(self.left[ids] != _NO_CHILD)[0]
            if active.size == 0:
                return ids
            cur = ids[active]
            go_left = x[active, self.feature[cur]] <= self.threshold[cur]
            ids[active] = np.where(go_left, self.left[cur], self.right[cur])

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.value[self.apply(x)]

    def to_json_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
        )


class _Builder:
    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def alloc(self, value: float) -> int:
        self.feature.append(_NO_CHILD)
        self.threshold.append(0.0)
        self.left.append(_NO_CHILD)
        self.right.append(_NO_CHILD)
        self.value.append(value)
        return len(self.value) - 1

    def freeze(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
        )


def _best_split(x, y, idx, feats, criterion):
    """Best (feature, threshold) over the given features, or None.

    Both criteria maximize sum over the two children of (sum of targets
    squared) / child size; for gini the negative-class sum joins the same
    expression, which is algebraically equivalent to minimizing weighted
    impurity. Scores are compared with strict >, and candidates are visited
    in ascending feature index then ascending threshold, which implements
    the documented tie-break.
    """
    sub = x[idx]
    ysub = y[idx]
    n = idx.size
    best_score = -np.inf
    best = None
    for f in feats:
        col = sub[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        cuts = np.nonzero(sv[1:] > sv[:-1])[0]
        if cuts.size == 0:
            continue
        sy = ysub[order]
        csum = np.cumsum(sy)
        nl = (cuts + 1).astype(np.float64)
        nr = n - nl
        sl = csum[cuts]
        sr = csum[-1] - sl
        if criterion == GINI:
            # sy holds 0/1 labels, so the cumulative sum counts positives
            score = (sl * sl + (nl - sl) ** 2) / nl + (sr * sr + (nr - sr) ** 2) / nr
        else:
            score = sl * sl / nl + sr * sr / nr
        j = int(np.argmax(score))
        if score[j] > best_score:
            a = sv[cuts[j]]
            b = sv[cuts[j] + 1]
            thr = 0.5 * (a + b)
            if thr == b:
                # midpoint rounded up to the right value; fall back to the
                # left one so "x <= thr" keeps b on the right side
                thr = a
            best_score = score[j]
            best = (int(f), float(thr))
    return best


def grow_tree(x, y, criterion, max_depth=None, rng=None, max_features=None) -> Tree:
    """Grow a binary tree on rows of x against targets y.

    criterion "gini" treats y as 0/1 class labels, "mse" as regression
    targets. When max_features is smaller than the width, each internal
    node draws that many distinct candidate features from rng; if none of
    them admits a split the search falls back to the full feature range, so
    an impure node only becomes a leaf once no feature splits it. Zero-gain
    splits are allowed (each side keeps at least one row, so growth always
    terminates), which is what lets depth-2 trees carve XOR layouts.
    """
    if criterion not in (GINI, MSE):
        raise ValueError(f"unknown split criterion {criterion!r}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = x.shape
    builder = _Builder()
    root = builder.alloc(float(y.mean()))
    stack = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        ys = y[idx]
        if idx.size < 2 or np.all(ys == ys[0]):
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        if max_features is not None and max_features < d:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
            split = _best_split(x, y, idx, feats, criterion)
            if split is None:
                split = _best_split(x, y, idx, np.arange(d), criterion)
        else:
            split = _best_split(x, y, idx, np.arange(d), criterion)
        if split is None:
            continue
        f, thr = split
        mask = x[idx, f] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        left = builder.alloc(float(y[left_idx].mean()))
        right = builder.alloc(float(y[right_idx].mean()))
        builder.feature[node] = f
        builder.threshold[node] = thr
        builder.left[node] = left
        builder.right[node] = right
        stack.append((right, right_idx, depth + 1))
        stack.append((left, left_idx, depth + 1))
    return builder.freeze()
