"""RBF-kernel SVM trained by sequential minimal optimization.

The working-set sweep is fully deterministic: the second multiplier is
chosen by largest |E1 - E2| and every fallback scan runs in ascending
index order (the original heuristic randomizes the scan start), so
repeated runs give the same dual solution. Probabilities come from a
Platt sigmoid P(y=1|s) = 1 / (1 + exp(a*s + b)) fitted on the training
decision values by the damped Newton method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

SVM_DEFAULTS = {"c": 1.0, "gamma": "scale", "tol": 1e-3, "max_sweeps": 1000}

_STEP_EPS = 1e-12
_SV_EPS = 1e-12


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * squared euclidean distance) for every row pair."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    sq = np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)
    return np.exp(-gamma * sq)


def resolve_gamma(spec, x: np.ndarray) -> float:
    """"scale" maps to 1 / (n_features * variance of all entries)."""
    if spec == "scale":
        var = float(np.var(x))
        if var <= 0.0:
            return 1.0
        return 1.0 / (x.shape[1] * var)
    return float(spec)


@dataclass
class SvmModel:
    """Support vectors with dual coefficients alpha_i * y_i."""

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    gamma: float
    platt_a: float
    platt_b: float

    def decision(self, x: np.ndarray) -> np.ndarray:
        k = rbf_kernel(np.asarray(x, dtype=np.float64), self.support_vectors, self.gamma)
        return k @ self.dual_coef + self.bias

    def proba(self, x: np.ndarray) -> np.ndarray:
        return expit(-(self.platt_a * self.decision(x) + self.platt_b))

    def to_json_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SvmModel":
        return cls(
            support_vectors=np.asarray(d["support_vectors"], dtype=np.float64),
            dual_coef=np.asarray(d["dual_coef"], dtype=np.float64),
            bias=float(d["bias"]),
            gamma=float(d["gamma"]),
            platt_a=float(d["platt_a"]),
            platt_b=float(d["platt_b"]),
        )


class Smo:
    """Pairwise dual ascent over a precomputed kernel matrix.

    Decision convention f(x) = sum alpha_i y_i k(x_i, x) + b; the error
    cache E = f - y is updated incrementally after every accepted step, and
    the equality constraint sum(alpha * y) = 0 is preserved by construction.
    """

    def __init__(self, k: np.ndarray, y: np.ndarray, c: float, tol: float):
        self.k = k
        self.y = y
        self.c = c
        self.tol = tol
        self.alpha = np.zeros(y.size)
        self.b = 0.0
        self.errors = -y.astype(np.float64)

    def run(self, max_sweeps: int) -> bool:
        """Platt's outer loop; returns True once a full sweep changes nothing."""
        examine_all = True
        for _ in range(int(max_sweeps)):
            changed = 0
            if examine_all:
                targets = np.arange(self.y.size)
            else:
                targets = np.nonzero((self.alpha > 0.0) & (self.alpha < self.c))[0]
            for i2 in targets:
                changed += self._examine(int(i2))
            if examine_all:
                if changed == 0:
                    return True
                examine_all = False
            elif changed == 0:
                examine_all = True
        return False

    def _examine(self, i2: int) -> int:
        y2 = self.y[i2]
        a2 = self.alpha[i2]
        e2 = self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.c) or (r2 > self.tol and a2 > 0.0)):
            return 0
        nonbound = np.nonzero((self.alpha > 0.0) & (self.alpha < self.c))[0]
        if nonbound.size > 1:
            i1 = int(nonbound[np.argmax(np.abs(self.errors[nonbound] - e2))])
            if self._step(i1, i2):
                return 1
        for i1 in nonbound:
            if self._step(int(i1), i2):
                return 1
        for i1 in range(self.y.size):
            if self._step(i1, i2):
                return 1
        return 0

    def _step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1 = self.alpha[i1]
        a2 = self.alpha[i2]
        y1 = self.y[i1]
        y2 = self.y[i2]
        e1 = self.errors[i1]
        e2 = self.errors[i2]
        s = y1 * y2
        if s > 0.0:
            lo = max(0.0, a1 + a2 - self.c)
            hi = min(self.c, a1 + a2)
        else:
            lo = max(0.0, a2 - a1)
            hi = min(self.c, self.c + a2 - a1)
        if lo == hi:
            return False
        k11 = self.k[i1, i1]
        k12 = self.k[i1, i2]
        k22 = self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0.0:
            new2 = a2 + y2 * (e1 - e2) / eta
            new2 = min(max(new2, lo), hi)
        else:
            # degenerate curvature (identical rows): evaluate the dual
            # objective at both clip ends and move to the lower one
            w1 = (e1 + y1) - self.b - a1 * y1 * k11 - a2 * y2 * k12
            w2 = (e2 + y2) - self.b - a1 * y1 * k12 - a2 * y2 * k22

            def objective(n2):
                n1 = a1 + s * (a2 - n2)
                return (
                    0.5 * k11 * n1 * n1
                    + 0.5 * k22 * n2 * n2
                    + s * k12 * n1 * n2
                    + y1 * n1 * w1
                    + y2 * n2 * w2
                    - n1
                    - n2
                )

            lobj = objective(lo)
            hobj = objective(hi)
            if lobj < hobj - _STEP_EPS:
                new2 = lo
            elif lobj > hobj + _STEP_EPS:
                new2 = hi
            else:
                new2 = a2
        if abs(new2 - a2) < _STEP_EPS * (new2 + a2 + _STEP_EPS):
            return False
        new1 = a1 + s * (a2 - new2)
        if new1 < 0.0:
            new2 += s * new1
            new1 = 0.0
        elif new1 > self.c:
            new2 += s * (new1 - self.c)
            new1 = self.c
        d1 = y1 * (new1 - a1)
        d2 = y2 * (new2 - a2)
        b_old = self.b
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if 0.0 < new1 < self.c:
            self.b = b1
        elif 0.0 < new2 < self.c:
            self.b = b2
        else:
            self.b = 0.5 * (b1 + b2)
        self.alpha[i1] = new1
        self.alpha[i2] = new2
        self.errors += d1 * self.k[i1] + d2 * self.k[i2] + (self.b - b_old)
        return True


def _platt_objective(scores, t, a, b) -> float:
    fapb = a * scores + b
    linear = np.where(fapb >= 0.0, t * fapb, (t - 1.0) * fapb)
    return float(np.sum(linear + np.log1p(np.exp(-np.abs(fapb)))))


def fit_platt(scores, labels, max_iter=100, min_step=1e-10, sigma=1e-12):
    """Fit (a, b) of P(y=1|s) = 1 / (1 + exp(a*s + b)) by damped Newton.

    Targets are the usual smoothed priors rather than raw 0/1 labels, which
    keeps the fit finite on separable data.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    prior1 = float(np.sum(labels == 1))
    prior0 = float(labels.size - prior1)
    t = np.where(labels == 1, (prior1 + 1.0) / (prior1 + 2.0), 1.0 / (prior0 + 2.0))
    a = 0.0
    b = math.log((prior0 + 1.0) / (prior1 + 1.0))
    fval = _platt_objective(scores, t, a, b)
    for _ in range(max_iter):
        fapb = a * scores + b
        e = np.exp(-np.abs(fapb))
        p = np.where(fapb >= 0.0, e / (1.0 + e), 1.0 / (1.0 + e))
        q = np.where(fapb >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
        d2 = p * q
        h11 = sigma + float(np.sum(scores * scores * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(scores * d2))
        d1 = t - p
        g1 = float(np.sum(scores * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            na = a + step * da
            nb = b + step * db
            nf = _platt_objective(scores, t, na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step *= 0.5
        else:
            break
    return float(a), float(b)


def train_svm(x, y, hp: dict) -> SvmModel:
    """SMO-trained RBF SVM with Platt probabilities; y holds 0/1 labels."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    y_signed = np.where(y == 1, 1.0, -1.0)
    gamma = resolve_gamma(hp["gamma"], x)
    k = rbf_kernel(x, x, gamma)
    smo = Smo(k, y_signed, float(hp["c"]), float(hp["tol"]))
    smo.run(hp["max_sweeps"])
    decision = k @ (smo.alpha * y_signed) + smo.b
    platt_a, platt_b = fit_platt(decision, y)
    keep = np.nonzero(smo.alpha > _SV_EPS)[0]
    return SvmModel(
        support_vectors=x[keep].copy(),
        dual_coef=(smo.alpha * y_signed)[keep],
        bias=smo.b,
        gamma=gamma,
        platt_a=platt_a,
        platt_b=platt_b,
    )
