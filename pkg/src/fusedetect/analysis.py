"""Distribution-level analysis: Fréchet distance, PCA, silhouette,
rank statistics, and multiple-testing correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .errors import (
    ConstantInputError,
    DimError,
    DimMismatchError,
    GroupCountError,
    InsufficientDataError,
    LengthError,
    NumericalError,
    RangeError,
    SingleClusterError,
)

# Reporting conventions.
SIGNIFICANCE_Q = 0.05
EFFECT_BANDS = {"small": 0.01, "medium": 0.08, "large": 0.26}

_EIG_CLAMP = 1e-8
_SHRINKAGE = 1e-6


@dataclass(frozen=True, eq=False)
class GaussianSummary:
    mean: np.ndarray
    cov: np.ndarray
    sample_count: int

    def __post_init__(self):
        if self.sample_count < 2:
            raise InsufficientDataError(
                f"need at least 2 samples, got {self.sample_count}"
            )
        d = self.mean.shape[0]
        if self.cov.shape != (d, d):
            raise ValueError(f"covariance shape {self.cov.shape} does not match dim {d}")
        if not np.array_equal(self.cov, self.cov.T):
            raise ValueError("covariance must be symmetric")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class SignificanceRecord:
    dataset: str
    generator: str
    metric: str
    factor: str
    h: float
    epsilon_squared: float
    p_value: float
    q_value: float

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")
        if self.q_value < self.p_value:
            raise ValueError("q_value cannot undercut p_value")
        if not 0.0 <= self.epsilon_squared <= 1.0:
            raise ValueError(f"epsilon_squared {self.epsilon_squared} outside [0, 1]")

    @property
    def significant(self) -> bool:
        return self.q_value <= SIGNIFICANCE_Q


def _as_matrix(samples) -> np.ndarray:
    """Accept a 2-d array, a sequence of rows, or a sequence of FeatureVectors."""
    if isinstance(samples, np.ndarray):
        m = np.asarray(samples, dtype=np.float64)
    else:
        rows = [getattr(s, "values", s) for s in samples]
        if not rows:
            raise InsufficientDataError("no samples")
        widths = {np.asarray(r).shape for r in rows}
        if len(widths) > 1:
            raise DimMismatchError(f"inconsistent sample dimensions: {sorted(widths)}")
        m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"samples must form a 2-d matrix, got shape {m.shape}")
    return m


def gaussian_summary(samples) -> GaussianSummary:
    """Sample mean and (1/(n-1)) covariance, symmetrized."""
    m = _as_matrix(samples)
    n = m.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    mean = m.mean(axis=0)
    centered = m - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianSummary(mean=mean, cov=cov, sample_count=n)


def _psd_sqrt(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    if w.min() < -_EIG_CLAMP * max(1.0, float(np.abs(w).max())):
        raise NumericalError(
            f"covariance is not positive semi-definite (min eigenvalue {w.min():g})"
        )
    w = np.maximum(w, 0.0)
    return (v * np.sqrt(w)) @ v.T


def frechet_distance(a: GaussianSummary, b: GaussianSummary) -> float:
    """Fréchet distance between two Gaussians:
    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}).

    The matrix square root is taken by eigendecomposition of the symmetrized
    product S_a^{1/2} S_b S_a^{1/2}. When a summary has fewer samples than
    dimensions its covariance gets diagonal shrinkage 1e-6 * trace/d.
    """
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    d = a.dim

    def shrunk(s: GaussianSummary) -> np.ndarray:
        cov = s.cov
        if s.sample_count < s.dim:
            lam = _SHRINKAGE * float(np.trace(cov)) / d
            cov = cov + lam * np.eye(d)
        return cov

    ca, cb = shrunk(a), shrunk(b)
    sa_sqrt = _psd_sqrt(ca)
    inner = sa_sqrt @ cb @ sa_sqrt
    inner = (inner + inner.T) / 2.0
    w = np.linalg.eigvalsh(inner)
    tol = _EIG_CLAMP * max(1.0, float(np.abs(w).max()))
    if w.min() < -tol:
        raise NumericalError(
            f"matrix square root failed (min eigenvalue {w.min():g})"
        )
    tr_sqrt = float(np.sqrt(np.maximum(w, 0.0)).sum())

    diff = a.mean - b.mean
    dist = float(diff @ diff) + float(np.trace(ca) + np.trace(cb)) - 2.0 * tr_sqrt
    return max(dist, 0.0)


def pca_fit_transform(samples, k: int):
    """Project centered samples onto the top-k covariance eigenvectors.

    Returns (reduced (n, k), explained-variance ratios (k,)). Each
    eigenvector is oriented so its largest-magnitude component is positive.
    """
    m = _as_matrix(samples)
    n, d = m.shape
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    if k > d:
        raise DimError(f"cannot keep {k} components of {d}-dimensional data")
    if k < 1:
        raise DimError(f"k must be at least 1, got {k}")

    centered = m - m.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    w, v = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    w = np.maximum(w[order], 0.0)
    v = v[:, order]

    top = v[:, :k].copy()
    for col in range(k):
        pivot = np.argmax(np.abs(top[:, col]))
        if top[pivot, col] < 0:
            top[:, col] = -top[:, col]

    total = float(w.sum())
    ratios = w[:k] / total if total > 0 else np.zeros(k)
    return centered @ top, ratios


def silhouette_score(samples, labels) -> float:
    """Mean silhouette over all points, Euclidean metric, two clusters.

    A point alone in its cluster contributes 0; a point whose intra and
    inter distances are both 0 also contributes 0.
    """
    m = _as_matrix(samples)
    y = np.asarray(labels)
    if y.shape[0] != m.shape[0]:
        raise LengthError(f"{m.shape[0]} samples but {y.shape[0]} labels")
    uniq = np.unique(y)
    if len(uniq) < 2:
        raise SingleClusterError("silhouette needs two clusters")
    if len(uniq) > 2:
        raise ValueError(f"expected exactly 2 clusters, got {len(uniq)}")

    diff = m[:, None, :] - m[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))

    scores = np.zeros(m.shape[0])
    for i in range(m.shape[0]):
        same = y == y[i]
        n_same = int(same.sum())
        if n_same < 2:
            continue  # singleton cluster, score 0
        a = dist[i, same].sum() / (n_same - 1)  # excludes the zero self-distance
        b = dist[i, ~same].mean()
        denom = max(a, b)
        scores[i] = (b - a) / denom if denom > 0 else 0.0
    return float(scores.mean())


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sv = values[order]
    i = 0
    while i < len(sv):
        j = i
        while j + 1 < len(sv) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Pearson correlation of average ranks."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise LengthError(f"x {xa.shape} and y {ya.shape} must be equal-length 1-d")
    if len(xa) < 3:
        raise LengthError(f"need at least 3 pairs, got {len(xa)}")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ConstantInputError("rank correlation is undefined for constant input")
    rx = _average_ranks(xa)
    ry = _average_ranks(ya)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def kruskal_wallis(groups) -> tuple[float, float]:
    """Kruskal-Wallis H with tie correction and its chi-squared p-value.

    All observations are ranked jointly with average ranks; the tie
    correction divides H by 1 - sum(t^3 - t)/(n^3 - n). When every value is
    identical the statistic is 0 and p is 1.
    """
    gs = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if len(gs) < 2:
        raise GroupCountError(f"need at least 2 groups, got {len(gs)}")
    if any(len(g) == 0 for g in gs):
        raise ValueError("every group needs at least one observation")
    n = sum(len(g) for g in gs)
    if n < 3:
        raise ValueError(f"need at least 3 observations in total, got {n}")

    pooled = np.concatenate(gs)
    ranks = _average_ranks(pooled)

    h = 0.0
    start = 0
    for g in gs:
        r = ranks[start : start + len(g)]
        h += r.sum() ** 2 / len(g)
        start += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)

    _, tie_counts = np.unique(pooled, return_counts=True)
    correction = 1.0 - float(np.sum(tie_counts**3 - tie_counts)) / (n**3 - n)
    if correction == 0.0:
        return 0.0, 1.0  # every observation tied
    h = h / correction

    df = len(gs) - 1
    p = float(gammaincc(df / 2.0, max(h, 0.0) / 2.0))
    return h, p


def epsilon_squared(h: float, n: int) -> float:
    """Rank effect size H/(n-1), clamped to [0, 1]."""
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if h < 0:
        raise ValueError(f"H must be non-negative, got {h}")
    return min(max(h / (n - 1), 0.0), 1.0)


def bh_fdr(p_values) -> np.ndarray:
    """Benjamini-Hochberg step-up q-values, in the input order."""
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or len(p) == 0:
        raise RangeError("p_values must be a non-empty 1-d sequence")
    if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
        raise RangeError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    q_sorted = np.minimum.accumulate(scaled[::-1])[::-1]
    q_sorted = np.minimum(q_sorted, 1.0)
    q = np.empty(m, dtype=np.float64)
    q[order] = q_sorted
    return q
