"""Local contrast normalization and co-occurrence texture statistics.

The 72-dimensional statistical feature vector is built per RGB channel:
normalize each channel by its local mean and deviation (7x7 Gaussian window),
quantize the coefficients, accumulate symmetric co-occurrence matrices at
four orientations, and reduce each matrix to six scalar descriptors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DegenerateGlcmError, TooSmallError
from .features import FeatureVector
from .imaging import GrayPlane, RgbImage, split_channels

MSCN_VERSION = "1.0.0"

WINDOW_SIZE = 7
# Window truncated at 3 sigma, the usual convention for a 7-tap kernel.
WINDOW_SIGMA = 7.0 / 6.0

DEFAULT_LEVELS = 16
DEFAULT_CLIP = 3.0

ORIENTATIONS = (0, 45, 90, 135)

# Displacement (drow, dcol) per orientation at unit distance. Accumulation is
# symmetric, so (dr, dc) and (-dr, -dc) yield the same matrix.
_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}

HARALICK_NAMES = (
    "contrast",
    "dissimilarity",
    "homogeneity",
    "asm",
    "energy",
    "correlation",
)

N_FEATURES = 3 * len(ORIENTATIONS) * len(HARALICK_NAMES)  # 72


@dataclass(frozen=True, eq=False)
class MscnMap:
    """Per-pixel contrast-normalized coefficients."""

    width: int
    height: int
    coeffs: np.ndarray  # (height, width) float64


@dataclass(frozen=True, eq=False)
class Glcm:
    """Normalized symmetric co-occurrence matrix for one displacement."""

    levels: int
    matrix: np.ndarray  # (levels, levels) float64, entries sum to 1
    orientation: int
    distance: int


@dataclass(frozen=True)
class HaralickSet:
    contrast: float
    dissimilarity: float
    homogeneity: float
    asm: float
    energy: float
    correlation: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.contrast,
            self.dissimilarity,
            self.homogeneity,
            self.asm,
            self.energy,
            self.correlation,
        )


def gaussian_kernel(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    """Unit-sum 1-D Gaussian tap weights."""
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def mscn_transform(plane: GrayPlane) -> MscnMap:
    """Normalize a plane by its local mean and deviation.

    mu and sigma come from separable correlation with the unit-sum Gaussian
    window; borders use whole-sample reflection (edge pixel not repeated).
    sigma = sqrt(max(E[x^2] - mu^2, 0)), coefficients = (x - mu) / (sigma + 1).
    """
    if plane.width < WINDOW_SIZE or plane.height < WINDOW_SIZE:
        raise TooSmallError(
            f"plane {plane.width}x{plane.height} smaller than the "
            f"{WINDOW_SIZE}x{WINDOW_SIZE} window"
        )
    k = gaussian_kernel()
    data = plane.data

    def smooth(a):
        # "mirror" = reflect about the edge sample without repeating it.
        return correlate1d(
            correlate1d(a, k, axis=0, mode="mirror"), k, axis=1, mode="mirror"
        )

    mu = smooth(data)
    ex2 = smooth(data * data)
    var = np.maximum(ex2 - mu * mu, 0.0)
    sigma = np.sqrt(var)
    coeffs = (data - mu) / (sigma + 1.0)
    return MscnMap(width=plane.width, height=plane.height, coeffs=coeffs)


def quantize_mscn(
    mscn: MscnMap, levels: int = DEFAULT_LEVELS, clip: float = DEFAULT_CLIP
) -> np.ndarray:
    """Clip coefficients to [-clip, +clip] and map linearly to integer bins.

    v maps to floor((v + clip) / (2 clip) * levels); +clip lands in the last
    bin rather than overflowing it.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if clip <= 0:
        raise ValueError(f"clip must be positive, got {clip}")
    v = np.clip(mscn.coeffs, -clip, clip)
    bins = np.floor((v + clip) / (2.0 * clip) * levels).astype(np.int64)
    return np.minimum(bins, levels - 1)


def glcm_compute(
    bins: np.ndarray, orientation: int, distance: int = 1, levels: int = DEFAULT_LEVELS
) -> Glcm:
    """Count pixel pairs at the displacement given by (orientation, distance).

    Both (i, j) and (j, i) are accumulated, so the matrix is symmetric; the
    counts are normalized to a joint probability table. Pairs never cross the
    image border.
    """
    if orientation not in _OFFSETS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation}")
    if distance < 1:
        raise ValueError(f"distance must be >= 1, got {distance}")
    dr, dc = (d * distance for d in _OFFSETS[orientation])
    h, w = bins.shape

    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 >= r1 or c0 >= c1:
        raise DegenerateGlcmError(
            f"no valid pairs for orientation {orientation} distance {distance} "
            f"on a {w}x{h} plane"
        )
    a = bins[r0:r1, c0:c1].ravel()
    b = bins[r0 + dr : r1 + dr, c0 + dc : c1 + dc].ravel()

    counts = np.bincount(a * levels + b, minlength=levels * levels).reshape(
        levels, levels
    )
    counts = counts + counts.T
    matrix = counts / counts.sum()
    return Glcm(levels=levels, matrix=matrix, orientation=orientation, distance=distance)


def haralick_features(g: Glcm) -> HaralickSet:
    """Six scalar texture descriptors of a normalized co-occurrence matrix.

    correlation is defined as 1.0 when either marginal variance vanishes:
    a single-level plane is perfectly self-correlated.
    """
    p = g.matrix
    n = g.levels
    i = np.arange(n, dtype=np.float64)[:, None]
    j = np.arange(n, dtype=np.float64)[None, :]
    diff = i - j

    contrast = float(np.sum(p * diff * diff))
    dissimilarity = float(np.sum(p * np.abs(diff)))
    homogeneity = float(np.sum(p / (1.0 + diff * diff)))
    asm = float(np.sum(p * p))
    energy = math.sqrt(asm)

    pi = p.sum(axis=1)
    pj = p.sum(axis=0)
    idx = np.arange(n, dtype=np.float64)
    mu_i = float(np.sum(idx * pi))
    mu_j = float(np.sum(idx * pj))
    var_i = float(np.sum((idx - mu_i) ** 2 * pi))
    var_j = float(np.sum((idx - mu_j) ** 2 * pj))
    denom = math.sqrt(var_i) * math.sqrt(var_j)
    if denom == 0.0:
        correlation = 1.0
    else:
        correlation = float(np.sum((i - mu_i) * (j - mu_j) * p) / denom)

    return HaralickSet(
        contrast=contrast,
        dissimilarity=dissimilarity,
        homogeneity=homogeneity,
        asm=asm,
        energy=energy,
        correlation=correlation,
    )


def extract_mscn_features(
    img: RgbImage, levels: int = DEFAULT_LEVELS, clip: float = DEFAULT_CLIP
) -> FeatureVector:
    """72-value statistical descriptor of an RGB image.

    Per channel: contrast-normalize, quantize, accumulate one co-occurrence
    matrix per orientation at distance 1, and take the six descriptors of
    each. Concatenation is channel-major, then orientation, then descriptor.
    """
    out = []
    for plane in split_channels(img):
        bins = quantize_mscn(mscn_transform(plane), levels=levels, clip=clip)
        for orientation in ORIENTATIONS:
            g = glcm_compute(bins, orientation, distance=1, levels=levels)
            out.extend(haralick_features(g).as_tuple())
    return FeatureVector(
        extractor_id="mscn", version=MSCN_VERSION, values=np.asarray(out)
    )
