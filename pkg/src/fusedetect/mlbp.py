"""Multi-scale uniform local binary patterns and histogram descriptors.

The 36-dimensional texture vector applies circular LBP at three radii
(R = 1, 2, 3 with P = 8R sampling points) to each RGB channel, reduces each
code map to a uniform-pattern histogram, and summarizes every histogram with
four statistics (mean, variance, entropy, energy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyHistogramError, TooSmallError
from .features import FeatureVector
from .imaging import GrayPlane, RgbImage, split_channels

MLBP_VERSION = "1.0.0"

RADII = (1, 2, 3)
POINTS_PER_RADIUS = 8  # P = 8R

STAT_NAMES = ("mean", "variance", "entropy", "energy")

ENTROPY_EPS = 1e-12

# Marker for border pixels that have no code (sampling circle would leave
# the plane). Excluded from histograms.
NO_CODE = -1

# Sampling offsets this close to an integer are treated as exact grid hits.
_SNAP_TOL = 1e-9

N_FEATURES = 3 * len(RADII) * len(STAT_NAMES)  # 36


@dataclass(frozen=True, eq=False)
class LbpCodeMap:
    """Per-pixel circular LBP codes with a sentinel border band."""

    width: int
    height: int
    codes: np.ndarray  # (height, width) int64, NO_CODE in the border band
    points: int
    radius: float


@dataclass(frozen=True, eq=False)
class UniformHistogram:
    """Counts per uniform-pattern label plus one trailing non-uniform bin."""

    bins: np.ndarray  # int64, length P(P-1)+3
    total: int
    scale: float


def circle_offsets(points: int, radius: float) -> list[tuple[float, float]]:
    """(drow, dcol) sampling offsets at angles 2*pi*p/P, p = 0..P-1.

    Offsets within 1e-9 of an integer are snapped so that cardinal and
    diagonal grid hits are sampled without interpolation.
    """
    offs = []
    for p in range(points):
        theta = 2.0 * math.pi * p / points
        dc = radius * math.cos(theta)
        dr = -radius * math.sin(theta)
        if abs(dr - round(dr)) < _SNAP_TOL:
            dr = float(round(dr))
        if abs(dc - round(dc)) < _SNAP_TOL:
            dc = float(round(dc))
        offs.append((dr, dc))
    return offs


def _sample_shifted(data: np.ndarray, band: int, dr: float, dc: float) -> np.ndarray:
    """Bilinear sample at (r+dr, c+dc) for every interior center (r, c).

    Uses nested lerps (row pair blended by the column fraction, then the two
    rows blended by the row fraction) so that a plane of equal values is
    reproduced exactly, keeping s(0)=1 ties honest.
    """
    h, w = data.shape
    ih, iw = h - 2 * band, w - 2 * band
    rf, cf = math.floor(dr), math.floor(dc)
    fr, fc = dr - rf, dc - cf
    r0, c0 = band + rf, band + cf
    sr = 1 if fr != 0.0 else 0
    sc = 1 if fc != 0.0 else 0

    i00 = data[r0 : r0 + ih, c0 : c0 + iw]
    i01 = data[r0 : r0 + ih, c0 + sc : c0 + sc + iw]
    i10 = data[r0 + sr : r0 + sr + ih, c0 : c0 + iw]
    i11 = data[r0 + sr : r0 + sr + ih, c0 + sc : c0 + sc + iw]

    top = i00 + fc * (i01 - i00)
    bottom = i10 + fc * (i11 - i10)
    return top + fr * (bottom - top)


def lbp_code_map(plane: GrayPlane, points: int, radius: float) -> LbpCodeMap:
    """Circular LBP codes: sum of s(g_p - g_c) * 2^p with s(x)=1 iff x >= 0."""
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    band = math.ceil(radius)
    if plane.width <= 2 * radius + 1 or plane.height <= 2 * radius + 1:
        raise TooSmallError(
            f"plane {plane.width}x{plane.height} too small for radius {radius} "
            f"(needs more than {2 * radius + 1} pixels per side)"
        )
    data = plane.data
    h, w = data.shape
    center = data[band : h - band, band : w - band]

    acc = np.zeros(center.shape, dtype=np.int64)
    for p, (dr, dc) in enumerate(circle_offsets(points, radius)):
        sampled = _sample_shifted(data, band, dr, dc)
        acc |= (sampled >= center).astype(np.int64) << p

    codes = np.full((h, w), NO_CODE, dtype=np.int64)
    codes[band : h - band, band : w - band] = acc
    return LbpCodeMap(width=w, height=h, codes=codes, points=points, radius=radius)


@lru_cache(maxsize=None)
def _uniform_code_table(points: int) -> tuple[int, ...]:
    """All codes with at most two circular transitions, ascending.

    Every such code is a circular run of k ones (k = 1..P-1) in one of P
    rotations, plus the all-zero and all-one codes: P(P-1) + 2 in total.
    """
    mask = (1 << points) - 1
    codes = {0, mask}
    for k in range(1, points):
        run = (1 << k) - 1
        for r in range(points):
            codes.add(((run << r) | (run >> (points - r))) & mask)
    return tuple(sorted(codes))


def circular_transitions(code: int, points: int) -> int:
    """Number of 0/1 changes when reading the code bits as a ring."""
    t = 0
    prev = code & 1
    for p in range(1, points + 1):
        bit = (code >> (p % points)) & 1
        if bit != prev:
            t += 1
        prev = bit
    return t


def n_bins(points: int) -> int:
    """P(P-1) + 3: one bin per uniform pattern plus the non-uniform bin."""
    return points * (points - 1) + 3


def uniform_label(code: int, points: int) -> int:
    """Label of a code: uniform codes get distinct labels in ascending code
    order, everything else shares the final non-uniform label."""
    if not 0 <= code < (1 << points):
        raise ValueError(f"code {code} out of range for {points} points")
    table = _uniform_code_table(points)
    if circular_transitions(code, points) <= 2:
        return table.index(code)
    return len(table)


def _label_map(codes: np.ndarray, points: int) -> np.ndarray:
    table = np.asarray(_uniform_code_table(points), dtype=np.int64)
    idx = np.searchsorted(table, codes)
    idx = np.minimum(idx, len(table) - 1)
    return np.where(table[idx] == codes, idx, len(table))


def uniform_histogram(code_map: LbpCodeMap) -> UniformHistogram:
    """Histogram of uniform labels over the pixels that carry a code."""
    valid = code_map.codes[code_map.codes != NO_CODE]
    labels = _label_map(valid, code_map.points)
    bins = np.bincount(labels, minlength=n_bins(code_map.points)).astype(np.int64)
    return UniformHistogram(bins=bins, total=int(valid.size), scale=code_map.radius)


def histogram_stats(h: UniformHistogram) -> tuple[float, float, float, float]:
    """(mean, variance, entropy, energy) of a histogram over its bin indices.

    entropy = -sum (H/N) ln(H/N + eps) with eps = 1e-12; the stabilizer makes
    a point mass land a hair below zero, so the result is clamped at 0.
    """
    if h.total <= 0:
        raise EmptyHistogramError("histogram counted no pixels")
    counts = h.bins.astype(np.float64)
    n = float(h.total)
    i = np.arange(counts.size, dtype=np.float64)
    mean = float(np.sum(i * counts) / n)
    variance = float(np.sum((i - mean) ** 2 * counts) / n)
    p = counts / n
    entropy = max(float(-np.sum(p * np.log(p + ENTROPY_EPS))), 0.0)
    energy = float(np.sum(p * p))
    return (mean, variance, entropy, energy)


def extract_mlbp_features(img: RgbImage) -> FeatureVector:
    """36-value texture descriptor of an RGB image.

    Per channel and per radius R in {1, 2, 3} with P = 8R points: code map,
    uniform histogram, four statistics. Concatenation is channel-major, then
    radius ascending, then (mean, variance, entropy, energy).
    """
    out = []
    for plane in split_channels(img):
        for radius in RADII:
            cm = lbp_code_map(plane, POINTS_PER_RADIUS * radius, radius)
            out.extend(histogram_stats(uniform_histogram(cm)))
    return FeatureVector(
        extractor_id="mlbp", version=MLBP_VERSION, values=np.asarray(out)
    )
