"""Standardization of feature families and concatenation into the fused
fingerprint.

Standardization statistics are fit on the training set only; a fingerprint
over the statistics and feature versions rides along on every standardized
vector so train/test skew is caught instead of silently tolerated.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatchError,
    FusionOrderError,
    InsufficientDataError,
    StatsMismatchError,
    UnknownFamilyError,
    VersionError,
)
from .features import CANONICAL_FAMILIES, FAMILY_DIMS, FUSED_ID, FeatureVector

FUSION_VERSION = "1.0.0"

# The seven feature configurations every results table reports.
CONFIG_NAMES = (
    "mscn",
    "clip",
    "mlbp",
    "mscn+clip",
    "mscn+mlbp",
    "clip+mlbp",
    "all",
)


def parse_config(name: str) -> tuple[str, ...]:
    """Resolve a configuration name to its families in canonical order."""
    key = name.strip().lower()
    if key == "all":
        return CANONICAL_FAMILIES
    parts = [p.strip() for p in key.split("+") if p.strip()]
    if not parts:
        raise UnknownFamilyError(f"empty feature configuration {name!r}")
    for p in parts:
        if p not in FAMILY_DIMS:
            raise UnknownFamilyError(f"unknown feature family {p!r} in {name!r}")
    if len(set(parts)) != len(parts):
        raise UnknownFamilyError(f"duplicate family in configuration {name!r}")
    return tuple(f for f in CANONICAL_FAMILIES if f in parts)


def config_name(families: tuple[str, ...]) -> str:
    if tuple(families) == CANONICAL_FAMILIES:
        return "all"
    return "+".join(families)


def config_dim(families: tuple[str, ...]) -> int:
    return sum(FAMILY_DIMS[f] for f in families)


@dataclass(frozen=True, eq=False)
class StandardizationStats:
    """Per-dimension mean/variance for each fitted family."""

    means: dict  # family -> (d,) float64
    variances: dict  # family -> (d,) float64, >= 0
    versions: dict  # family -> extractor version string
    sample_count: int

    def __post_init__(self):
        if self.sample_count < 2:
            raise InsufficientDataError(
                f"standardizer needs at least 2 samples, got {self.sample_count}"
            )
        for family, mean in self.means.items():
            if family not in FAMILY_DIMS:
                raise UnknownFamilyError(f"unknown family {family!r}")
            want = FAMILY_DIMS[family]
            var = self.variances[family]
            if mean.shape != (want,) or var.shape != (want,):
                raise DimMismatchError(
                    f"{family} stats must have {want} dimensions"
                )
            if np.any(var < 0):
                raise ValueError(f"{family} has negative variances")

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(f for f in CANONICAL_FAMILIES if f in self.means)

    @property
    def fingerprint(self) -> str:
        payload = {
            "sample_count": self.sample_count,
            "families": [
                {
                    "name": f,
                    "version": self.versions[f],
                    "means": self.means[f].tolist(),
                    "variances": self.variances[f].tolist(),
                }
                for f in self.families
            ],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def to_json_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "families": {
                f: {
                    "version": self.versions[f],
                    "means": self.means[f].tolist(),
                    "variances": self.variances[f].tolist(),
                }
                for f in self.families
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "StandardizationStats":
        means, variances, versions = {}, {}, {}
        for f, rec in d["families"].items():
            means[f] = np.asarray(rec["means"], dtype=np.float64)
            variances[f] = np.asarray(rec["variances"], dtype=np.float64)
            versions[f] = rec["version"]
        return cls(
            means=means,
            variances=variances,
            versions=versions,
            sample_count=int(d["sample_count"]),
        )


def _column_moments(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exactly-rounded per-column mean and population variance.

    fsum makes the result independent of sample order; constant columns are
    pinned to variance exactly 0 so downstream zero-variance handling kicks
    in reliably.
    """
    n, d = rows.shape
    mean = np.empty(d)
    var = np.empty(d)
    for j in range(d):
        col = rows[:, j]
        if np.all(col == col[0]):
            mean[j] = col[0]
            var[j] = 0.0
            continue
        m = math.fsum(col) / n
        mean[j] = m
        var[j] = math.fsum((col - m) ** 2) / n
    return mean, var


def fit_standardizer(samples) -> StandardizationStats:
    """Fit per-family standardization moments on training vectors.

    `samples` is any iterable of FeatureVectors; vectors are grouped by
    family. Every family present needs at least 2 vectors of one version.
    """
    groups: dict[str, list[FeatureVector]] = {}
    for fv in samples:
        if fv.extractor_id not in FAMILY_DIMS:
            raise UnknownFamilyError(
                f"cannot fit a standardizer on {fv.extractor_id!r} vectors"
            )
        groups.setdefault(fv.extractor_id, []).append(fv)
    if not groups:
        raise InsufficientDataError("no training vectors")

    means, variances, versions = {}, {}, {}
    counts = set()
    for family, group in groups.items():
        if len(group) < 2:
            raise InsufficientDataError(
                f"family {family!r} has {len(group)} vectors, needs at least 2"
            )
        vers = {fv.version for fv in group}
        if len(vers) > 1:
            raise VersionError(f"family {family!r} mixes versions {sorted(vers)}")
        rows = np.stack([fv.values for fv in group])
        means[family], variances[family] = _column_moments(rows)
        versions[family] = group[0].version
        counts.add(len(group))
    if len(counts) > 1:
        raise DimMismatchError(
            f"families were fit on unequal sample counts {sorted(counts)}"
        )
    return StandardizationStats(
        means=means,
        variances=variances,
        versions=versions,
        sample_count=counts.pop(),
    )


def standardize(f: FeatureVector, stats: StandardizationStats) -> FeatureVector:
    """z = (f - mean) / sqrt(variance); zero-variance dimensions map to 0."""
    if f.extractor_id not in stats.means:
        raise UnknownFamilyError(
            f"no statistics for family {f.extractor_id!r}; fitted: {stats.families}"
        )
    if f.version != stats.versions[f.extractor_id]:
        raise VersionError(
            f"{f.extractor_id} vector version {f.version} does not match "
            f"fitted version {stats.versions[f.extractor_id]}"
        )
    mean = stats.means[f.extractor_id]
    var = stats.variances[f.extractor_id]
    z = np.zeros_like(f.values)
    live = var > 0
    z[live] = (f.values[live] - mean[live]) / np.sqrt(var[live])
    return FeatureVector(
        extractor_id=f.extractor_id,
        version=f.version,
        values=z,
        stats_fingerprint=stats.fingerprint,
    )


def fuse(parts, mask: tuple[str, ...] | None = None) -> FeatureVector:
    """Concatenate standardized family vectors in canonical order.

    `mask` selects the participating families (default: all three). The
    parts must arrive exactly in canonical order with no duplicates or
    omissions, all standardized against the same statistics.
    """
    expected = tuple(mask) if mask is not None else CANONICAL_FAMILIES
    for fam in expected:
        if fam not in FAMILY_DIMS:
            raise UnknownFamilyError(f"unknown family {fam!r} in fusion mask")
    if len(set(expected)) != len(expected) or not expected:
        raise FusionOrderError(f"invalid fusion mask {expected}")
    if tuple(f for f in CANONICAL_FAMILIES if f in expected) != expected:
        raise FusionOrderError(
            f"fusion mask {expected} is not in canonical order {CANONICAL_FAMILIES}"
        )

    got = tuple(p.extractor_id for p in parts)
    if got != expected:
        raise FusionOrderError(
            f"expected families {expected} in order, got {got}"
        )
    fps = {p.stats_fingerprint for p in parts}
    if None in fps:
        raise StatsMismatchError("fusion inputs must be standardized first")
    if len(fps) != 1:
        raise StatsMismatchError(
            "fusion inputs were standardized with different statistics"
        )
    values = np.concatenate([p.values for p in parts])
    return FeatureVector(
        extractor_id=FUSED_ID,
        version=FUSION_VERSION,
        values=values,
        stats_fingerprint=fps.pop(),
        families=expected,
    )
