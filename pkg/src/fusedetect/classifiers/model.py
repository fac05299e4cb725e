"""Shared training, prediction, and model file contract for all three kinds.

A trained model is a versioned, self-describing unit: it carries the
standardization statistics and fusion mask used at training time, so a
vector can be checked against the exact preprocessing it expects before
any probability is produced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    DimMismatchError,
    FusionOrderError,
    InvalidFeatureError,
    IoError,
    LengthError,
    ParseError,
    SingleClassError,
    StatsMismatchError,
    UnknownFamilyError,
    VersionError,
)
from ..features import CANONICAL_FAMILIES, FAMILY_DIMS, FUSED_ID, FeatureVector
from ..fusion import StandardizationStats, config_dim
from .boosting import GB_DEFAULTS, GbModel, train_gradient_boosting
from .forest import RF_DEFAULTS, RfModel, train_random_forest
from .svm import SVM_DEFAULTS, SvmModel, train_svm

MODEL_FORMAT_VERSION = "1"

KINDS = ("gb", "rf", "svm")

DEFAULT_TAU = 0.5

_DEFAULTS = {"gb": GB_DEFAULTS, "rf": RF_DEFAULTS, "svm": SVM_DEFAULTS}

_PARAM_TYPES = {"gb": GbModel, "rf": RfModel, "svm": SvmModel}


def _check_mask(mask):
    if not mask:
        raise FusionOrderError("feature mask is empty")
    for fam in mask:
        if fam not in FAMILY_DIMS:
            raise UnknownFamilyError(f"unknown family {fam!r} in feature mask")
    if tuple(f for f in CANONICAL_FAMILIES if f in mask) != tuple(mask):
        raise FusionOrderError(f"feature mask {mask} is not in canonical order")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Fused training vectors with labels and per-sample generator tags.

    labels: 0 for natural images, 1 for generated ones. Every vector must
    be fused over the same family mask and standardized with `stats`.
    """

    vectors: list
    labels: np.ndarray
    generators: tuple
    stats: StandardizationStats

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "generators", tuple(self.generators))
        n = len(self.vectors)
        if n == 0:
            raise LengthError("dataset has no samples")
        if labels.shape != (n,) or len(self.generators) != n:
            raise LengthError(
                f"got {n} vectors, {labels.size} labels, "
                f"{len(self.generators)} generator tags"
            )
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("labels must be 0 (natural) or 1 (genai)")
        mask = self.vectors[0].families
        fingerprint = self.stats.fingerprint
        for fv in self.vectors:
            if fv.extractor_id != FUSED_ID:
                raise FusionOrderError(
                    f"dataset vectors must be fused, got {fv.extractor_id!r}"
                )
            if fv.families != mask:
                raise FusionOrderError(
                    f"mixed fusion masks in dataset: {mask} vs {fv.families}"
                )
            if fv.stats_fingerprint != fingerprint:
                raise StatsMismatchError(
                    "dataset vector was standardized with different statistics"
                )

    @property
    def mask(self) -> tuple:
        return self.vectors[0].families

    def matrix(self) -> np.ndarray:
        return np.stack([fv.values for fv in self.vectors])


@dataclass(frozen=True, eq=False)
class TrainedModel:
    kind: str
    hyperparameters: dict
    parameters: object
    stats: StandardizationStats
    feature_mask: tuple
    threshold: float
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "feature_mask", tuple(self.feature_mask))
        _check_mask(self.feature_mask)
        for fam in self.feature_mask:
            if fam not in self.stats.families:
                raise UnknownFamilyError(
                    f"model mask needs family {fam!r} absent from its statistics"
                )
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    @property
    def dim(self) -> int:
        return config_dim(self.feature_mask)


def train(kind, data: LabeledDataset, hyperparameters=None, seed=0, tau=DEFAULT_TAU) -> TrainedModel:
    """Train one classifier kind ("gb", "rf", or "svm") on fused vectors.

    All randomness is derived from `seed` through counter-based generators,
    so the result is independent of scheduling. Hyperparameters not named
    in `hyperparameters` keep their documented defaults.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    hp = dict(_DEFAULTS[kind])
    for key, value in (hyperparameters or {}).items():
        if key not in hp:
            raise ValueError(f"unknown {kind} hyperparameter {key!r}")
        hp[key] = value

    x = data.matrix()
    if not np.all(np.isfinite(x)):
        raise InvalidFeatureError("training matrix contains NaN or infinite values")
    y = data.labels
    n_pos = int(np.sum(y == 1))
    n_neg = int(y.size - n_pos)
    if n_pos < 2 or n_neg < 2:
        raise SingleClassError(
            f"training needs at least 2 samples per class, "
            f"got {n_neg} natural / {n_pos} genai"
        )

    if kind == "gb":
        params, _losses = train_gradient_boosting(x, y, hp)
    elif kind == "rf":
        params = train_random_forest(x, y, hp, seed)
    else:
        params = train_svm(x, y, hp)
    return TrainedModel(
        kind=kind,
        hyperparameters=hp,
        parameters=params,
        stats=data.stats,
        feature_mask=data.mask,
        threshold=float(tau),
        seed=int(seed),
    )


def _as_row(model: TrainedModel, f: FeatureVector) -> np.ndarray:
    if not isinstance(f, FeatureVector):
        raise TypeError("predict expects a fused FeatureVector")
    if f.extractor_id != FUSED_ID or f.families != model.feature_mask:
        raise FusionOrderError(
            f"model was trained on families {model.feature_mask}, "
            f"got {f.families or f.extractor_id}"
        )
    if len(f) != model.dim:
        raise DimMismatchError(f"expected {model.dim} values, got {len(f)}")
    if f.stats_fingerprint != model.stats.fingerprint:
        raise StatsMismatchError(
            "vector was standardized with different statistics than the model"
        )
    return f.values[None, :]


def predict_proba(model: TrainedModel, f: FeatureVector) -> float:
    """Probability that f is generated; deterministic for a fixed model."""
    return float(model.parameters.proba(_as_row(model, f))[0])


def predict_proba_batch(model: TrainedModel, vectors) -> np.ndarray:
    """Vectorized predict_proba over an iterable of fused FeatureVectors."""
    rows = [_as_row(model, f)[0] for f in vectors]
    if not rows:
        return np.zeros(0)
    return model.parameters.proba(np.stack(rows))


def predict(model: TrainedModel, f: FeatureVector, tau=None) -> int:
    """1 iff predict_proba(model, f) > tau, with tau defaulting to the model's."""
    t = model.threshold if tau is None else float(tau)
    if not 0.0 < t < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {t}")
    return int(predict_proba(model, f) > t)


def save_model(model: TrainedModel, path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": model.hyperparameters,
        "stats": model.stats.to_json_dict(),
        "feature_mask": list(model.feature_mask),
        "parameters": model.parameters.to_json_dict(),
        "seed": model.seed,
        "threshold": model.threshold,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
    except OSError as exc:
        raise IoError(f"cannot write model file {path}: {exc}") from exc


def load_model(path) -> TrainedModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read model file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"model file {path} does not hold an object")
    version = doc.get("format_version")
    if version is None:
        raise ParseError(f"model file {path} lacks a format_version field")
    if version != MODEL_FORMAT_VERSION:
        raise VersionError(
            f"model file {path} has format_version {version!r}, "
            f"this build reads {MODEL_FORMAT_VERSION!r}"
        )
    try:
        kind = doc["kind"]
        if kind not in KINDS:
            raise ParseError(f"model file {path} has unknown kind {kind!r}")
        return TrainedModel(
            kind=kind,
            hyperparameters=dict(doc["hyperparameters"]),
            parameters=_PARAM_TYPES[kind].from_json_dict(doc["parameters"]),
            stats=StandardizationStats.from_json_dict(doc["stats"]),
            feature_mask=tuple(doc["feature_mask"]),
            threshold=float(doc["threshold"]),
            seed=int(doc["seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model file {path} is corrupt: {exc}") from exc
