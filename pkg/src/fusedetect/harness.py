"""Evaluation harness: feature collection, per-generator tables, the
randomized multi-generator composition protocol, and report analysis.

Reports are plain dataclasses with JSON and CSV projections. Every report
validates its own aggregate rows against its cells on construction, so a
corrupted or hand-edited report file fails loudly on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .analysis import (
    SignificanceRecord,
    bh_fdr,
    epsilon_squared,
    frechet_distance,
    gaussian_summary,
    kruskal_wallis,
    pca_fit_transform,
    silhouette_score,
    spearman_rho,
)
from .classifiers import DEFAULT_TAU, KINDS, LabeledDataset, predict_proba_batch, train
from .errors import (
    CacheMissError,
    ConstantInputError,
    EmbeddingMissError,
    GeneratorCountError,
    GroupCountError,
    InsufficientDataError,
    ParseError,
    RangeError,
    SingleClassError,
)
from .fusion import CONFIG_NAMES, fit_standardizer, fuse, parse_config, standardize
from .manifest import DatasetManifest, stratified_split
from .metrics import ConfusionMatrix, accuracy, confusion, mcc

AVERAGE_TAG = "average"

EVAL_METRICS = ("accuracy", "mcc")

FACTORS = ("feature", "classifier")

PCA_COMPONENTS = 50

_AGG_TOL = 1e-12


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def _std(values) -> float:
    values = list(values)
    m = _mean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / len(values))


def _ordered_unique(items) -> tuple:
    seen = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return tuple(seen)


# -- feature collection ------------------------------------------------------


def features_for(manifest: DatasetManifest, families, caches) -> dict:
    """Assemble path -> {family -> FeatureVector} from per-family caches.

    Absent clip vectors raise EmbeddingMissError (they come from the
    embedding provider); any other family raises CacheMissError. Both list
    the first few offending paths.
    """
    out = {p: {} for p in manifest.paths}
    for family in families:
        cache = caches.get(family)
        if cache is None:
            missing = list(manifest.paths)
        else:
            missing = cache.missing(manifest.paths)
        if missing:
            msg = (
                f"{family}: {len(missing)} of {len(manifest)} paths have no "
                f"cached vector, first few: {missing[:5]}"
            )
            if family == "clip":
                raise EmbeddingMissError(msg)
            raise CacheMissError(msg)
        for p in manifest.paths:
            out[p][family] = cache.get(p)
    return out


def standardized_features(entries, features, stats, families) -> dict:
    return {
        e.path: {f: standardize(features[e.path][f], stats) for f in families}
        for e in entries
    }


def fused_dataset(entries, std, mask, stats) -> LabeledDataset:
    vectors = tuple(fuse([std[e.path][f] for f in mask], mask=mask) for e in entries)
    return LabeledDataset(
        vectors=vectors,
        labels=np.asarray([e.label for e in entries], dtype=np.int64),
        generators=tuple(e.generator for e in entries),
        stats=stats,
    )


# -- per-generator evaluation -------------------------------------------------


@dataclass(frozen=True)
class EvalCell:
    config: str
    classifier: str
    generator: str
    matrix: ConfusionMatrix
    accuracy: float
    mcc: float


@dataclass(frozen=True)
class AvgCell:
    config: str
    classifier: str
    accuracy: float
    mcc: float


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Per-generator results of one evaluation run plus its provenance."""

    dataset: str
    cells: tuple
    averages: tuple
    seed: int
    train_size: int
    test_size: int
    stats_fingerprint: str
    versions: dict
    manifest_fingerprint: str

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "averages", tuple(self.averages))
        groups: dict = {}
        seen = set()
        for c in self.cells:
            key = (c.config, c.classifier, c.generator)
            if key in seen:
                raise ValueError(f"duplicate report cell {key}")
            seen.add(key)
            groups.setdefault((c.config, c.classifier), []).append(c)
        if len(self.averages) != len(groups):
            raise ValueError(
                f"{len(groups)} (config, classifier) pairs but "
                f"{len(self.averages)} average rows"
            )
        for a in self.averages:
            group = groups.get((a.config, a.classifier))
            if group is None:
                raise ValueError(
                    f"average row ({a.config}, {a.classifier}) matches no cells"
                )
            for metric in EVAL_METRICS:
                want = _mean(getattr(c, metric) for c in group)
                got = getattr(a, metric)
                if abs(got - want) > _AGG_TOL:
                    raise ValueError(
                        f"average {metric} for ({a.config}, {a.classifier}) is "
                        f"{got!r}, cells give {want!r}"
                    )

    @property
    def config_names(self) -> tuple:
        return _ordered_unique(c.config for c in self.cells)

    @property
    def classifier_names(self) -> tuple:
        return _ordered_unique(c.classifier for c in self.cells)

    @property
    def generator_names(self) -> tuple:
        return _ordered_unique(c.generator for c in self.cells)

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "seed": self.seed,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "stats_fingerprint": self.stats_fingerprint,
            "manifest_fingerprint": self.manifest_fingerprint,
            "versions": {k: self.versions[k] for k in sorted(self.versions)},
            "cells": [
                {
                    "config": c.config,
                    "classifier": c.classifier,
                    "generator": c.generator,
                    "tp": c.matrix.tp,
                    "tn": c.matrix.tn,
                    "fp": c.matrix.fp,
                    "fn": c.matrix.fn,
                    "accuracy": c.accuracy,
                    "mcc": c.mcc,
                }
                for c in self.cells
            ],
            "averages": [
                {
                    "config": a.config,
                    "classifier": a.classifier,
                    "accuracy": a.accuracy,
                    "mcc": a.mcc,
                }
                for a in self.averages
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EvalReport":
        try:
            cells = tuple(
                EvalCell(
                    config=c["config"],
                    classifier=c["classifier"],
                    generator=c["generator"],
                    matrix=ConfusionMatrix(
                        tp=int(c["tp"]), tn=int(c["tn"]), fp=int(c["fp"]), fn=int(c["fn"])
                    ),
                    accuracy=float(c["accuracy"]),
                    mcc=float(c["mcc"]),
                )
                for c in d["cells"]
            )
            averages = tuple(
                AvgCell(
                    config=a["config"],
                    classifier=a["classifier"],
                    accuracy=float(a["accuracy"]),
                    mcc=float(a["mcc"]),
                )
                for a in d["averages"]
            )
            return cls(
                dataset=d["dataset"],
                cells=cells,
                averages=averages,
                seed=int(d["seed"]),
                train_size=int(d["train_size"]),
                test_size=int(d["test_size"]),
                stats_fingerprint=d["stats_fingerprint"],
                versions=dict(d["versions"]),
                manifest_fingerprint=d["manifest_fingerprint"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed evaluation report: {exc}") from exc

    def to_csv_rows(self) -> list:
        """Flat table: one row per cell, then one average row per pair."""
        rows = [["config", "classifier", "generator", "tp", "tn", "fp", "fn",
                 "accuracy", "mcc"]]
        for c in self.cells:
            rows.append([
                c.config, c.classifier, c.generator,
                str(c.matrix.tp), str(c.matrix.tn), str(c.matrix.fp),
                str(c.matrix.fn), repr(c.accuracy), repr(c.mcc),
            ])
        for a in self.averages:
            rows.append([
                a.config, a.classifier, AVERAGE_TAG, "", "", "", "",
                repr(a.accuracy), repr(a.mcc),
            ])
        return rows


def load_report(path) -> EvalReport:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"report {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"report {path} must hold a JSON object")
    return EvalReport.from_json_dict(payload)


def _score_cells(model, dataset: LabeledDataset, tau: float):
    probs = predict_proba_batch(model, dataset.vectors)
    preds = (probs > tau).astype(np.int64)
    return confusion(dataset.labels, preds)


def evaluate_per_generator(
    manifest: DatasetManifest,
    features: dict,
    config_names=CONFIG_NAMES,
    classifier_kinds=KINDS,
    seed: int = 0,
    test_fraction: float = 0.2,
    lenient: bool = False,
    per_generator_train: bool = False,
    tau: float = DEFAULT_TAU,
    dataset: str = "dataset",
) -> EvalReport:
    """Train on the pooled train split, evaluate per generator on test.

    Each generator's test cell pairs the full natural test pool with that
    generator's fakes. With per_generator_train=True a separate model is
    trained per generator (natural train pool + that generator's train
    fakes) instead of one pooled model.
    """
    configs = [(name, parse_config(name)) for name in config_names]
    if not configs:
        raise RangeError("no feature configurations requested")
    needed = _ordered_unique(f for _, mask in configs for f in mask)

    n_natural, n_genai = manifest.label_counts()
    if n_natural == 0 or n_genai == 0:
        raise SingleClassError(
            f"manifest has {n_natural} natural and {n_genai} genai entries"
        )

    train_m, test_m = stratified_split(manifest, test_fraction, seed, lenient=lenient)
    if len(train_m) == 0 or len(test_m) == 0:
        raise InsufficientDataError(
            f"split produced {len(train_m)} train and {len(test_m)} test entries"
        )
    generators = test_m.generator_tags()
    if not generators:
        raise GeneratorCountError("test split has no genai entries")

    stats = fit_standardizer(
        [features[e.path][f] for e in train_m.entries for f in needed]
    )
    std_train = standardized_features(train_m.entries, features, stats, needed)
    std_test = standardized_features(test_m.entries, features, stats, needed)

    natural_test = [e for e in test_m.entries if e.label == 0]
    cells = []
    averages = []
    for name, mask in configs:
        test_sets = {
            g: fused_dataset(
                natural_test + [e for e in test_m.entries if e.generator == g and e.label == 1],
                std_test,
                mask,
                stats,
            )
            for g in generators
        }
        for kind in classifier_kinds:
            if per_generator_train:
                models = {}
                for g in generators:
                    entries = [
                        e
                        for e in train_m.entries
                        if e.label == 0 or e.generator == g
                    ]
                    models[g] = train(
                        kind,
                        fused_dataset(entries, std_train, mask, stats),
                        seed=seed,
                        tau=tau,
                    )
            else:
                pooled = train(
                    kind,
                    fused_dataset(train_m.entries, std_train, mask, stats),
                    seed=seed,
                    tau=tau,
                )
                models = {g: pooled for g in generators}
            per_gen = []
            for g in generators:
                c = _score_cells(models[g], test_sets[g], tau)
                per_gen.append(
                    EvalCell(
                        config=name,
                        classifier=kind,
                        generator=g,
                        matrix=c,
                        accuracy=accuracy(c),
                        mcc=mcc(c),
                    )
                )
            cells.extend(per_gen)
            averages.append(
                AvgCell(
                    config=name,
                    classifier=kind,
                    accuracy=_mean(x.accuracy for x in per_gen),
                    mcc=_mean(x.mcc for x in per_gen),
                )
            )

    return EvalReport(
        dataset=dataset,
        cells=tuple(cells),
        averages=tuple(averages),
        seed=seed,
        train_size=len(train_m),
        test_size=len(test_m),
        stats_fingerprint=stats.fingerprint,
        versions=dict(stats.versions),
        manifest_fingerprint=manifest.fingerprint,
    )


# -- randomized composition protocol ------------------------------------------


@dataclass(frozen=True)
class CompositionCell:
    config: str
    round: int
    classifier: str
    accuracy: float
    mcc: float


@dataclass(frozen=True)
class CompositionSummary:
    config: str
    accuracy_mean: float
    accuracy_std: float
    mcc_mean: float
    mcc_std: float


@dataclass(frozen=True, eq=False)
class CompositionReport:
    dataset: str
    cells: tuple
    summaries: tuple
    seed: int
    n_rounds: int
    generators: tuple
    natural_count: int
    sampled_count: int
    manifest_fingerprint: str

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "summaries", tuple(self.summaries))
        object.__setattr__(self, "generators", tuple(self.generators))
        groups: dict = {}
        for c in self.cells:
            if not 0 <= c.round < self.n_rounds:
                raise ValueError(f"cell round {c.round} outside 0..{self.n_rounds - 1}")
            groups.setdefault(c.config, []).append(c)
        if len(self.summaries) != len(groups):
            raise ValueError(
                f"{len(groups)} configs in cells but {len(self.summaries)} summaries"
            )
        for s in self.summaries:
            group = groups.get(s.config)
            if group is None:
                raise ValueError(f"summary for {s.config!r} matches no cells")
            for metric in EVAL_METRICS:
                vals = [getattr(c, metric) for c in group]
                if abs(getattr(s, f"{metric}_mean") - _mean(vals)) > _AGG_TOL:
                    raise ValueError(f"summary {metric} mean for {s.config!r} is off")
                if abs(getattr(s, f"{metric}_std") - _std(vals)) > _AGG_TOL:
                    raise ValueError(f"summary {metric} std for {s.config!r} is off")

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "seed": self.seed,
            "n_rounds": self.n_rounds,
            "generators": list(self.generators),
            "natural_count": self.natural_count,
            "sampled_count": self.sampled_count,
            "manifest_fingerprint": self.manifest_fingerprint,
            "cells": [
                {
                    "config": c.config,
                    "round": c.round,
                    "classifier": c.classifier,
                    "accuracy": c.accuracy,
                    "mcc": c.mcc,
                }
                for c in self.cells
            ],
            "summaries": [
                {
                    "config": s.config,
                    "accuracy_mean": s.accuracy_mean,
                    "accuracy_std": s.accuracy_std,
                    "mcc_mean": s.mcc_mean,
                    "mcc_std": s.mcc_std,
                }
                for s in self.summaries
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CompositionReport":
        try:
            return cls(
                dataset=d["dataset"],
                cells=tuple(
                    CompositionCell(
                        config=c["config"],
                        round=int(c["round"]),
                        classifier=c["classifier"],
                        accuracy=float(c["accuracy"]),
                        mcc=float(c["mcc"]),
                    )
                    for c in d["cells"]
                ),
                summaries=tuple(
                    CompositionSummary(
                        config=s["config"],
                        accuracy_mean=float(s["accuracy_mean"]),
                        accuracy_std=float(s["accuracy_std"]),
                        mcc_mean=float(s["mcc_mean"]),
                        mcc_std=float(s["mcc_std"]),
                    )
                    for s in d["summaries"]
                ),
                seed=int(d["seed"]),
                n_rounds=int(d["n_rounds"]),
                generators=tuple(d["generators"]),
                natural_count=int(d["natural_count"]),
                sampled_count=int(d["sampled_count"]),
                manifest_fingerprint=d["manifest_fingerprint"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed composition report: {exc}") from exc


def _sample_composition(manifest, generators, rng):
    """Pick genai entries by drawing a generator uniformly per slot.

    Returns indices into manifest.entries: all naturals plus the sampled
    fakes (without replacement; a generator short of its quota spills the
    remainder onto the pooled leftovers).
    """
    natural_idx = [i for i, e in enumerate(manifest.entries) if e.label == 0]
    pools = {g: [] for g in generators}
    for i, e in enumerate(manifest.entries):
        if e.label == 1:
            pools[e.generator].append(i)
    total = sum(len(p) for p in pools.values())
    target = min(len(natural_idx), total)

    slots = rng.integers(0, len(generators), size=target)
    want = np.bincount(slots, minlength=len(generators))
    chosen: list = []
    for gi, g in enumerate(generators):
        pool = pools[g]
        take = min(int(want[gi]), len(pool))
        picks = rng.choice(len(pool), size=take, replace=False)
        chosen.extend(pool[j] for j in picks)
    shortfall = target - len(chosen)
    if shortfall > 0:
        leftovers = sorted(set().union(*pools.values()) - set(chosen))
        picks = rng.choice(len(leftovers), size=shortfall, replace=False)
        chosen.extend(leftovers[j] for j in picks)
    return sorted(natural_idx + chosen), len(natural_idx), target


def random_composition_eval(
    manifest: DatasetManifest,
    features: dict,
    config_names=CONFIG_NAMES,
    n_rounds: int = 3,
    seed: int = 0,
    classifier_kinds=KINDS,
    test_fraction: float = 0.2,
    lenient: bool = False,
    tau: float = DEFAULT_TAU,
    dataset: str = "dataset",
) -> CompositionReport:
    """Mixed-generator protocol: resample the genai class each round.

    Each round forms the synthetic class by uniform generator draws to
    match the natural count, splits with a seed derived from the round
    stream, and trains/evaluates every (config, classifier). Summaries are
    the mean and population standard deviation per config across all
    (round, classifier) cells.
    """
    generators = manifest.generator_tags()
    if len(generators) < 2:
        raise GeneratorCountError(
            f"composition protocol needs at least 2 generators, got {list(generators)}"
        )
    if n_rounds < 1:
        raise RangeError(f"n_rounds must be at least 1, got {n_rounds}")
    configs = [(name, parse_config(name)) for name in config_names]
    needed = _ordered_unique(f for _, mask in configs for f in mask)

    cells = []
    natural_count = 0
    sampled_count = 0
    for r in range(n_rounds):
        rng = np.random.Generator(np.random.Philox(key=[seed, r]))
        indices, natural_count, sampled_count = _sample_composition(
            manifest, generators, rng
        )
        sub = DatasetManifest(
            root=manifest.root, entries=[manifest.entries[i] for i in indices]
        )
        split_seed = int(rng.integers(0, 2**31 - 1))
        train_m, test_m = stratified_split(
            sub, test_fraction, split_seed, lenient=lenient
        )
        stats = fit_standardizer(
            [features[e.path][f] for e in train_m.entries for f in needed]
        )
        std_train = standardized_features(train_m.entries, features, stats, needed)
        std_test = standardized_features(test_m.entries, features, stats, needed)
        for name, mask in configs:
            train_set = fused_dataset(train_m.entries, std_train, mask, stats)
            test_set = fused_dataset(test_m.entries, std_test, mask, stats)
            for kind in classifier_kinds:
                model = train(kind, train_set, seed=seed, tau=tau)
                c = _score_cells(model, test_set, tau)
                cells.append(
                    CompositionCell(
                        config=name,
                        round=r,
                        classifier=kind,
                        accuracy=accuracy(c),
                        mcc=mcc(c),
                    )
                )

    summaries = []
    for name, _ in configs:
        group = [c for c in cells if c.config == name]
        summaries.append(
            CompositionSummary(
                config=name,
                accuracy_mean=_mean(c.accuracy for c in group),
                accuracy_std=_std(c.accuracy for c in group),
                mcc_mean=_mean(c.mcc for c in group),
                mcc_std=_std(c.mcc for c in group),
            )
        )

    return CompositionReport(
        dataset=dataset,
        cells=tuple(cells),
        summaries=tuple(summaries),
        seed=seed,
        n_rounds=n_rounds,
        generators=generators,
        natural_count=natural_count,
        sampled_count=sampled_count,
        manifest_fingerprint=manifest.fingerprint,
    )


# -- report analysis -----------------------------------------------------------


@dataclass(frozen=True)
class FrechetRow:
    dataset: str
    config: str
    distance: float
    silhouette: float
    mean_mcc: float


@dataclass(frozen=True)
class SrccRow:
    """Rank correlation between log10 feature distance and mean MCC.

    rho is None when it is undefined (fewer than 2 configs or a constant
    sequence on either side).
    """

    dataset: str
    rho: float | None
    n_configs: int

    @property
    def strength(self) -> float | None:
        return None if self.rho is None else abs(self.rho)


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    significance: tuple
    frechet: tuple
    srcc: tuple

    def to_json_dict(self) -> dict:
        return {
            "significance": [
                {
                    "dataset": s.dataset,
                    "generator": s.generator,
                    "metric": s.metric,
                    "factor": s.factor,
                    "h": s.h,
                    "epsilon_squared": s.epsilon_squared,
                    "p": s.p_value,
                    "q": s.q_value,
                    "significant": s.significant,
                }
                for s in self.significance
            ],
            "frechet": [
                {
                    "dataset": f.dataset,
                    "config": f.config,
                    "distance": f.distance,
                    "silhouette": f.silhouette,
                    "mean_mcc": f.mean_mcc,
                }
                for f in self.frechet
            ],
            "srcc": [
                {
                    "dataset": s.dataset,
                    "rho": s.rho,
                    "strength": s.strength,
                    "n_configs": s.n_configs,
                }
                for s in self.srcc
            ],
        }


def significance_csv_rows(result: AnalysisResult) -> list:
    rows = [["dataset", "generator", "metric", "factor", "h", "epsilon_squared",
             "p", "q", "significant"]]
    for s in result.significance:
        rows.append([
            s.dataset, s.generator, s.metric, s.factor,
            repr(s.h), repr(s.epsilon_squared), repr(s.p_value), repr(s.q_value),
            "true" if s.significant else "false",
        ])
    return rows


def frechet_csv_rows(result: AnalysisResult) -> list:
    rows = [["dataset", "config", "distance", "silhouette", "mean_mcc"]]
    for f in result.frechet:
        rows.append([
            f.dataset, f.config, repr(f.distance), repr(f.silhouette),
            repr(f.mean_mcc),
        ])
    return rows


def _significance_cells(name: str, report: EvalReport) -> list:
    configs = report.config_names
    kinds = report.classifier_names
    out = []
    for g in report.generator_names:
        sub = [c for c in report.cells if c.generator == g]
        for metric in EVAL_METRICS:
            for factor in FACTORS:
                if factor == "feature":
                    levels, attr = configs, "config"
                else:
                    levels, attr = kinds, "classifier"
                if len(levels) < 2:
                    raise GroupCountError(
                        f"factor {factor!r} needs at least 2 levels, "
                        f"report {name!r} has {len(levels)}"
                    )
                groups = [
                    [getattr(c, metric) for c in sub if getattr(c, attr) == lv]
                    for lv in levels
                ]
                h, p = kruskal_wallis(groups)
                n = sum(len(grp) for grp in groups)
                out.append((name, g, metric, factor, h, epsilon_squared(h, n), p))
    return out


def analyze_report(reports, feature_sets=None) -> AnalysisResult:
    """Significance and separability tables over evaluation reports.

    `reports` is one EvalReport or a dataset-name -> EvalReport mapping.
    For every (dataset, generator, metric, factor) cell a Kruskal-Wallis
    test compares the factor's levels; q-values come from one BH pass over
    all cells. When `feature_sets` maps a dataset name to (manifest,
    features), the natural-vs-genai Fréchet distance, the PCA-silhouette,
    and the distance-to-MCC rank correlation are computed per config.
    """
    if isinstance(reports, EvalReport):
        reports = {reports.dataset: reports}
    if not reports:
        raise ParseError("no reports to analyze")

    raw = []
    for name in sorted(reports):
        raw.extend(_significance_cells(name, reports[name]))
    qs = bh_fdr([row[6] for row in raw])
    significance = tuple(
        SignificanceRecord(
            dataset=row[0],
            generator=row[1],
            metric=row[2],
            factor=row[3],
            h=row[4],
            epsilon_squared=row[5],
            p_value=row[6],
            q_value=float(q),
        )
        for row, q in zip(raw, qs)
    )

    frechet_rows: list = []
    srcc_rows: list = []
    for name in sorted(feature_sets or {}):
        if name not in reports:
            raise ParseError(f"feature set {name!r} has no matching report")
        report = reports[name]
        manifest, features = feature_sets[name]
        labels = np.asarray([e.label for e in manifest.entries], dtype=np.int64)

        configs = [(cfg, parse_config(cfg)) for cfg in report.config_names]
        needed = _ordered_unique(f for _, mask in configs for f in mask)
        stats = fit_standardizer(
            [features[e.path][f] for e in manifest.entries for f in needed]
        )
        std = standardized_features(manifest.entries, features, stats, needed)

        mean_mcc = {}
        for a in report.averages:
            mean_mcc.setdefault(a.config, []).append(a.mcc)

        distances = []
        mccs = []
        for cfg, mask in configs:
            fused = np.stack(
                [
                    fuse([std[e.path][f] for f in mask], mask=mask).values
                    for e in manifest.entries
                ]
            )
            dist = frechet_distance(
                gaussian_summary(fused[labels == 0]),
                gaussian_summary(fused[labels == 1]),
            )
            k = min(PCA_COMPONENTS, fused.shape[1], fused.shape[0] - 1)
            reduced, _ = pca_fit_transform(fused, k)
            sil = silhouette_score(reduced, labels)
            m = _mean(mean_mcc[cfg])
            frechet_rows.append(
                FrechetRow(
                    dataset=name,
                    config=cfg,
                    distance=dist,
                    silhouette=sil,
                    mean_mcc=m,
                )
            )
            distances.append(dist)
            mccs.append(m)

        rho = None
        if len(distances) >= 2:
            logs = [math.log10(max(d, 1e-300)) for d in distances]
            try:
                rho = spearman_rho(logs, mccs)
            except ConstantInputError:
                rho = None
        srcc_rows.append(SrccRow(dataset=name, rho=rho, n_configs=len(distances)))

    return AnalysisResult(
        significance=significance,
        frechet=tuple(frechet_rows),
        srcc=tuple(srcc_rows),
    )
