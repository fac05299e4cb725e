"""Command-line interface: extract, train, detect, evaluate, analyze.

stdout carries only data (JSON-lines or CSV); diagnostics and progress go
to stderr. Every subcommand taking --seed is bit-reproducible for fixed
inputs, independent of --workers.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .cache import FeatureCache, cache_file, load_feature_cache
from .classifiers import DEFAULT_TAU, KINDS, load_model, predict_proba, save_model, train
from .embedding import (
    CLIP_VERSION,
    KIND_ONNX,
    KIND_STORE,
    EmbeddingProviderConfig,
    embed_image,
)
from .errors import (
    CacheMissError,
    DecodeError,
    DuplicateError,
    DuplicateKeyError,
    EmbeddingMissError,
    FusedetectError,
    GeneratorCountError,
    GroupCountError,
    InferenceError,
    IoError,
    LabelError,
    ParseError,
    ProviderInitError,
    RangeError,
    SchemaError,
    SingleClassError,
    StratumError,
    TooSmallError,
    VersionError,
)
from .features import FAMILY_DIMS
from .fusion import CONFIG_NAMES, fit_standardizer, fuse, parse_config, standardize
from .harness import (
    analyze_report,
    evaluate_per_generator,
    features_for,
    frechet_csv_rows,
    fused_dataset,
    load_report,
    random_composition_eval,
    significance_csv_rows,
    standardized_features,
)
from .imaging import decode_image
from .manifest import load_manifest
from .mlbp import MLBP_VERSION, extract_mlbp_features
from .mscn import MSCN_VERSION, extract_mscn_features
from .svgplot import bar_chart, scatter_plot

FAMILY_VERSIONS = {"mscn": MSCN_VERSION, "mlbp": MLBP_VERSION, "clip": CLIP_VERSION}

EXIT_HELP = """exit codes:
  0  success
  1  unexpected failure (including images that failed during extract)
  2  input validation: manifest, split, or malformed data files
  3  embedding provider missing or failing
  4  training data holds a single class
  5  detect scored no images
  6  required feature-cache or embedding entries absent
  7  analysis protocol errors (no reports, too few generators or levels)
"""

_EXIT_MAP = (
    ((CacheMissError, EmbeddingMissError), 6),
    ((ProviderInitError, InferenceError), 3),
    ((SingleClassError,), 4),
    ((GeneratorCountError, GroupCountError), 7),
    (
        (
            SchemaError,
            DuplicateError,
            LabelError,
            StratumError,
            RangeError,
            IoError,
            ParseError,
            VersionError,
            DuplicateKeyError,
            DecodeError,
            TooSmallError,
        ),
        2,
    ),
)


def _exit_code(exc: FusedetectError) -> int:
    for classes, code in _EXIT_MAP:
        if isinstance(exc, classes):
            return code
    return 1


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_families(spec: str) -> tuple:
    families = []
    for part in spec.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part == "all":
            for f in FAMILY_DIMS:
                if f not in families:
                    families.append(f)
            continue
        if part not in FAMILY_DIMS:
            raise RangeError(
                f"unknown feature family {part!r}, expected one of "
                f"{list(FAMILY_DIMS)} or all"
            )
        if part not in families:
            families.append(part)
    if not families:
        raise RangeError("no feature families requested")
    return tuple(families)


def _parse_configs(spec: str) -> tuple:
    names = []
    for part in spec.split(","):
        part = part.strip().lower()
        if not part:
            continue
        parse_config(part)  # validation only
        if part not in names:
            names.append(part)
    if not names:
        raise RangeError("no feature configurations requested")
    return tuple(names)


def _parse_kinds(spec: str) -> tuple:
    kinds = []
    for part in spec.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part == "all":
            for k in KINDS:
                if k not in kinds:
                    kinds.append(k)
            continue
        if part not in KINDS:
            raise RangeError(f"unknown classifier {part!r}, expected one of {list(KINDS)}")
        if part not in kinds:
            kinds.append(part)
    if not kinds:
        raise RangeError("no classifiers requested")
    return tuple(kinds)


def _provider_config(args) -> EmbeddingProviderConfig | None:
    if getattr(args, "onnx_model", None):
        return EmbeddingProviderConfig(kind=KIND_ONNX, model_path=args.onnx_model)
    if getattr(args, "embedding_store", None):
        return EmbeddingProviderConfig(kind=KIND_STORE, store_path=args.embedding_store)
    return None


def _load_caches(cache_dir, families) -> dict:
    """Read the cache file of each family that has one; absent files map
    to empty caches so missing-entry reporting happens in one place."""
    caches = {}
    for family in families:
        path = cache_file(cache_dir, family)
        if path.is_file():
            caches[family] = load_feature_cache(path, family)
        else:
            caches[family] = FeatureCache(
                extractor_id=family, version=FAMILY_VERSIONS[family]
            )
    return caches


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_csv_rows(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _print_csv_rows(rows) -> None:
    csv.writer(sys.stdout, lineterminator="\n").writerows(rows)


# -- extract -----------------------------------------------------------------


def _extract_one(family, manifest, entry, provider_cfg):
    if family == "clip":
        if provider_cfg.kind == KIND_STORE:
            return embed_image(None, provider_cfg, key=entry.path).as_feature()
        img = decode_image(manifest.absolute_path(entry))
        return embed_image(img, provider_cfg, key=entry.path).as_feature()
    img = decode_image(manifest.absolute_path(entry))
    if family == "mscn":
        return extract_mscn_features(img)
    return extract_mlbp_features(img)


def cmd_extract(args) -> int:
    manifest = load_manifest(args.manifest, strict=args.strict)
    families = _parse_families(args.features)
    provider_cfg = _provider_config(args)
    if "clip" in families and provider_cfg is None:
        _log("error: clip extraction needs --onnx-model or --embedding-store")
        return 3
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_path = {e.path: e for e in manifest.entries}

    failures = 0
    for family in families:
        path = cache_file(out_dir, family)
        cache = None
        if path.is_file():
            cache = load_feature_cache(path, family)
            if cache.version != FAMILY_VERSIONS[family]:
                _log(
                    f"extract: discarding {family} cache at version "
                    f"{cache.version} (current {FAMILY_VERSIONS[family]})"
                )
                cache = None
        if cache is None:
            cache = FeatureCache(
                extractor_id=family, version=FAMILY_VERSIONS[family]
            )
        todo = cache.missing(manifest.paths)
        _log(f"extract: {family}: {len(todo)} to compute, {len(cache)} cached")

        def job(p, fam=family):
            try:
                return p, _extract_one(fam, manifest, by_path[p], provider_cfg), None
            except FusedetectError as exc:
                return p, None, str(exc)

        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            for p, fv, err in pool.map(job, todo):
                if err is not None:
                    _log(f"extract: {p}: {err}")
                    failures += 1
                else:
                    cache.put(p, fv)
        cache.dump(path)
        print(
            json.dumps(
                {
                    "extractor": family,
                    "cache": str(path),
                    "entries": len(cache),
                    "computed": len(todo),
                },
                separators=(",", ":"),
            ),
            flush=True,
        )
    if failures:
        _log(f"extract: {failures} images failed")
        return 1
    return 0


# -- train --------------------------------------------------------------------


def cmd_train(args) -> int:
    manifest = load_manifest(args.manifest, strict=args.strict)
    configs = [(name, parse_config(name)) for name in _parse_configs(args.config)]
    kinds = _parse_kinds(args.classifier)
    needed = tuple(dict.fromkeys(f for _, mask in configs for f in mask))
    caches = _load_caches(Path(args.cache), needed)
    features = features_for(manifest, needed, caches)

    stats = fit_standardizer(
        [features[e.path][f] for e in manifest.entries for f in needed]
    )
    std = standardized_features(manifest.entries, features, stats, needed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, mask in configs:
        data = fused_dataset(manifest.entries, std, mask, stats)
        for kind in kinds:
            model = train(kind, data, seed=args.seed, tau=args.tau)
            path = out_dir / f"model_{name}_{kind}.json"
            save_model(model, path)
            _log(f"train: wrote {path}")
            print(
                json.dumps(
                    {"config": name, "classifier": kind, "model": str(path)},
                    separators=(",", ":"),
                ),
                flush=True,
            )
    return 0


# -- detect ---------------------------------------------------------------------


def cmd_detect(args) -> int:
    model = load_model(args.model)
    tau = model.threshold if args.tau is None else args.tau
    if not 0.0 < tau < 1.0:
        raise RangeError(f"tau must lie in (0, 1), got {tau}")
    mask = model.feature_mask
    provider_cfg = _provider_config(args)
    if "clip" in mask and provider_cfg is None:
        _log("error: this model uses clip features; pass --onnx-model or --embedding-store")
        return 3

    def job(image_path: str):
        try:
            img = None
            parts = []
            for family in mask:
                if family == "clip":
                    if provider_cfg.kind == KIND_STORE:
                        fv = embed_image(None, provider_cfg, key=image_path).as_feature()
                    else:
                        img = img if img is not None else decode_image(image_path)
                        fv = embed_image(img, provider_cfg, key=image_path).as_feature()
                else:
                    img = img if img is not None else decode_image(image_path)
                    fv = (
                        extract_mscn_features(img)
                        if family == "mscn"
                        else extract_mlbp_features(img)
                    )
                parts.append(standardize(fv, model.stats))
            fused = fuse(parts, mask=mask)
            p = predict_proba(model, fused)
            return {
                "path": image_path,
                "probability": p,
                "label": 1 if p > tau else 0,
            }
        except FusedetectError as exc:
            return {"path": image_path, "error": str(exc)}

    scored = 0
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        for result in pool.map(job, args.images):
            if "error" in result:
                _log(f"detect: {result['path']}: {result['error']}")
            else:
                scored += 1
            print(json.dumps(result, separators=(",", ":")), flush=True)
    if scored == 0:
        _log("detect: no images could be scored")
        return 5
    return 0


# -- evaluate -------------------------------------------------------------------


def _report_bar_series(report):
    """Mean and spread of each metric per config, pooled over classifiers
    and generators; the fallback when the composition protocol cannot run."""
    series = []
    for metric in ("accuracy", "mcc"):
        means, stds = [], []
        for cfg in report.config_names:
            vals = [getattr(c, metric) for c in report.cells if c.config == cfg]
            m = math.fsum(vals) / len(vals)
            means.append(m)
            stds.append(math.sqrt(math.fsum((v - m) ** 2 for v in vals) / len(vals)))
        series.append((metric, means, stds))
    return series


def cmd_evaluate(args) -> int:
    manifest = load_manifest(args.manifest, strict=args.strict)
    config_names = _parse_configs(args.config)
    configs = [(name, parse_config(name)) for name in config_names]
    kinds = _parse_kinds(args.classifier)
    needed = tuple(dict.fromkeys(f for _, mask in configs for f in mask))
    caches = _load_caches(Path(args.cache), needed)
    features = features_for(manifest, needed, caches)
    dataset = args.dataset or Path(args.manifest).stem
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    report = evaluate_per_generator(
        manifest,
        features,
        config_names,
        kinds,
        seed=args.seed,
        test_fraction=args.test_fraction,
        lenient=args.lenient,
        per_generator_train=args.per_generator_train,
        tau=args.tau,
        dataset=dataset,
    )
    _write_text(
        out_dir / "report.json",
        json.dumps(report.to_json_dict(), indent=2) + "\n",
    )
    _write_csv_rows(out_dir / "report.csv", report.to_csv_rows())
    _log(f"evaluate: wrote {out_dir / 'report.json'} and {out_dir / 'report.csv'}")

    bar_title = f"{dataset}: mean accuracy and MCC per feature configuration"
    if len(manifest.generator_tags()) >= 2 and args.rounds > 0:
        comp = random_composition_eval(
            manifest,
            features,
            config_names,
            n_rounds=args.rounds,
            seed=args.seed,
            classifier_kinds=kinds,
            test_fraction=args.test_fraction,
            lenient=args.lenient,
            tau=args.tau,
            dataset=dataset,
        )
        _write_text(
            out_dir / "composition.json",
            json.dumps(comp.to_json_dict(), indent=2) + "\n",
        )
        _log(f"evaluate: wrote {out_dir / 'composition.json'}")
        svg = bar_chart(
            [s.config for s in comp.summaries],
            [
                (
                    "accuracy",
                    [s.accuracy_mean for s in comp.summaries],
                    [s.accuracy_std for s in comp.summaries],
                ),
                (
                    "mcc",
                    [s.mcc_mean for s in comp.summaries],
                    [s.mcc_std for s in comp.summaries],
                ),
            ],
            title=f"{dataset}: mixed-generator composition ({comp.n_rounds} rounds)",
            y_label="score",
        )
    else:
        _log("evaluate: fewer than 2 generators or --rounds 0, composition skipped")
        svg = bar_chart(
            list(report.config_names),
            _report_bar_series(report),
            title=bar_title,
            y_label="score",
        )
    _write_text(out_dir / "bar.svg", svg)
    _log(f"evaluate: wrote {out_dir / 'bar.svg'}")

    _print_csv_rows(report.to_csv_rows())
    return 0


# -- analyze --------------------------------------------------------------------


def cmd_analyze(args) -> int:
    out_dir = Path(args.out)
    report_path = out_dir / "report.json"
    if not report_path.is_file():
        _log(f"error: no reports found in {out_dir} (expected report.json)")
        return 7
    report = load_report(report_path)

    feature_sets = None
    if args.manifest and args.cache:
        manifest = load_manifest(args.manifest, strict=args.strict)
        needed = tuple(
            dict.fromkeys(
                f for name in report.config_names for f in parse_config(name)
            )
        )
        caches = _load_caches(Path(args.cache), needed)
        features = features_for(manifest, needed, caches)
        feature_sets = {report.dataset: (manifest, features)}
    elif args.manifest or args.cache:
        _log("analyze: both --manifest and --cache are needed for the distance tables")

    result = analyze_report({report.dataset: report}, feature_sets)

    _write_text(
        out_dir / "analysis.json",
        json.dumps(result.to_json_dict(), indent=2) + "\n",
    )
    _write_csv_rows(out_dir / "significance.csv", significance_csv_rows(result))
    _log(
        f"analyze: wrote {out_dir / 'analysis.json'} and "
        f"{out_dir / 'significance.csv'}"
    )
    if result.frechet:
        _write_csv_rows(out_dir / "frechet.csv", frechet_csv_rows(result))
        points = [
            (math.log10(max(f.distance, 1e-300)), f.mean_mcc, f.config)
            for f in result.frechet
        ]
        svg = scatter_plot(
            points,
            title=f"{report.dataset}: feature-space distance vs detectability",
            x_label="log10 Frechet distance (natural vs genai)",
            y_label="mean MCC",
        )
        _write_text(out_dir / "scatter.svg", svg)
        _log(f"analyze: wrote {out_dir / 'frechet.csv'} and {out_dir / 'scatter.svg'}")
    else:
        _log("analyze: no feature set supplied, distance tables skipped")

    _print_csv_rows(significance_csv_rows(result))
    return 0


# -- parser ----------------------------------------------------------------------


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _add_provider_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument(
        "--onnx-model", metavar="PATH", help="image encoder exported to ONNX"
    )
    group.add_argument(
        "--embedding-store",
        metavar="PATH",
        help="JSON-lines file of precomputed embeddings keyed by manifest path",
    )


def _add_strictness_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument(
        "--strict",
        action="store_true",
        help="require every manifest path to exist on disk",
    )
    group.add_argument(
        "--lenient",
        action="store_true",
        help="keep too-small strata in train with a warning instead of failing",
    )


def _add_workers_flag(sub) -> None:
    sub.add_argument(
        "--workers",
        type=_positive_int,
        default=os.cpu_count() or 1,
        help="worker threads for per-image feature computation (default: cores)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusedetect",
        description="AI-generated image detection from fused statistical, "
        "semantic, and texture features.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "extract",
        help="compute feature caches for a manifest",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--manifest", required=True, help="dataset manifest CSV")
    p.add_argument(
        "--features",
        default="all",
        help="comma-separated families: mscn, clip, mlbp, or all (default: all)",
    )
    p.add_argument("--out", required=True, help="cache directory")
    _add_provider_flags(p)
    _add_strictness_flags(p)
    _add_workers_flag(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser(
        "train",
        help="train models from cached features",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--manifest", required=True, help="dataset manifest CSV")
    p.add_argument("--cache", required=True, help="cache directory from extract")
    p.add_argument(
        "--config",
        default=",".join(CONFIG_NAMES),
        help="comma-separated feature configurations (default: all seven)",
    )
    p.add_argument(
        "--classifier",
        default=",".join(KINDS),
        help="comma-separated classifiers from gb, rf, svm (default: all)",
    )
    p.add_argument("--seed", type=_nonneg_int, required=True, help="training seed")
    p.add_argument(
        "--tau", type=_fraction, default=DEFAULT_TAU, help="decision threshold"
    )
    p.add_argument("--out", required=True, help="model output directory")
    _add_strictness_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "detect",
        help="score images with a trained model",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--model", required=True, help="model file from train")
    p.add_argument(
        "--tau",
        type=_fraction,
        default=None,
        help="decision threshold override (default: the model's)",
    )
    _add_provider_flags(p)
    _add_workers_flag(p)
    p.add_argument("images", nargs="+", help="image files to score")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser(
        "evaluate",
        help="per-generator tables and the mixed-generator protocol",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--manifest", required=True, help="dataset manifest CSV")
    p.add_argument("--cache", required=True, help="cache directory from extract")
    p.add_argument(
        "--config",
        default=",".join(CONFIG_NAMES),
        help="comma-separated feature configurations (default: all seven)",
    )
    p.add_argument(
        "--classifier",
        default=",".join(KINDS),
        help="comma-separated classifiers from gb, rf, svm (default: all)",
    )
    p.add_argument("--seed", type=_nonneg_int, required=True, help="split/training seed")
    p.add_argument(
        "--test-fraction", type=_fraction, default=0.2, help="test share per stratum"
    )
    p.add_argument(
        "--tau", type=_fraction, default=DEFAULT_TAU, help="decision threshold"
    )
    p.add_argument(
        "--rounds",
        type=_nonneg_int,
        default=3,
        help="composition protocol rounds, 0 to skip (default: 3)",
    )
    p.add_argument(
        "--per-generator-train",
        action="store_true",
        help="train one model per generator instead of one pooled model",
    )
    p.add_argument(
        "--dataset", default=None, help="dataset name in reports (default: manifest stem)"
    )
    p.add_argument("--out", required=True, help="report output directory")
    _add_strictness_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "analyze",
        help="significance and feature-space analysis of a report",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--out", required=True, help="directory holding report.json")
    p.add_argument(
        "--manifest", default=None, help="manifest CSV (enables distance tables)"
    )
    p.add_argument(
        "--cache", default=None, help="cache directory (enables distance tables)"
    )
    _add_strictness_flags(p)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FusedetectError as exc:
        _log(f"error: {exc}")
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
