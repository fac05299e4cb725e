"""Feature caches: one JSON-lines file per extractor family.

Each line is `{"path", "extractor_id", "version", "vector"}`. Floats are
serialized by repr, so a cache round-trip reproduces vectors bit for bit
and a warm-cache pipeline run equals a cold one exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CacheMissError,
    DimMismatchError,
    DuplicateKeyError,
    IoError,
    ParseError,
    VersionError,
)
from .features import FAMILY_DIMS, FeatureVector


def cache_file(directory, extractor_id: str) -> Path:
    return Path(directory) / f"{extractor_id}.jsonl"


@dataclass
class FeatureCache:
    """In-memory view of one extractor's cache file."""

    extractor_id: str
    version: str
    vectors: dict = field(default_factory=dict)  # path -> FeatureVector

    def __contains__(self, path: str) -> bool:
        return path in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, path: str) -> FeatureVector:
        return self.vectors[path]

    def put(self, path: str, fv: FeatureVector) -> None:
        if fv.extractor_id != self.extractor_id:
            raise ValueError(
                f"cache holds {self.extractor_id} vectors, got {fv.extractor_id}"
            )
        if fv.version != self.version:
            raise VersionError(
                f"cache holds version {self.version}, got {fv.version}"
            )
        self.vectors[path] = fv

    def missing(self, paths) -> list:
        return [p for p in paths if p not in self.vectors]

    def require(self, paths) -> None:
        absent = self.missing(paths)
        if absent:
            raise CacheMissError(
                f"{self.extractor_id} cache is missing {len(absent)} paths, "
                f"first few: {absent[:5]}"
            )

    def dump(self, path) -> None:
        """Write the cache as JSON-lines, one entry per path in sorted order."""
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for key in sorted(self.vectors):
                    fv = self.vectors[key]
                    fh.write(
                        json.dumps(
                            {
                                "path": key,
                                "extractor_id": fv.extractor_id,
                                "version": fv.version,
                                "vector": fv.values.tolist(),
                            },
                            separators=(",", ":"),
                        )
                    )
                    fh.write("\n")
        except OSError as exc:
            raise IoError(f"cannot write cache file {path}: {exc}") from exc


def load_feature_cache(path, extractor_id: str | None = None) -> FeatureCache:
    """Read a cache file, validating every line.

    Error messages carry 1-based line numbers. When extractor_id is given,
    lines for any other extractor are rejected.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read cache file {path}: {exc}") from exc

    cache = None
    first_seen: dict = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path} line {line_no}: invalid JSON: {exc}") from exc
        if not isinstance(rec, dict):
            raise ParseError(f"{path} line {line_no}: expected an object")
        try:
            key = rec["path"]
            ext = rec["extractor_id"]
            version = rec["version"]
            vector = rec["vector"]
        except KeyError as exc:
            raise ParseError(f"{path} line {line_no}: missing field {exc}") from exc
        if extractor_id is not None and ext != extractor_id:
            raise ParseError(
                f"{path} line {line_no}: expected {extractor_id} entries, got {ext!r}"
            )
        if ext not in FAMILY_DIMS:
            raise ParseError(f"{path} line {line_no}: unknown extractor {ext!r}")
        want = FAMILY_DIMS[ext]
        if not isinstance(vector, list) or len(vector) != want:
            got = len(vector) if isinstance(vector, list) else type(vector).__name__
            raise DimMismatchError(
                f"{path} line {line_no}: {ext} vector must have {want} values, got {got}"
            )
        if cache is None:
            cache = FeatureCache(extractor_id=ext, version=version)
        elif ext != cache.extractor_id:
            raise ParseError(
                f"{path} line {line_no}: mixes extractors "
                f"{cache.extractor_id!r} and {ext!r}"
            )
        elif version != cache.version:
            raise VersionError(
                f"{path} line {line_no}: mixes versions "
                f"{cache.version!r} and {version!r}"
            )
        if key in first_seen:
            raise DuplicateKeyError(
                f"{path} line {line_no}: duplicate path {key!r} "
                f"(first seen on line {first_seen[key]})"
            )
        first_seen[key] = line_no
        cache.vectors[key] = FeatureVector(
            extractor_id=ext,
            version=version,
            values=np.asarray(vector, dtype=np.float64),
        )
    if cache is None:
        raise ParseError(f"{path} holds no cache entries")
    return cache
