"""Dataset manifests: CSV ingestion and stratified train/test splitting.

A manifest is a CSV with header `path,label,generator,split` (split
optional) describing one image per row. Paths are relative to the
manifest's directory, labels are "natural" or "genai", and the generator
column tags which model produced a genai image (natural rows carry their
source tag, e.g. "natural").
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import canonical_key
from .errors import (
    DuplicateError,
    IoError,
    LabelError,
    RangeError,
    SchemaError,
    StratumError,
)

LABEL_NAMES = {"natural": 0, "genai": 1}

REQUIRED_COLUMNS = ("path", "label", "generator")

SPLIT_VALUES = ("train", "test")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: int
    generator: str
    split: str | None = None


@dataclass(frozen=True, eq=False)
class DatasetManifest:
    root: Path
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "root", Path(self.root))
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = {}
        for i, e in enumerate(self.entries):
            if e.path in seen:
                raise DuplicateError(
                    f"path {e.path!r} appears in entries {seen[e.path]} and {i}"
                )
            seen[e.path] = i

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def paths(self) -> tuple:
        return tuple(e.path for e in self.entries)

    def generator_tags(self) -> tuple:
        """Sorted distinct generator tags among genai entries."""
        return tuple(sorted({e.generator for e in self.entries if e.label == 1}))

    def label_counts(self) -> tuple:
        n_pos = sum(1 for e in self.entries if e.label == 1)
        return len(self.entries) - n_pos, n_pos

    def absolute_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    @property
    def fingerprint(self) -> str:
        payload = [
            {"path": e.path, "label": e.label, "generator": e.generator, "split": e.split}
            for e in self.entries
        ]
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_manifest(path, strict: bool = False) -> DatasetManifest:
    """Read and validate a manifest CSV.

    With strict=True every referenced file must exist under the manifest's
    directory. Row numbers in error messages count from 1 at the header.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SchemaError(f"{path} is empty, expected header {REQUIRED_COLUMNS}")
            missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
            if missing:
                raise SchemaError(f"{path} is missing required columns {missing}")
            has_split = "split" in reader.fieldnames
            entries = []
            for row_no, row in enumerate(reader, start=2):
                raw_path = (row["path"] or "").strip()
                if not raw_path:
                    raise SchemaError(f"{path} row {row_no} has an empty path")
                label = (row["label"] or "").strip()
                if label not in LABEL_NAMES:
                    raise LabelError(
                        f"{path} row {row_no} has unknown label {label!r}; "
                        f"expected one of {sorted(LABEL_NAMES)}"
                    )
                generator = (row["generator"] or "").strip()
                if not generator:
                    raise SchemaError(f"{path} row {row_no} has an empty generator")
                split = None
                if has_split:
                    raw_split = (row["split"] or "").strip()
                    if raw_split:
                        if raw_split not in SPLIT_VALUES:
                            raise SchemaError(
                                f"{path} row {row_no} has invalid split {raw_split!r}; "
                                f"expected train, test, or empty"
                            )
                        split = raw_split
                entries.append(
                    ManifestEntry(
                        path=canonical_key(raw_path),
                        label=LABEL_NAMES[label],
                        generator=generator,
                        split=split,
                    )
                )
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc

    manifest = DatasetManifest(root=path.resolve().parent, entries=entries)
    if strict:
        absent = [e.path for e in manifest.entries if not manifest.absolute_path(e).exists()]
        if absent:
            raise IoError(
                f"{len(absent)} manifest paths do not exist, first few: {absent[:5]}"
            )
    return manifest


def stratified_split(m: DatasetManifest, test_fraction: float, seed: int, lenient: bool = False):
    """Split into (train, test) manifests, stratified by label x generator.

    Entries with an explicit split value keep it verbatim. The rest are
    grouped per (label, generator) stratum; a seeded shuffle sends
    ceil(test_fraction * n) of each stratum to test. Strata smaller than 2
    raise StratumError, or are kept whole in train with a warning when
    lenient=True.
    """
    if not 0.0 < test_fraction < 1.0:
        raise RangeError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    train_idx = []
    test_idx = []
    pool = []
    for i, e in enumerate(m.entries):
        if e.split == "train":
            train_idx.append(i)
        elif e.split == "test":
            test_idx.append(i)
        else:
            pool.append(i)

    strata: dict = {}
    for i in pool:
        e = m.entries[i]
        strata.setdefault((e.label, e.generator), []).append(i)

    for k, (key, members) in enumerate(sorted(strata.items())):
        if len(members) < 2:
            label_name = "genai" if key[0] == 1 else "natural"
            if not lenient:
                raise StratumError(
                    f"stratum ({label_name}, {key[1]}) has {len(members)} entries, "
                    f"needs at least 2 to split"
                )
            warnings.warn(
                f"stratum ({label_name}, {key[1]}) too small to split, kept in train",
                stacklevel=2,
            )
            train_idx.extend(members)
            continue
        n_test = math.ceil(test_fraction * len(members))
        rng = np.random.Generator(np.random.Philox(key=[seed, k]))
        order = rng.permutation(len(members))
        chosen = {members[j] for j in order[:n_test]}
        test_idx.extend(sorted(chosen))
        train_idx.extend(sorted(set(members) - chosen))

    def subset(indices, split_value):
        picked = [m.entries[i] for i in sorted(indices)]
        return DatasetManifest(
            root=m.root,
            entries=[
                ManifestEntry(e.path, e.label, e.generator, split_value) for e in picked
            ],
        )

    return subset(train_idx, "train"), subset(test_idx, "test")
