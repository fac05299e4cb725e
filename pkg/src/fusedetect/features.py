"""Tagged feature vectors and the family registry.

Three feature families feed the fused representation:

  mscn  72 values   local contrast statistics via co-occurrence descriptors
  clip  512 values  semantic embedding from an external encoder
  mlbp  36 values   multi-scale binary-pattern histogram statistics

Fused vectors concatenate standardized families in the canonical order
(mscn, clip, mlbp); subsets of the families are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CANONICAL_FAMILIES = ("mscn", "clip", "mlbp")

FAMILY_DIMS = {"mscn": 72, "clip": 512, "mlbp": 36}

FUSED_DIM = sum(FAMILY_DIMS.values())  # 620

FUSED_ID = "fused"


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Fixed-length numeric vector tagged with its extractor and version.

    `stats_fingerprint` is set once the vector has been standardized and ties
    it to the statistics used; `families` records the subset concatenated
    into a fused vector.
    """

    extractor_id: str
    version: str
    values: np.ndarray  # 1-D float64
    stats_fingerprint: str | None = None
    families: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError(f"feature values must be 1-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{self.extractor_id} feature vector has non-finite values")
        if self.extractor_id in FAMILY_DIMS:
            want = FAMILY_DIMS[self.extractor_id]
            if v.size != want:
                raise ValueError(
                    f"{self.extractor_id} vector must have {want} values, got {v.size}"
                )
        elif self.extractor_id == FUSED_ID:
            if not self.families:
                raise ValueError("fused vector must record its families")
            want = sum(FAMILY_DIMS[f] for f in self.families)
            if v.size != want:
                raise ValueError(
                    f"fused vector over {self.families} must have {want} values, "
                    f"got {v.size}"
                )
        else:
            raise ValueError(f"unknown extractor_id {self.extractor_id!r}")

    def __len__(self) -> int:
        return int(self.values.size)
