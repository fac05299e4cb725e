"""Semantic embedding provider: 512-d image vectors from a pluggable
backend.

Two backends exist. The onnx backend wraps an exported image encoder and is
optional at runtime (the dependency is imported lazily). The precomputed
store backend reads a JSON-lines file of path -> vector records, which lets
everything downstream run without any neural-network runtime.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path, PurePosixPath, PureWindowsPath

import numpy as np

from .errors import (
    DimMismatchError,
    DuplicateKeyError,
    EmbeddingMissError,
    InferenceError,
    ParseError,
    ProviderInitError,
)
from .features import FeatureVector
from .imaging import RgbImage, resize_center_crop

EMBEDDING_DIM = 512
CLIP_VERSION = "1.0.0"

# Published preprocessing constants of the CLIP ViT-B/32 image encoder.
CLIP_MEANS = (0.48145466, 0.4578275, 0.40821073)
CLIP_STDS = (0.26862954, 0.26130258, 0.27577711)
CLIP_SIDE = 224

KIND_ONNX = "onnx-model"
KIND_STORE = "precomputed-store"

_NORM_TOL = 1e-4


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    kind: str
    model_path: str | None = None
    store_path: str | None = None
    expected_dim: int = EMBEDDING_DIM
    input_name: str | None = None
    output_name: str | None = None

    def __post_init__(self):
        if self.kind not in (KIND_ONNX, KIND_STORE):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == KIND_ONNX and (not self.model_path or self.store_path):
            raise ValueError("onnx-model provider needs model_path and nothing else")
        if self.kind == KIND_STORE and (not self.store_path or self.model_path):
            raise ValueError(
                "precomputed-store provider needs store_path and nothing else"
            )
        if self.expected_dim < 1:
            raise ValueError(f"expected_dim must be positive, got {self.expected_dim}")


@dataclass(frozen=True, eq=False)
class SemanticEmbedding:
    values: np.ndarray  # (512,) float64, unit L2 norm
    source_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError(f"embedding must be 1-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding has non-finite components")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"embedding L2 norm {norm} is not 1 within {_NORM_TOL}")

    def as_feature(self) -> FeatureVector:
        return FeatureVector(
            extractor_id="clip", version=CLIP_VERSION, values=self.values
        )


def canonical_key(path, root=None) -> str:
    """Store key for an image path: relative to root when given, forward
    slashes, no leading './'."""
    p = str(path)
    if root is not None:
        try:
            p = str(Path(p).relative_to(root))
        except ValueError:
            p = str(Path(p))
    if "\\" in p:
        p = str(PurePosixPath(*PureWindowsPath(p).parts))
    while p.startswith("./"):
        p = p[2:]
    return p


def _l2_normalize(v: np.ndarray, context: str) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        raise InferenceError(f"{context}: embedding has invalid norm {norm}")
    return v / norm


def load_embedding_store(path) -> dict[str, np.ndarray]:
    """Read a JSON-lines embedding store into a key -> vector map.

    Each line is {"path": str, "embedding": [512 numbers]}. Blank lines are
    allowed; everything else is validated hard, with line numbers in every
    complaint.
    """
    p = Path(path)
    if not p.is_file():
        raise ProviderInitError(f"embedding store not found: {p}")
    store: dict[str, np.ndarray] = {}
    first_seen: dict[str, int] = {}
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{p}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(rec, dict) or "path" not in rec or "embedding" not in rec:
                raise ParseError(
                    f"{p}:{lineno}: expected an object with 'path' and 'embedding'"
                )
            key = canonical_key(rec["path"])
            emb = rec["embedding"]
            if not isinstance(emb, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in emb
            ):
                raise ParseError(f"{p}:{lineno}: embedding must be a list of numbers")
            if len(emb) != EMBEDDING_DIM:
                raise DimMismatchError(
                    f"{p}:{lineno}: embedding has {len(emb)} values, expected "
                    f"{EMBEDDING_DIM}"
                )
            if key in store:
                raise DuplicateKeyError(
                    f"{p}: key {key!r} appears on lines {first_seen[key]} and {lineno}"
                )
            store[key] = np.asarray(emb, dtype=np.float64)
            first_seen[key] = lineno
    return store


class StoreProvider:
    """Exact-key lookups against an in-memory embedding store."""

    def __init__(self, cfg: EmbeddingProviderConfig):
        self.cfg = cfg
        self.store = load_embedding_store(cfg.store_path)

    def embed(self, img: RgbImage | None, key: str | None) -> SemanticEmbedding:
        if key is None:
            raise ValueError("precomputed-store lookups need an image key")
        k = canonical_key(key)
        if k not in self.store:
            raise EmbeddingMissError(f"no embedding stored for {k!r}")
        v = self.store[k]
        if len(v) != self.cfg.expected_dim:
            raise DimMismatchError(
                f"stored embedding for {k!r} has {len(v)} values, expected "
                f"{self.cfg.expected_dim}"
            )
        return SemanticEmbedding(
            values=_l2_normalize(v, f"store key {k!r}"), source_id=f"store:{k}"
        )


class OnnxProvider:
    """Runs an exported image encoder; requires the onnxruntime package."""

    def __init__(self, cfg: EmbeddingProviderConfig):
        self.cfg = cfg
        model = Path(cfg.model_path)
        if not model.is_file():
            raise ProviderInitError(f"onnx model not found: {model}")
        try:
            import onnxruntime  # deferred so the package works without it
        except ImportError as exc:
            raise ProviderInitError(
                "onnx-model provider requires the onnxruntime package "
                "(install the [onnx] extra)"
            ) from exc
        try:
            self.session = onnxruntime.InferenceSession(
                str(model), providers=["CPUExecutionProvider"]
            )
        except Exception as exc:
            raise ProviderInitError(f"could not load onnx model {model}: {exc}") from exc
        self.input_name = cfg.input_name or self.session.get_inputs()[0].name
        self.output_name = cfg.output_name or self.session.get_outputs()[0].name
        digest = hashlib.sha256(model.read_bytes()).hexdigest()
        self.source_id = f"onnx:{digest[:16]}"
        self._lock = threading.Lock()

    def preprocess(self, img: RgbImage) -> np.ndarray:
        square = resize_center_crop(img, CLIP_SIDE)
        x = square.data.astype(np.float32) / 255.0
        mean = np.asarray(CLIP_MEANS, dtype=np.float32)
        std = np.asarray(CLIP_STDS, dtype=np.float32)
        x = (x - mean) / std
        return x.transpose(2, 0, 1)[None, :, :, :]

    def embed(self, img: RgbImage, key: str | None = None) -> SemanticEmbedding:
        x = self.preprocess(img)
        try:
            with self._lock:
                (out,) = self.session.run([self.output_name], {self.input_name: x})
        except Exception as exc:
            raise InferenceError(f"onnx inference failed: {exc}") from exc
        v = np.asarray(out, dtype=np.float64).ravel()
        if v.size != self.cfg.expected_dim:
            raise DimMismatchError(
                f"encoder returned {v.size} values, expected {self.cfg.expected_dim}"
            )
        if not np.all(np.isfinite(v)):
            raise InferenceError("encoder returned non-finite values")
        return SemanticEmbedding(
            values=_l2_normalize(v, "onnx output"), source_id=self.source_id
        )


def make_provider(cfg: EmbeddingProviderConfig):
    if cfg.kind == KIND_STORE:
        return StoreProvider(cfg)
    return OnnxProvider(cfg)


_provider_cache: dict[tuple, object] = {}
_provider_lock = threading.Lock()


def embed_image(
    img: RgbImage | None, cfg: EmbeddingProviderConfig, key: str | None = None
) -> SemanticEmbedding:
    """Embed one image through the configured backend.

    Providers are cached per configuration, so repeated calls share the
    loaded store or encoder session.
    """
    cache_key = (cfg.kind, cfg.model_path, cfg.store_path, cfg.expected_dim)
    with _provider_lock:
        provider = _provider_cache.get(cache_key)
        if provider is None:
            provider = make_provider(cfg)
            _provider_cache[cache_key] = provider
    return provider.embed(img, key)
