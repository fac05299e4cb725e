"""Synthetic toy fixture: a tiny two-class image set that separates on
texture statistics alone.

The natural-like class is smoothed Gaussian noise, which has the irregular
local structure of photographic content. The genai-like class is periodic
sine tiles overlaid with concentric ring artifacts, caricaturing the
gridded and radial regularities of generated imagery. Two parameter
regimes act as two distinct "generators" so multi-generator protocols can
run on the fixture. No neural network is involved anywhere.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

TOY_SIDE = 64

TOY_GENERATORS = ("tilegen", "ringgen")

_CHANNEL_GAINS = (1.0, 0.96, 0.9)


def _to_image(field: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Turn a float field into uint8 RGB with slight per-channel variation."""
    channels = []
    for gain in _CHANNEL_GAINS:
        chan = 128.0 + gain * field + rng.normal(0.0, 2.0, size=field.shape)
        channels.append(chan)
    rgb = np.stack(channels, axis=-1)
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def _natural_field(rng: np.random.Generator, side: int) -> np.ndarray:
    noise = rng.normal(0.0, 1.0, size=(side, side))
    field = gaussian_filter(noise, sigma=1.5, mode="reflect")
    sd = float(field.std())
    return field / sd * 32.0


def _genai_field(rng: np.random.Generator, side: int, generator: str) -> np.ndarray:
    rows, cols = np.mgrid[0:side, 0:side].astype(np.float64)
    if generator == "tilegen":
        period = float(rng.integers(6, 13))
        tile_amp, ring_amp = 52.0, 14.0
        ring_freq = rng.uniform(0.4, 0.7)
    else:
        period = float(rng.integers(10, 17))
        tile_amp, ring_amp = 14.0, 52.0
        ring_freq = rng.uniform(0.7, 1.1)
    px, py = rng.uniform(0.0, 2.0 * np.pi, size=2)
    tiles = np.sin(2.0 * np.pi * cols / period + px) * np.sin(
        2.0 * np.pi * rows / period + py
    )
    cy, cx = rng.uniform(side * 0.3, side * 0.7, size=2)
    radius = np.hypot(rows - cy, cols - cx)
    rings = np.sin(ring_freq * radius + rng.uniform(0.0, 2.0 * np.pi))
    field = tile_amp * tiles + ring_amp * rings
    field += rng.normal(0.0, 3.0, size=(side, side))
    return field


def generate_toy_dataset(out_dir, n_per_class: int = 200, seed: int = 0) -> Path:
    """Write the toy image corpus and its manifest; returns the manifest path.

    Layout: `<out_dir>/images/*.png` plus `<out_dir>/manifest.csv`. Each
    image gets its own counter-keyed random stream, so any subset of the
    corpus is reproducible independently of generation order.
    """
    out_dir = Path(out_dir)
    img_dir = out_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for index in range(2 * n_per_class):
        rng = np.random.Generator(np.random.Philox(key=[seed, index]))
        if index < n_per_class:
            field = _natural_field(rng, TOY_SIDE)
            label, generator = "natural", "natural"
            name = f"natural_{index:04d}.png"
        else:
            rank = index - n_per_class
            generator = TOY_GENERATORS[rank % len(TOY_GENERATORS)]
            field = _genai_field(rng, TOY_SIDE, generator)
            label = "genai"
            name = f"{generator}_{rank:04d}.png"
        rgb = _to_image(field, rng)
        Image.fromarray(rgb, mode="RGB").save(img_dir / name, format="PNG")
        rows.append({"path": f"images/{name}", "label": label, "generator": generator})

    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["path", "label", "generator"])
        writer.writeheader()
        writer.writerows(rows)
    return manifest_path
