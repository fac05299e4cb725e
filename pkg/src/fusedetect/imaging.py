"""Image decoding, color handling, and geometric preprocessing.

All operations are pure functions over immutable inputs. Pixel data is kept
as uint8 for RGB images and float64 in [0, 255] for single-channel planes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, IoError, TooSmallError

# Minimum image side: a 7x7 local-statistics window plus texture codes at
# radius 3 both need 8 pixels to produce at least one interior sample.
MIN_SIDE = 8

# BT.601 luma weights.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)

SUPPORTED_FORMATS = ("PNG", "JPEG", "BMP")


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB raster, row-major interleaved, at least 8x8."""

    width: int
    height: int
    data: np.ndarray  # shape (height, width, 3), dtype uint8

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3):
            raise ValueError(
                f"data shape {self.data.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        if self.data.dtype != np.uint8:
            raise ValueError(f"RGB data must be uint8, got {self.data.dtype}")
        if self.width < MIN_SIDE or self.height < MIN_SIDE:
            raise TooSmallError(
                f"image is {self.width}x{self.height}, minimum is "
                f"{MIN_SIDE}x{MIN_SIDE}"
            )


@dataclass(frozen=True, eq=False)
class GrayPlane:
    """Single-channel float64 plane with values in [0, 255]."""

    width: int
    height: int
    data: np.ndarray  # shape (height, width), dtype float64

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if self.data.dtype != np.float64:
            raise ValueError(f"plane data must be float64, got {self.data.dtype}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("plane contains non-finite values")


def decode_image(path) -> RgbImage:
    """Decode a PNG/JPEG/BMP file into an RgbImage.

    Deterministic: the same file bytes always produce the same pixel buffer.
    """
    p = Path(path)
    if not p.is_file():
        raise IoError(f"cannot read image file: {p}")
    try:
        with Image.open(p) as im:
            fmt = im.format
            if fmt not in SUPPORTED_FORMATS:
                raise DecodeError(f"unsupported image format {fmt!r}: {p}")
            rgb = im.convert("RGB")
            data = np.asarray(rgb, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise DecodeError(f"not a decodable image: {p}") from exc
    except OSError as exc:
        # Pillow raises OSError for truncated/corrupt streams during load.
        raise DecodeError(f"corrupt image data: {p}") from exc
    h, w = data.shape[:2]
    if w < MIN_SIDE or h < MIN_SIDE:
        raise TooSmallError(f"image is {w}x{h}, minimum is {MIN_SIDE}x{MIN_SIDE}")
    return RgbImage(width=w, height=h, data=data)


def to_gray(img: RgbImage) -> GrayPlane:
    """BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B, same dimensions."""
    wr, wg, wb = GRAY_WEIGHTS
    f = img.data.astype(np.float64)
    y = wr * f[:, :, 0] + wg * f[:, :, 1] + wb * f[:, :, 2]
    return GrayPlane(width=img.width, height=img.height, data=y)


def split_channels(img: RgbImage) -> tuple[GrayPlane, GrayPlane, GrayPlane]:
    """Return the R, G, B samples as three float planes."""
    f = img.data.astype(np.float64)
    return tuple(
        GrayPlane(width=img.width, height=img.height, data=f[:, :, c].copy())
        for c in range(3)
    )


def merge_channels(r: GrayPlane, g: GrayPlane, b: GrayPlane) -> RgbImage:
    """Inverse of split_channels for planes holding integral sample values."""
    data = np.stack([r.data, g.data, b.data], axis=-1)
    return RgbImage(width=r.width, height=r.height, data=data.astype(np.uint8))


def resize_center_crop(img: RgbImage, side: int) -> RgbImage:
    """Bicubic-resize the shorter edge to `side`, then center crop side x side.

    When the shorter edge already equals `side` no resampling happens, so the
    retained region is bitwise identical to the input.
    """
    if side < 1:
        raise ValueError(f"side must be >= 1, got {side}")
    w, h = img.width, img.height
    short = min(w, h)
    if short == side:
        new_w, new_h, data = w, h, img.data
    else:
        if w <= h:
            new_w = side
            new_h = int(h * side / w + 0.5)
        else:
            new_h = side
            new_w = int(w * side / h + 0.5)
        pil = Image.fromarray(img.data, mode="RGB")
        data = np.asarray(
            pil.resize((new_w, new_h), Image.Resampling.BICUBIC), dtype=np.uint8
        )
    left = (new_w - side) // 2
    top = (new_h - side) // 2
    cropped = data[top : top + side, left : left + side].copy()
    return RgbImage(width=side, height=side, data=cropped)
