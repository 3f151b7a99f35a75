"""Grayscale image container plus loading, conversion, and resizing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..types import ValidationError

# ITU-R 601 luma weights for RGB -> gray.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class GrayImage:
    """Row-major grayscale pixels in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("image must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("image contains non-finite pixels")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def to_gray(rgb: np.ndarray) -> GrayImage:
    """Convert an (H, W, 3) array in [0, 1] or [0, 255] to grayscale."""
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim == 2:
        if arr.max() > 1.0:
            arr = arr / 255.0
        return GrayImage(arr)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValidationError(f"expected (H, W, 3) color image, got shape {arr.shape}")
    if arr.max() > 1.0:
        arr = arr / 255.0
    return GrayImage(arr[:, :, :3] @ LUMA_WEIGHTS)


def load_image(path: str | Path) -> GrayImage:
    """Load an 8-bit PNG/JPEG from disk as grayscale."""
    with Image.open(path) as img:
        rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    return to_gray(rgb)


def resize(image: GrayImage, height: int, width: int) -> GrayImage:
    """Bilinear resize; identity when the size already matches."""
    if image.height == height and image.width == width:
        return image
    pil = Image.fromarray(image.pixels.astype(np.float32), mode="F")
    out = np.asarray(
        pil.resize((width, height), resample=Image.BILINEAR), dtype=np.float64
    )
    # Bilinear interpolation can escape [0, 1] by float error only.
    return GrayImage(np.clip(out, 0.0, 1.0))
