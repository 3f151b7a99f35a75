"""Histogram-of-oriented-gradients descriptor (Dalal-Triggs layout).

9 unsigned orientation bins per cell, blocks of 2x2 cells with a stride of
one cell, per-block L2 normalization with an epsilon guard.  A 300x300 image
with 30px cells therefore yields (10-1) * (10-1) * 36 = 2916 values.
"""

from __future__ import annotations

import numpy as np

from ..types import FeatureVector, ValidationError
from .image import GrayImage

N_BINS = 9
BLOCK_CELLS = 2  # 2x2 cells per block, stride one cell
NORM_EPS = 1e-5


def hog_dim(height: int, width: int, cell_px: int) -> int:
    """Descriptor length for the given image and cell size."""
    cells_y = height // cell_px
    cells_x = width // cell_px
    return (cells_y - 1) * (cells_x - 1) * BLOCK_CELLS * BLOCK_CELLS * N_BINS


def _gradients(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered-difference gradients with replicated edges."""
    padded = np.pad(pixels, 1, mode="edge")
    gx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    gy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    return gx, gy


def compute_hog(image: GrayImage, cell_px: int = 30) -> FeatureVector:
    """Compute the HOG descriptor of a grayscale image.

    The image dimensions must be divisible by ``cell_px`` and span at least
    2x2 cells.  Orientations are unsigned (folded to [0, 180) degrees) and
    each pixel votes its full gradient magnitude into the single containing
    bin.  All output values are >= 0.
    """
    if cell_px < 1:
        raise ValidationError(f"cell_px must be >= 1, got {cell_px}")
    h, w = image.height, image.width
    if h % cell_px or w % cell_px:
        raise ValidationError(
            f"image size {h}x{w} is not divisible by cell size {cell_px}"
        )
    cells_y, cells_x = h // cell_px, w // cell_px
    if cells_y < BLOCK_CELLS or cells_x < BLOCK_CELLS:
        raise ValidationError(
            f"image spans {cells_y}x{cells_x} cells; need at least "
            f"{BLOCK_CELLS}x{BLOCK_CELLS}"
        )

    gx, gy = _gradients(image.pixels)
    magnitude = np.hypot(gx, gy)
    # Unsigned orientation in [0, pi); pi folds back to bin 0.
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum((angle / (np.pi / N_BINS)).astype(np.intp), N_BINS - 1)

    cell_hist = np.zeros((cells_y, cells_x, N_BINS))
    cell_row = np.repeat(np.arange(cells_y), cell_px)[:, None]
    cell_col = np.repeat(np.arange(cells_x), cell_px)[None, :]
    flat_index = (cell_row * cells_x + cell_col) * N_BINS + bins
    np.add.at(cell_hist.reshape(-1), flat_index.ravel(), magnitude.ravel())

    blocks = []
    for by in range(cells_y - BLOCK_CELLS + 1):
        for bx in range(cells_x - BLOCK_CELLS + 1):
            block = cell_hist[by:by + BLOCK_CELLS, bx:bx + BLOCK_CELLS].ravel()
            blocks.append(block / np.sqrt(np.sum(block * block) + NORM_EPS**2))
    return FeatureVector(np.concatenate(blocks))
