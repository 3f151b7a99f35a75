"""Whole-scene descriptor from a frequency-domain Gabor filter bank.

The image is resized to 256x256 and filtered with 32 zero-mean bandpass
filters (4 scales x 8 orientations) built directly in the frequency domain:
a log-Gabor radial profile (which has no DC response by construction) times
a Gaussian orientation profile folded modulo 180 degrees.  Filter magnitude
responses are mean-pooled over a 4x4 spatial grid, giving 4 * 8 * 16 = 512
non-negative values.

The transfer functions are even-symmetric and zeroed on the Nyquist row and
column, which makes the bank exactly covariant under 90-degree image
rotations: rotating the input permutes orientation channels (o -> o+4 mod 8)
and pool cells, nothing else.
"""

from __future__ import annotations

import numpy as np

from ..types import FeatureVector, ValidationError
from .image import GrayImage, resize

GIST_SIZE = 256
N_SCALES = 4
N_ORIENTATIONS = 8
GRID = 4
GIST_DIM = N_SCALES * N_ORIENTATIONS * GRID * GRID

MAX_FREQUENCY = 0.25          # cycles/pixel, highest-scale center frequency
RADIAL_SIGMA_RATIO = 0.65     # log-Gabor bandwidth parameter
ANGULAR_SIGMA = np.pi / 10.0

_BANK_CACHE: dict[int, np.ndarray] = {}


def _filter_bank(size: int) -> np.ndarray:
    """(scales, orientations, size, size) transfer functions on the FFT grid."""
    if size in _BANK_CACHE:
        return _BANK_CACHE[size]
    freq = np.fft.fftfreq(size)
    fx = freq[None, :]
    fy = freq[:, None]
    radius = np.hypot(fx, fy)
    theta = np.arctan2(fy, fx)

    with np.errstate(divide="ignore"):
        log_radius = np.log(np.where(radius > 0, radius, 1.0))

    nyquist = size // 2
    bank = np.empty((N_SCALES, N_ORIENTATIONS, size, size))
    log_sigma = abs(np.log(RADIAL_SIGMA_RATIO))
    for s in range(N_SCALES):
        f0 = MAX_FREQUENCY / (2.0**s)
        radial = np.exp(-((log_radius - np.log(f0)) ** 2) / (2.0 * log_sigma**2))
        radial[0, 0] = 0.0          # no DC response: zero-mean filter
        radial[nyquist, :] = 0.0    # drop Nyquist bins (asymmetric on even grids)
        radial[:, nyquist] = 0.0
        for o in range(N_ORIENTATIONS):
            center = o * np.pi / N_ORIENTATIONS
            delta = np.mod(theta - center + np.pi / 2.0, np.pi) - np.pi / 2.0
            angular = np.exp(-(delta**2) / (2.0 * ANGULAR_SIGMA**2))
            bank[s, o] = radial * angular
    _BANK_CACHE[size] = bank
    return bank


def _pool_grid(response: np.ndarray) -> np.ndarray:
    """Mean of |response| over a GRID x GRID spatial grid."""
    size = response.shape[0]
    cell = size // GRID
    mags = np.abs(response)
    return mags[: GRID * cell, : GRID * cell].reshape(
        GRID, cell, GRID, cell
    ).mean(axis=(1, 3))


def compute_gist(image: GrayImage) -> FeatureVector:
    """Compute the 512-dimensional scene descriptor of a grayscale image.

    Feature order is (scale, orientation, grid row, grid column), row-major.
    A constant image yields a numerically zero vector.
    """
    if image.height < 16 or image.width < 16:
        raise ValidationError(
            f"image {image.height}x{image.width} too small; need at least 16x16"
        )
    working = resize(image, GIST_SIZE, GIST_SIZE)
    spectrum = np.fft.fft2(working.pixels)
    bank = _filter_bank(GIST_SIZE)

    features = np.empty((N_SCALES, N_ORIENTATIONS, GRID, GRID))
    for s in range(N_SCALES):
        for o in range(N_ORIENTATIONS):
            # Real even-symmetric transfer function: the response is real.
            response = np.real(np.fft.ifft2(spectrum * bank[s, o]))
            features[s, o] = _pool_grid(response)
    return FeatureVector(features.ravel())
