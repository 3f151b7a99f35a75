"""Local-feature image comparison: corner detection, binary descriptors,
ratio-filtered matching, and the summed-residual distance.

The distance between two images is the sum of descriptor distances of the
``top_n`` strongest surviving matches (smallest distances).  Matches are
dropped when they fail the nearest/second-nearest ratio test or exceed a
percentage of the maximum possible descriptor distance.  Every missing match
below ``top_n`` contributes the maximum descriptor distance, so images with
few or no matchable features can never outscore well-matched ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..types import ValidationError
from .image import GrayImage

DESCRIPTOR_BITS = 256
PATCH_RADIUS = 15
HARRIS_K = 0.04
RESPONSE_FLOOR = 1e-12
_PATTERN_SEED = 61520


@dataclass(frozen=True)
class Keypoint:
    """A detected corner: column x, row y, detector response."""

    x: int
    y: int
    response: float


@dataclass(frozen=True)
class MatchFilterParams:
    """Filtering applied to candidate descriptor matches.

    match_threshold is a percentage of the maximum possible descriptor
    distance; any nearest-neighbor match farther than that is rejected.
    max_ratio is the Lowe nearest/second-nearest cutoff; a ratio *above* it
    rejects the match, so 1.0 disables the test except for exact ties.
    """

    match_threshold: float = 20.0
    max_ratio: float = 0.7
    top_n: int = 20

    def __post_init__(self) -> None:
        if not 0 < self.match_threshold <= 100:
            raise ValidationError(
                f"match_threshold must be in (0, 100], got {self.match_threshold}"
            )
        if not 0 < self.max_ratio <= 1:
            raise ValidationError(f"max_ratio must be in (0, 1], got {self.max_ratio}")
        if self.top_n < 1:
            raise ValidationError(f"top_n must be >= 1, got {self.top_n}")


def _sampling_pattern() -> tuple[np.ndarray, np.ndarray]:
    """Fixed random pixel-pair offsets inside the descriptor patch."""
    rng = np.random.default_rng(_PATTERN_SEED)
    a = rng.integers(-PATCH_RADIUS, PATCH_RADIUS + 1, size=(DESCRIPTOR_BITS, 2))
    b = rng.integers(-PATCH_RADIUS, PATCH_RADIUS + 1, size=(DESCRIPTOR_BITS, 2))
    return a, b


_PATTERN_A, _PATTERN_B = _sampling_pattern()


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = max(1, int(3.0 * sigma + 0.5))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def _blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with reflected borders."""
    kernel = _gaussian_kernel(sigma)
    pad = kernel.size // 2
    padded = np.pad(pixels, ((0, 0), (pad, pad)), mode="reflect")
    rows = np.empty_like(pixels)
    for i in range(pixels.shape[0]):
        rows[i] = np.convolve(padded[i], kernel, mode="valid")
    padded = np.pad(rows, ((pad, pad), (0, 0)), mode="reflect")
    out = np.empty_like(rows)
    for j in range(pixels.shape[1]):
        out[:, j] = np.convolve(padded[:, j], kernel, mode="valid")
    return out


def detect_keypoints(image: GrayImage, max_keypoints: int = 200) -> list[Keypoint]:
    """Harris corners with 3x3 non-maximum suppression.

    Keypoints too close to the border for a descriptor patch are discarded.
    Returns at most ``max_keypoints`` corners, strongest first; order is
    deterministic (ties resolve by row, then column).
    """
    pixels = _blur(image.pixels, 1.0)
    padded = np.pad(pixels, 1, mode="edge")
    gx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    gy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    ixx = _blur(gx * gx, 1.5)
    iyy = _blur(gy * gy, 1.5)
    ixy = _blur(gx * gy, 1.5)
    response = (ixx * iyy - ixy * ixy) - HARRIS_K * (ixx + iyy) ** 2

    peak = response.max() if response.size else 0.0
    if peak <= RESPONSE_FLOOR:
        return []

    # 3x3 non-maximum suppression via shifted comparisons.
    padded_r = np.pad(response, 1, mode="constant", constant_values=-np.inf)
    is_max = np.ones_like(response, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            neighbor = padded_r[1 + dy:1 + dy + response.shape[0],
                                1 + dx:1 + dx + response.shape[1]]
            is_max &= response >= neighbor

    margin = PATCH_RADIUS
    mask = is_max & (response > 0.01 * peak)
    mask[:margin, :] = False
    mask[-margin:, :] = False
    mask[:, :margin] = False
    mask[:, -margin:] = False

    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return []
    order = np.argsort(-response[ys, xs], kind="stable")[:max_keypoints]
    return [
        Keypoint(x=int(xs[i]), y=int(ys[i]), response=float(response[ys[i], xs[i]]))
        for i in order
    ]


def describe_keypoints(image: GrayImage, keypoints: list[Keypoint]) -> np.ndarray:
    """Binary descriptors: brightness comparisons on a fixed pair pattern.

    Returns a (len(keypoints), DESCRIPTOR_BITS) boolean array computed on a
    smoothed copy of the image.
    """
    if not keypoints:
        return np.zeros((0, DESCRIPTOR_BITS), dtype=bool)
    smooth = _blur(image.pixels, 2.0)
    descriptors = np.empty((len(keypoints), DESCRIPTOR_BITS), dtype=bool)
    for i, kp in enumerate(keypoints):
        ya = kp.y + _PATTERN_A[:, 0]
        xa = kp.x + _PATTERN_A[:, 1]
        yb = kp.y + _PATTERN_B[:, 0]
        xb = kp.x + _PATTERN_B[:, 1]
        descriptors[i] = smooth[ya, xa] < smooth[yb, xb]
    return descriptors


def extract_features(
    image: GrayImage, max_keypoints: int = 200
) -> tuple[list[Keypoint], np.ndarray]:
    """Detect corners and describe them in one call."""
    keypoints = detect_keypoints(image, max_keypoints)
    return keypoints, describe_keypoints(image, keypoints)


def match_descriptors(
    query_desc: np.ndarray,
    ref_desc: np.ndarray,
    params: MatchFilterParams,
) -> list[float]:
    """Distances of the surviving nearest-neighbor matches, query side.

    Each query descriptor is matched to its nearest reference descriptor.
    The match survives when (a) the nearest/second-nearest distance ratio is
    at most ``max_ratio`` (an exact tie counts as ratio 1.0, so ambiguous
    matches are rejected for any max_ratio < 1) and (b) the distance is at
    most ``match_threshold`` percent of the maximum possible distance.  With
    a single reference descriptor the ratio test is vacuous.
    """
    if query_desc.shape[0] == 0 or ref_desc.shape[0] == 0:
        return []
    distances = np.count_nonzero(
        query_desc[:, None, :] != ref_desc[None, :, :], axis=2
    )
    cutoff = params.match_threshold / 100.0 * DESCRIPTOR_BITS
    surviving: list[float] = []
    for row in distances:
        if row.size >= 2:
            two = np.partition(row, 1)[:2]
            d1, d2 = float(two[0]), float(two[1])
            ratio = 1.0 if d2 == 0.0 else d1 / d2
            if ratio > params.max_ratio:
                continue
        else:
            d1 = float(row[0])
        if d1 > cutoff:
            continue
        surviving.append(d1)
    return surviving


def local_feature_distance(
    query: GrayImage,
    ref: GrayImage,
    params: MatchFilterParams = MatchFilterParams(),
    max_keypoints: int = 200,
) -> float:
    """Summed residual distance of the strongest surviving matches.

    If fewer than ``top_n`` matches survive (including the zero-keypoint
    case), each missing match contributes the maximum descriptor distance.
    """
    _, query_desc = extract_features(query, max_keypoints)
    _, ref_desc = extract_features(ref, max_keypoints)
    return match_distance_from_descriptors(query_desc, ref_desc, params)


def match_distance_from_descriptors(
    query_desc: np.ndarray,
    ref_desc: np.ndarray,
    params: MatchFilterParams,
) -> float:
    """Distance from precomputed descriptor sets (shared by the cached path)."""
    surviving = sorted(match_descriptors(query_desc, ref_desc, params))
    kept = surviving[: params.top_n]
    missing = params.top_n - len(kept)
    return float(sum(kept) + missing * DESCRIPTOR_BITS)
