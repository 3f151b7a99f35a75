"""Whole-image descriptors and local-feature matching."""

from .corners import (
    DESCRIPTOR_BITS,
    PATCH_RADIUS,
    Keypoint,
    MatchFilterParams,
    describe_keypoints,
    detect_keypoints,
    extract_features,
    local_feature_distance,
    match_descriptors,
    match_distance_from_descriptors,
)
from .gist import GIST_DIM, compute_gist
from .hog import compute_hog, hog_dim
from .image import GrayImage, load_image, resize, to_gray

__all__ = [
    "DESCRIPTOR_BITS",
    "GIST_DIM",
    "GrayImage",
    "Keypoint",
    "MatchFilterParams",
    "PATCH_RADIUS",
    "compute_gist",
    "compute_hog",
    "describe_keypoints",
    "detect_keypoints",
    "extract_features",
    "hog_dim",
    "load_image",
    "local_feature_distance",
    "match_descriptors",
    "match_distance_from_descriptors",
    "resize",
    "to_gray",
]
