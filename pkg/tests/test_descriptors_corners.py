"""Corner detection, binary descriptors, and the filtered match distance."""

from __future__ import annotations

import numpy as np
import pytest

from hmpf.descriptors import (
    DESCRIPTOR_BITS,
    GrayImage,
    Keypoint,
    MatchFilterParams,
    PATCH_RADIUS,
    describe_keypoints,
    detect_keypoints,
    extract_features,
    local_feature_distance,
    match_descriptors,
    match_distance_from_descriptors,
)
from hmpf.types import ValidationError

from conftest import textured_image


def _desc(*bit_counts: int) -> np.ndarray:
    """Descriptors with the given number of leading True bits each."""
    out = np.zeros((len(bit_counts), DESCRIPTOR_BITS), dtype=bool)
    for i, n in enumerate(bit_counts):
        out[i, :n] = True
    return out


class TestMatchFilterParams:
    def test_defaults(self):
        p = MatchFilterParams()
        assert (p.match_threshold, p.max_ratio, p.top_n) == (20.0, 0.7, 20)

    @pytest.mark.parametrize("kwargs", [
        {"match_threshold": 0.0},
        {"match_threshold": 150.0},
        {"max_ratio": 0.0},
        {"max_ratio": 1.5},
        {"top_n": 0},
    ])
    def test_out_of_range_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            MatchFilterParams(**kwargs)


class TestDetection:
    def test_blank_image_has_no_corners(self):
        assert detect_keypoints(GrayImage(np.full((80, 80), 0.5))) == []

    def test_bright_square_produces_corners(self):
        pixels = np.zeros((100, 100))
        pixels[40:60, 40:60] = 1.0
        keypoints = detect_keypoints(GrayImage(pixels))
        assert keypoints
        for kp in keypoints:
            assert 35 <= kp.x <= 64 and 35 <= kp.y <= 64

    def test_margin_excludes_border(self):
        keypoints = detect_keypoints(textured_image(2, size=100))
        assert keypoints
        for kp in keypoints:
            assert PATCH_RADIUS <= kp.x < 100 - PATCH_RADIUS
            assert PATCH_RADIUS <= kp.y < 100 - PATCH_RADIUS

    def test_cap_and_ordering(self):
        keypoints = detect_keypoints(textured_image(3, size=200), max_keypoints=10)
        assert len(keypoints) == 10
        responses = [kp.response for kp in keypoints]
        assert responses == sorted(responses, reverse=True)

    def test_deterministic(self):
        img = textured_image(4, size=150)
        assert detect_keypoints(img) == detect_keypoints(img)


class TestDescription:
    def test_shape_and_dtype(self):
        img = textured_image(5, size=100)
        keypoints = detect_keypoints(img)
        desc = describe_keypoints(img, keypoints)
        assert desc.shape == (len(keypoints), DESCRIPTOR_BITS)
        assert desc.dtype == bool

    def test_no_keypoints_gives_empty_block(self):
        desc = describe_keypoints(GrayImage(np.zeros((64, 64))), [])
        assert desc.shape == (0, DESCRIPTOR_BITS)

    def test_deterministic_bytes(self):
        img = textured_image(6, size=100)
        _, a = extract_features(img)
        _, b = extract_features(img)
        assert a.tobytes() == b.tobytes()

    def test_descriptor_reads_around_keypoint(self):
        # Two keypoints on differently-textured patches should differ.
        img = textured_image(7, size=120)
        kps = [Keypoint(x=30, y=30, response=1.0), Keypoint(x=90, y=90, response=1.0)]
        desc = describe_keypoints(img, kps)
        assert np.count_nonzero(desc[0] != desc[1]) > 0


class TestMatchFiltering:
    def test_empty_sides_match_nothing(self):
        p = MatchFilterParams()
        assert match_descriptors(_desc(), _desc(1), p) == []
        assert match_descriptors(_desc(1), _desc(), p) == []

    def test_unambiguous_close_match_survives(self):
        # d1 = 2 to ref 0, d2 = 38 to ref 1: ratio ~0.05, distance under cutoff.
        p = MatchFilterParams(match_threshold=20.0, max_ratio=0.7, top_n=5)
        out = match_descriptors(_desc(2), _desc(0, 40), p)
        assert out == [2.0]

    def test_exact_tie_is_rejected(self):
        # Query equidistant (d=5) from both references: ratio 1 > max_ratio.
        p = MatchFilterParams(max_ratio=0.99)
        assert match_descriptors(_desc(5), _desc(0, 10), p) == []

    def test_duplicate_perfect_matches_are_ambiguous(self):
        # Both references identical to the query: d1 = d2 = 0 counts as
        # ratio 1.0 and is rejected even though the distance is perfect.
        p = MatchFilterParams(max_ratio=0.9)
        assert match_descriptors(_desc(3), _desc(3, 3), p) == []

    def test_ratio_boundary_inclusive(self):
        # d1 = 35, d2 = 50: ratio 0.7 == max_ratio survives (strictly above rejects).
        p = MatchFilterParams(match_threshold=20.0, max_ratio=0.7)
        out = match_descriptors(_desc(35), _desc(0, 85), p)
        assert out == [35.0]

    def test_distance_cutoff(self):
        # Cutoff is 20% of 256 = 51.2 bits: 51 passes, 52 fails.
        p = MatchFilterParams(match_threshold=20.0, max_ratio=1.0)
        assert match_descriptors(_desc(51), _desc(0), p) == [51.0]
        assert match_descriptors(_desc(52), _desc(0), p) == []

    def test_single_reference_skips_ratio_test(self):
        p = MatchFilterParams(match_threshold=20.0, max_ratio=0.1)
        assert match_descriptors(_desc(10), _desc(0), p) == [10.0]


class TestMatchDistance:
    def test_no_survivors_pays_full_penalty(self):
        p = MatchFilterParams(top_n=20)
        d = match_distance_from_descriptors(_desc(), _desc(), p)
        assert d == 20 * DESCRIPTOR_BITS == 5120.0

    def test_sorted_truncation_keeps_best(self):
        # Three queries at distances 30, 10, 20 from their nearest refs.
        queries = _desc(30, 10, 20)
        refs = _desc(0, 150)
        p = MatchFilterParams(match_threshold=20.0, max_ratio=0.7, top_n=2)
        assert match_distance_from_descriptors(queries, refs, p) == 30.0  # 10 + 20

    def test_shortfall_padded_per_missing_match(self):
        queries = _desc(30, 10, 20)
        refs = _desc(0, 150)
        p = MatchFilterParams(match_threshold=20.0, max_ratio=0.7, top_n=5)
        assert match_distance_from_descriptors(queries, refs, p) == 60 + 2 * 256

    def test_identical_sets_have_zero_distance(self):
        rng = np.random.default_rng(0)
        desc = rng.random((30, DESCRIPTOR_BITS)) < 0.5
        p = MatchFilterParams(top_n=20)
        assert match_distance_from_descriptors(desc, desc, p) == 0.0


class TestImageLevelDistance:
    def test_self_distance_zero_and_discriminative(self):
        img = textured_image(0, size=120)
        other = textured_image(1, size=120)
        self_d = local_feature_distance(img, img)
        cross_d = local_feature_distance(img, other)
        assert self_d == 0.0
        assert cross_d > self_d

    def test_blank_pair_pays_full_penalty(self):
        blank = GrayImage(np.full((80, 80), 0.5))
        assert local_feature_distance(blank, blank) == 5120.0
