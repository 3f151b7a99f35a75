"""Feature-file and score-matrix round-trip and validation tests."""

import struct

import numpy as np
import pytest

from hmpf.io import (
    MAGIC,
    VERSION,
    FeatureFileError,
    read_feature_file,
    read_score_matrix,
    write_feature_file,
    write_score_matrix,
)


def _header(magic=MAGIC, version=VERSION, count=1, dim=1):
    return struct.pack("<4sIII", magic, version, count, dim)


class TestFeatureFileRoundTrip:
    def test_direct_decode(self, tmp_path):
        path = tmp_path / "f.hmpf"
        payload = np.array([1, 2, 3, 4, 5, 6], dtype=np.float32)
        path.write_bytes(_header(count=2, dim=3) + payload.tobytes())
        vectors = read_feature_file(path)
        np.testing.assert_array_equal(
            vectors, [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]
        )

    def test_bit_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(42)
        data = (rng.standard_normal((17, 33)) * 1e3).astype(np.float32)
        path = tmp_path / "rt.hmpf"
        write_feature_file(path, data)
        back = read_feature_file(path)
        assert back.dtype == np.float64
        np.testing.assert_array_equal(back.astype(np.float32), data)
        # and the float32 bits really are identical
        assert back.astype(np.float32).tobytes() == data.tobytes()

    def test_wide_vectors(self, tmp_path):
        path = tmp_path / "wide.hmpf"
        write_feature_file(path, np.zeros((2, 4096), dtype=np.float32))
        assert read_feature_file(path).shape == (2, 4096)

    def test_write_read_write_idempotent(self, tmp_path):
        rng = np.random.default_rng(0)
        data = rng.random((5, 8)).astype(np.float32)
        a, b = tmp_path / "a.hmpf", tmp_path / "b.hmpf"
        write_feature_file(a, data)
        write_feature_file(b, read_feature_file(a))
        assert a.read_bytes() == b.read_bytes()


class TestFeatureFileValidation:
    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.hmpf"
        path.write_bytes(_header(magic=b"NOPE") + b"\x00" * 4)
        with pytest.raises(FeatureFileError, match="magic"):
            read_feature_file(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "v9.hmpf"
        path.write_bytes(_header(version=9) + b"\x00" * 4)
        with pytest.raises(FeatureFileError, match="version"):
            read_feature_file(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.hmpf"
        path.write_bytes(_header(count=2, dim=3) + b"\x00" * 8)
        with pytest.raises(FeatureFileError, match="truncated"):
            read_feature_file(path)

    def test_trailing_bytes(self, tmp_path):
        path = tmp_path / "long.hmpf"
        path.write_bytes(_header(count=1, dim=1) + b"\x00" * 8)
        with pytest.raises(FeatureFileError, match="trailing"):
            read_feature_file(path)

    def test_zero_count(self, tmp_path):
        path = tmp_path / "zero.hmpf"
        path.write_bytes(_header(count=0, dim=3))
        with pytest.raises(FeatureFileError, match="zero"):
            read_feature_file(path)

    def test_header_shorter_than_fixed_size(self, tmp_path):
        path = tmp_path / "tiny.hmpf"
        path.write_bytes(b"HM")
        with pytest.raises(FeatureFileError, match="header"):
            read_feature_file(path)

    def test_non_finite_payload(self, tmp_path):
        path = tmp_path / "nan.hmpf"
        payload = np.array([np.nan], dtype=np.float32)
        path.write_bytes(_header(count=1, dim=1) + payload.tobytes())
        with pytest.raises(FeatureFileError, match="finite"):
            read_feature_file(path)

    def test_write_rejects_non_finite(self, tmp_path):
        with pytest.raises(FeatureFileError):
            write_feature_file(tmp_path / "x.hmpf", np.array([[np.inf]]))

    def test_write_rejects_wrong_shape(self, tmp_path):
        with pytest.raises(FeatureFileError):
            write_feature_file(tmp_path / "x.hmpf", np.zeros(3))


class TestScoreMatrix:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(42)
        matrix = rng.random((6, 9)) * 10
        path = tmp_path / "scores.csv"
        write_score_matrix(path, matrix)
        np.testing.assert_allclose(read_score_matrix(path), matrix, rtol=0, atol=0)

    def test_single_row(self, tmp_path):
        path = tmp_path / "one.csv"
        write_score_matrix(path, np.array([[1.0, 2.0, 3.0]]))
        assert read_score_matrix(path).shape == (1, 3)

    def test_rejects_negative(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text("1.0,-2.0\n")
        with pytest.raises(ValueError, match="negative"):
            read_score_matrix(path)

    def test_rejects_malformed(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("1.0,banana\n")
        with pytest.raises(ValueError):
            read_score_matrix(path)
