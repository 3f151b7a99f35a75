"""Readers and writers for the engine's on-disk exchange formats.

HMPF1 feature file layout (little-endian throughout):

    bytes 0-3   magic ``HMPF``
    bytes 4-7   format version, u32 (currently 1)
    bytes 8-11  vector count, u32
    bytes 12-15 vector dimension, u32
    then        count * dim IEEE-754 float32 values, row-major

Payloads are bit-exact: write-then-read returns the identical float32 bits,
widened to float64 only when handed to callers.

The precomputed score matrix is plain CSV: one row per query, one column per
reference, raw difference scores (lower = more similar).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"HMPF"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


class FeatureFileError(ValueError):
    """The file is not a well-formed HMPF1 feature file."""


def write_feature_file(path: str | Path, vectors: np.ndarray) -> None:
    """Write a (count, dim) array as an HMPF1 file.

    Values are stored as float32; inputs are cast, so callers that need
    bit-exact round-trips should pass float32 data.
    """
    arr = np.asarray(vectors)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise FeatureFileError(
            f"expected a non-empty 2-D array of vectors, got shape {arr.shape}"
        )
    arr = np.ascontiguousarray(arr, dtype="<f4")
    if not np.all(np.isfinite(arr)):
        raise FeatureFileError("refusing to write non-finite feature values")
    count, dim = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, count, dim))
        fh.write(arr.tobytes())


def read_feature_file(path: str | Path) -> np.ndarray:
    """Read an HMPF1 file into a float64 (count, dim) array.

    The stored float32 values are widened exactly; all downstream arithmetic
    runs at 64-bit.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FeatureFileError(f"{path}: file shorter than the fixed header")
    magic, version, count, dim = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    if count == 0 or dim == 0:
        raise FeatureFileError(f"{path}: zero count or dimension in header")
    expected = count * dim * 4
    payload = data[_HEADER.size:]
    if len(payload) < expected:
        raise FeatureFileError(
            f"{path}: truncated payload, have {len(payload)} bytes, "
            f"need {expected} for {count}x{dim} float32"
        )
    if len(payload) > expected:
        raise FeatureFileError(
            f"{path}: {len(payload) - expected} trailing bytes after payload"
        )
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    if not np.all(np.isfinite(vectors)):
        raise FeatureFileError(f"{path}: payload contains non-finite values")
    return vectors.astype(np.float64)


def write_score_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Write a (queries, references) raw-distance matrix as CSV."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"score matrix must be 2-D, got shape {arr.shape}")
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")


def read_score_matrix(path: str | Path) -> np.ndarray:
    """Read a CSV raw-distance matrix; validates shape and finiteness."""
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed score CSV: {exc}") from exc
    if arr.size == 0:
        raise ValueError(f"{path}: empty score matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: score matrix contains non-finite values")
    if np.any(arr < 0):
        raise ValueError(f"{path}: score matrix contains negative distances")
    return arr
