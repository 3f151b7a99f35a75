"""Binding scoring methods to a dataset.

A bound method can produce raw difference scores (lower = more similar) for
any (query, candidate set) pair against the dataset it was bound to.  All
expensive work (descriptor computation, feature-file loading) happens once at
bind time; bound methods are immutable afterwards and safe to share across
worker threads.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from .config import MethodSpec, PipelineConfig
from .dataset import Dataset
from .descriptors import (
    MatchFilterParams,
    compute_gist,
    compute_hog,
    extract_features,
    load_image,
    match_distance_from_descriptors,
    resize,
)
from .io import FeatureFileError, read_feature_file, read_score_matrix
from .types import CandidateSet, RawDistances


class MethodError(RuntimeError):
    """A method failed to bind or score; the message names the method."""


def score_by_features(
    query_vec: np.ndarray,
    ref_vecs: np.ndarray,
    candidates: CandidateSet,
    metric: str = "euclidean",
) -> RawDistances:
    """Raw distances from one query vector to the candidate reference rows.

    ``euclidean`` is the L2 norm of the difference; ``cosine-distance`` is
    1 − cosine similarity, clamped to [0, 2].  The cosine metric rejects
    zero vectors, whose direction is undefined.
    """
    query_vec = np.asarray(query_vec, dtype=np.float64)
    ref_vecs = np.asarray(ref_vecs, dtype=np.float64)
    if query_vec.ndim != 1 or ref_vecs.ndim != 2:
        raise ValueError("expected a 1-D query vector and a 2-D reference matrix")
    if ref_vecs.shape[1] != query_vec.shape[0]:
        raise ValueError(
            f"dimension mismatch: query has {query_vec.shape[0]}, "
            f"references have {ref_vecs.shape[1]}"
        )
    ids = list(candidates)
    subset = ref_vecs[ids]
    if metric == "euclidean":
        values = np.linalg.norm(subset - query_vec, axis=1)
    elif metric == "cosine-distance":
        query_norm = np.linalg.norm(query_vec)
        ref_norms = np.linalg.norm(subset, axis=1)
        if query_norm == 0.0 or np.any(ref_norms == 0.0):
            raise ValueError("cosine-distance is undefined for zero vectors")
        cosine = (subset @ query_vec) / (ref_norms * query_norm)
        values = np.clip(1.0 - cosine, 0.0, 2.0)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return {ref_id: float(v) for ref_id, v in zip(ids, values)}


class BoundMethod(ABC):
    """A method spec attached to one dataset, ready to score queries."""

    def __init__(self, spec: MethodSpec) -> None:
        self.spec = spec

    @property
    def label(self) -> str:
        return self.spec.label

    @abstractmethod
    def raw_distances(self, query_index: int, candidates: CandidateSet) -> RawDistances:
        """Raw difference scores (lower = better) for the given candidates."""


class FeatureMethod(BoundMethod):
    """Scores via vector distance between per-image feature rows."""

    def __init__(
        self,
        spec: MethodSpec,
        query_matrix: np.ndarray,
        ref_matrix: np.ndarray,
        metric: str,
    ) -> None:
        super().__init__(spec)
        if query_matrix.shape[1] != ref_matrix.shape[1]:
            raise MethodError(
                f"method {spec.label}: query dim {query_matrix.shape[1]} != "
                f"reference dim {ref_matrix.shape[1]}"
            )
        self.query_matrix = query_matrix
        self.ref_matrix = ref_matrix
        self.metric = metric

    def raw_distances(self, query_index: int, candidates: CandidateSet) -> RawDistances:
        try:
            return score_by_features(
                self.query_matrix[query_index], self.ref_matrix, candidates, self.metric
            )
        except ValueError as exc:
            raise MethodError(f"method {self.label}: {exc}") from exc


class LocalFeatureMethod(BoundMethod):
    """Scores via corner matching between precomputed descriptor sets."""

    def __init__(
        self,
        spec: MethodSpec,
        query_descriptors: list[np.ndarray],
        ref_descriptors: list[np.ndarray],
        params: MatchFilterParams,
    ) -> None:
        super().__init__(spec)
        self.query_descriptors = query_descriptors
        self.ref_descriptors = ref_descriptors
        self.params = params

    def raw_distances(self, query_index: int, candidates: CandidateSet) -> RawDistances:
        query_desc = self.query_descriptors[query_index]
        return {
            ref_id: match_distance_from_descriptors(
                query_desc, self.ref_descriptors[ref_id], self.params
            )
            for ref_id in candidates
        }


class PrecomputedScoreMethod(BoundMethod):
    """Scores read directly from a query-by-reference distance matrix."""

    def __init__(self, spec: MethodSpec, matrix: np.ndarray) -> None:
        super().__init__(spec)
        self.matrix = matrix

    def raw_distances(self, query_index: int, candidates: CandidateSet) -> RawDistances:
        row = self.matrix[query_index]
        return {ref_id: float(row[ref_id]) for ref_id in candidates}


def _require_images(dataset: Dataset, spec: MethodSpec) -> tuple[list[Path], list[Path]]:
    refs = list(dataset.reference_images)
    queries = list(dataset.query_images)
    if any(p is None for p in refs) or any(p is None for p in queries):
        raise MethodError(
            f"method {spec.label} needs image files, but the dataset manifest "
            f"declares counts only"
        )
    return refs, queries


def _resolve(base_dir: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base_dir / path


def _check_count(label: str, what: str, got: int, expected: int) -> None:
    if got != expected:
        raise MethodError(
            f"method {label}: {what} has {got} rows but the dataset "
            f"has {expected} images"
        )


def bind_method(spec: MethodSpec, dataset: Dataset, base_dir: Path | str = ".") -> BoundMethod:
    """Attach one method spec to a dataset, loading or computing its state.

    Relative file paths in the method's options resolve against
    ``base_dir`` (the configuration file's directory, for methods that
    came from a file).
    """
    base_dir = Path(base_dir)
    params = spec.params
    if spec.kind in ("hog", "gist"):
        ref_paths, query_paths = _require_images(dataset, spec)
        if spec.kind == "hog":
            side = int(params.get("resize", 300))
            cell = int(params.get("cell_px", 30))

            def describe(path: Path) -> np.ndarray:
                return compute_hog(resize(load_image(path), side, side), cell).values
        else:

            def describe(path: Path) -> np.ndarray:
                return compute_gist(load_image(path)).values

        try:
            ref_matrix = np.stack([describe(p) for p in ref_paths])
            query_matrix = np.stack([describe(p) for p in query_paths])
        except (OSError, ValueError) as exc:
            raise MethodError(f"method {spec.label}: {exc}") from exc
        return FeatureMethod(
            spec, query_matrix, ref_matrix, params.get("metric", "euclidean")
        )

    if spec.kind == "local-features":
        ref_paths, query_paths = _require_images(dataset, spec)
        filter_params = MatchFilterParams(
            match_threshold=float(params.get("match_threshold", 20.0)),
            max_ratio=float(params.get("max_ratio", 0.7)),
            top_n=int(params.get("top_n", 20)),
        )
        max_keypoints = int(params.get("max_keypoints", 200))

        def descriptors_of(path: Path) -> np.ndarray:
            return extract_features(load_image(path), max_keypoints)[1]

        try:
            ref_desc = [descriptors_of(p) for p in ref_paths]
            query_desc = [descriptors_of(p) for p in query_paths]
        except (OSError, ValueError) as exc:
            raise MethodError(f"method {spec.label}: {exc}") from exc
        return LocalFeatureMethod(spec, query_desc, ref_desc, filter_params)

    if spec.kind == "precomputed-features":
        try:
            ref_matrix = read_feature_file(_resolve(base_dir, params["reference_path"]))
            query_matrix = read_feature_file(_resolve(base_dir, params["query_path"]))
        except (OSError, FeatureFileError) as exc:
            raise MethodError(f"method {spec.label}: {exc}") from exc
        _check_count(spec.label, "reference feature file",
                     ref_matrix.shape[0], dataset.n_references)
        _check_count(spec.label, "query feature file",
                     query_matrix.shape[0], dataset.n_queries)
        return FeatureMethod(
            spec, query_matrix, ref_matrix, params.get("metric", "euclidean")
        )

    if spec.kind == "precomputed-scores":
        try:
            matrix = read_score_matrix(_resolve(base_dir, params["path"]))
        except (OSError, ValueError) as exc:
            raise MethodError(f"method {spec.label}: {exc}") from exc
        _check_count(spec.label, "score matrix", matrix.shape[0], dataset.n_queries)
        if matrix.shape[1] != dataset.n_references:
            raise MethodError(
                f"method {spec.label}: score matrix has {matrix.shape[1]} columns "
                f"but the dataset has {dataset.n_references} references"
            )
        return PrecomputedScoreMethod(spec, matrix)

    raise MethodError(f"unknown method kind {spec.kind!r}")


def bind_pipeline(
    config: PipelineConfig, dataset: Dataset, base_dir: Path | str = "."
) -> tuple[tuple[BoundMethod, ...], ...]:
    """Bind every tier's methods; returns one tuple of methods per tier."""
    return tuple(
        tuple(bind_method(spec, dataset, base_dir) for spec in tier.methods)
        for tier in config.tiers
    )
