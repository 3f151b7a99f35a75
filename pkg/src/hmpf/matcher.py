"""scikit-learn style wrappers around the fusion engine.

HierarchicalMatcher follows the estimator protocol: construction stores
hyperparameters untouched, ``fit`` binds the configured methods to a
dataset, ``predict`` returns matched reference ids.  The descriptor
transformers turn image collections into feature matrices and can sit in
ordinary sklearn pipelines.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .config import PipelineConfig, load_config
from .dataset import Dataset
from .descriptors import GrayImage, compute_gist, compute_hog, load_image, resize, to_gray
from .evaluation import GroundTruthOracle
from .methods import bind_pipeline
from .pipeline import run_query
from .types import MatchResult


class HierarchicalMatcher(BaseEstimator):
    """Tiered multi-method place matcher with the estimator interface.

    Parameters
    ----------
    config : PipelineConfig or None
        In-memory pipeline configuration.  Exactly one of ``config`` and
        ``config_path`` must be set by fit time.
    config_path : str or None
        Path to a TOML pipeline configuration.
    base_dir : str
        Directory against which relative file paths in the config resolve.
        Defaults to the config file's directory when ``config_path`` is set.
    use_combined : bool
        Predict with the weighted cross-tier score when the config enables
        it; otherwise predictions use the final tier's decision.
    """

    def __init__(
        self,
        config: PipelineConfig | None = None,
        config_path: str | None = None,
        base_dir: str | None = None,
        use_combined: bool = True,
    ):
        self.config = config
        self.config_path = config_path
        self.base_dir = base_dir
        self.use_combined = use_combined

    def _resolved_config(self) -> tuple[PipelineConfig, Path]:
        if (self.config is None) == (self.config_path is None):
            raise ValueError("set exactly one of config and config_path")
        if self.config is not None:
            return self.config, Path(self.base_dir or ".")
        config = load_config(self.config_path)
        default_base = Path(self.config_path).parent
        return config, Path(self.base_dir) if self.base_dir else default_base

    def fit(self, dataset: Dataset, y=None):
        """Bind every configured method to the dataset."""
        config, base_dir = self._resolved_config()
        self.config_ = config
        self.bound_tiers_ = bind_pipeline(config, dataset, base_dir)
        self.n_references_ = dataset.n_references
        self.n_queries_ = dataset.n_queries
        self.oracle_ = GroundTruthOracle.from_dataset(dataset)
        return self

    def match(self, query: int) -> MatchResult:
        """Full per-tier detail for one query."""
        check_is_fitted(self, "bound_tiers_")
        return run_query(self.config_, self.bound_tiers_, query, self.n_references_)

    def predict(self, queries: Iterable[int] | None = None) -> np.ndarray:
        """Matched reference id per query (all fitted queries by default)."""
        check_is_fitted(self, "bound_tiers_")
        if queries is None:
            queries = range(self.n_queries_)
        out = []
        for query in queries:
            result = self.match(int(query))
            if self.use_combined and result.combined_best is not None:
                out.append(result.combined_best)
            else:
                out.append(result.final_tier_best)
        return np.asarray(out, dtype=np.int64)

    def score(self, queries: Iterable[int] | None = None, y=None) -> float:
        """Fraction of predictions within the ground-truth tolerance."""
        check_is_fitted(self, "bound_tiers_")
        queries = list(queries) if queries is not None else list(range(self.n_queries_))
        predictions = self.predict(queries)
        correct = sum(
            self.oracle_.is_correct(query, int(match))
            for query, match in zip(queries, predictions)
        )
        return correct / len(queries)


def _as_gray(item) -> GrayImage:
    if isinstance(item, GrayImage):
        return item
    if isinstance(item, (str, Path)):
        return load_image(item)
    return to_gray(np.asarray(item))


class HogTransform(TransformerMixin, BaseEstimator):
    """Oriented-gradient descriptors for a collection of images.

    Accepts file paths, numpy arrays, or GrayImages; emits one row per
    image.  Images are resized to ``resize`` x ``resize`` first.
    """

    def __init__(self, cell_px: int = 30, resize: int = 300):
        self.cell_px = cell_px
        self.resize = resize

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence) -> np.ndarray:
        rows = [
            compute_hog(
                resize(_as_gray(item), self.resize, self.resize), self.cell_px
            ).values
            for item in X
        ]
        return np.stack(rows)


class GistTransform(TransformerMixin, BaseEstimator):
    """Spectral-energy scene descriptors for a collection of images."""

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence) -> np.ndarray:
        return np.stack([compute_gist(_as_gray(item)).values for item in X])
