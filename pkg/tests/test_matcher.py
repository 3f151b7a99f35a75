"""Estimator-protocol wrappers: params, fit/predict/score, transformers."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from hmpf import GistTransform, HierarchicalMatcher, HogTransform
from hmpf.config import load_config
from hmpf.dataset import load_dataset

from conftest import textured_image


class TestEstimatorProtocol:
    def test_get_params_round_trip(self):
        matcher = HierarchicalMatcher(config_path="x.toml", use_combined=False)
        params = matcher.get_params()
        assert params == {
            "config": None,
            "config_path": "x.toml",
            "base_dir": None,
            "use_combined": False,
        }
        rebuilt = HierarchicalMatcher(**params)
        assert rebuilt.get_params() == params

    def test_clone_preserves_params(self, benchmark):
        matcher = HierarchicalMatcher(config_path=str(benchmark.config_path))
        cloned = clone(matcher)
        assert cloned.get_params() == matcher.get_params()

    def test_set_params(self):
        matcher = HierarchicalMatcher()
        matcher.set_params(config_path="y.toml", use_combined=False)
        assert matcher.config_path == "y.toml"
        assert matcher.use_combined is False

    def test_unfitted_predict_raises(self):
        with pytest.raises(NotFittedError):
            HierarchicalMatcher(config_path="x.toml").predict([0])

    def test_config_and_path_are_mutually_exclusive(self, benchmark):
        dataset = load_dataset(benchmark.manifest_path)
        config = load_config(benchmark.config_path)
        both = HierarchicalMatcher(
            config=config, config_path=str(benchmark.config_path)
        )
        with pytest.raises(ValueError, match="exactly one"):
            both.fit(dataset)
        neither = HierarchicalMatcher()
        with pytest.raises(ValueError, match="exactly one"):
            neither.fit(dataset)


class TestFitPredictScore:
    @pytest.fixture(scope="class")
    @staticmethod
    def fitted(benchmark):
        dataset = load_dataset(benchmark.manifest_path)
        matcher = HierarchicalMatcher(config_path=str(benchmark.config_path))
        return matcher.fit(dataset)

    def test_predict_all_queries(self, fitted):
        predictions = fitted.predict()
        assert predictions.shape == (50,)
        assert predictions.dtype == np.int64
        # Canonical benchmark: the hierarchy resolves every query correctly,
        # and ids are exactly index-aligned.
        assert np.array_equal(predictions, np.arange(50))

    def test_predict_subset(self, fitted):
        assert np.array_equal(fitted.predict([3, 17, 3]), np.array([3, 17, 3]))

    def test_score_is_perfect_on_canonical_benchmark(self, fitted):
        assert fitted.score() == 1.0

    def test_match_exposes_tier_detail(self, fitted):
        result = fitted.match(0)
        assert result.query == 0
        assert len(result.tier_records) == 3
        assert result.combined_best == 0

    def test_final_only_prediction(self, benchmark):
        dataset = load_dataset(benchmark.manifest_path)
        matcher = HierarchicalMatcher(
            config_path=str(benchmark.config_path), use_combined=False
        ).fit(dataset)
        assert matcher.score() == 1.0

    def test_in_memory_config_with_base_dir(self, benchmark):
        dataset = load_dataset(benchmark.manifest_path)
        config = load_config(benchmark.config_path)
        matcher = HierarchicalMatcher(
            config=config, base_dir=str(benchmark.out_dir)
        ).fit(dataset)
        assert matcher.score() == 1.0


class TestTransformers:
    def test_hog_transform_shapes(self):
        images = [textured_image(s, size=90) for s in range(3)]
        out = HogTransform(cell_px=30, resize=90).transform(images)
        assert out.shape == (3, 144)
        full = HogTransform().transform(images[:1])
        assert full.shape == (1, 2916)

    def test_gist_transform_shapes(self):
        images = [textured_image(s, size=64) for s in range(2)]
        out = GistTransform().transform(images)
        assert out.shape == (2, 512)

    def test_accepts_arrays_and_paths(self, image_corpus):
        dataset = load_dataset(image_corpus)
        paths = [dataset.reference_path(i) for i in range(2)]
        arrays = [np.zeros((90, 90)), np.full((90, 90), 0.5)]
        assert HogTransform(resize=90).transform(paths).shape == (2, 144)
        assert HogTransform(resize=90).transform(arrays).shape == (2, 144)

    def test_fit_returns_self_for_pipelines(self):
        images = [textured_image(s, size=64) for s in range(2)]
        pipe = Pipeline([("features", GistTransform())])
        out = pipe.fit_transform(images)
        assert out.shape == (2, 512)

    def test_transform_is_deterministic(self):
        images = [textured_image(0, size=90)]
        a = HogTransform(resize=90).transform(images)
        b = HogTransform(resize=90).transform(images)
        assert a.tobytes() == b.tobytes()
