"""Hierarchical multi-method place matching.

Multiple image-scoring methods are arranged in tiers that pass shrinking
candidate pools; a weighted cross-tier combination picks the final matched
reference image.  See the README for the file formats, configuration
schema, and command-line usage.
"""

from .config import (
    ConfigError,
    MethodSpec,
    PipelineConfig,
    TierSpec,
    load_config,
    save_config,
)
from .dataset import Dataset, DatasetError, GroundTruthSpec, load_dataset
from .descriptors import (
    GrayImage,
    MatchFilterParams,
    compute_gist,
    compute_hog,
    load_image,
    local_feature_distance,
    resize,
    to_gray,
)
from .evaluation import (
    ExperimentReport,
    GroundTruthOracle,
    RecallCurve,
    characterize_methods,
    recall_at_n,
    run_experiment,
    write_curves_csv,
    write_report_csv,
)
from .io import (
    FeatureFileError,
    read_feature_file,
    read_score_matrix,
    write_feature_file,
    write_score_matrix,
)
from .matcher import GistTransform, HierarchicalMatcher, HogTransform
from .methods import BoundMethod, MethodError, bind_method, bind_pipeline, score_by_features
from .pipeline import combined_score, final_tier_decision, run_query, run_tier, top_k
from .scoring import (
    argmax_id,
    min_max_normalize,
    renormalize_01,
    standardize,
    tier_max_across_methods,
)
from .synthetic import SyntheticBenchmark, generate_synthetic_benchmark
from .types import (
    FeatureVector,
    MatchResult,
    TierRecord,
    ValidationError,
    make_candidate_set,
)

__version__ = "0.1.0"

__all__ = [
    "BoundMethod",
    "ConfigError",
    "Dataset",
    "DatasetError",
    "ExperimentReport",
    "FeatureFileError",
    "FeatureVector",
    "GistTransform",
    "GrayImage",
    "GroundTruthOracle",
    "GroundTruthSpec",
    "HierarchicalMatcher",
    "HogTransform",
    "MatchFilterParams",
    "MatchResult",
    "MethodError",
    "MethodSpec",
    "PipelineConfig",
    "RecallCurve",
    "SyntheticBenchmark",
    "TierRecord",
    "TierSpec",
    "ValidationError",
    "argmax_id",
    "bind_method",
    "bind_pipeline",
    "characterize_methods",
    "combined_score",
    "compute_gist",
    "compute_hog",
    "final_tier_decision",
    "generate_synthetic_benchmark",
    "load_config",
    "load_dataset",
    "load_image",
    "local_feature_distance",
    "make_candidate_set",
    "min_max_normalize",
    "read_feature_file",
    "read_score_matrix",
    "recall_at_n",
    "renormalize_01",
    "resize",
    "run_experiment",
    "run_query",
    "run_tier",
    "save_config",
    "score_by_features",
    "standardize",
    "tier_max_across_methods",
    "to_gray",
    "top_k",
    "write_curves_csv",
    "write_feature_file",
    "write_report_csv",
    "write_score_matrix",
]
