"""Ground-truth matching, Recall@N, and experiment protocols.

A match is correct when the matched reference lies within the dataset's
ground-truth tolerance of the query: a frame-index offset for aligned
traverses, or a planar distance in meters when coordinates are available.
Recall@N is the fraction of queries whose top-N ranked references contain at
least one in-tolerance reference.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .config import MethodSpec, PipelineConfig
from .dataset import MODE_FRAME, MODE_METRIC, Dataset, GroundTruthSpec
from .methods import BoundMethod, bind_method, bind_pipeline
from .pipeline import run_query
from .scoring import argmax_id
from .types import CandidateSet, MatchResult, ValidationError, make_candidate_set


class GroundTruthOracle:
    """Per-query in-tolerance reference sets, resolved once per dataset."""

    def __init__(
        self, n_queries: int, n_references: int, spec: GroundTruthSpec
    ) -> None:
        self.spec = spec
        self._in_tolerance: list[frozenset[int]] = []
        for query in range(n_queries):
            self._in_tolerance.append(
                frozenset(self._resolve(query, n_references, spec))
            )

    @staticmethod
    def _resolve(query: int, n_references: int, spec: GroundTruthSpec) -> Iterable[int]:
        if spec.mode == MODE_FRAME:
            lo = max(0, query - spec.frame_tolerance)
            hi = min(n_references - 1, query + spec.frame_tolerance)
            return range(lo, hi + 1)
        if spec.mode == MODE_METRIC:
            try:
                qx, qy = spec.query_coords[query]
            except KeyError:
                raise ValidationError(f"no coordinates for query {query}") from None
            matches = []
            for ref_id in range(n_references):
                try:
                    rx, ry = spec.reference_coords[ref_id]
                except KeyError:
                    raise ValidationError(
                        f"no coordinates for reference {ref_id}"
                    ) from None
                if math.hypot(qx - rx, qy - ry) <= spec.metric_tolerance_m:
                    matches.append(ref_id)
            return matches
        raise ValidationError(f"unknown ground-truth mode {spec.mode!r}")

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "GroundTruthOracle":
        return cls(dataset.n_queries, dataset.n_references, dataset.ground_truth)

    def in_tolerance(self, query: int) -> frozenset[int]:
        """All reference ids that count as correct for this query."""
        return self._in_tolerance[query]

    def is_correct(self, query: int, matched: int) -> bool:
        return matched in self._in_tolerance[query]

    def has_any_match(self, query: int) -> bool:
        return bool(self._in_tolerance[query])


@dataclass(frozen=True)
class RecallCurve:
    """Recall@N values over ascending N."""

    n_values: tuple[int, ...]
    recall: tuple[float, ...]
    clamped: bool = False

    def __post_init__(self) -> None:
        if len(self.n_values) != len(self.recall):
            raise ValidationError("n_values and recall lengths differ")
        if any(n < 1 for n in self.n_values):
            raise ValidationError("recall curve N values must be positive")
        if any(a >= b for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValidationError("recall curve N values must be strictly ascending")
        if any(not 0.0 <= r <= 1.0 for r in self.recall):
            raise ValidationError("recall values must lie in [0, 1]")


def recall_at_n(
    ranked_lists: Sequence[Sequence[int]],
    oracle: GroundTruthOracle,
    n_values: Sequence[int],
) -> RecallCurve:
    """Fraction of queries answered correctly within the top N, per N.

    Each ranked list holds reference ids best-first and must be
    duplicate-free.  N values beyond a list's length are clamped to the list
    (reported via the curve's ``clamped`` flag).
    """
    if not ranked_lists:
        raise ValidationError("no ranked lists supplied")
    n_sorted = tuple(int(n) for n in n_values)
    clamped = False
    hits = [0] * len(n_sorted)
    for query, ranking in enumerate(ranked_lists):
        if len(set(ranking)) != len(ranking):
            raise ValidationError(f"ranked list for query {query} has duplicates")
        good = oracle.in_tolerance(query)
        first_hit = None
        for rank, ref_id in enumerate(ranking):
            if ref_id in good:
                first_hit = rank
                break
        for idx, n in enumerate(n_sorted):
            if n > len(ranking):
                clamped = True
            if first_hit is not None and first_hit < n:
                hits[idx] += 1
    total = len(ranked_lists)
    return RecallCurve(
        n_values=n_sorted,
        recall=tuple(h / total for h in hits),
        clamped=clamped,
    )


def method_ranking(
    method: BoundMethod, query: int, candidates: CandidateSet
) -> tuple[int, ...]:
    """Candidates ordered best-first by the method's raw distances."""
    raw = method.raw_distances(query, candidates)
    return tuple(sorted(raw, key=lambda ref_id: (raw[ref_id], ref_id)))


def characterize_methods(
    dataset: Dataset,
    specs: Sequence[MethodSpec],
    n_values: Sequence[int],
    base_dir: Path | str = ".",
) -> dict[str, RecallCurve]:
    """Per-method Recall@N curves over the full reference database."""
    oracle = GroundTruthOracle.from_dataset(dataset)
    everything = make_candidate_set(range(dataset.n_references))
    curves: dict[str, RecallCurve] = {}
    for spec in specs:
        method = bind_method(spec, dataset, base_dir)
        rankings = [
            method_ranking(method, query, everything)
            for query in range(dataset.n_queries)
        ]
        curves[method.label] = recall_at_n(rankings, oracle, n_values)
    return curves


@dataclass(frozen=True)
class ExperimentReport:
    """Recall and timing summary of one full pipeline run."""

    name: str
    config: PipelineConfig
    n_queries: int
    tier_method_labels: tuple[tuple[str, ...], ...]
    tier_method_recall1: tuple[tuple[float, ...], ...]
    final_recall1: float
    combined_recall1: float | None
    mean_seconds_per_query: float
    results: tuple[MatchResult, ...]


def run_experiment(
    dataset: Dataset,
    config: PipelineConfig,
    base_dir: Path | str = ".",
    workers: int = 1,
    name: str = "experiment",
) -> ExperimentReport:
    """Run every query through the hierarchy and summarize recalls.

    Per-tier per-method Recall@1 takes each method's best candidate within
    the candidate set that method actually evaluated in its tier.  Queries
    run concurrently when ``workers`` > 1; scores are unaffected by worker
    count.
    """
    bound = bind_pipeline(config, dataset, base_dir)
    oracle = GroundTruthOracle.from_dataset(dataset)
    n_refs = dataset.n_references

    def one(query: int) -> MatchResult:
        return run_query(config, bound, query, n_refs)

    queries = range(dataset.n_queries)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(one, queries))
    else:
        results = tuple(one(query) for query in queries)

    n = len(results)
    labels = tuple(
        tuple(method.label for method in tier_methods) for tier_methods in bound
    )
    tier_hits = [
        [0] * len(tier_methods) for tier_methods in bound
    ]
    final_hits = 0
    combined_hits = 0
    for result in results:
        for t, record in enumerate(result.tier_records):
            for m, scores in enumerate(record.per_method_scores):
                if oracle.is_correct(result.query, argmax_id(scores)):
                    tier_hits[t][m] += 1
        if oracle.is_correct(result.query, result.final_tier_best):
            final_hits += 1
        if result.combined_best is not None and oracle.is_correct(
            result.query, result.combined_best
        ):
            combined_hits += 1
    total_seconds = sum(sum(result.tier_seconds) for result in results)
    return ExperimentReport(
        name=name,
        config=config,
        n_queries=n,
        tier_method_labels=labels,
        tier_method_recall1=tuple(
            tuple(h / n for h in tier) for tier in tier_hits
        ),
        final_recall1=final_hits / n,
        combined_recall1=(
            combined_hits / n if config.combined_enabled else None
        ),
        mean_seconds_per_query=total_seconds / n,
        results=results,
    )


def write_report_csv(
    reports: Sequence[ExperimentReport], path: str | Path
) -> None:
    """One row per (experiment, tier, method), then summary rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["experiment", "kind", "tier", "method", "recall_at_1", "seconds_per_query"]
        )
        for report in reports:
            for t, (labels, recalls) in enumerate(
                zip(report.tier_method_labels, report.tier_method_recall1)
            ):
                for label, recall in zip(labels, recalls):
                    writer.writerow(
                        [report.name, "method", t + 1, label, f"{recall:.6f}", ""]
                    )
            writer.writerow(
                [report.name, "final", len(report.tier_method_labels), "",
                 f"{report.final_recall1:.6f}", ""]
            )
            if report.combined_recall1 is not None:
                writer.writerow(
                    [report.name, "combined", "", "",
                     f"{report.combined_recall1:.6f}", ""]
                )
            writer.writerow(
                [report.name, "time", "", "", "",
                 f"{report.mean_seconds_per_query:.9f}"]
            )


def write_curves_csv(
    curves: Mapping[str, RecallCurve], path: str | Path
) -> None:
    """Plot-data CSV with one (curve, n, recall) row per point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve", "n", "recall"])
        for name in curves:
            curve = curves[name]
            for n, recall in zip(curve.n_values, curve.recall):
                writer.writerow([name, n, f"{recall:.6f}"])
