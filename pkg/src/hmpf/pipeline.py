"""Hierarchy execution for a single query.

Tier 1 scores the full reference set; every later tier scores only the
candidate union its predecessor forwarded.  The final tier's decision is the
argmax of the per-candidate mean of its methods' normalized scores.  When
enabled, the combined decision additionally folds earlier tiers back in:
each non-final tier contributes its best-method score restricted to the
final candidates, re-normalized to [0, 1] and weighted; the weighted sum is
standardized and its argmax is the combined best match.
"""

from __future__ import annotations

import time

from .config import PipelineConfig, TierSpec
from .methods import BoundMethod
from .scoring import (
    argmax_id,
    min_max_normalize,
    renormalize_01,
    standardize,
    tier_max_across_methods,
)
from .types import (
    CandidateSet,
    MatchResult,
    NormalizedScores,
    TierRecord,
    ValidationError,
    make_candidate_set,
)


def top_k(scores: NormalizedScores, k: int) -> CandidateSet:
    """Ids of the k highest scores; ties break toward the lower id.

    Returns every id when k is at least the number of entries.
    """
    if not scores:
        raise ValidationError("cannot take top-k of an empty score vector")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k >= len(scores):
        return make_candidate_set(scores)
    order = sorted(scores, key=lambda ref_id: (-scores[ref_id], ref_id))
    return make_candidate_set(order[:k])


def run_tier(
    tier: TierSpec,
    methods: tuple[BoundMethod, ...],
    query: int,
    candidates_in: CandidateSet,
    tier_index: int,
) -> TierRecord:
    """Score the incoming candidates with every method and pick the union.

    Each method's raw distances over ``candidates_in`` are min-max
    normalized; the tier forwards the union of per-method top-``k_out``
    picks.
    """
    if not candidates_in:
        raise ValidationError(f"tier {tier_index} received no candidates")
    per_method = tuple(
        min_max_normalize(method.raw_distances(query, candidates_in))
        for method in methods
    )
    if tier.k_out is None:
        selected = set(candidates_in)
    else:
        selected = set()
        for scores in per_method:
            selected.update(top_k(scores, tier.k_out))
    return TierRecord(
        tier_index=tier_index,
        per_method_scores=per_method,
        selected=make_candidate_set(selected),
    )


def final_tier_decision(record: TierRecord) -> tuple[int, dict[int, float]]:
    """Mean the final tier's per-method scores; argmax with low-id ties."""
    n = len(record.per_method_scores)
    means = {
        ref_id: sum(scores[ref_id] for scores in record.per_method_scores) / n
        for ref_id in record.evaluated
    }
    return argmax_id(means), means


def combined_score(
    records: tuple[TierRecord, ...],
    weights: tuple[float, ...],
) -> tuple[int, dict[int, float]]:
    """Weighted cross-tier fusion over the final tier's candidate set.

    Non-final tiers contribute their elementwise-best method score,
    restricted to the final candidates and re-normalized to [0, 1]; the
    final tier contributes its mean vector.  The weighted sum is
    standardized before the argmax (which standardization cannot change).
    """
    if len(records) != len(weights):
        raise ValidationError(
            f"{len(records)} tier records but {len(weights)} weights"
        )
    final_record = records[-1]
    final_ids = final_record.evaluated
    _, mean_vector = final_tier_decision(final_record)
    total = {ref_id: weights[-1] * mean_vector[ref_id] for ref_id in final_ids}
    for record, weight in zip(records[:-1], weights[:-1]):
        best = tier_max_across_methods(record.per_method_scores)
        try:
            restricted = {ref_id: best[ref_id] for ref_id in final_ids}
        except KeyError as exc:
            raise ValidationError(
                f"tier {record.tier_index} never scored candidate {exc.args[0]}; "
                "candidate nesting is broken"
            ) from exc
        renormed = renormalize_01(restricted)
        for ref_id in final_ids:
            total[ref_id] += weight * renormed[ref_id]
    standardized = standardize(total)
    return argmax_id(standardized), standardized


def run_query(
    config: PipelineConfig,
    bound_tiers: tuple[tuple[BoundMethod, ...], ...],
    query: int,
    n_references: int,
) -> MatchResult:
    """Run every tier for one query and assemble the MatchResult."""
    if len(bound_tiers) != config.n_tiers:
        raise ValidationError(
            f"config has {config.n_tiers} tiers but {len(bound_tiers)} "
            "bound method groups were supplied"
        )
    candidates = make_candidate_set(range(n_references))
    records: list[TierRecord] = []
    timings: list[float] = []
    for tier_index, (tier, methods) in enumerate(zip(config.tiers, bound_tiers)):
        start = time.perf_counter()
        record = run_tier(tier, methods, query, candidates, tier_index)
        timings.append(time.perf_counter() - start)
        records.append(record)
        candidates = record.selected
    final_best, final_scores = final_tier_decision(records[-1])
    combined_best: int | None = None
    combined_scores: dict[int, float] = {}
    if config.combined_enabled:
        combined_best, combined_scores = combined_score(
            tuple(records), config.resolved_weights()
        )
    return MatchResult(
        query=query,
        final_tier_best=final_best,
        final_tier_scores=final_scores,
        tier_records=tuple(records),
        tier_seconds=tuple(timings),
        combined_best=combined_best,
        combined_scores=combined_scores,
    )
