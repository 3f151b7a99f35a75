"""Score-space transforms used between and across tiers.

All transforms work on dicts keyed by reference id.  Raw distances from the
image-scoring methods have wildly different spreads, so every tier first maps
them to [0, 1] with 1 = best match; cross-tier fusion re-normalizes subsets
and finally standardizes the fused scores.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .types import NormalizedScores, RawDistances, ValidationError


def min_max_normalize(raw: Mapping[int, float]) -> NormalizedScores:
    """Map raw distances (lower = better) to [0, 1] scores (higher = better).

    The smallest distance maps to 1, the largest to 0, affinely in between.
    If all distances are equal there is nothing to separate, so every
    candidate keeps score 1 ("all equally best").
    """
    if not raw:
        raise ValidationError("cannot normalize an empty distance vector")
    lo = min(raw.values())
    hi = max(raw.values())
    if lo == hi:
        return {ref_id: 1.0 for ref_id in raw}
    span = lo - hi
    return {ref_id: (value - hi) / span for ref_id, value in raw.items()}


def renormalize_01(scores: Mapping[int, float]) -> NormalizedScores:
    """Re-stretch goodness scores (higher = better) so max -> 1 and min -> 0.

    Used when a score vector is restricted to a candidate subset and must be
    made comparable with other tiers.  The all-equal degenerate case maps to
    all 1, same convention as :func:`min_max_normalize`.
    """
    if not scores:
        raise ValidationError("cannot renormalize an empty score vector")
    lo = min(scores.values())
    hi = max(scores.values())
    if lo == hi:
        return {ref_id: 1.0 for ref_id in scores}
    span = hi - lo
    return {ref_id: (value - lo) / span for ref_id, value in scores.items()}


def standardize(scores: Mapping[int, float]) -> dict[int, float]:
    """Shift and scale scores to zero mean and unit sample standard deviation.

    Uses the n-1 divisor.  With a single entry or zero spread the scale is
    undefined, so only the mean is removed (everything becomes 0).  Being a
    positive affine map, this never changes which candidate ranks first.
    """
    if not scores:
        raise ValidationError("cannot standardize an empty score vector")
    n = len(scores)
    mean = sum(scores.values()) / n
    if n == 1:
        return {ref_id: 0.0 for ref_id in scores}
    var = sum((v - mean) ** 2 for v in scores.values()) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        return {ref_id: 0.0 for ref_id in scores}
    return {ref_id: (value - mean) / sd for ref_id, value in scores.items()}


def tier_max_across_methods(
    per_method: Sequence[Mapping[int, float]],
) -> NormalizedScores:
    """Per-candidate elementwise maximum over a tier's method score vectors.

    Keeps only the best-performing method's opinion of each candidate.  All
    inputs must share one key set.
    """
    if not per_method:
        raise ValidationError("need at least one method score vector")
    keys = set(per_method[0])
    for scores in per_method[1:]:
        if set(scores) != keys:
            raise ValidationError("method score vectors have different key sets")
    return {ref_id: max(scores[ref_id] for scores in per_method) for ref_id in keys}


def argmax_id(scores: Mapping[int, float]) -> int:
    """Id of the highest score; ties break toward the lower id."""
    if not scores:
        raise ValidationError("cannot take argmax of empty scores")
    best_id = None
    best_val = -math.inf
    for ref_id in sorted(scores):
        value = scores[ref_id]
        if value > best_val:
            best_val = value
            best_id = ref_id
    return best_id  # type: ignore[return-value]
