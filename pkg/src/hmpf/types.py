"""Core domain types shared by every stage of the fusion engine.

Image identity is positional: an id is the 0-based index into an ordered
image list, and query and reference lists are separate namespaces even when
they alias the same files.  Score containers are plain dicts keyed by
reference id; raw distances are "lower is better", normalized scores are
"higher is better" in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# Raw difference scores, one per candidate reference id.  Lower = more similar.
RawDistances = dict[int, float]

# Min-max normalized scores in [0, 1].  Higher = better match.
NormalizedScores = dict[int, float]

# Ordered, duplicate-free reference ids passed between tiers.
CandidateSet = tuple[int, ...]


class ValidationError(ValueError):
    """A value failed a structural invariant (bad config, malformed scores)."""


def make_candidate_set(ids: Iterable[int]) -> CandidateSet:
    """Deduplicate and sort reference ids into a canonical candidate set."""
    out = tuple(sorted(set(int(i) for i in ids)))
    for i in out:
        if i < 0:
            raise ValidationError(f"negative reference id {i} in candidate set")
    return out


def check_raw_distances(raw: Mapping[int, float]) -> None:
    """Raise unless every raw distance is finite and non-negative."""
    if not raw:
        raise ValidationError("empty raw distance vector")
    for ref_id, value in raw.items():
        if not math.isfinite(value) or value < 0:
            raise ValidationError(
                f"raw distance for reference {ref_id} is {value!r}; "
                "expected a finite value >= 0"
            )


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length descriptor with all-finite entries."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("feature vector must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("feature vector contains non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class TierRecord:
    """Everything one tier computed for one query.

    ``per_method_scores`` holds each method's normalized scores over exactly
    the candidate set this tier evaluated; all methods share one key set.
    ``selected`` is the union of per-method top-k picks forwarded to the next
    tier and is always a subset of the evaluated keys.
    """

    tier_index: int
    per_method_scores: tuple[NormalizedScores, ...]
    selected: CandidateSet

    def __post_init__(self) -> None:
        if not self.per_method_scores:
            raise ValidationError("tier record needs at least one method")
        keys = set(self.per_method_scores[0])
        for scores in self.per_method_scores[1:]:
            if set(scores) != keys:
                raise ValidationError(
                    f"tier {self.tier_index}: per-method score key sets differ"
                )
        if not set(self.selected) <= keys:
            raise ValidationError(
                f"tier {self.tier_index}: selected candidates are not a subset "
                "of the evaluated candidate set"
            )

    @property
    def evaluated(self) -> CandidateSet:
        """The candidate set this tier scored."""
        return tuple(sorted(self.per_method_scores[0]))


@dataclass(frozen=True)
class MatchResult:
    """Outcome of running the full hierarchy for a single query."""

    query: int
    final_tier_best: int
    final_tier_scores: dict[int, float]
    tier_records: tuple[TierRecord, ...]
    tier_seconds: tuple[float, ...]
    combined_best: int | None = None
    combined_scores: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        last = self.tier_records[-1]
        if self.final_tier_best not in last.evaluated:
            raise ValidationError(
                "final-tier best candidate is outside the last tier's "
                "evaluated candidate set"
            )
