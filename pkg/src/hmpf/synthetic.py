"""Seeded synthetic benchmark with controlled perceptual aliasing.

Reference vectors are orthonormal basis vectors, and each query vector is a
sparse affinity combination over them.  Euclidean distance to reference j is
then strictly decreasing in the query's affinity for j, so rank orderings
are exact consequences of the chosen affinities rather than of random
geometry.  Each scoring method receives its own affinity table:

* every query carries affinity 1.0 for its true reference;
* "shallow"-aliased queries give one far-away distractor a slightly higher
  affinity (the true match drops to rank 2 for that method only);
* "deep"-aliased queries model a strong final-method confusion: the
  distractor dominates that method, the true match keeps only a weak
  affinity, a near-tie echo of the distractor appears in the first method,
  and every other method actively rejects the distractor (zero affinity).

Distractors sit at least 10 frames from their query, far outside the
benchmark's frame tolerance, and the per-method distractor sets are
disjoint.  Everything is generated from one seed; reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .io import write_feature_file
from .types import ValidationError

BASE_AFFINITY_MAX = 0.08
TRUE_AFFINITY = 1.0
SHALLOW_DISTRACTOR_AFFINITY = 1.15
DEEP_DISTRACTOR_AFFINITY = 1.3
DEEP_TRUE_AFFINITY = 0.28
ECHO_AFFINITY = 0.97

DEFAULT_SEED = 42
DEFAULT_FRAME_TOLERANCE = 2
MIN_DISTRACTOR_OFFSET = 10

MODE_SHALLOW = "shallow"
MODE_DEEP = "deep"


@dataclass(frozen=True)
class AliasedQuery:
    """One engineered confusion: this query is drawn toward that distractor."""

    query: int
    distractor: int
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in (MODE_SHALLOW, MODE_DEEP):
            raise ValidationError(f"unknown aliasing mode {self.mode!r}")


# One tuple of engineered confusions per method.
AliasingPlan = tuple[tuple[AliasedQuery, ...], ...]


@dataclass(frozen=True)
class SyntheticBenchmark:
    """Paths and structure of one generated benchmark instance."""

    out_dir: Path
    manifest_path: Path
    config_path: Path
    reference_files: tuple[Path, ...]
    query_files: tuple[Path, ...]
    aliasing: AliasingPlan
    seed: int
    n_refs: int
    n_queries: int
    frame_tolerance: int


def default_aliasing(
    n_refs: int, n_queries: int, n_methods: int, n_distractors: int
) -> AliasingPlan:
    """The documented confusion layout: disjoint query blocks per method.

    Method m's aliased queries are the contiguous block starting at
    m * n_distractors; its distractor for query q is q + 17 + 6m (mod
    n_refs).  The last method's confusions are deep, all others shallow.
    """
    plan: list[tuple[AliasedQuery, ...]] = []
    for m in range(n_methods):
        offset = 17 + 6 * m
        mode = MODE_DEEP if m == n_methods - 1 and n_methods > 1 else MODE_SHALLOW
        entries = tuple(
            AliasedQuery(
                query=m * n_distractors + i,
                distractor=(m * n_distractors + i + offset) % n_refs,
                mode=mode,
            )
            for i in range(n_distractors)
        )
        plan.append(entries)
    return tuple(plan)


def _check_plan(
    plan: AliasingPlan, n_refs: int, n_queries: int, frame_tolerance: int
) -> None:
    seen_queries: set[int] = set()
    seen_distractors: set[int] = set()
    for entries in plan:
        for entry in entries:
            if not 0 <= entry.query < n_queries:
                raise ValidationError(f"aliased query {entry.query} out of range")
            if not 0 <= entry.distractor < n_refs:
                raise ValidationError(
                    f"distractor {entry.distractor} out of range"
                )
            gap = abs(entry.distractor - entry.query)
            if gap < MIN_DISTRACTOR_OFFSET or gap <= frame_tolerance:
                raise ValidationError(
                    f"distractor {entry.distractor} is too close to query "
                    f"{entry.query} (offset {gap})"
                )
            if entry.query in seen_queries:
                raise ValidationError(
                    f"query {entry.query} is aliased for more than one method"
                )
            if entry.distractor in seen_distractors:
                raise ValidationError(
                    f"distractor {entry.distractor} is reused across methods"
                )
            seen_queries.add(entry.query)
            seen_distractors.add(entry.distractor)


def _affinity_tables(
    n_refs: int,
    n_queries: int,
    n_methods: int,
    plan: AliasingPlan,
    seed: int,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    tables = rng.uniform(
        0.0, BASE_AFFINITY_MAX, size=(n_methods, n_queries, n_refs)
    )
    for q in range(n_queries):
        tables[:, q, q] = TRUE_AFFINITY
    for m, entries in enumerate(plan):
        for entry in entries:
            q, d = entry.query, entry.distractor
            if entry.mode == MODE_SHALLOW:
                tables[m, q, d] = SHALLOW_DISTRACTOR_AFFINITY
            else:
                tables[m, q, d] = DEEP_DISTRACTOR_AFFINITY
                tables[m, q, q] = DEEP_TRUE_AFFINITY
                for other in range(n_methods):
                    if other == m:
                        continue
                    tables[other, q, d] = ECHO_AFFINITY if other == 0 else 0.0
    return tables


def _feature_dim(n_refs: int) -> int:
    return max(16, -(-n_refs // 16) * 16)


def _default_k_outs(n_tiers: int) -> tuple[int, ...]:
    if n_tiers == 1:
        return (1,)
    return tuple([10] + [5] * (n_tiers - 2) + [1])


def _manifest_text(n_refs: int, n_queries: int, frame_tolerance: int) -> str:
    return (
        f"reference_count = {n_refs}\n"
        f"query_count = {n_queries}\n"
        "\n"
        "[ground_truth]\n"
        'mode = "frame-offset"\n'
        f"frame_tolerance = {frame_tolerance}\n"
    )


def _config_text(n_methods: int) -> str:
    lines = ["combined = true", ""]
    for m, k_out in enumerate(_default_k_outs(n_methods)):
        lines.append("[[tier]]")
        lines.append(f"k_out = {k_out}")
        lines.append("methods = [")
        lines.append(
            '    { kind = "precomputed-features", '
            f'reference_path = "method_{m}_reference.hmpf", '
            f'query_path = "method_{m}_query.hmpf", '
            'metric = "euclidean" },'
        )
        lines.append("]")
        lines.append("")
    return "\n".join(lines)


def generate_synthetic_benchmark(
    out_dir: str | Path,
    n_refs: int = 50,
    n_queries: int = 50,
    n_methods: int = 3,
    n_distractors: int = 5,
    seed: int = DEFAULT_SEED,
    frame_tolerance: int = DEFAULT_FRAME_TOLERANCE,
    aliasing: AliasingPlan | None = None,
) -> SyntheticBenchmark:
    """Write per-method feature files, a manifest, and a tiered config.

    The generated instance is verified before returning: each method's
    nearest neighbor misses exactly its aliased queries, and every method
    retains the true match within its top 10.
    """
    if n_queries < 1 or n_refs < n_queries:
        raise ValidationError(
            f"need n_refs >= n_queries >= 1, got {n_refs}, {n_queries}"
        )
    if n_methods < 1:
        raise ValidationError(f"need at least one method, got {n_methods}")
    if n_distractors < 0 or n_methods * n_distractors > n_queries:
        raise ValidationError(
            f"{n_methods} methods x {n_distractors} distractors does not fit "
            f"into {n_queries} queries"
        )
    plan = (
        default_aliasing(n_refs, n_queries, n_methods, n_distractors)
        if aliasing is None
        else aliasing
    )
    if len(plan) != n_methods:
        raise ValidationError(
            f"aliasing plan covers {len(plan)} methods, expected {n_methods}"
        )
    _check_plan(plan, n_refs, n_queries, frame_tolerance)

    dim = _feature_dim(n_refs)
    tables = _affinity_tables(n_refs, n_queries, n_methods, plan, seed)
    references = np.eye(n_refs, dim, dtype=np.float32)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reference_files = []
    query_files = []
    for m in range(n_methods):
        ref_path = out_dir / f"method_{m}_reference.hmpf"
        query_path = out_dir / f"method_{m}_query.hmpf"
        queries = np.zeros((n_queries, dim), dtype=np.float32)
        queries[:, :n_refs] = tables[m].astype(np.float32)
        write_feature_file(ref_path, references)
        write_feature_file(query_path, queries)
        reference_files.append(ref_path)
        query_files.append(query_path)

    manifest_path = out_dir / "manifest.toml"
    manifest_path.write_text(_manifest_text(n_refs, n_queries, frame_tolerance))
    config_path = out_dir / "config.toml"
    config_path.write_text(_config_text(n_methods))

    bench = SyntheticBenchmark(
        out_dir=out_dir,
        manifest_path=manifest_path,
        config_path=config_path,
        reference_files=tuple(reference_files),
        query_files=tuple(query_files),
        aliasing=plan,
        seed=seed,
        n_refs=n_refs,
        n_queries=n_queries,
        frame_tolerance=frame_tolerance,
    )
    _verify_generated(bench)
    return bench


def _verify_generated(bench: SyntheticBenchmark) -> None:
    """Re-read the written files and confirm the constructed rank structure."""
    from .io import read_feature_file

    tol = bench.frame_tolerance
    for m, (ref_path, query_path) in enumerate(
        zip(bench.reference_files, bench.query_files)
    ):
        refs = read_feature_file(ref_path)
        queries = read_feature_file(query_path)
        aliased = {entry.query for entry in bench.aliasing[m]}
        for q in range(bench.n_queries):
            dists = np.linalg.norm(refs - queries[q], axis=1)
            order = np.lexsort((np.arange(bench.n_refs), dists))
            nearest = int(order[0])
            correct = abs(nearest - q) <= tol
            if q in aliased and correct:
                raise RuntimeError(
                    f"benchmark construction broken: method {m} still matches "
                    f"aliased query {q}"
                )
            if q not in aliased and not correct:
                raise RuntimeError(
                    f"benchmark construction broken: method {m} misses "
                    f"clean query {q}"
                )
            top10 = set(int(r) for r in order[:10])
            if not any(abs(r - q) <= tol for r in top10):
                raise RuntimeError(
                    f"benchmark construction broken: method {m} dropped the "
                    f"true match for query {q} from its top 10"
                )
