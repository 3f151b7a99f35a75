"""Pipeline configuration: method specs, tier specs, load/save/validate.

Config files are TOML.  Example::

    combined = true

    [[tier]]
    k_out = 100
    weight = 0.5
    methods = [
        { kind = "precomputed-features", reference_path = "net_r.hmpf", query_path = "net_q.hmpf" },
        { kind = "hog", cell_px = 30 },
    ]

    [[tier]]
    k_out = 10
    methods = [ { kind = "local-features" } ]

Per-tier ``k_out`` must be non-increasing from first to last tier; setting
every tier's ``k_out`` to the reference count degenerates the hierarchy into
parallel fusion, which is a supported baseline.  Omitted weights default to
1.0 for the final tier, decreasing by 0.25 per step toward the first tier
and floored at 0.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .types import ValidationError

METHOD_KINDS = (
    "hog",
    "gist",
    "local-features",
    "precomputed-features",
    "precomputed-scores",
)
METRICS = ("euclidean", "cosine-distance")

WEIGHT_STEP = 0.25


class ConfigError(ValidationError):
    """The configuration file is malformed or violates an invariant."""


@dataclass(frozen=True)
class MethodSpec:
    """One image-scoring method and its kind-specific parameters."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in METHOD_KINDS:
            raise ConfigError(
                f"unknown method kind {self.kind!r}; expected one of {METHOD_KINDS}"
            )
        _validate_params(self.kind, self.params)

    @property
    def label(self) -> str:
        """Short human-readable name used in reports and diagnostics."""
        path = self.params.get("path") or self.params.get("reference_path")
        if path:
            return f"{self.kind}:{Path(path).stem}"
        return self.kind


@dataclass(frozen=True)
class TierSpec:
    """Methods run in one tier, plus how many candidates each forwards.

    ``k_out = None`` means "forward every candidate" (the ``all`` keyword in
    config files and sweep schedules).
    """

    methods: tuple[MethodSpec, ...]
    k_out: int | None
    weight: float | None = None

    def __post_init__(self) -> None:
        if not self.methods:
            raise ConfigError("tier has no methods")
        if self.k_out is not None and self.k_out < 1:
            raise ConfigError(f"k_out must be >= 1, got {self.k_out}")
        if self.weight is not None and self.weight < 0:
            raise ConfigError(f"tier weight must be >= 0, got {self.weight}")


@dataclass(frozen=True)
class PipelineConfig:
    """The full hierarchy: ordered tiers plus the cross-tier fusion switch."""

    tiers: tuple[TierSpec, ...]
    combined_enabled: bool = True

    def __post_init__(self) -> None:
        if not self.tiers:
            raise ConfigError("pipeline needs at least one tier")
        for earlier, later in zip(self.tiers, self.tiers[1:]):
            if earlier.k_out is None or later.k_out is None:
                continue
            if later.k_out > earlier.k_out:
                raise ConfigError(
                    f"candidate counts must not increase between tiers "
                    f"(got {earlier.k_out} -> {later.k_out})"
                )

    @property
    def n_tiers(self) -> int:
        return len(self.tiers)

    def resolved_weights(self) -> tuple[float, ...]:
        """Per-tier fusion weights, filling defaults for unset tiers.

        The default assigns 1.0 to the final tier and steps down by 0.25
        toward the first tier, clamped at 0.
        """
        n = self.n_tiers
        out = []
        for idx, tier in enumerate(self.tiers):
            if tier.weight is not None:
                out.append(float(tier.weight))
            else:
                out.append(max(0.0, 1.0 - WEIGHT_STEP * (n - 1 - idx)))
        return tuple(out)

    def with_k_schedule(self, k_outs: tuple[int | None, ...]) -> "PipelineConfig":
        """Copy of this config with each tier's ``k_out`` replaced.

        ``None`` entries mean "forward everything".
        """
        if len(k_outs) != self.n_tiers:
            raise ConfigError(
                f"schedule has {len(k_outs)} entries for {self.n_tiers} tiers"
            )
        tiers = tuple(
            TierSpec(methods=t.methods, k_out=k, weight=t.weight)
            for t, k in zip(self.tiers, k_outs)
        )
        return PipelineConfig(tiers=tiers, combined_enabled=self.combined_enabled)


def _validate_params(kind: str, params: Mapping[str, Any]) -> None:
    def _positive_int(name: str, default: int) -> None:
        value = params.get(name, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError(f"{kind}: {name} must be a positive integer")

    def _metric() -> None:
        metric = params.get("metric", "euclidean")
        if metric not in METRICS:
            raise ConfigError(f"{kind}: metric must be one of {METRICS}")

    if kind == "hog":
        _positive_int("cell_px", 30)
        _positive_int("resize", 300)
        _metric()
    elif kind == "gist":
        _metric()
    elif kind == "local-features":
        threshold = params.get("match_threshold", 20.0)
        if not 0 < float(threshold) <= 100:
            raise ConfigError(
                f"local-features: match_threshold must be in (0, 100], got {threshold}"
            )
        ratio = params.get("max_ratio", 0.7)
        if not 0 < float(ratio) <= 1:
            raise ConfigError(
                f"local-features: max_ratio must be in (0, 1], got {ratio}"
            )
        _positive_int("top_n", 20)
        _positive_int("max_keypoints", 200)
    elif kind == "precomputed-features":
        for name in ("reference_path", "query_path"):
            value = params.get(name)
            if not value or not isinstance(value, str):
                raise ConfigError(f"{kind}: requires a {name!r} parameter")
        _metric()
    elif kind == "precomputed-scores":
        path = params.get("path")
        if not path or not isinstance(path, str):
            raise ConfigError(f"{kind}: requires a 'path' parameter")


def _method_from_table(table: Mapping[str, Any]) -> MethodSpec:
    if "kind" not in table:
        raise ConfigError(f"method table {table!r} is missing 'kind'")
    params = {k: v for k, v in table.items() if k != "kind"}
    return MethodSpec(kind=table["kind"], params=params)


def config_from_dict(data: Mapping[str, Any]) -> PipelineConfig:
    """Build and validate a PipelineConfig from parsed TOML data."""
    raw_tiers = data.get("tier")
    if not raw_tiers or not isinstance(raw_tiers, list):
        raise ConfigError("config needs at least one [[tier]] table")
    tiers = []
    for idx, tier_table in enumerate(raw_tiers):
        methods = tier_table.get("methods")
        if not methods or not isinstance(methods, list):
            raise ConfigError(f"tier {idx}: 'methods' must be a non-empty array")
        if "k_out" not in tier_table:
            raise ConfigError(f"tier {idx}: missing 'k_out'")
        k_out = tier_table["k_out"]
        if k_out == "all":
            k_out = None
        elif not isinstance(k_out, int) or isinstance(k_out, bool):
            raise ConfigError(f"tier {idx}: k_out must be an integer or 'all'")
        weight = tier_table.get("weight")
        if weight is not None:
            weight = float(weight)
        tiers.append(
            TierSpec(
                methods=tuple(_method_from_table(m) for m in methods),
                k_out=k_out,
                weight=weight,
            )
        )
    combined = data.get("combined", True)
    if not isinstance(combined, bool):
        raise ConfigError("'combined' must be a boolean")
    return PipelineConfig(tiers=tuple(tiers), combined_enabled=combined)


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a TOML pipeline configuration file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML: {exc}") from exc
    return config_from_dict(data)


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise ConfigError(f"cannot serialize config value {value!r}")


def dump_config(config: PipelineConfig) -> str:
    """Render a PipelineConfig back to TOML.

    Reloading the output yields a structurally identical config.
    """
    lines = [f"combined = {_toml_value(config.combined_enabled)}", ""]
    for tier in config.tiers:
        lines.append("[[tier]]")
        k_out = '"all"' if tier.k_out is None else str(tier.k_out)
        lines.append(f"k_out = {k_out}")
        if tier.weight is not None:
            lines.append(f"weight = {_toml_value(float(tier.weight))}")
        entries = []
        for method in tier.methods:
            parts = [f'kind = "{method.kind}"']
            for key in sorted(method.params):
                parts.append(f"{key} = {_toml_value(method.params[key])}")
            entries.append("    { " + ", ".join(parts) + " },")
        lines.append("methods = [")
        lines.extend(entries)
        lines.append("]")
        lines.append("")
    return "\n".join(lines)


def save_config(config: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(config))
