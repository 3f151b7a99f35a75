"""Dataset manifests: ordered image lists plus ground-truth configuration.

A manifest is a TOML file.  Image lists come from a directory (sorted by
filename), an explicit list file (one path per line), or a bare count when
the pipeline runs purely on precomputed features and never touches pixels::

    reference_dir = "winter"          # or reference_list / reference_count
    query_dir = "summer"

    [ground_truth]
    mode = "frame-offset"             # or "metric"
    frame_tolerance = 10
    # metric mode instead needs:
    # coords_csv = "coords.csv"       # columns: list,index,x_m,y_m
    # metric_tolerance_m = 50.0

Relative paths are resolved against the manifest's directory.  Query and
reference ids are positions in their own list; the two namespaces are never
mixed.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .types import ValidationError

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")

MODE_FRAME = "frame-offset"
MODE_METRIC = "metric"


class DatasetError(ValidationError):
    """The manifest or a file it references is missing or malformed."""


@dataclass(frozen=True)
class GroundTruthSpec:
    """How a retrieved reference is judged correct for a query.

    frame-offset mode: correct when |query index - reference index| is at
    most ``frame_tolerance`` (lists must be index-aligned).  metric mode:
    correct when the planar distance between the two images' coordinates is
    at most ``metric_tolerance_m`` meters.
    """

    mode: str
    frame_tolerance: int = 0
    metric_tolerance_m: float = 0.0
    query_coords: dict[int, tuple[float, float]] = field(default_factory=dict)
    reference_coords: dict[int, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in (MODE_FRAME, MODE_METRIC):
            raise DatasetError(
                f"unknown ground-truth mode {self.mode!r}; "
                f"expected {MODE_FRAME!r} or {MODE_METRIC!r}"
            )
        if self.mode == MODE_FRAME and self.frame_tolerance < 0:
            raise DatasetError("frame_tolerance must be >= 0")
        if self.mode == MODE_METRIC:
            if self.metric_tolerance_m <= 0:
                raise DatasetError("metric_tolerance_m must be > 0")
            if not self.query_coords or not self.reference_coords:
                raise DatasetError("metric mode requires coordinates for both lists")


@dataclass(frozen=True)
class Dataset:
    """Ordered reference and query image sources plus ground truth.

    ``reference_images``/``query_images`` hold file paths, or ``None`` per
    entry for count-only manifests where no pixels are ever read.
    """

    reference_images: tuple[Path | None, ...]
    query_images: tuple[Path | None, ...]
    ground_truth: GroundTruthSpec
    root: Path

    def __post_init__(self) -> None:
        if not self.reference_images or not self.query_images:
            raise DatasetError("reference and query lists must be non-empty")
        if self.ground_truth.mode == MODE_METRIC:
            for name, images, coords in (
                ("reference", self.reference_images, self.ground_truth.reference_coords),
                ("query", self.query_images, self.ground_truth.query_coords),
            ):
                missing = [i for i in range(len(images)) if i not in coords]
                if missing:
                    raise DatasetError(
                        f"metric mode is missing coordinates for {name} "
                        f"indices {missing[:5]}{'...' if len(missing) > 5 else ''}"
                    )

    @property
    def n_references(self) -> int:
        return len(self.reference_images)

    @property
    def n_queries(self) -> int:
        return len(self.query_images)

    def reference_path(self, ref_id: int) -> Path:
        path = self.reference_images[ref_id]
        if path is None:
            raise DatasetError(
                f"reference {ref_id} has no image file (count-only manifest)"
            )
        return path


def _list_images(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise DatasetError(f"image directory does not exist: {directory}")
    paths = sorted(
        p for p in directory.iterdir()
        if p.suffix.lower() in IMAGE_EXTENSIONS and p.is_file()
    )
    if not paths:
        raise DatasetError(f"no images found in {directory}")
    return paths


def _read_list_file(list_path: Path, root: Path) -> list[Path]:
    if not list_path.is_file():
        raise DatasetError(f"image list file does not exist: {list_path}")
    paths = []
    for line in list_path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        paths.append((root / line) if not Path(line).is_absolute() else Path(line))
    if not paths:
        raise DatasetError(f"image list file is empty: {list_path}")
    return paths


def _resolve_images(
    data: dict, prefix: str, root: Path
) -> tuple[Path | None, ...]:
    dir_key, list_key, count_key = f"{prefix}_dir", f"{prefix}_list", f"{prefix}_count"
    given = [k for k in (dir_key, list_key, count_key) if k in data]
    if len(given) != 1:
        raise DatasetError(
            f"manifest must set exactly one of {dir_key}/{list_key}/{count_key}"
        )
    key = given[0]
    if key == count_key:
        count = data[count_key]
        if not isinstance(count, int) or count < 1:
            raise DatasetError(f"{count_key} must be a positive integer")
        return (None,) * count
    if key == dir_key:
        paths = _list_images(root / data[dir_key])
    else:
        paths = _read_list_file(root / data[list_key], root)
    for path in paths:
        if not path.is_file():
            raise DatasetError(f"listed image does not exist: {path}")
    return tuple(paths)


def _read_coords_csv(path: Path) -> tuple[dict, dict]:
    if not path.is_file():
        raise DatasetError(f"coords CSV does not exist: {path}")
    query_coords: dict[int, tuple[float, float]] = {}
    reference_coords: dict[int, tuple[float, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"list", "index", "x_m", "y_m"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise DatasetError(
                f"{path}: coords CSV needs columns list,index,x_m,y_m"
            )
        for row in reader:
            try:
                idx = int(row["index"])
                xy = (float(row["x_m"]), float(row["y_m"]))
            except (TypeError, ValueError) as exc:
                raise DatasetError(f"{path}: bad coords row {row!r}") from exc
            which = row["list"].strip().lower()
            if which == "query":
                query_coords[idx] = xy
            elif which == "reference":
                reference_coords[idx] = xy
            else:
                raise DatasetError(
                    f"{path}: 'list' column must be 'query' or 'reference', "
                    f"got {row['list']!r}"
                )
    return query_coords, reference_coords


def load_dataset(manifest_path: str | Path) -> Dataset:
    """Parse a manifest, resolve its image lists, and validate ground truth."""
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise
    except tomllib.TOMLDecodeError as exc:
        raise DatasetError(f"{manifest_path}: not valid TOML: {exc}") from exc
    root = manifest_path.parent

    references = _resolve_images(data, "reference", root)
    queries = _resolve_images(data, "query", root)

    gt_block = data.get("ground_truth")
    if not isinstance(gt_block, dict):
        raise DatasetError(f"{manifest_path}: missing [ground_truth] table")
    mode = gt_block.get("mode")
    if mode == MODE_FRAME:
        if len(references) != len(queries) and not gt_block.get("assume_aligned", False):
            raise DatasetError(
                "frame-offset mode with unequal list lengths "
                f"({len(queries)} queries vs {len(references)} references); "
                "set ground_truth.assume_aligned = true to assert index alignment"
            )
        spec = GroundTruthSpec(
            mode=MODE_FRAME,
            frame_tolerance=int(gt_block.get("frame_tolerance", 0)),
        )
    elif mode == MODE_METRIC:
        if "coords_csv" not in gt_block:
            raise DatasetError("metric mode requires ground_truth.coords_csv")
        query_coords, reference_coords = _read_coords_csv(root / gt_block["coords_csv"])
        spec = GroundTruthSpec(
            mode=MODE_METRIC,
            metric_tolerance_m=float(gt_block.get("metric_tolerance_m", 0.0)),
            query_coords=query_coords,
            reference_coords=reference_coords,
        )
    else:
        raise DatasetError(
            f"{manifest_path}: unknown ground_truth.mode {mode!r}"
        )

    return Dataset(
        reference_images=references,
        query_images=queries,
        ground_truth=spec,
        root=root,
    )
