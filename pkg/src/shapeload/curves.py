"""Shape-plot ingestion, validation, and unit-square normalization.

A shape plot arrives as an ordered ``(x, y)`` point sequence (JSON or CSV).
Every metric downstream operates on the :class:`NormalizedCurve`
representation: x and y affinely rescaled to the unit square so that the
metrics are invariant to the raw axis scales.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateX,
    MalformedInput,
    NonFiniteValue,
    TooFewPoints,
    ZeroXRange,
)

Point = tuple[float, float]

FAMILIES = ("spline", "tree", "boosted", "external")

POOL_CSV_HEADER = ["plot_id", "x", "y"]


@dataclass(frozen=True)
class IngestPolicy:
    """How ingestion resolves duplicate x-values and floating-point flat runs.

    ``duplicate_x`` is ``"merge_mean"`` (duplicate-x points collapse to the
    mean of their y-values; step plots exported with doubled knots stay
    ingestible) or ``"reject"`` for strict pipelines.  ``flat_tolerance`` is
    the normalized y-distance under which consecutive values are treated as
    exactly flat, so float jitter cannot fabricate kinks on step plots.
    """

    duplicate_x: str = "merge_mean"
    flat_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.duplicate_x not in ("merge_mean", "reject"):
            raise MalformedInput(
                f"duplicate_x must be 'merge_mean' or 'reject', got {self.duplicate_x!r}"
            )
        if not math.isfinite(self.flat_tolerance) or self.flat_tolerance < 0:
            raise MalformedInput("flat_tolerance must be finite and >= 0")


DEFAULT_POLICY = IngestPolicy()


def _coerce_points(points) -> tuple[Point, ...]:
    out = []
    for p in points:
        try:
            x, y = p
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"point {p!r} is not an (x, y) pair") from exc
        if isinstance(x, bool) or isinstance(y, bool):
            raise MalformedInput(f"point {p!r} has non-numeric coordinates")
        try:
            out.append((float(x), float(y)))
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"point {p!r} has non-numeric coordinates") from exc
    return tuple(out)


@dataclass(frozen=True)
class ShapePlot:
    """A validated shape plot: unique id plus x-sorted finite points.

    Construct with :meth:`from_points` when the raw data may be unsorted or
    contain duplicate x-values; the plain constructor validates only.
    """

    id: str
    points: tuple[Point, ...]
    source_family: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise MalformedInput("plot id must be a non-empty string")
        if self.source_family is not None and self.source_family not in FAMILIES:
            raise MalformedInput(
                f"unknown source family {self.source_family!r}; expected one of {FAMILIES}"
            )
        object.__setattr__(self, "points", _coerce_points(self.points))
        if len(self.points) < 2:
            raise TooFewPoints(f"plot {self.id!r} has {len(self.points)} point(s); need >= 2")
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise NonFiniteValue(f"plot {self.id!r} contains a non-finite coordinate")
        xs = [p[0] for p in self.points]
        for a, b in zip(xs, xs[1:]):
            if a == b:
                raise DuplicateX(f"plot {self.id!r} has duplicate x = {a!r}")
            if a > b:
                raise MalformedInput(f"plot {self.id!r} points are not sorted by x")

    @classmethod
    def from_points(
        cls,
        plot_id: str,
        points,
        source_family: str | None = None,
        policy: IngestPolicy = DEFAULT_POLICY,
    ) -> "ShapePlot":
        """Sort by x, resolve duplicate x-values per policy, and validate."""
        pts = sorted(_coerce_points(points))
        if len(pts) < 2:
            raise TooFewPoints(f"plot {plot_id!r} has {len(pts)} point(s); need >= 2")
        for x, y in pts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise NonFiniteValue(f"plot {plot_id!r} contains a non-finite coordinate")
        merged: list[Point] = []
        i = 0
        while i < len(pts):
            j = i
            while j + 1 < len(pts) and pts[j + 1][0] == pts[i][0]:
                j += 1
            if j > i and policy.duplicate_x == "reject":
                raise DuplicateX(f"plot {plot_id!r} has duplicate x = {pts[i][0]!r}")
            ys = [pts[k][1] for k in range(i, j + 1)]
            merged.append((pts[i][0], sum(ys) / len(ys)))
            i = j + 1
        return cls(plot_id, tuple(merged), source_family)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.array([p[0] for p in self.points], dtype=float)
        ys = np.array([p[1] for p in self.points], dtype=float)
        return xs, ys


@dataclass(frozen=True)
class NormalizedCurve:
    """A plot rescaled to the unit square; the unit all metrics operate on.

    x runs exactly from 0 to 1.  y spans [0, 1], or sits at the constant 0.5
    when the source y-range was zero (``y_degenerate``), which keeps a flat
    curve centered and gives it graph length exactly 1.
    """

    plot_id: str
    points: tuple[Point, ...]
    y_degenerate: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.plot_id, str) or not self.plot_id:
            raise MalformedInput("plot id must be a non-empty string")
        object.__setattr__(self, "points", _coerce_points(self.points))
        if len(self.points) < 2:
            raise TooFewPoints(
                f"curve {self.plot_id!r} has {len(self.points)} point(s); need >= 2"
            )
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise NonFiniteValue(f"curve {self.plot_id!r} contains a non-finite coordinate")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise MalformedInput(f"curve {self.plot_id!r} x-extent is not [0, 1]")
        for a, b in zip(xs, xs[1:]):
            if a > b:
                raise MalformedInput(f"curve {self.plot_id!r} x-values decrease")
        if min(ys) < 0.0 or max(ys) > 1.0:
            raise MalformedInput(f"curve {self.plot_id!r} y-values leave [0, 1]")
        if self.y_degenerate and any(y != 0.5 for y in ys):
            raise MalformedInput(
                f"curve {self.plot_id!r} marked y-degenerate but y is not constant 0.5"
            )

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.array([p[0] for p in self.points], dtype=float)
        ys = np.array([p[1] for p in self.points], dtype=float)
        return xs, ys


def normalize(plot: ShapePlot) -> NormalizedCurve:
    """Affinely map the plot onto the unit square.

    [min_x, max_x] maps to [0, 1] and [min_y, max_y] maps to [0, 1]; a zero
    y-range maps all y to 0.5 and sets ``y_degenerate``.
    """
    xs, ys = plot.arrays()
    span_x = xs[-1] - xs[0]
    if span_x == 0.0:
        raise ZeroXRange(f"plot {plot.id!r} has zero x-range")
    nx = (xs - xs[0]) / span_x
    y_min = ys.min()
    span_y = ys.max() - y_min
    if span_y == 0.0:
        ny = np.full_like(ys, 0.5)
        degenerate = True
    else:
        ny = (ys - y_min) / span_y
        degenerate = False
    points = tuple(zip(nx.tolist(), ny.tolist()))
    return NormalizedCurve(plot.id, points, y_degenerate=degenerate)


def canonicalize(
    curve: NormalizedCurve, policy: IngestPolicy = DEFAULT_POLICY
) -> NormalizedCurve:
    """Remove exact duplicate consecutive points and snap flat runs.

    A run of consecutive y-values within ``policy.flat_tolerance`` of the
    run's first y is snapped to that first y, so tree-GAM step plots count
    extrema consistently.  Identity on already-canonical input.
    """
    deduped: list[Point] = []
    for p in curve.points:
        if deduped and deduped[-1] == p:
            continue
        deduped.append(p)
    tol = policy.flat_tolerance
    snapped: list[Point] = []
    i = 0
    while i < len(deduped):
        anchor = deduped[i][1]
        j = i
        while j + 1 < len(deduped) and abs(deduped[j + 1][1] - anchor) <= tol:
            j += 1
        for k in range(i, j + 1):
            snapped.append((deduped[k][0], anchor))
        i = j + 1
    return NormalizedCurve(curve.plot_id, tuple(snapped), y_degenerate=curve.y_degenerate)


def canonical_curve(plot: ShapePlot, policy: IngestPolicy = DEFAULT_POLICY) -> NormalizedCurve:
    """Normalize then canonicalize; the standard ingestion pipeline."""
    return canonicalize(normalize(plot), policy)


def _require_number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedInput(f"{context}: expected a number, got {value!r}")
    return float(value)


def _plot_from_obj(obj, policy: IngestPolicy) -> ShapePlot:
    if not isinstance(obj, dict):
        raise MalformedInput(f"plot object must be a JSON object, got {type(obj).__name__}")
    if "id" not in obj or "points" not in obj:
        raise MalformedInput("plot object needs 'id' and 'points' fields")
    plot_id = obj["id"]
    if not isinstance(plot_id, str):
        raise MalformedInput("plot 'id' must be a string")
    raw_points = obj["points"]
    if not isinstance(raw_points, list):
        raise MalformedInput(f"plot {plot_id!r}: 'points' must be an array")
    points = []
    for p in raw_points:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise MalformedInput(f"plot {plot_id!r}: point {p!r} is not an [x, y] pair")
        points.append(
            (
                _require_number(p[0], f"plot {plot_id!r} x"),
                _require_number(p[1], f"plot {plot_id!r} y"),
            )
        )
    family = obj.get("family")
    if family is not None and not isinstance(family, str):
        raise MalformedInput(f"plot {plot_id!r}: 'family' must be a string")
    return ShapePlot.from_points(plot_id, points, source_family=family, policy=policy)


def parse_pool(
    data: bytes | str, fmt: str, policy: IngestPolicy = DEFAULT_POLICY
) -> list[ShapePlot]:
    """Parse one or more plots from JSON or CSV bytes.

    JSON accepts a single plot object or an array of them; CSV needs the
    ``plot_id,x,y`` header with rows grouped by plot id.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = data

    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc}") from exc
        items = obj if isinstance(obj, list) else [obj]
        plots = [_plot_from_obj(item, policy) for item in items]
    elif fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput("empty CSV input") from None
        if [h.strip() for h in header] != POOL_CSV_HEADER:
            raise MalformedInput(
                f"plot CSV header must be {','.join(POOL_CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        grouped: dict[str, list[Point]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise MalformedInput(f"CSV line {lineno}: expected 3 fields, got {len(row)}")
            pid = row[0].strip()
            if not pid:
                raise MalformedInput(f"CSV line {lineno}: empty plot_id")
            try:
                x, y = float(row[1]), float(row[2])
            except ValueError as exc:
                raise MalformedInput(f"CSV line {lineno}: non-numeric coordinate") from exc
            grouped.setdefault(pid, []).append((x, y))
        plots = [
            ShapePlot.from_points(pid, pts, policy=policy) for pid, pts in grouped.items()
        ]
    else:
        raise MalformedInput(f"unknown plot format {fmt!r}; expected 'json' or 'csv'")

    seen: set[str] = set()
    for plot in plots:
        if plot.id in seen:
            raise MalformedInput(f"duplicate plot id {plot.id!r} in pool")
        seen.add(plot.id)
    return plots


def parse_plot(data: bytes | str, fmt: str, policy: IngestPolicy = DEFAULT_POLICY) -> ShapePlot:
    """Parse exactly one plot from JSON or CSV bytes."""
    plots = parse_pool(data, fmt, policy)
    if len(plots) != 1:
        raise MalformedInput(f"expected exactly one plot, found {len(plots)}")
    return plots[0]


def infer_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        return "json"
    if suffix == ".csv":
        return "csv"
    raise MalformedInput(f"cannot infer format from {path!r}; pass --format")


def load_pool(
    path: str | Path, fmt: str | None = None, policy: IngestPolicy = DEFAULT_POLICY
) -> list[ShapePlot]:
    """Read a pool file; format inferred from the suffix unless given."""
    fmt = fmt or infer_format(path)
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    return parse_pool(data, fmt, policy)


def plot_to_obj(plot: ShapePlot) -> dict:
    obj: dict = {"id": plot.id, "points": [[x, y] for x, y in plot.points]}
    if plot.source_family is not None:
        obj["family"] = plot.source_family
    return obj


def pool_to_json(plots) -> str:
    """Serialize plots as the pool JSON array (full float precision)."""
    return json.dumps([plot_to_obj(p) for p in plots], indent=2) + "\n"
