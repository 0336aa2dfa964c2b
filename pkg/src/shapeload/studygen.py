"""Synthetic shape-plot generation and study-pool assembly.

Three parametric families emulate the visual range of GAM shape plots
without training any model: ``spline`` (smooth, few kinks), ``tree``
(piecewise-constant staircase), and ``boosted`` (smooth trend plus
high-frequency small-amplitude perturbations).  The pool operations
implement equal-interval plot selection, the 9x16 set partition, and the
rotating group-to-task assignment.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .curves import ShapePlot
from .errors import (
    InsufficientCandidates,
    MalformedInput,
    MissingMetric,
    PoolTooSmall,
    TooFewGroups,
)
from .metrics import MetricVector

GENERATOR_FAMILIES = ("spline", "tree", "boosted")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one synthetic plot; output is a pure function of these."""

    family: str
    n_points: int = 101
    complexity: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in GENERATOR_FAMILIES:
            raise MalformedInput(
                f"unknown family {self.family!r}; expected one of {GENERATOR_FAMILIES}"
            )
        if self.n_points < 2:
            raise MalformedInput("n_points must be >= 2")
        if not math.isfinite(self.complexity) or self.complexity < 0:
            raise MalformedInput("complexity must be finite and >= 0")
        if self.seed < 0:
            raise MalformedInput("seed must be a non-negative integer")


@dataclass(frozen=True)
class StudyDesign:
    """Pool-partition parameters: groups x set size must equal the final count."""

    n_groups: int = 9
    set_size: int = 16
    per_metric: int = 16
    final_count: int = 144

    def __post_init__(self) -> None:
        for name in ("n_groups", "set_size", "per_metric", "final_count"):
            if getattr(self, name) < 1:
                raise MalformedInput(f"{name} must be >= 1")
        if self.n_groups * self.set_size != self.final_count:
            raise MalformedInput(
                f"n_groups * set_size must equal final_count "
                f"({self.n_groups} * {self.set_size} != {self.final_count})"
            )


@dataclass(frozen=True)
class GroupAssignment:
    """Which set a group ranks, decides on, and rates."""

    rank_set: int
    choice_set: int
    rating_sets: tuple[int, int]


def _monotone_base(xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # Slope stays in [1 - 0.25*pi, 1 + 0.25*pi] subset of (0.2, 1.8): strictly increasing.
    bend = rng.uniform(-1.0, 1.0)
    return xs + 0.25 * bend * np.sin(math.pi * xs)


def _oscillation(
    xs: np.ndarray, complexity: float, rng: np.random.Generator
) -> np.ndarray:
    """A sinusoid tuned so the sampled curve reverses ~``complexity`` times.

    Frequency complexity/2 gives two extrema per cycle; the amplitude is set
    from a slope-ratio gain > 1 so the oscillation always wins against the
    unit base trend.  Frequency is capped so the sample grid resolves it.
    """
    freq = min(complexity / 2.0, (len(xs) - 1) / 8.0)
    if freq <= 0.0:
        return np.zeros_like(xs)
    gain = rng.uniform(2.0, 4.0)
    amp = gain / (2.0 * math.pi * freq)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return amp * np.sin(2.0 * math.pi * freq * xs + phase)


def _spline_ys(xs: np.ndarray, complexity: float, rng: np.random.Generator) -> np.ndarray:
    return _monotone_base(xs, rng) + _oscillation(xs, complexity, rng)


def _tree_ys(xs: np.ndarray, complexity: float, rng: np.random.Generator) -> np.ndarray:
    n_jumps = min(int(math.ceil(complexity)), len(xs) - 1)
    if n_jumps == 0:
        return np.full(len(xs), rng.uniform(0.0, 1.0))
    cuts = np.sort(rng.choice(np.arange(1, len(xs)), size=n_jumps, replace=False))
    levels = rng.uniform(0.0, 1.0, size=n_jumps + 1)
    ys = np.empty(len(xs))
    start = 0
    for level, cut in zip(levels, [*cuts.tolist(), len(xs)]):
        ys[start:cut] = level
        start = cut
    return ys


def _boosted_ys(xs: np.ndarray, complexity: float, rng: np.random.Generator) -> np.ndarray:
    ys = _monotone_base(xs, rng) + _oscillation(xs, complexity, rng)
    # High-frequency low-amplitude ripple; derivative share ~0.5 so it
    # textures the curve without dominating the reversal count.
    ripple_freq = min(max(complexity, 2.0) * 1.618, (len(xs) - 1) / 6.0)
    ripple_amp = 0.5 / (2.0 * math.pi * ripple_freq)
    ripple_phase = rng.uniform(0.0, 2.0 * math.pi)
    return ys + ripple_amp * np.sin(2.0 * math.pi * ripple_freq * xs + ripple_phase)


_PROFILES = {"spline": _spline_ys, "tree": _tree_ys, "boosted": _boosted_ys}


def generate_plot(spec: GeneratorSpec, plot_id: str | None = None) -> ShapePlot:
    """Deterministically synthesize one plot from its spec."""
    rng = np.random.default_rng(spec.seed)
    xs = np.linspace(0.0, 1.0, spec.n_points)
    ys = _PROFILES[spec.family](xs, spec.complexity, rng)
    if plot_id is None:
        plot_id = f"{spec.family}-{spec.seed:x}"
    points = tuple(zip(xs.tolist(), ys.tolist()))
    return ShapePlot(plot_id, points, source_family=spec.family)


def generate_pool(
    count: int,
    seed: int,
    families: Sequence[str] = GENERATOR_FAMILIES,
    n_points: int = 101,
    complexity_range: tuple[float, float] = (0.0, 40.0),
) -> list[ShapePlot]:
    """A deterministic pool: families cycle, complexity sweeps the range.

    Each plot draws from its own seed-derived random stream, so generation
    stays deterministic under any parallel execution order.
    """
    if count < 1:
        raise MalformedInput("count must be >= 1")
    lo, hi = complexity_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or hi < lo:
        raise MalformedInput("complexity_range must be finite with 0 <= lo <= hi")
    child_seeds = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    plots = []
    for i in range(count):
        family = families[i % len(families)]
        complexity = lo if count == 1 else lo + (hi - lo) * i / (count - 1)
        spec = GeneratorSpec(
            family=family,
            n_points=n_points,
            complexity=complexity,
            seed=int(child_seeds[i]),
        )
        plots.append(generate_plot(spec, plot_id=f"{family}-{i:04d}"))
    return plots


def _row_value(entry, metric_id: str) -> tuple[str, float]:
    if isinstance(entry, MetricVector):
        return entry.plot_id, entry.value(metric_id)
    if isinstance(entry, Mapping):
        try:
            pid = entry["plot_id"]
        except KeyError as exc:
            raise MalformedInput("metric row is missing 'plot_id'") from exc
        try:
            return str(pid), float(entry[metric_id])
        except KeyError as exc:
            raise MissingMetric(f"plot {pid!r} has no value for metric {metric_id!r}") from exc
    raise MalformedInput(f"pool entries must be MetricVector or mapping, got {type(entry).__name__}")


def select_equal_interval(pool: Sequence, metric_id: str, k: int) -> list[str]:
    """Pick k plots at equal index intervals of the metric-sorted pool.

    Quantile spacing (index round(i*(n-1)/(k-1))) always yields k plots and
    includes the metric's min and max; ties order by plot id.
    """
    values = [_row_value(entry, metric_id) for entry in pool]
    n = len(values)
    if k < 2 or n < k:
        raise PoolTooSmall(f"need pool size >= k >= 2, got n={n}, k={k}")
    values.sort(key=lambda item: (item[1], item[0]))
    indices = [math.floor(i * (n - 1) / (k - 1) + 0.5) for i in range(k)]
    return [values[i][0] for i in indices]


def build_study_pool(
    pool: Sequence, metric_ids: Sequence[str], design: StudyDesign, seed: int
) -> list[list[str]]:
    """Equal-interval selection per metric, then seeded reduction into sets.

    The per-metric selections are deduplicated, uniformly subsampled to
    ``design.final_count`` plots, and partitioned uniformly at random into
    ``design.n_groups`` sets of ``design.set_size`` (ids sorted within each
    set).  Sets are pairwise disjoint by construction.
    """
    candidates: set[str] = set()
    for metric_id in metric_ids:
        candidates.update(select_equal_interval(pool, metric_id, design.per_metric))
    if len(candidates) < design.final_count:
        raise InsufficientCandidates(
            f"only {len(candidates)} candidate plots after deduplication; "
            f"need {design.final_count}"
        )
    rng = np.random.default_rng(seed)
    ordered = sorted(candidates)
    perm = rng.permutation(len(ordered))
    selected = [ordered[i] for i in perm[: design.final_count]]
    return [
        sorted(selected[g * design.set_size : (g + 1) * design.set_size])
        for g in range(design.n_groups)
    ]


def rotation_assign(design: StudyDesign) -> dict[int, GroupAssignment]:
    """The rotating group-to-set pattern: group g ranks set g, decides on
    g+1, and rates g+2 and g+3, wrapping modulo the number of groups."""
    n = design.n_groups
    if n < 4:
        raise TooFewGroups(f"rotation needs at least 4 groups, got {n}")

    def wrap(value: int) -> int:
        return (value - 1) % n + 1

    return {
        g: GroupAssignment(
            rank_set=g,
            choice_set=wrap(g + 1),
            rating_sets=(wrap(g + 2), wrap(g + 3)),
        )
        for g in range(1, n + 1)
    }
