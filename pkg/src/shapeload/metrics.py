"""The five visual-complexity metrics of a normalized shape plot.

All metrics operate on a canonical :class:`~shapeload.curves.NormalizedCurve`
(unit square, flat runs snapped) and are therefore invariant to affine
rescaling of the raw plot axes.

Conventions worth knowing:

* A kink is a strict local extremum of the piecewise-linear curve; a flat
  plateau bounded by a rise then a fall (or fall then rise) counts once,
  located at the plateau midpoint.  Endpoints never count.
* Visual chunks = significant trend reversals + 1.  A reversal is
  significant when its y-excursion from both neighboring surviving
  extrema/endpoints exceeds ``chunk_threshold_eps``; sub-threshold wiggles
  are pruned smallest-first.
* Kink distance is Euclidean in normalized coordinates, capturing both
  horizontal density and vertical swing; the reported metric is the inverse
  of the mean distance so that larger means more complex.
* Polynomial degree is the smallest degree whose least-squares fit reaches
  ``poly_tolerance_tau`` RMSE on normalized y, evaluated in an orthogonal
  polynomial basis so high degrees stay numerically sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev

from .curves import NormalizedCurve
from .errors import MalformedInput, NegativeMetric

METRIC_IDS = (
    "graph_length",
    "poly_degree",
    "visual_chunks",
    "num_kinks",
    "avg_kink_dist_inv",
)

METRIC_CSV_HEADER = [
    "plot_id",
    "graph_length",
    "poly_degree",
    "visual_chunks",
    "num_kinks",
    "avg_kink_dist_inv",
    "log_graph_length",
    "log_poly_degree",
    "log_visual_chunks",
    "log_num_kinks",
    "log_avg_kink_dist_inv",
]


@dataclass(frozen=True)
class MetricConfig:
    """Tunable thresholds for the chunk and polynomial-degree metrics."""

    chunk_threshold_eps: float = 0.02
    poly_tolerance_tau: float = 0.02
    poly_max_degree: int = 30

    def __post_init__(self) -> None:
        if not 0.0 <= self.chunk_threshold_eps < 1.0:
            raise MalformedInput("chunk_threshold_eps must lie in [0, 1)")
        if not math.isfinite(self.poly_tolerance_tau) or self.poly_tolerance_tau < 0:
            raise MalformedInput("poly_tolerance_tau must be finite and >= 0")
        if self.poly_max_degree < 1:
            raise MalformedInput("poly_max_degree must be >= 1")


DEFAULT_CONFIG = MetricConfig()


def log_metric(m: float) -> float:
    """ln(1 + m), the transform applied to every metric before model fitting."""
    if m < 0:
        raise NegativeMetric(f"metric value must be >= 0, got {m!r}")
    return math.log1p(m)


@dataclass(frozen=True)
class MetricVector:
    """The five raw metric values for one plot.

    Log-transformed counterparts are derived on demand via
    :meth:`log_value`, which keeps them exactly ln(1 + raw).
    """

    plot_id: str
    graph_length: float
    poly_degree: int
    visual_chunks: int
    num_kinks: int
    avg_kink_dist_inv: float

    def value(self, metric_id: str) -> float:
        if metric_id not in METRIC_IDS:
            raise MalformedInput(f"unknown metric {metric_id!r}; expected one of {METRIC_IDS}")
        return float(getattr(self, metric_id))

    def log_value(self, metric_id: str) -> float:
        return log_metric(self.value(metric_id))

    def as_row(self) -> dict:
        """The metric CSV row: plot id, five raw values, five log values."""
        row: dict = {"plot_id": self.plot_id}
        for mid in METRIC_IDS:
            row[mid] = getattr(self, mid)
        for mid in METRIC_IDS:
            row[f"log_{mid}"] = self.log_value(mid)
        return row


def graph_length(curve: NormalizedCurve) -> float:
    """Total Euclidean arc length of the polyline in normalized coordinates."""
    xs, ys = curve.arrays()
    return float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))


def kink_points(curve: NormalizedCurve) -> list[tuple[float, float]]:
    """Locations of all kinks, in x order.

    Scans consecutive nonzero y-differences; each sign change contributes one
    kink.  A plateau bounded by opposite slopes yields a single kink at the
    plateau midpoint.
    """
    pts = curve.points
    segments: list[tuple[int, int, int]] = []  # (sign, left index, right index)
    for i in range(len(pts) - 1):
        dy = pts[i + 1][1] - pts[i][1]
        if dy != 0.0:
            segments.append((1 if dy > 0 else -1, i, i + 1))
    kinks: list[tuple[float, float]] = []
    for (sign_a, _, end_a), (sign_b, start_b, _) in zip(segments, segments[1:]):
        if sign_a != sign_b:
            x = 0.5 * (pts[end_a][0] + pts[start_b][0])
            kinks.append((x, pts[end_a][1]))
    return kinks


def count_kinks(curve: NormalizedCurve) -> int:
    """Number of local maxima and minima of the curve."""
    return len(kink_points(curve))


def significant_reversals(curve: NormalizedCurve, eps: float) -> list[tuple[float, float]]:
    """Kinks that survive the amplitude-significance filter.

    Candidate kinks sit between the curve endpoints in an alternating
    sequence.  The smallest adjacent y-gap is pruned repeatedly while it does
    not exceed ``eps``: an interior max/min pair is dropped together (the
    wiggle disappears), a kink adjacent to an endpoint is dropped alone.  The
    survivors all swing by more than ``eps`` against both neighbors.
    """
    anchors = [curve.points[0], *kink_points(curve), curve.points[-1]]
    while len(anchors) > 2:
        gaps = [abs(anchors[i + 1][1] - anchors[i][1]) for i in range(len(anchors) - 1)]
        i = min(range(len(gaps)), key=gaps.__getitem__)
        if gaps[i] > eps:
            break
        if i == 0:
            del anchors[1]
        elif i + 1 == len(anchors) - 1:
            del anchors[i]
        else:
            del anchors[i : i + 2]
    return anchors[1:-1]


def visual_chunks(curve: NormalizedCurve, cfg: MetricConfig = DEFAULT_CONFIG) -> int:
    """Number of regions between significant trend reversals (reversals + 1)."""
    return len(significant_reversals(curve, cfg.chunk_threshold_eps)) + 1


def avg_kink_distance_inv(curve: NormalizedCurve) -> float:
    """Inverse of the mean Euclidean distance between consecutive kinks.

    Fewer than two kinks pins the metric to 0, the simplest possible value.
    """
    kinks = kink_points(curve)
    if len(kinks) < 2:
        return 0.0
    xs = np.array([k[0] for k in kinks])
    ys = np.array([k[1] for k in kinks])
    mean_dist = float(np.mean(np.hypot(np.diff(xs), np.diff(ys))))
    return 1.0 / mean_dist


def polynomial_degree(curve: NormalizedCurve, cfg: MetricConfig = DEFAULT_CONFIG) -> int:
    """Lowest polynomial degree whose least-squares RMSE reaches tolerance.

    One QR factorization of the Chebyshev design matrix yields the residual
    of every prefix degree at once: with orthonormal columns q_i, the sum of
    squared errors at degree d is ``y.y - sum_{i<=d} (q_i.y)^2``.  Returns
    ``poly_max_degree`` when no degree qualifies.
    """
    xs, ys = curve.arrays()
    max_fit = min(cfg.poly_max_degree, len(xs) - 1)
    t = 2.0 * xs - 1.0
    design = chebyshev.chebvander(t, max_fit)
    q, _ = np.linalg.qr(design)
    coeffs = q.T @ ys
    sse = np.maximum(ys @ ys - np.cumsum(coeffs**2), 0.0)
    rmse = np.sqrt(sse / len(ys))
    qualifying = np.nonzero(rmse <= cfg.poly_tolerance_tau)[0]
    if qualifying.size:
        return int(qualifying[0])
    return cfg.poly_max_degree


def metric_vector(curve: NormalizedCurve, cfg: MetricConfig = DEFAULT_CONFIG) -> MetricVector:
    """All five metrics of a canonical curve."""
    return MetricVector(
        plot_id=curve.plot_id,
        graph_length=graph_length(curve),
        poly_degree=polynomial_degree(curve, cfg),
        visual_chunks=visual_chunks(curve, cfg),
        num_kinks=count_kinks(curve),
        avg_kink_dist_inv=avg_kink_distance_inv(curve),
    )
