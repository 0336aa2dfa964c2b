"""Cognitive-load prediction, model fitting, and validation.

The shipped default model maps the log-transformed number of kinks to
perceived cognitive load on the 9-point mental-effort scale:

    PCL = 1.724 + 1.377 * ln(1 + num_kinks)

Fitting reproduces that pipeline from per-participant rating records, and
the evaluation operations validate any plot->score map against ranking and
binary-choice records, with the mean participant rating available as the
user-derived baseline.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CoverageWarning,
    EmptyInput,
    MalformedInput,
    MissingMetric,
    MissingScore,
    NegativeMetric,
)
from .metrics import METRIC_IDS, MetricVector, log_metric
from .stats import RegressionFit, ols_fit, spearman_rho

SCALE_MIN = 1.0
SCALE_MAX = 9.0

# Below this many ratings a plot's mean is flagged as low-coverage.
MIN_RATINGS_PER_PLOT = 12

RATINGS_CSV_HEADER = ["plot_id", "participant_id", "rating"]
CHOICES_CSV_HEADER = ["participant_id", "plot_a", "plot_b", "chosen"]


@dataclass(frozen=True)
class CogLoadModel:
    """One metric-based linear model of perceived cognitive load."""

    metric_id: str
    log_transformed: bool
    intercept: float
    slope: float
    fit: RegressionFit | None = None

    def __post_init__(self) -> None:
        if self.metric_id not in METRIC_IDS:
            raise MalformedInput(
                f"unknown metric {self.metric_id!r}; expected one of {METRIC_IDS}"
            )

    def score(self, metric_value: float) -> float:
        """Unclamped model output for one metric value."""
        if metric_value < 0:
            raise NegativeMetric(f"metric value must be >= 0, got {metric_value!r}")
        x = log_metric(metric_value) if self.log_transformed else metric_value
        return self.intercept + self.slope * x


DEFAULT_MODEL = CogLoadModel(
    metric_id="num_kinks", log_transformed=True, intercept=1.724, slope=1.377
)


@dataclass(frozen=True)
class PclPrediction:
    """Raw model output plus the value clipped to the 1-9 rating scale.

    The scale is bounded but the model formula is not; clamping happens only
    here at the reporting layer so fitting and validation stay untouched.
    """

    raw: float
    clamped: float


def predict_pcl(metric_value: float, model: CogLoadModel = DEFAULT_MODEL) -> PclPrediction:
    """Predict perceived cognitive load for one metric value."""
    raw = model.score(metric_value)
    return PclPrediction(raw=raw, clamped=min(max(raw, SCALE_MIN), SCALE_MAX))


@dataclass(frozen=True)
class RatingRecord:
    """One participant's mental-effort rating of one plot (9-point scale)."""

    plot_id: str
    participant_id: str
    rating: int

    def __post_init__(self) -> None:
        if isinstance(self.rating, bool) or not isinstance(self.rating, int):
            raise MalformedInput(f"rating must be an integer, got {self.rating!r}")
        if not SCALE_MIN <= self.rating <= SCALE_MAX:
            raise MalformedInput(f"rating must lie in [1, 9], got {self.rating}")


@dataclass(frozen=True)
class RankingRecord:
    """One plot ordering produced by a participant, most cognitive load first."""

    participant_id: str
    task_id: str
    ordered_plot_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ordered_plot_ids", tuple(self.ordered_plot_ids))
        if len(self.ordered_plot_ids) < 2:
            raise MalformedInput("a ranking needs at least 2 plots")
        if len(set(self.ordered_plot_ids)) != len(self.ordered_plot_ids):
            raise MalformedInput("ranking contains duplicate plot ids")


@dataclass(frozen=True)
class ChoiceRecord:
    """One forced choice: which of two plots imposes more cognitive load."""

    participant_id: str
    plot_a: str
    plot_b: str
    chosen: str

    def __post_init__(self) -> None:
        if self.plot_a == self.plot_b:
            raise MalformedInput("choice compares a plot against itself")
        if self.chosen not in (self.plot_a, self.plot_b):
            raise MalformedInput(
                f"chosen plot {self.chosen!r} is neither {self.plot_a!r} nor {self.plot_b!r}"
            )


@dataclass(frozen=True)
class RankingResult:
    """Mean and population standard deviation of per-ranking Spearman rho."""

    mean_rho: float
    sd_rho: float


@dataclass(frozen=True)
class ChoiceResult:
    """Choice-agreement frequencies; the three always sum to 1."""

    accuracy: float
    error_rate: float
    tie_freq: float


@dataclass(frozen=True)
class EvaluationReport:
    """Combined ranking and binary-choice validation of one score source."""

    mean_rho: float
    sd_rho: float
    accuracy: float
    error_rate: float
    tie_freq: float


def mean_ratings(ratings: Iterable[RatingRecord]) -> dict[str, float]:
    """Arithmetic mean rating per plot on the continuous 1-9 scale.

    Plots with fewer than ``MIN_RATINGS_PER_PLOT`` ratings are kept but
    reported through a :class:`CoverageWarning`.
    """
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for rec in ratings:
        sums[rec.plot_id] = sums.get(rec.plot_id, 0.0) + rec.rating
        counts[rec.plot_id] = counts.get(rec.plot_id, 0) + 1
    if not sums:
        raise EmptyInput("no rating records")
    sparse = sorted(pid for pid, c in counts.items() if c < MIN_RATINGS_PER_PLOT)
    if sparse:
        warnings.warn(
            f"{len(sparse)} plot(s) have fewer than {MIN_RATINGS_PER_PLOT} ratings: "
            f"{', '.join(sparse[:5])}{'...' if len(sparse) > 5 else ''}",
            CoverageWarning,
            stacklevel=2,
        )
    return {pid: sums[pid] / counts[pid] for pid in sorted(sums)}


def baseline_scores(ratings: Iterable[RatingRecord]) -> dict[str, float]:
    """The user-derived baseline: mean cognitive-load rating per plot.

    Identical to :func:`mean_ratings`; exposed separately so the baseline is
    a first-class score source next to the metric-based models.
    """
    return mean_ratings(ratings)


def _rating_targets(ratings) -> dict[str, float]:
    if isinstance(ratings, Mapping):
        return {str(pid): float(v) for pid, v in ratings.items()}
    return mean_ratings(ratings)


def fit_model(
    metrics: Iterable[MetricVector],
    ratings,
    metric_id: str,
    log_transformed: bool,
) -> CogLoadModel:
    """OLS of mean rating on one (optionally log-transformed) metric.

    ``ratings`` is a list of :class:`RatingRecord` or a precomputed
    plot_id -> rating mapping.  Rated plots without a metric raise
    :class:`MissingMetric`; plots with metrics but no ratings are excluded
    with a :class:`CoverageWarning` (real study exports are ragged).
    """
    vectors: dict[str, MetricVector] = {}
    for vec in metrics:
        if vec.plot_id in vectors:
            raise MalformedInput(f"duplicate metric vector for plot {vec.plot_id!r}")
        vectors[vec.plot_id] = vec
    targets = _rating_targets(ratings)
    unmatched = sorted(set(targets) - set(vectors))
    if unmatched:
        raise MissingMetric(
            f"{len(unmatched)} rated plot(s) have no metric value: "
            f"{', '.join(unmatched[:5])}{'...' if len(unmatched) > 5 else ''}"
        )
    unrated = sorted(set(vectors) - set(targets))
    if unrated:
        warnings.warn(
            f"excluding {len(unrated)} plot(s) without ratings from the fit",
            CoverageWarning,
            stacklevel=2,
        )
    ids = sorted(targets)
    xs = [
        vectors[pid].log_value(metric_id) if log_transformed else vectors[pid].value(metric_id)
        for pid in ids
    ]
    ys = [targets[pid] for pid in ids]
    fit = ols_fit(xs, ys)
    return CogLoadModel(
        metric_id=metric_id,
        log_transformed=log_transformed,
        intercept=fit.intercept,
        slope=fit.slope,
        fit=fit,
    )


def model_scores(model: CogLoadModel, metrics: Iterable[MetricVector]) -> dict[str, float]:
    """Raw (unclamped) model score per plot; the score source for validation."""
    return {vec.plot_id: model.score(vec.value(model.metric_id)) for vec in metrics}


def evaluate_rankings(
    scores: Mapping[str, float], rankings: Iterable[RankingRecord]
) -> RankingResult:
    """Per-ranking Spearman rho between user order and score-induced order.

    Higher score means more load; a ranking that lists plots exactly in
    descending score order contributes rho = 1.  Reports the mean and the
    population standard deviation across rankings.
    """
    rhos = []
    for rec in rankings:
        model_values = []
        for pid in rec.ordered_plot_ids:
            if pid not in scores:
                raise MissingScore(f"ranked plot {pid!r} has no score")
            model_values.append(float(scores[pid]))
        n = len(rec.ordered_plot_ids)
        user_load = list(range(n, 0, -1))  # most load first
        rhos.append(spearman_rho(user_load, model_values))
    if not rhos:
        raise EmptyInput("no ranking records")
    arr = np.asarray(rhos)
    return RankingResult(mean_rho=float(arr.mean()), sd_rho=float(arr.std()))


def evaluate_choices(
    scores: Mapping[str, float],
    choices: Iterable[ChoiceRecord],
    tie_tol: float = 0.0,
) -> ChoiceResult:
    """Accuracy, error rate, and tie frequency of a score source on choices.

    A choice is a tie when the two scores differ by at most ``tie_tol``
    (default exact equality); otherwise it is correct when the higher-scored
    plot is the one the participant chose.
    """
    if tie_tol < 0:
        raise MalformedInput(f"tie_tol must be >= 0, got {tie_tol!r}")
    n_correct = n_error = n_tie = 0
    total = 0
    for rec in choices:
        for pid in (rec.plot_a, rec.plot_b):
            if pid not in scores:
                raise MissingScore(f"compared plot {pid!r} has no score")
        score_a = float(scores[rec.plot_a])
        score_b = float(scores[rec.plot_b])
        total += 1
        if abs(score_a - score_b) <= tie_tol:
            n_tie += 1
        else:
            higher = rec.plot_a if score_a > score_b else rec.plot_b
            if higher == rec.chosen:
                n_correct += 1
            else:
                n_error += 1
    if total == 0:
        raise EmptyInput("no choice records")
    return ChoiceResult(
        accuracy=n_correct / total,
        error_rate=n_error / total,
        tie_freq=n_tie / total,
    )


# ---------------------------------------------------------------------------
# Study-data and model serialization


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc
    return data


def _csv_rows(text: str, header: list[str], kind: str):
    reader = csv.reader(io.StringIO(text))
    try:
        found = next(reader)
    except StopIteration:
        raise MalformedInput(f"empty {kind} CSV") from None
    if [h.strip() for h in found] != header:
        raise MalformedInput(
            f"{kind} CSV header must be {','.join(header)!r}, got {','.join(found)!r}"
        )
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedInput(
                f"{kind} CSV line {lineno}: expected {len(header)} fields, got {len(row)}"
            )
        yield lineno, [field.strip() for field in row]


def load_ratings_csv(data: bytes | str) -> list[RatingRecord]:
    """Parse ``plot_id,participant_id,rating`` rows."""
    records = []
    for lineno, (pid, participant, rating) in _csv_rows(
        _decode(data), RATINGS_CSV_HEADER, "ratings"
    ):
        try:
            value = int(rating)
        except ValueError as exc:
            raise MalformedInput(f"ratings CSV line {lineno}: bad rating {rating!r}") from exc
        records.append(RatingRecord(plot_id=pid, participant_id=participant, rating=value))
    return records


def load_choices_csv(data: bytes | str) -> list[ChoiceRecord]:
    """Parse ``participant_id,plot_a,plot_b,chosen`` rows."""
    return [
        ChoiceRecord(participant_id=participant, plot_a=a, plot_b=b, chosen=chosen)
        for _, (participant, a, b, chosen) in _csv_rows(
            _decode(data), CHOICES_CSV_HEADER, "choices"
        )
    ]


def load_rankings_json(data: bytes | str) -> list[RankingRecord]:
    """Parse the rankings JSON array of participant/task/order objects."""
    try:
        obj = json.loads(_decode(data))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid rankings JSON: {exc}") from exc
    if not isinstance(obj, list):
        raise MalformedInput("rankings JSON must be an array")
    records = []
    for item in obj:
        if not isinstance(item, dict):
            raise MalformedInput(f"ranking entry must be an object, got {type(item).__name__}")
        try:
            participant = item["participant"]
            task = item["task"]
            order = item["order_most_load_first"]
        except KeyError as exc:
            raise MalformedInput(f"ranking entry missing field {exc}") from exc
        if not isinstance(order, list) or not all(isinstance(p, str) for p in order):
            raise MalformedInput("order_most_load_first must be an array of plot ids")
        records.append(
            RankingRecord(
                participant_id=str(participant), task_id=str(task), ordered_plot_ids=tuple(order)
            )
        )
    return records


def model_to_obj(model: CogLoadModel) -> dict:
    stats = None
    if model.fit is not None:
        stats = {
            "r_squared": model.fit.r_squared,
            "mae": model.fit.mae,
            "mse": model.fit.mse,
            "p_value": model.fit.p_value,
            "n": model.fit.n,
        }
    return {
        "metric": model.metric_id,
        "log": model.log_transformed,
        "intercept": model.intercept,
        "slope": model.slope,
        "stats": stats,
    }


def dump_model(model: CogLoadModel) -> str:
    return json.dumps(model_to_obj(model), indent=2) + "\n"


def load_model(data: bytes | str) -> CogLoadModel:
    """Parse the model JSON written by :func:`dump_model`."""
    try:
        obj = json.loads(_decode(data))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid model JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedInput("model JSON must be an object")
    try:
        metric = obj["metric"]
        log = obj["log"]
        intercept = obj["intercept"]
        slope = obj["slope"]
    except KeyError as exc:
        raise MalformedInput(f"model JSON missing field {exc}") from exc
    if not isinstance(log, bool):
        raise MalformedInput("model 'log' must be a boolean")
    fit = None
    stats = obj.get("stats")
    if stats is not None:
        if not isinstance(stats, dict):
            raise MalformedInput("model 'stats' must be an object or null")
        try:
            fit = RegressionFit(
                intercept=float(intercept),
                slope=float(slope),
                r_squared=float(stats["r_squared"]),
                mae=float(stats["mae"]),
                mse=float(stats["mse"]),
                p_value=float(stats["p_value"]),
                n=int(stats["n"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"model 'stats' is malformed: {exc}") from exc
    return CogLoadModel(
        metric_id=str(metric),
        log_transformed=log,
        intercept=float(intercept),
        slope=float(slope),
        fit=fit,
    )


def load_model_file(path: str | Path) -> CogLoadModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    return load_model(data)
