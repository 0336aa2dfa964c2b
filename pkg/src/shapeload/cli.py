"""The ``shapeload`` command-line interface.

Subcommands: ``analyze`` (metric CSV for a pool), ``predict`` (append
raw/clamped cognitive-load columns), ``fit`` (fit a model from ratings and
print its fit-statistics table), ``evaluate`` (validate a model or the
rating baseline against rankings/choices), ``select`` (study-pool sets and
group rotation), ``generate`` (synthetic pools), and ``render`` (annotated
SVG).

Exit codes: 0 success, 2 input error, 3 numerical/degenerate-data error.
Errors print one machine-readable JSON object to stderr, and no partial
output files are left behind.  ``SHAPELOAD_THREADS`` caps the per-plot
analysis workers; output order never depends on the worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .cogload import (
    DEFAULT_MODEL,
    CogLoadModel,
    baseline_scores,
    dump_model,
    evaluate_choices,
    evaluate_rankings,
    fit_model,
    load_choices_csv,
    load_model_file,
    load_ratings_csv,
    load_rankings_json,
    model_scores,
    model_to_obj,
    predict_pcl,
)
from .curves import DEFAULT_POLICY, canonical_curve, infer_format, parse_pool, pool_to_json
from .errors import MalformedInput, ShapeLoadError
from .metrics import METRIC_CSV_HEADER, METRIC_IDS, MetricConfig, MetricVector, metric_vector
from .render import RenderOptions, render_svg
from .studygen import StudyDesign, build_study_pool, generate_pool, rotation_assign

PREDICT_CSV_HEADER = METRIC_CSV_HEADER + ["pcl_raw", "pcl_clamped"]


def _fmt_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc


def _write_output(path: str, data: str | bytes) -> None:
    target = Path(path)
    try:
        if isinstance(data, bytes):
            target.write_bytes(data)
        else:
            target.write_text(data, encoding="utf-8")
    except BaseException:
        target.unlink(missing_ok=True)
        raise


def _worker_count() -> int:
    env = os.environ.get("SHAPELOAD_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise MalformedInput(f"SHAPELOAD_THREADS must be an integer, got {env!r}") from exc
    return min(8, os.cpu_count() or 1)


def _metric_config(args) -> MetricConfig:
    return MetricConfig(
        chunk_threshold_eps=args.eps,
        poly_tolerance_tau=args.tau,
        poly_max_degree=args.max_degree,
    )


def _compute_vectors(plots, cfg: MetricConfig) -> list[MetricVector]:
    def analyze(plot):
        return metric_vector(canonical_curve(plot, DEFAULT_POLICY), cfg)

    workers = _worker_count()
    if workers > 1 and len(plots) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(analyze, plots))
    else:
        vectors = [analyze(plot) for plot in plots]
    return sorted(vectors, key=lambda vec: vec.plot_id)


def _parse_int_cell(text: str, column: str) -> int:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError as exc:
        raise MalformedInput(f"metric CSV column {column!r}: bad integer {text!r}") from exc
    if not value.is_integer():
        raise MalformedInput(f"metric CSV column {column!r}: {text!r} is not an integer")
    return int(value)


def _metrics_from_csv(text: str) -> list[MetricVector]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInput("empty metric CSV") from None
    if [h.strip() for h in header] != METRIC_CSV_HEADER:
        raise MalformedInput("metric CSV header does not match the analyze output schema")
    vectors = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(METRIC_CSV_HEADER):
            raise MalformedInput(
                f"metric CSV line {lineno}: expected {len(METRIC_CSV_HEADER)} fields"
            )
        try:
            vectors.append(
                MetricVector(
                    plot_id=row[0],
                    graph_length=float(row[1]),
                    poly_degree=_parse_int_cell(row[2], "poly_degree"),
                    visual_chunks=_parse_int_cell(row[3], "visual_chunks"),
                    num_kinks=_parse_int_cell(row[4], "num_kinks"),
                    avg_kink_dist_inv=float(row[5]),
                )
            )
        except ValueError as exc:
            raise MalformedInput(f"metric CSV line {lineno}: {exc}") from exc
    return vectors


def _looks_like_metric_csv(text: str) -> bool:
    first_line = text.splitlines()[0] if text.splitlines() else ""
    return [h.strip() for h in first_line.split(",")] == METRIC_CSV_HEADER


def _load_vectors(path: str, fmt: str | None, cfg: MetricConfig) -> list[MetricVector]:
    """Accept either an analyze output CSV or a raw plot pool (json/csv)."""
    data = _read_bytes(path)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"{path} is not valid UTF-8: {exc}") from exc
    if _looks_like_metric_csv(text):
        return sorted(_metrics_from_csv(text), key=lambda vec: vec.plot_id)
    plots = parse_pool(data, fmt or infer_format(path))
    return _compute_vectors(plots, cfg)


def _vectors_to_csv(vectors, model: CogLoadModel | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = PREDICT_CSV_HEADER if model is not None else METRIC_CSV_HEADER
    writer.writerow(header)
    for vec in vectors:
        row = vec.as_row()
        cells = [_fmt_cell(row[column]) for column in METRIC_CSV_HEADER]
        if model is not None:
            pcl = predict_pcl(vec.value(model.metric_id), model)
            cells.extend([_fmt_cell(pcl.raw), _fmt_cell(pcl.clamped)])
        writer.writerow(cells)
    return buf.getvalue()


def _load_cli_model(spec: str) -> CogLoadModel:
    if spec == "default":
        return DEFAULT_MODEL
    return load_model_file(spec)


def _cmd_analyze(args) -> int:
    cfg = _metric_config(args)
    plots = parse_pool(_read_bytes(args.input), args.format or infer_format(args.input))
    vectors = _compute_vectors(plots, cfg)
    _write_output(args.output, _vectors_to_csv(vectors))
    return 0


def _cmd_predict(args) -> int:
    cfg = _metric_config(args)
    vectors = _load_vectors(args.input, args.format, cfg)
    model = _load_cli_model(args.model)
    _write_output(args.output, _vectors_to_csv(vectors, model=model))
    return 0


def _fit_table(model: CogLoadModel) -> str:
    fit = model.fit
    label = f"log({model.metric_id})" if model.log_transformed else model.metric_id
    p_text = "<0.001" if fit.p_value < 0.001 else f"{fit.p_value:.3f}"
    lines = [
        f"{'model':<24}{'r_squared':>10}{'mae':>8}{'mse':>8}{'p_value':>9}",
        f"{label:<24}{fit.r_squared:>10.3f}{fit.mae:>8.3f}{fit.mse:>8.3f}{p_text:>9}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_fit(args) -> int:
    cfg = _metric_config(args)
    vectors = _load_vectors(args.input, args.format, cfg)
    ratings = load_ratings_csv(_read_bytes(args.ratings))
    model = fit_model(vectors, ratings, metric_id=args.metric, log_transformed=args.log)
    _write_output(args.output, dump_model(model))
    sys.stdout.write(_fit_table(model))
    return 0


def _cmd_evaluate(args) -> int:
    if args.rankings is None and args.choices is None:
        raise MalformedInput("evaluate needs --rankings and/or --choices")
    if args.model is not None:
        if args.input is None:
            raise MalformedInput("evaluate --model needs --input metrics for scoring")
        cfg = _metric_config(args)
        model = _load_cli_model(args.model)
        vectors = _load_vectors(args.input, args.format, cfg)
        scores = model_scores(model, vectors)
        report: dict = {"scores": "model", "model": model_to_obj(model)}
    else:
        if args.ratings is None:
            raise MalformedInput("evaluate needs --model or --ratings (baseline)")
        scores = baseline_scores(load_ratings_csv(_read_bytes(args.ratings)))
        report = {"scores": "baseline", "model": None}

    report.update(
        {
            "mean_rho": None,
            "sd_rho": None,
            "n_rankings": None,
            "accuracy": None,
            "error_rate": None,
            "tie_freq": None,
            "n_choices": None,
            "tie_tol": args.tie_tol,
        }
    )
    if args.rankings is not None:
        rankings = load_rankings_json(_read_bytes(args.rankings))
        result = evaluate_rankings(scores, rankings)
        report["mean_rho"] = result.mean_rho
        report["sd_rho"] = result.sd_rho
        report["n_rankings"] = len(rankings)
    if args.choices is not None:
        choices = load_choices_csv(_read_bytes(args.choices))
        result = evaluate_choices(scores, choices, tie_tol=args.tie_tol)
        report["accuracy"] = result.accuracy
        report["error_rate"] = result.error_rate
        report["tie_freq"] = result.tie_freq
        report["n_choices"] = len(choices)
    _write_output(args.output, json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_select(args) -> int:
    cfg = _metric_config(args)
    vectors = _load_vectors(args.input, args.format, cfg)
    metric_ids = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metric_ids:
        raise MalformedInput("--metrics must name at least one metric column")
    design = StudyDesign(
        n_groups=args.groups,
        set_size=args.set_size,
        per_metric=args.per_metric,
        final_count=args.groups * args.set_size,
    )
    sets = build_study_pool(vectors, metric_ids, design, seed=args.seed)
    assignment = {
        str(group): {
            "rank_set": asg.rank_set,
            "choice_set": asg.choice_set,
            "rating_sets": list(asg.rating_sets),
        }
        for group, asg in rotation_assign(design).items()
    }
    payload = {
        "design": {
            "n_groups": design.n_groups,
            "set_size": design.set_size,
            "per_metric": design.per_metric,
            "final_count": design.final_count,
        },
        "seed": args.seed,
        "metrics": metric_ids,
        "sets": sets,
        "assignment": assignment,
    }
    _write_output(args.output, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_generate(args) -> int:
    families = GENERATE_FAMILIES[args.family]
    plots = generate_pool(
        count=args.count,
        seed=args.seed,
        families=families,
        n_points=args.n_points,
        complexity_range=(0.0, args.complexity),
    )
    _write_output(args.output, pool_to_json(plots))
    return 0


def _cmd_render(args) -> int:
    cfg = _metric_config(args)
    plots = parse_pool(_read_bytes(args.input), args.format or infer_format(args.input))
    if len(plots) != 1:
        raise MalformedInput(f"render expects exactly one plot, found {len(plots)}")
    curve = canonical_curve(plots[0], DEFAULT_POLICY)
    options = RenderOptions(
        show_kinks=args.kinks,
        show_chunks=args.chunks,
        caption=args.caption,
        model=_load_cli_model(args.model),
    )
    report = render_svg(curve, options=options, cfg=cfg)
    _write_output(args.output, report.svg)
    return 0


GENERATE_FAMILIES = {
    "mixed": ("spline", "tree", "boosted"),
    "spline": ("spline",),
    "tree": ("tree",),
    "boosted": ("boosted",),
}

_HANDLERS = {
    "analyze": _cmd_analyze,
    "predict": _cmd_predict,
    "fit": _cmd_fit,
    "evaluate": _cmd_evaluate,
    "select": _cmd_select,
    "generate": _cmd_generate,
    "render": _cmd_render,
}


def _add_metric_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps", type=float, default=0.02, help="chunk significance threshold")
    parser.add_argument("--tau", type=float, default=0.02, help="polynomial fit RMSE tolerance")
    parser.add_argument("--max-degree", type=int, default=30, help="polynomial degree cap")


def _add_io_flags(parser: argparse.ArgumentParser, output_help: str) -> None:
    parser.add_argument("--input", required=True, help="input file path")
    parser.add_argument("--output", required=True, help=output_help)
    parser.add_argument(
        "--format", choices=["json", "csv"], default=None, help="input format override"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapeload",
        description="Visual-complexity metrics and cognitive-load prediction for shape plots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute the metric CSV for a plot pool")
    _add_io_flags(p, "metric CSV path")
    _add_metric_flags(p)

    p = sub.add_parser("predict", help="metric CSV plus raw/clamped cognitive-load columns")
    _add_io_flags(p, "prediction CSV path")
    _add_metric_flags(p)
    p.add_argument("--model", default="default", help="model JSON path or 'default'")

    p = sub.add_parser("fit", help="fit a cognitive-load model from ratings")
    _add_io_flags(p, "model JSON path")
    _add_metric_flags(p)
    p.add_argument("--ratings", required=True, help="ratings CSV path")
    p.add_argument("--metric", required=True, choices=list(METRIC_IDS))
    p.add_argument("--log", action=argparse.BooleanOptionalAction, default=False,
                   help="fit on ln(1 + metric)")

    p = sub.add_parser("evaluate", help="validate a score source against rankings/choices")
    p.add_argument("--input", default=None, help="metrics or pool path (with --model)")
    p.add_argument("--output", required=True, help="evaluation report JSON path")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    _add_metric_flags(p)
    p.add_argument("--model", default=None, help="model JSON path or 'default'")
    p.add_argument("--ratings", default=None, help="ratings CSV (baseline score source)")
    p.add_argument("--rankings", default=None, help="rankings JSON path")
    p.add_argument("--choices", default=None, help="choices CSV path")
    p.add_argument("--tie-tol", type=float, default=0.0, help="score tie tolerance")

    p = sub.add_parser("select", help="build study sets and the group rotation")
    _add_io_flags(p, "set assignment JSON path")
    _add_metric_flags(p)
    p.add_argument("--metrics", default=",".join(METRIC_IDS),
                   help="comma-separated metric columns")
    p.add_argument("--per-metric", type=int, default=16)
    p.add_argument("--groups", type=int, default=9)
    p.add_argument("--set-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate", help="generate a synthetic plot pool")
    p.add_argument("--output", required=True, help="pool JSON path")
    p.add_argument("--count", type=int, default=144)
    p.add_argument("--family", choices=sorted(GENERATE_FAMILIES), default="mixed")
    p.add_argument("--n-points", type=int, default=101)
    p.add_argument("--complexity", type=float, default=40.0,
                   help="complexity sweeps from 0 to this value across the pool")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("render", help="render one plot as annotated SVG")
    _add_io_flags(p, "SVG path")
    _add_metric_flags(p)
    p.add_argument("--model", default="default", help="model for the caption PCL")
    p.add_argument("--kinks", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--chunks", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--caption", action=argparse.BooleanOptionalAction, default=True)

    return parser


def run(args: argparse.Namespace) -> int:
    """Dispatch one parsed invocation; raises ShapeLoadError subclasses."""
    return _HANDLERS[args.command](args)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ShapeLoadError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(error) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
