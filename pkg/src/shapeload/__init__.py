"""shapeload: visual-complexity metrics and cognitive-load prediction for
GAM shape plots.

The pipeline is: ingest plots (:mod:`shapeload.curves`), compute the five
visual-property metrics (:mod:`shapeload.metrics`), predict or fit
cognitive-load models and validate them against study data
(:mod:`shapeload.cogload`, :mod:`shapeload.stats`), generate synthetic
pools and study designs (:mod:`shapeload.studygen`), and render annotated
SVG (:mod:`shapeload.render`).
"""

from .cogload import (
    DEFAULT_MODEL,
    ChoiceRecord,
    ChoiceResult,
    CogLoadModel,
    EvaluationReport,
    PclPrediction,
    RankingRecord,
    RankingResult,
    RatingRecord,
    baseline_scores,
    evaluate_choices,
    evaluate_rankings,
    fit_model,
    mean_ratings,
    model_scores,
    predict_pcl,
)
from .curves import (
    DEFAULT_POLICY,
    IngestPolicy,
    NormalizedCurve,
    ShapePlot,
    canonical_curve,
    canonicalize,
    load_pool,
    normalize,
    parse_plot,
    parse_pool,
)
from .metrics import (
    DEFAULT_CONFIG,
    METRIC_IDS,
    MetricConfig,
    MetricVector,
    avg_kink_distance_inv,
    count_kinks,
    graph_length,
    kink_points,
    log_metric,
    metric_vector,
    polynomial_degree,
    visual_chunks,
)
from .render import RenderOptions, SvgReport, render_svg
from .stats import RegressionFit, f_test_pvalue, ols_fit, spearman_rho
from .studygen import (
    GeneratorSpec,
    GroupAssignment,
    StudyDesign,
    build_study_pool,
    generate_plot,
    generate_pool,
    rotation_assign,
    select_equal_interval,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "DEFAULT_MODEL",
    "DEFAULT_POLICY",
    "METRIC_IDS",
    "ChoiceRecord",
    "ChoiceResult",
    "CogLoadModel",
    "EvaluationReport",
    "GeneratorSpec",
    "GroupAssignment",
    "IngestPolicy",
    "MetricConfig",
    "MetricVector",
    "NormalizedCurve",
    "PclPrediction",
    "RankingRecord",
    "RankingResult",
    "RatingRecord",
    "RegressionFit",
    "RenderOptions",
    "ShapePlot",
    "StudyDesign",
    "SvgReport",
    "avg_kink_distance_inv",
    "baseline_scores",
    "build_study_pool",
    "canonical_curve",
    "canonicalize",
    "count_kinks",
    "evaluate_choices",
    "evaluate_rankings",
    "f_test_pvalue",
    "fit_model",
    "generate_plot",
    "generate_pool",
    "graph_length",
    "kink_points",
    "load_pool",
    "log_metric",
    "mean_ratings",
    "metric_vector",
    "model_scores",
    "normalize",
    "ols_fit",
    "parse_plot",
    "parse_pool",
    "polynomial_degree",
    "predict_pcl",
    "render_svg",
    "rotation_assign",
    "select_equal_interval",
    "spearman_rho",
    "visual_chunks",
]
