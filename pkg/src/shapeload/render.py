"""Deterministic SVG rendering of curves with metric annotations.

The output marks each kink with a circle and each significant trend
reversal with a vertical chunk boundary, with an optional caption carrying
the metric values and the predicted cognitive load.  Identical inputs give
byte-identical SVG.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.etree import ElementTree as ET

from .cogload import DEFAULT_MODEL, CogLoadModel, predict_pcl
from .curves import NormalizedCurve
from .metrics import (
    DEFAULT_CONFIG,
    MetricConfig,
    MetricVector,
    kink_points,
    metric_vector,
    significant_reversals,
)

WIDTH = 640
PLOT_BOTTOM = 360
MARGIN = 40
CAPTION_HEIGHT = 60

CURVE_STYLE = "fill:none;stroke:#1f77b4;stroke-width:2"
KINK_STYLE = "fill:#d62728;stroke:none"
CHUNK_STYLE = "stroke:#2ca02c;stroke-width:1;stroke-dasharray:4 3"
FRAME_STYLE = "fill:#ffffff;stroke:#444444;stroke-width:1"
TEXT_STYLE = "font-family:monospace;font-size:12px;fill:#222222"


@dataclass(frozen=True)
class RenderOptions:
    show_kinks: bool = True
    show_chunks: bool = True
    caption: bool = True
    model: CogLoadModel = DEFAULT_MODEL


@dataclass(frozen=True)
class SvgReport:
    """Rendered SVG bytes plus the annotation counts actually drawn."""

    svg: bytes
    kink_markers: int
    chunk_markers: int


def _px(x: float) -> float:
    return MARGIN + x * (WIDTH - 2 * MARGIN)


def _py(y: float) -> float:
    return PLOT_BOTTOM - MARGIN - y * (PLOT_BOTTOM - 2 * MARGIN)


def render_svg(
    curve: NormalizedCurve,
    vector: MetricVector | None = None,
    options: RenderOptions = RenderOptions(),
    cfg: MetricConfig = DEFAULT_CONFIG,
) -> SvgReport:
    """Render a canonical curve; ``vector`` is computed when not supplied."""
    if vector is None:
        vector = metric_vector(curve, cfg)

    height = PLOT_BOTTOM + (CAPTION_HEIGHT if options.caption else 0)
    root = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(WIDTH),
            "height": str(height),
            "viewBox": f"0 0 {WIDTH} {height}",
        },
    )
    ET.SubElement(
        root,
        "rect",
        {
            "x": str(MARGIN),
            "y": str(MARGIN),
            "width": str(WIDTH - 2 * MARGIN),
            "height": str(PLOT_BOTTOM - 2 * MARGIN),
            "style": FRAME_STYLE,
        },
    )

    points = " ".join(f"{_px(x):.3f},{_py(y):.3f}" for x, y in curve.points)
    ET.SubElement(root, "polyline", {"points": points, "style": CURVE_STYLE})

    chunk_markers = 0
    if options.show_chunks:
        for x, _ in significant_reversals(curve, cfg.chunk_threshold_eps):
            ET.SubElement(
                root,
                "line",
                {
                    "x1": f"{_px(x):.3f}",
                    "y1": str(MARGIN),
                    "x2": f"{_px(x):.3f}",
                    "y2": str(PLOT_BOTTOM - MARGIN),
                    "style": CHUNK_STYLE,
                },
            )
            chunk_markers += 1

    kink_markers = 0
    if options.show_kinks:
        for x, y in kink_points(curve):
            ET.SubElement(
                root,
                "circle",
                {"cx": f"{_px(x):.3f}", "cy": f"{_py(y):.3f}", "r": "4", "style": KINK_STYLE},
            )
            kink_markers += 1

    if options.caption:
        pcl = predict_pcl(vector.value(options.model.metric_id), options.model)
        line1 = (
            f"{curve.plot_id}: length={vector.graph_length:.4f} "
            f"degree={vector.poly_degree} chunks={vector.visual_chunks} "
            f"kinks={vector.num_kinks} inv-kink-dist={vector.avg_kink_dist_inv:.4f}"
        )
        transform = "log " if options.model.log_transformed else ""
        line2 = (
            f"predicted load ({transform}{options.model.metric_id}): "
            f"raw={pcl.raw:.3f} clamped={pcl.clamped:.3f}"
        )
        for i, line in enumerate((line1, line2)):
            text = ET.SubElement(
                root,
                "text",
                {"x": str(MARGIN), "y": str(PLOT_BOTTOM + 22 + 20 * i), "style": TEXT_STYLE},
            )
            text.text = line

    svg = ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"
    return SvgReport(svg=svg, kink_markers=kink_markers, chunk_markers=chunk_markers)
