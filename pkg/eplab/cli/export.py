"""
Series export: sampling evaluators on a window, deterministic CSV, and a
minimal self-contained SVG polyline rendering.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from eplab.core.config import Config
from eplab.core.errors import DomainError, EPLabError

logger = logging.getLogger(__name__)

SVG_WIDTH = 640
SVG_HEIGHT = 400
SVG_MARGIN = 40
SVG_COLORS = ("#1f4fbf", "#c0392b", "#2e8b57", "#8e44ad")


@dataclass
class SampleSeries:
    """Named complex curves sampled on a common zeta grid"""
    zeta: List[float]
    curves: Dict[str, List[complex]]
    metadata: Dict[str, str] = field(default_factory=dict)

    def columns(self) -> List[str]:
        if len(self.curves) == 1:
            return ["zeta", "re", "im"]
        names = ["zeta"]
        for name in self.curves:
            names += [f"re_{name}", f"im_{name}"]
        return names

    def rows(self) -> List[Dict[str, str]]:
        out = []
        single = len(self.curves) == 1
        for i, z in enumerate(self.zeta):
            row = {"zeta": format_float(z)}
            for name, values in self.curves.items():
                value = complex(values[i])
                re_key, im_key = ("re", "im") if single else (f"re_{name}", f"im_{name}")
                row[re_key] = format_float(value.real)
                row[im_key] = format_float(value.imag)
            out.append(row)
        return out


def format_float(x: float) -> str:
    """Shortest round-trip-safe text; identical inputs give identical bytes"""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    return format(x, f".{Config.CSV_DIGITS}g")


def sample_series(
    evaluators: Dict[str, Callable[[float], complex]],
    window: Tuple[float, float],
    samples: int,
    metadata: Dict[str, str] = None,
    on_error: str = "raise",
) -> SampleSeries:
    """
    Evaluate every curve on an evenly spaced grid including both end points.

    on_error="raise" lets a DomainError through, tagged with its zeta;
    "nan" records nan + nan*j and carries on.
    """
    if on_error not in ("raise", "nan"):
        raise ValueError(f"on_error must be 'raise' or 'nan', got {on_error!r}")
    grid = [float(z) for z in np.linspace(window[0], window[1], samples)]
    curves: Dict[str, List[complex]] = {name: [] for name in evaluators}
    failures = 0
    for z in grid:
        for name, f in evaluators.items():
            try:
                curves[name].append(complex(f(z)))
            except EPLabError as exc:
                if on_error == "raise":
                    if isinstance(exc, DomainError) and exc.zeta is None:
                        exc.zeta = z
                    raise
                failures += 1
                curves[name].append(complex(math.nan, math.nan))
    if failures:
        logger.info(f"{failures} sample(s) outside the real domain recorded as nan")
    return SampleSeries(grid, curves, dict(metadata or {}))


def write_csv(series: SampleSeries, path: Path) -> Path:
    """Metadata as '# key=value' comment lines, then a header and one row per sample"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for key in sorted(series.metadata):
            f.write(f"# {key}={series.metadata[key]}\n")
        writer = csv.DictWriter(f, fieldnames=series.columns(), lineterminator="\n")
        writer.writeheader()
        writer.writerows(series.rows())
    logger.info(f"Wrote {len(series.zeta)} rows to {path}")
    return path


def _segments(xs: Sequence[float], ys: Sequence[float]) -> List[List[Tuple[float, float]]]:
    """Split a curve at non-finite points"""
    segments, current = [], []
    for x, y in zip(xs, ys):
        if math.isfinite(y):
            current.append((x, y))
        elif current:
            segments.append(current)
            current = []
    if current:
        segments.append(current)
    return segments


def write_svg(series: SampleSeries, path: Path, title: str = "") -> Path:
    """
    Real parts as solid polylines, imaginary parts (when present) dashed, on
    shared axes.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    traces = []
    for index, (name, values) in enumerate(series.curves.items()):
        color = SVG_COLORS[index % len(SVG_COLORS)]
        re = [complex(v).real for v in values]
        im = [complex(v).imag for v in values]
        traces.append((name, color, "", re))
        if any(math.isfinite(y) and y != 0 for y in im):
            traces.append((f"{name} (im)", color, ' stroke-dasharray="6,4"', im))

    finite = [y for *_, ys in traces for y in ys if math.isfinite(y)]
    y_lo, y_hi = (min(finite), max(finite)) if finite else (-1.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = series.zeta[0], series.zeta[-1]
    span_x = (x_hi - x_lo) or 1.0
    inner_w = SVG_WIDTH - 2 * SVG_MARGIN
    inner_h = SVG_HEIGHT - 2 * SVG_MARGIN

    def px(x: float) -> float:
        return SVG_MARGIN + (x - x_lo) / span_x * inner_w

    def py(y: float) -> float:
        return SVG_HEIGHT - SVG_MARGIN - (y - y_lo) / (y_hi - y_lo) * inner_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="{SVG_MARGIN}" y="{SVG_MARGIN}" width="{inner_w}" height="{inner_h}" '
        f'fill="none" stroke="#888"/>',
    ]
    if y_lo < 0 < y_hi:
        lines.append(
            f'<line x1="{SVG_MARGIN}" y1="{py(0):.2f}" x2="{SVG_WIDTH - SVG_MARGIN}" '
            f'y2="{py(0):.2f}" stroke="#ccc"/>'
        )
    if title:
        lines.append(f'<text x="{SVG_MARGIN}" y="{SVG_MARGIN - 12}" font-size="14">{title}</text>')
    lines.append(
        f'<text x="{SVG_MARGIN}" y="{SVG_HEIGHT - 12}" font-size="11">'
        f'zeta [{x_lo:g}, {x_hi:g}]  y [{y_lo:.4g}, {y_hi:.4g}]</text>'
    )
    for name, color, dash, ys in traces:
        for segment in _segments(series.zeta, ys):
            points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in segment)
            lines.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{points}">'
                f"<title>{name}</title></polyline>"
            )
    lines.append("</svg>")
    path.write_text("\n".join(lines) + "\n")
    return path
