from dataclasses import dataclass
from typing import List, Sequence

from jinja2 import Environment, PackageLoader, select_autoescape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass
class Tick:
    position: float
    label: str


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


class TemplateRenderer:
    """Renders the SVG charts shipped in swishnet/templates"""

    def __init__(self, width: int = 720, height: int = 420, margin: int = 56):
        self.width = width
        self.height = height
        self.margin = margin
        self.jinja_env = Environment(
            loader=PackageLoader("swishnet", "templates"),
            autoescape=select_autoescape(["svg", "jinja2"]),
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def render_line_chart(self, title: str, series: Sequence[Series], *, x_label: str, y_label: str) -> str:
        """Render a linear-axis line chart with one polyline per series"""
        xs = [float(v) for s in series for v in s.x]
        ys = [float(v) for s in series for v in s.y]
        x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
        y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
        if x_hi == x_lo:
            x_hi = x_lo + 1.0
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

        plot_w = self.width - 2 * self.margin
        plot_h = self.height - 2 * self.margin

        def sx(v: float) -> float:
            return self.margin + (v - x_lo) / (x_hi - x_lo) * plot_w

        def sy(v: float) -> float:
            return self.height - self.margin - (v - y_lo) / (y_hi - y_lo) * plot_h

        lines = [
            {
                "label": s.label,
                "color": PALETTE[i % len(PALETTE)],
                "points": " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(s.x, s.y)),
            }
            for i, s in enumerate(series)
        ]
        template = self.jinja_env.get_template("line_chart.svg.jinja2")
        return template.render(
            title=title,
            width=self.width,
            height=self.height,
            margin=self.margin,
            x_label=x_label,
            y_label=y_label,
            x_ticks=[Tick(sx(v), f"{v:g}") for v in _ticks(x_lo, x_hi)],
            y_ticks=[Tick(sy(v), f"{v:.3g}") for v in _ticks(y_lo, y_hi)],
            lines=lines,
        )
