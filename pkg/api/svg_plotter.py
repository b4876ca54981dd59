"""
Standalone SVG output: spectrum line plots and parameter-map heatmaps.

Built as plain text by SvgCanvas; no plotting library is involved, so the
bytes depend only on the table. PNG output renders the finished SVG
through cairosvg.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from processors.errors import ConfigError
from processors.sweep_engine import AxisSpec, GridTable, SpectrumTable

WIDTH, HEIGHT = 760, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 150, 40, 60

# Anchors of a viridis-like ramp, dark purple to yellow; expanded to 256 steps below
_VIRIDIS_ANCHORS = [
    (0.000, (68, 1, 84)),
    (0.125, (71, 44, 122)),
    (0.250, (59, 81, 139)),
    (0.375, (44, 113, 142)),
    (0.500, (33, 144, 141)),
    (0.625, (39, 173, 129)),
    (0.750, (92, 200, 99)),
    (0.875, (170, 220, 50)),
    (1.000, (253, 231, 37)),
]


def _build_colormap(steps: int = 256) -> List[str]:
    stops = np.array([a[0] for a in _VIRIDIS_ANCHORS])
    rgb = np.array([a[1] for a in _VIRIDIS_ANCHORS], dtype=float)
    t = np.linspace(0.0, 1.0, steps)
    channels = [np.rint(np.interp(t, stops, rgb[:, c])).astype(int) for c in range(3)]
    return [f"#{r:02x}{g:02x}{b:02x}" for r, g, b in zip(*channels)]


COLORMAP = _build_colormap()

SERIES_STYLES = {
    "R_f": ("#d62728", ""),
    "R_b": ("#d62728", "6,4"),
    "T_f": ("#000000", ""),
    "T_b": ("#000000", "6,4"),
    "contrast_R": ("#1f77b4", ""),
    "contrast_T": ("#2ca02c", ""),
}


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class SvgCanvas:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def header(self):
        self.parts.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.width}" height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
        )
        self.rect(0, 0, self.width, self.height, "#ffffff")

    def rect(self, x, y, w, h, fill, extra=""):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}"{extra}/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:g}"/>\n'
        )

    def polyline(self, points: Sequence[Tuple[float, float]], stroke: str, dash: str = "", width=1.5):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:g}"{dash_attr}/>\n'
        )

    def text(self, x, y, string, size=12, anchor="middle", extra=""):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{extra}>{_escape(string)}</text>\n'
        )

    def get_svg(self) -> bytes:
        return ("".join(self.parts) + "</svg>\n").encode("utf-8")


class _Frame:
    """Maps data coordinates into the plot area"""

    def __init__(self, x_range, y_range, width=WIDTH, height=HEIGHT):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = MARGIN_LEFT
        self.right = width - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = height - MARGIN_BOTTOM

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _ticks(low: float, high: float, count: int = 6) -> np.ndarray:
    return np.linspace(low, high, count)


def _axis_title(axis: AxisSpec) -> str:
    symbol = {"delta": "Δ/2π", "theta": "θ", "omega1": "ω1/2π", "omega2": "ω2/2π",
              "gamma": "γ/2π", "eta": "η/2π"}.get(axis.name, f"{axis.name}/2π")
    return f"{symbol} ({axis.unit})"


def _draw_axes(canvas: SvgCanvas, frame: _Frame, x_title: str, y_title: str):
    canvas.line(frame.left, frame.bottom, frame.right, frame.bottom)
    canvas.line(frame.left, frame.top, frame.left, frame.bottom)
    for x in _ticks(frame.x0, frame.x1):
        canvas.line(frame.px(x), frame.bottom, frame.px(x), frame.bottom + 5)
        canvas.text(frame.px(x), frame.bottom + 20, f"{x:.3g}", size=11)
    for y in _ticks(frame.y0, frame.y1):
        canvas.line(frame.left - 5, frame.py(y), frame.left, frame.py(y))
        canvas.text(frame.left - 8, frame.py(y) + 4, f"{y:.3g}", size=11, anchor="end")
    canvas.text((frame.left + frame.right) / 2, frame.bottom + 45, x_title, size=13)
    mid_y = (frame.top + frame.bottom) / 2
    canvas.text(18, mid_y, y_title, size=13, extra=f' transform="rotate(-90 18 {mid_y:.2f})"')


def spectrum_svg(table: SpectrumTable, quantities: Sequence[str] = ("R_f", "R_b", "T_f", "T_b"),
                 title: Optional[str] = None) -> bytes:
    """Line plot of the selected columns against the sweep axis"""
    top = max(1.0, max(float(np.max(table.column(q))) for q in quantities))
    frame = _Frame((table.axis.start, table.axis.stop), (0.0, top))

    canvas = SvgCanvas()
    canvas.header()
    if title:
        canvas.text(WIDTH / 2, 24, title, size=14)
    _draw_axes(canvas, frame, _axis_title(table.axis), "power")

    for k, quantity in enumerate(quantities):
        stroke, dash = SERIES_STYLES.get(quantity, ("#7f7f7f", ""))
        column = table.column(quantity)
        canvas.polyline([(frame.px(x), frame.py(y)) for x, y in zip(table.values, column)], stroke, dash)

        legend_y = MARGIN_TOP + 10 + 22 * k
        legend_x = WIDTH - MARGIN_RIGHT + 20
        canvas.polyline([(legend_x, legend_y), (legend_x + 30, legend_y)], stroke, dash)
        canvas.text(legend_x + 38, legend_y + 4, quantity, size=12, anchor="start")

    return canvas.get_svg()


def color_for(value: float, low: float, high: float) -> str:
    if high <= low:
        return COLORMAP[0]
    t = (value - low) / (high - low)
    return COLORMAP[int(min(max(t, 0.0), 1.0) * (len(COLORMAP) - 1))]


def heatmap_svg(table: GridTable, title: Optional[str] = None) -> bytes:
    """axis1 runs along x, axis2 up the y axis; one rectangle per cell"""
    a1, a2 = table.axis1, table.axis2
    # Cells are centred on grid points, so the frame extends half a cell past each end
    x_range = (a1.start - a1.cell / 2, a1.stop + a1.cell / 2)
    y_range = (a2.start - a2.cell / 2, a2.stop + a2.cell / 2)
    frame = _Frame(x_range, y_range)
    low, high = float(np.min(table.data)), float(np.max(table.data))

    canvas = SvgCanvas()
    canvas.header()
    canvas.text(WIDTH / 2, 24, title or table.quantity, size=14)

    cell_w = abs(frame.px(a1.cell) - frame.px(0.0))
    cell_h = abs(frame.py(a2.cell) - frame.py(0.0))
    for i, x in enumerate(a1.values()):
        for j, y in enumerate(a2.values()):
            canvas.rect(
                frame.px(x) - cell_w / 2, frame.py(y) - cell_h / 2,
                cell_w, cell_h, color_for(table.data[i, j], low, high),
                extra=' shape-rendering="crispEdges"',
            )
    _draw_axes(canvas, frame, _axis_title(a1), _axis_title(a2))

    # Colorbar
    bar_x = WIDTH - MARGIN_RIGHT + 30
    bar_h = frame.bottom - frame.top
    steps = 64
    for k in range(steps):
        fraction = k / (steps - 1)
        canvas.rect(
            bar_x, frame.bottom - (k + 1) * bar_h / steps, 20, bar_h / steps + 0.5,
            COLORMAP[int(fraction * (len(COLORMAP) - 1))],
        )
    canvas.text(bar_x + 26, frame.bottom + 4, f"{low:.3g}", size=11, anchor="start")
    canvas.text(bar_x + 26, frame.top + 4, f"{high:.3g}", size=11, anchor="start")
    canvas.text(bar_x + 10, frame.top - 10, table.quantity, size=12)
    return canvas.get_svg()


def render_png(svg: bytes, path: str) -> None:
    """Rasterize an emitted SVG with cairosvg"""
    try:
        import cairosvg
    except ImportError as e:
        raise ConfigError(f"PNG output needs cairosvg: {e}", key="png")
    cairosvg.svg2png(bytestring=svg, write_to=path)
