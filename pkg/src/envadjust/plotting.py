"""Two-panel SVG rendering of an ensemble and its adjusted p-values.

Panel 1 shows the observed curve over the permutation ensemble with the
dashed envelope for testing at the requested level (the widest depth-based
envelope whose exceedance probability is at most alpha). Panel 2 shows the
three adjusted p-value families on a log scale with a reference line at
alpha. The output is plain hand-assembled SVG so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .adjust import PvalueReport
from .curves import CurveSet
from .envelopes import KappaTable, build_envelope
from .ranks import minrank_depths, pointwise_ranks

WIDTH, HEIGHT = 900, 680
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B, GAP = 64, 20, 28, 44, 56
PANEL_H = (HEIGHT - MARGIN_T - MARGIN_B - GAP) / 2

FAMILY_STYLE = {
    "single_step": "#1f77b4",
    "step_down": "#2ca02c",
    "erl": "#9467bd",
}


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _polyline(xs, ys, **attrs) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    at = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polyline fill="none" {at} points="{pts}" />'


def _text(x, y, s, **attrs) -> str:
    at = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}" {at}>{s}</text>'


class _Scale:
    def __init__(self, lo, hi, out_lo, out_hi):
        span = hi - lo if hi > lo else 1.0
        self.lo, self.span = lo, span
        self.out_lo, self.out_span = out_lo, out_hi - out_lo

    def __call__(self, v):
        return self.out_lo + (v - self.lo) / self.span * self.out_span


def level_envelope(curves: CurveSet, direction, alpha: Fraction):
    """Widest depth-based envelope testing at level alpha, or None.

    Picks the largest kappa_j with kappa_j / M <= alpha; exiting that
    envelope anywhere is equivalent to the global p-value being <= alpha.
    """
    ranks = pointwise_ranks(curves, direction)
    depths = minrank_depths(ranks)
    table = KappaTable.from_depths(depths)
    m = curves.n_curves
    best_j = None
    for j in range(1, m + 1):
        if Fraction(table.kappa(j), m) <= alpha:
            best_j = j
        else:
            break
    if best_j is None:
        return None
    env = build_envelope(curves, depths, best_j)
    return None if env.is_empty else env


def render_report_svg(curves: CurveSet, report: PvalueReport, alpha) -> str:
    """Render the two-panel figure; returns the SVG document as a string."""
    if len(curves.grid) != report.n_points or curves.n_curves != report.n_curves:
        raise ValueError(
            "curves and report disagree: "
            f"{curves.n_curves}x{curves.n_points} ensemble vs report for "
            f"{report.n_curves} curves on {report.n_points} points"
        )
    alpha = alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))
    grid = curves.grid.points
    m = curves.n_curves

    env = level_envelope(curves, report.direction, alpha)
    y_all = [curves.values.min(), curves.values.max()]
    if env is not None:
        y_all += [env.lower.min(), env.upper.max()]
    pad = 0.05 * (max(y_all) - min(y_all) or 1.0)

    x = _Scale(grid[0], grid[-1], MARGIN_L, WIDTH - MARGIN_R)
    y1 = _Scale(min(y_all) - pad, max(y_all) + pad, MARGIN_T + PANEL_H, MARGIN_T)
    p2_top = MARGIN_T + PANEL_H + GAP
    y2 = _Scale(np.log10(1.0 / m), 0.0, p2_top + PANEL_H, p2_top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white" />',
    ]

    # panel 1: permuted curves first so the observed curve draws on top
    xs = [x(g) for g in grid]
    for i in range(1, m):
        parts.append(
            _polyline(
                xs,
                [y1(v) for v in curves.values[i]],
                **{"class": "curve"},
                stroke="#c8c8c8",
                stroke_width="0.6",
            )
        )
    if env is not None:
        for bound in (env.lower, env.upper):
            parts.append(
                _polyline(
                    xs,
                    [y1(v) for v in bound],
                    **{"class": "envelope"},
                    stroke="#d62728",
                    stroke_width="1.2",
                    stroke_dasharray="6 4",
                )
            )
    else:
        parts.append(
            _text(
                MARGIN_L + 8,
                MARGIN_T + 16,
                f"no envelope drawable at level {alpha} "
                f"(smallest attainable exceedance exceeds it)",
                **{"class": "warning"},
                fill="#d62728",
            )
        )
    parts.append(
        _polyline(
            xs,
            [y1(v) for v in curves.observed],
            **{"class": "curve curve-observed"},
            stroke="black",
            stroke_width="1.8",
        )
    )
    parts.append(_text(MARGIN_L, MARGIN_T - 10, "statistic curves and envelope"))

    # panel 2: adjusted p-value families, log scale
    for name, color in FAMILY_STYLE.items():
        ks = getattr(report, f"{name}_k")
        ys = [y2(np.log10(k / m)) for k in ks]
        parts.append(
            _polyline(
                xs,
                ys,
                **{"class": f"pvalue pvalue-{name}"},
                stroke=color,
                stroke_width="1.4",
            )
        )
    a_y = y2(float(np.log10(float(alpha))))
    if p2_top <= a_y <= p2_top + PANEL_H:
        parts.append(
            _polyline(
                [MARGIN_L, WIDTH - MARGIN_R],
                [a_y, a_y],
                **{"class": "alpha-line"},
                stroke="#444444",
                stroke_width="1",
                stroke_dasharray="3 3",
            )
        )
        parts.append(_text(WIDTH - MARGIN_R - 70, a_y - 4, f"alpha = {alpha}"))
    parts.append(_text(MARGIN_L, p2_top - 10, "adjusted p-values (log scale)"))
    for i, (name, color) in enumerate(FAMILY_STYLE.items()):
        parts.append(
            _text(MARGIN_L + 8 + 130 * i, p2_top + 16, name, fill=color)
        )

    # frames and a few ticks
    for top in (MARGIN_T, p2_top):
        parts.append(
            f'<rect x="{MARGIN_L}" y="{_fmt(top)}" '
            f'width="{WIDTH - MARGIN_L - MARGIN_R}" height="{_fmt(PANEL_H)}" '
            f'fill="none" stroke="#333333" stroke-width="1" />'
        )
    for frac in (0.0, 0.5, 1.0):
        g = grid[0] + frac * (grid[-1] - grid[0])
        parts.append(
            _text(x(g) - 10, HEIGHT - MARGIN_B + 26, f"{g:.4g}", fill="#333333")
        )
    for exp in range(int(np.ceil(np.log10(1.0 / m))), 1):
        parts.append(
            _text(MARGIN_L - 44, y2(exp) + 4, f"1e{exp}", fill="#333333")
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
