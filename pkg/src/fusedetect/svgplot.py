"""Static SVG emission for the two report figures.

Hand-rolled so the byte stream is a pure function of the numbers: fixed
palette, fixed layout arithmetic, fixed float formatting. Two shapes are
enough for the reports: a grouped bar chart with error whiskers and a
labeled scatter plot.
"""

from __future__ import annotations

import math

PALETTE = ("#4878a8", "#e49444", "#5fa052", "#b65fa0", "#a87878")

_MARGIN_LEFT = 62.0
_MARGIN_RIGHT = 18.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 52.0

_N_TICKS = 5


def _fmt(x: float) -> str:
    """Fixed-point coordinate formatting so output never depends on repr."""
    return f"{x:.2f}"


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def _axis_range(lo: float, hi: float) -> tuple:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("axis range must be finite")
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        pad = 0.5 if lo == 0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.08
    return lo - pad, hi + pad


def _header(width: int, height: int, title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" font-weight="bold">'
        f"{_esc(title)}</text>",
    ]


def _y_axis(parts: list, lo: float, hi: float, width: int, height: int, label: str):
    x0 = _MARGIN_LEFT
    x1 = width - _MARGIN_RIGHT
    y0 = height - _MARGIN_BOTTOM
    y1 = _MARGIN_TOP

    def to_y(v: float) -> float:
        return y0 - (v - lo) / (hi - lo) * (y0 - y1)

    for i in range(_N_TICKS + 1):
        v = lo + (hi - lo) * i / _N_TICKS
        y = to_y(v)
        parts.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x1)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_tick_label(v)}</text>'
        )
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="14" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})">{_esc(label)}</text>'
    )
    return to_y


def bar_chart(
    labels,
    series,
    title: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 420,
) -> str:
    """Grouped bars with error whiskers.

    `labels` names the groups along x; `series` is a sequence of
    (name, means, stds) triples, one bar per (group, series) with a
    whisker of +-1 std.
    """
    labels = [str(x) for x in labels]
    series = [(str(n), [float(v) for v in m], [float(v) for v in s]) for n, m, s in series]
    if not labels or not series:
        raise ValueError("bar chart needs at least one group and one series")
    for name, means, stds in series:
        if len(means) != len(labels) or len(stds) != len(labels):
            raise ValueError(f"series {name!r} does not cover every group")
        if any(s < 0 for s in stds):
            raise ValueError(f"series {name!r} has negative deviations")

    los = [m - s for _, ms, ss in series for m, s in zip(ms, ss)]
    his = [m + s for _, ms, ss in series for m, s in zip(ms, ss)]
    lo, hi = _axis_range(min(0.0, min(los)), max(his))

    parts = _header(width, height, title)
    to_y = _y_axis(parts, lo, hi, width, height, y_label)

    x0 = _MARGIN_LEFT
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    group_w = plot_w / len(labels)
    bar_w = group_w * 0.8 / len(series)
    y_zero = to_y(max(lo, min(0.0, hi)))

    for gi, label in enumerate(labels):
        gx = x0 + gi * group_w + group_w * 0.1
        for si, (name, means, stds) in enumerate(series):
            color = PALETTE[si % len(PALETTE)]
            bx = gx + si * bar_w
            top = to_y(means[gi])
            y_top, y_bot = min(top, y_zero), max(top, y_zero)
            parts.append(
                f'<rect x="{_fmt(bx)}" y="{_fmt(y_top)}" width="{_fmt(bar_w * 0.92)}" '
                f'height="{_fmt(y_bot - y_top)}" fill="{color}"/>'
            )
            if stds[gi] > 0:
                cx = bx + bar_w * 0.46
                e_top = to_y(means[gi] + stds[gi])
                e_bot = to_y(means[gi] - stds[gi])
                parts.append(
                    f'<line x1="{_fmt(cx)}" y1="{_fmt(e_top)}" x2="{_fmt(cx)}" '
                    f'y2="{_fmt(e_bot)}" stroke="black" stroke-width="1"/>'
                )
                for ey in (e_top, e_bot):
                    parts.append(
                        f'<line x1="{_fmt(cx - 3)}" y1="{_fmt(ey)}" '
                        f'x2="{_fmt(cx + 3)}" y2="{_fmt(ey)}" '
                        f'stroke="black" stroke-width="1"/>'
                    )
        parts.append(
            f'<text x="{_fmt(gx + group_w * 0.4)}" y="{_fmt(height - _MARGIN_BOTTOM + 16)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f"{_esc(label)}</text>"
        )

    for si, (name, _, _) in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        lx = x0 + si * 120.0
        ly = height - 16.0
        parts.append(
            f'<rect x="{_fmt(lx)}" y="{_fmt(ly - 9)}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 14)}" y="{_fmt(ly)}" font-family="sans-serif" '
            f'font-size="11">{_esc(name)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_plot(
    points,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 640,
    height: int = 420,
) -> str:
    """Labeled scatter: `points` is a sequence of (x, y, label) triples."""
    pts = [(float(x), float(y), str(label)) for x, y, label in points]
    if not pts:
        raise ValueError("scatter plot needs at least one point")

    lo_x, hi_x = _axis_range(min(p[0] for p in pts), max(p[0] for p in pts))
    lo_y, hi_y = _axis_range(min(p[1] for p in pts), max(p[1] for p in pts))

    parts = _header(width, height, title)
    to_y = _y_axis(parts, lo_y, hi_y, width, height, y_label)

    x0 = _MARGIN_LEFT
    x1 = width - _MARGIN_RIGHT
    y0 = height - _MARGIN_BOTTOM

    def to_x(v: float) -> float:
        return x0 + (v - lo_x) / (hi_x - lo_x) * (x1 - x0)

    for i in range(_N_TICKS + 1):
        v = lo_x + (hi_x - lo_x) * i / _N_TICKS
        x = to_x(v)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" y2="{_fmt(y0 + 4)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y0 + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_tick_label(v)}</text>'
        )
    parts.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(height - 10)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">'
        f"{_esc(x_label)}</text>"
    )

    for i, (x, y, label) in enumerate(pts):
        color = PALETTE[i % len(PALETTE)]
        px, py = to_x(x), to_y(y)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(px + 6)}" y="{_fmt(py - 6)}" '
            f'font-family="sans-serif" font-size="10">{_esc(label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
