"""Grouped bar charts of score vectors as standalone SVG."""

from __future__ import annotations

from typing import Mapping, Sequence

from .formats import _shared_domain

__all__ = ["emit_svg_bars", "MAX_SERIES"]

MAX_SERIES = 4
PALETTE = ("#4c72b0", "#dd8452", "#55a868", "#c44e52")

BAR_WIDTH = 12
GROUP_GAP = 10
PLOT_HEIGHT = 240
MARGIN_LEFT = 56
MARGIN_RIGHT = 16
MARGIN_TOP = 40
MARGIN_BOTTOM = 48
TICKS = 5


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def emit_svg_bars(vectors: Sequence[tuple[str, Mapping[str, float]]], title: str = "") -> str:
    """One bar group per node, one bar per vector, linear axis from 0 to the max score."""
    if len(vectors) > MAX_SERIES:
        raise ValueError(f"at most {MAX_SERIES} vectors per chart, got {len(vectors)}")
    tokens = _shared_domain(vectors)
    k = len(vectors)
    top = max((vec[t] for _, vec in vectors for t in tokens), default=0.0)
    scale_max = top if top > 0 else 1.0

    group_w = k * BAR_WIDTH + GROUP_GAP
    width = MARGIN_LEFT + len(tokens) * group_w + MARGIN_RIGHT
    height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM
    base_y = MARGIN_TOP + PLOT_HEIGHT

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="16" text-anchor="middle" font-size="13">{_esc(title)}</text>')

    # y axis with ticks
    out.append(f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{base_y}" stroke="#333"/>')
    out.append(f'<line x1="{MARGIN_LEFT}" y1="{base_y}" x2="{width - MARGIN_RIGHT}" y2="{base_y}" stroke="#333"/>')
    for i in range(TICKS + 1):
        value = scale_max * i / TICKS
        y = base_y - PLOT_HEIGHT * i / TICKS
        out.append(f'<line x1="{MARGIN_LEFT - 4}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" stroke="#333"/>')
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">{value:.4f}</text>'
        )

    for gi, tok in enumerate(tokens):
        x0 = MARGIN_LEFT + GROUP_GAP / 2 + gi * group_w
        for si, (label, vec) in enumerate(vectors):
            h = PLOT_HEIGHT * vec[tok] / scale_max
            x = x0 + si * BAR_WIDTH
            out.append(
                f'<rect class="bar" data-node="{_esc(tok)}" data-series="{si}" '
                f'x="{x:.2f}" y="{base_y - h:.2f}" width="{BAR_WIDTH}" height="{h:.2f}" '
                f'fill="{PALETTE[si]}"><title>{_esc(label)} {_esc(tok)}: {vec[tok]:.4f}</title></rect>'
            )
        cx = x0 + k * BAR_WIDTH / 2
        out.append(f'<text x="{cx:.2f}" y="{base_y + 16}" text-anchor="middle">{_esc(tok)}</text>')

    # legend
    lx = MARGIN_LEFT
    ly = height - 14
    for si, (label, _) in enumerate(vectors):
        out.append(f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{PALETTE[si]}"/>')
        out.append(f'<text x="{lx + 14}" y="{ly}">{_esc(label)}</text>')
        lx += 14 + 7 * len(label) + 18
    out.append("</svg>")
    return "\n".join(out) + "\n"
