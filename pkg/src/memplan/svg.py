"""Static SVG diagrams of plans: time on x, address space on y.

One rectangle per block, offset 0 at the bottom, with a dashed guide at
the peak and, when it fits the scale, the capacity.  Blocks involved in
overlap violations are drawn in a distinct style.  Output is hand-emitted
markup with no rendering dependency.
"""

from __future__ import annotations

from .core import DsaInstance, Plan
from .verifier import VerifyReport, verify_plan

_PALETTE = (
    "#4e79a7",
    "#59a14f",
    "#9c755f",
    "#f28e2b",
    "#76b7b2",
    "#edc948",
    "#b07aa1",
    "#af7aa1",
)
_VIOLATION_FILL = "#e15759"

_WIDTH = 880
_HEIGHT = 460
_MARGIN = 46


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_plan(
    instance: DsaInstance,
    plan: Plan,
    report: VerifyReport | None = None,
) -> str:
    """SVG text for the plan; violations (if any) highlighted."""
    if report is None:
        report = verify_plan(instance, plan)
    bad_ids = {i for v in report.violations for i in v.pair}

    t_lo, t_hi = instance.span()
    peak = report.peak_recomputed
    # keep blocks readable: include the capacity line only when it is
    # within 2x of the peak, otherwise note it off-scale
    y_top = max(peak, 1)
    cap_in_scale = instance.capacity <= 2 * y_top
    if cap_in_scale:
        y_top = max(y_top, instance.capacity)

    plot_w = _WIDTH - 2 * _MARGIN
    plot_h = _HEIGHT - 2 * _MARGIN
    span = max(t_hi - t_lo, 1)
    sx = plot_w / span
    sy = plot_h / y_top

    def px(t: int) -> float:
        return _MARGIN + (t - t_lo) * sx

    def py(offset: int) -> float:
        return _HEIGHT - _MARGIN - offset * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        # axes
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="#333" stroke-width="1"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="#333" stroke-width="1"/>',
        f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 10}" font-size="12" '
        f'text-anchor="middle" fill="#333">time (ticks)</text>',
        f'<text x="14" y="{_HEIGHT // 2}" font-size="12" text-anchor="middle" '
        f'fill="#333" transform="rotate(-90 14 {_HEIGHT // 2})">offset (bytes)</text>',
    ]

    for blk in instance.blocks:
        off = plan.offsets[blk.id]
        x = px(blk.alloc_time)
        w = max((blk.free_time - blk.alloc_time) * sx, 1.0)
        h = max(blk.size * sy, 1.0)
        y = py(off) - h
        if blk.id in bad_ids:
            fill = _VIOLATION_FILL
            extra = ' stroke="#7b1416" stroke-width="2" stroke-dasharray="4,2"'
        else:
            fill = _PALETTE[(blk.id - 1) % len(_PALETTE)]
            extra = ' stroke="#2b2b2b" stroke-width="0.5"'
        label = f" {blk.label}" if blk.label else ""
        title = (
            f"block {blk.id}{label}: {blk.size} B, "
            f"[{blk.alloc_time},{blk.free_time}) @ {off}"
        )
        out.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{fill}" fill-opacity="0.85"{extra}>'
            f"<title>{title}</title></rect>"
        )

    if peak > 0:
        y = py(peak)
        out.append(
            f'<line x1="{_MARGIN}" y1="{_fmt(y)}" x2="{_WIDTH - _MARGIN}" '
            f'y2="{_fmt(y)}" stroke="#d62728" stroke-width="1" '
            f'stroke-dasharray="6,3"/>'
        )
        out.append(
            f'<text x="{_WIDTH - _MARGIN}" y="{_fmt(y - 4)}" font-size="11" '
            f'text-anchor="end" fill="#d62728">peak {peak}</text>'
        )
    if cap_in_scale and instance.capacity > 0:
        y = py(instance.capacity)
        out.append(
            f'<line x1="{_MARGIN}" y1="{_fmt(y)}" x2="{_WIDTH - _MARGIN}" '
            f'y2="{_fmt(y)}" stroke="#555" stroke-width="1" '
            f'stroke-dasharray="2,4"/>'
        )
        out.append(
            f'<text x="{_WIDTH - _MARGIN}" y="{_fmt(y - 4)}" font-size="11" '
            f'text-anchor="end" fill="#555">capacity {instance.capacity}</text>'
        )
    elif not cap_in_scale:
        out.append(
            f'<text x="{_WIDTH - _MARGIN}" y="{_MARGIN - 8}" font-size="11" '
            f'text-anchor="end" fill="#555">capacity {instance.capacity} '
            f"(off scale)</text>"
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
