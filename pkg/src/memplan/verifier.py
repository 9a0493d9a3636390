"""Independent plan validation and quality metrics.

Checks are made directly against the colliding-pair set, never through
solver structures: for every pair with intersecting lifetimes the address
spaces must be disjoint, offsets non-negative, and the recorded peak must
match the recomputed one.  Capacity is reported separately so oversized
plans can still be inspected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import (
    DsaInstance,
    MemplanError,
    MissingOffset,
    Plan,
    colliding_pairs,
)


class ZeroBaseline(MemplanError):
    """Reduction requested against a zero baseline peak."""


@dataclass(frozen=True)
class Violation:
    pair: tuple[int, int]
    overlap_bytes: int
    overlap_ticks: int


@dataclass(frozen=True)
class VerifyReport:
    valid: bool
    violations: tuple[Violation, ...]
    peak_recomputed: int
    capacity_ok: bool
    utilization: float


def verify_plan(instance: DsaInstance, plan: Plan) -> VerifyReport:
    """Re-check a plan against its instance from first principles."""
    offsets = {}
    for blk in instance.blocks:
        if blk.id not in plan.offsets:
            raise MissingOffset(f"plan has no offset for block {blk.id}")
        offsets[blk.id] = plan.offsets[blk.id]

    by_id = {b.id: b for b in instance.blocks}
    offsets_ok = all(off >= 0 for off in offsets.values())
    peak = max((offsets[b.id] + b.size for b in instance.blocks), default=0)

    violations = []
    for i, j in sorted(colliding_pairs(instance).pairs):
        bi, bj = by_id[i], by_id[j]
        lo = max(offsets[i], offsets[j])
        hi = min(offsets[i] + bi.size, offsets[j] + bj.size)
        if hi > lo:
            ticks = min(bi.free_time, bj.free_time) - max(
                bi.alloc_time, bj.alloc_time
            )
            violations.append(Violation((i, j), hi - lo, ticks))

    t_lo, t_hi = instance.span()
    span = t_hi - t_lo
    if peak > 0 and span > 0:
        used = sum(b.size * b.lifetime for b in instance.blocks)
        utilization = used / (peak * span)
    else:
        utilization = 0.0

    return VerifyReport(
        valid=not violations and offsets_ok and peak == plan.peak,
        violations=tuple(violations),
        peak_recomputed=peak,
        capacity_ok=peak <= instance.capacity,
        utilization=utilization,
    )


def reduction_vs(plan_peak: int, baseline_peak: int) -> float:
    """Fractional peak reduction against a baseline; negative if worse."""
    if baseline_peak == 0:
        raise ZeroBaseline("cannot compute a reduction against a zero peak")
    return 1.0 - plan_peak / baseline_peak


def report_to_json(report: VerifyReport) -> str:
    doc = {
        "valid": report.valid,
        "peak_recomputed": report.peak_recomputed,
        "capacity_ok": report.capacity_ok,
        "utilization": round(report.utilization, 6),
        "violations": [
            {
                "pair": list(v.pair),
                "overlap_bytes": v.overlap_bytes,
                "overlap_ticks": v.overlap_ticks,
            }
            for v in report.violations
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
