"""Command-line front end: plan, verify, replay, render, gen, bench.

Exit codes: 0 success, 1 invalid result (failed verification, infeasible
instance, strict-mode replay violation), 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .core import (
    BlockRequest,
    DsaInstance,
    MemplanError,
    MissingOffset,
    clique_lower_bound,
    plan_from_json,
    plan_to_json,
)
from .arena import Arena, replay_events, simulate_pool
from .bestfit import solve_bestfit
from .exact import Infeasible, solve_exact
from .profiler import TraceSyntaxError, parse_trace, profile_to_instance, record
from .svg import render_plan
from .verifier import reduction_vs, report_to_json, verify_plan
from .workloads import GenSpec, generate


def _parse_duration(text: str) -> float:
    """'1.5', '2s' or '500ms' -> seconds."""
    text = text.strip()
    if text.endswith("ms"):
        return float(text[:-2]) / 1000.0
    if text.endswith("s"):
        return float(text[:-1])
    return float(text)


def _load_trace(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh.read())


def _load_plan(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return plan_from_json(fh.read())


def cmd_plan(args) -> int:
    events = _load_trace(args.trace)
    instance = profile_to_instance(
        record(events), capacity=args.capacity, alignment=args.align
    )
    lb = clique_lower_bound(instance)
    if args.solver == "exact":
        result = solve_exact(instance, time_limit=_parse_duration(args.time_limit))
        plan = result.plan
        if not result.proven_optimal:
            print(f"not proven optimal within {args.time_limit}; "
                  f"best incumbent kept")
    else:
        plan = solve_bestfit(instance)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(plan_to_json(instance, plan))
    gap = plan.peak - lb
    rel = f"{gap / lb:.1%}" if lb else "n/a"
    print(f"blocks={len(instance.blocks)} peak={plan.peak} lower_bound={lb} "
          f"gap={gap} ({rel})")
    print(f"plan written to {args.out}")
    return 0


def _instance_against_trace(events, file_instance) -> DsaInstance:
    """Verification instance: lifetimes from the trace (ground truth),
    sizes and budget from the plan file (what was actually packed,
    possibly grown).  A plan packing fewer bytes than the trace requests
    could never serve it and is rejected."""
    traced = profile_to_instance(record(events))
    if len(file_instance.blocks) != len(traced.blocks):
        raise MissingOffset(
            f"plan covers {len(file_instance.blocks)} blocks but the trace "
            f"has {len(traced.blocks)}"
        )
    undersized = [
        t.id
        for t, f in zip(traced.blocks, file_instance.blocks)
        if f.size < t.size
    ]
    if undersized:
        raise MemplanError(
            f"plan sizes smaller than the trace requests for blocks {undersized}"
        )
    blocks = tuple(
        BlockRequest(
            id=t.id,
            size=f.size,
            alloc_time=t.alloc_time,
            free_time=t.free_time,
            label=t.label if t.label is not None else f.label,
        )
        for t, f in zip(traced.blocks, file_instance.blocks)
    )
    return DsaInstance(
        blocks,
        capacity=file_instance.capacity,
        alignment=file_instance.alignment,
    )


def cmd_verify(args) -> int:
    events = _load_trace(args.trace)
    file_instance, plan = _load_plan(args.plan)
    instance = _instance_against_trace(events, file_instance)
    report = verify_plan(instance, plan)
    if args.json:
        print(report_to_json(report), end="")
    else:
        print(f"valid={report.valid} peak={report.peak_recomputed} "
              f"capacity_ok={report.capacity_ok} "
              f"utilization={report.utilization:.3f}")
        for v in report.violations:
            print(f"  violation pair={v.pair} overlap_bytes={v.overlap_bytes} "
                  f"overlap_ticks={v.overlap_ticks}")
    return 0 if report.valid else 1


def cmd_replay(args) -> int:
    events = _load_trace(args.trace)
    instance, plan = _load_plan(args.plan)
    arena = Arena(plan, instance, mode=args.mode)
    pool = None
    epochs = []
    for epoch in range(1, args.epochs + 1):
        before = arena.reopt_count
        addresses = replay_events(arena, events)
        pool = simulate_pool(events, pool)
        stats = {
            "epoch": epoch,
            "peak": arena.peak_usage(),
            "reopt_count": arena.reopt_count,
            "fallback_bytes": arena.fallback.peak,
            "reopts_this_epoch": arena.reopt_count - before,
        }
        if args.addresses:
            stats["addresses"] = addresses
        epochs.append(stats)
        print(f"epoch {epoch}: peak={stats['peak']} "
              f"reopt_count={stats['reopt_count']} "
              f"fallback={stats['fallback_bytes']}")
        arena.reset()
    arena_peak = arena.peak_usage()
    pool_peak = pool.peak if pool is not None else 0
    print(f"arena peak {arena_peak} vs pool baseline {pool_peak}", end="")
    if pool_peak:
        print(f" ({reduction_vs(arena_peak, pool_peak):.1%} reduction)")
    else:
        print()
    if args.out:
        doc = {
            "epochs": epochs,
            "arena_peak": arena_peak,
            "pool_peak": pool_peak,
            "forced_closes": arena.forced_closes,
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_render(args) -> int:
    instance, plan = _load_plan(args.plan)
    if args.trace:
        instance = _instance_against_trace(_load_trace(args.trace), instance)
    report = verify_plan(instance, plan)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(render_plan(instance, plan, report))
    status = "valid" if report.valid else f"INVALID ({len(report.violations)} overlaps)"
    print(f"rendered {len(instance.blocks)} blocks ({status}) to {args.out}")
    return 0


def cmd_gen(args) -> int:
    variable = None
    if args.min_len is not None or args.max_len is not None:
        lo = args.min_len if args.min_len is not None else args.max_len
        hi = args.max_len if args.max_len is not None else args.min_len
        variable = (lo, hi)
    spec = GenSpec(
        model=args.model,
        layers=args.layers,
        batch=args.batch,
        seed=args.seed,
        variable_length=variable,
        workspace=not args.no_workspace,
        untimed=args.untimed,
    )
    text = generate(spec)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    n_alloc = sum(1 for line in text.splitlines() if line.startswith("A "))
    print(f"wrote {n_alloc} allocations to {args.out}")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    print(f"{'n':>8} {'time_s':>10} {'peak':>14} {'lower_bound':>14} {'ratio':>7}")
    prev = None
    for n in sizes:
        spec = GenSpec(model="cnn", layers=max(n // 2, 1), seed=args.seed)
        instance = profile_to_instance(record(parse_trace(generate(spec))))
        t0 = time.perf_counter()
        plan = solve_bestfit(instance)
        elapsed = time.perf_counter() - t0
        lb = clique_lower_bound(instance)
        ratio = plan.peak / lb if lb else float("nan")
        scale = f" (x{elapsed / prev:.2f})" if prev else ""
        print(f"{len(instance.blocks):>8} {elapsed:>10.3f} {plan.peak:>14} "
              f"{lb:>14} {ratio:>7.3f}{scale}")
        prev = elapsed
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memplan",
        description="Offline memory planner: profile traces, pack them into "
        "static offset plans, and replay them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve a trace into an offset plan")
    p.add_argument("--trace", required=True)
    p.add_argument("--solver", choices=("bestfit", "exact"), default="bestfit")
    p.add_argument("--capacity", type=int, default=None)
    p.add_argument("--align", type=int, default=1)
    p.add_argument("--time-limit", default="60s")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="check a plan against its trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="replay a trace through the planned arena")
    p.add_argument("--trace", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--mode", choices=("strict", "lenient"), default="lenient")
    p.add_argument("--addresses", action="store_true",
                   help="include the address trace in the JSON report")
    p.add_argument("--out", default=None, help="write a JSON replay report")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("render", help="draw a plan as an SVG diagram")
    p.add_argument("--plan", required=True)
    p.add_argument("--trace", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen", help="generate a synthetic workload trace")
    p.add_argument("--model", choices=("cnn", "rnn"), required=True)
    p.add_argument("--layers", type=int, default=8)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-len", type=int, default=None)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--no-workspace", action="store_true")
    p.add_argument("--untimed", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the heuristic over growing sizes")
    p.add_argument("--sizes", default="2500,5000,10000")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceSyntaxError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except MemplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
