"""Offline memory planning: pack profiled allocation traces into static
offset plans, verify them, and replay them through a simulated arena."""

from .core import (
    BlockRequest,
    CapacityTooSmall,
    CollidingPairs,
    DoubleFree,
    DsaInstance,
    EmptyLifetime,
    MemplanError,
    MissingOffset,
    Plan,
    Provenance,
    UnbalancedResume,
    ZeroSize,
    build_instance,
    clique_lower_bound,
    colliding_pairs,
    plan_from_json,
    plan_to_json,
)
from .profiler import (
    NegativeSize,
    Profile,
    TraceEvent,
    TraceSyntaxError,
    UnknownBlockRef,
    alloc,
    free,
    interrupt,
    parse_trace,
    profile_to_instance,
    record,
    resume,
)
from .bestfit import (
    ContainmentViolation,
    IllegalLift,
    OffsetLine,
    OffsetLineSet,
    find_block,
    solve_bestfit,
)
from .exact import (
    ExactResult,
    Infeasible,
    TimeLimitZero,
    TooLarge,
    brute_force_peak,
    solve_exact,
)
from .verifier import (
    VerifyReport,
    Violation,
    ZeroBaseline,
    reduction_vs,
    report_to_json,
    verify_plan,
)
from .arena import (
    AllocAfterClose,
    Arena,
    ExtraRequest,
    InvalidPlan,
    LiveBlocksAtReset,
    OutOfMemory,
    PoolAllocator,
    UnknownId,
    replay_events,
    simulate_pool,
)
from .workloads import GenSpec, cnn_like_trace, generate, rnn_epoch_lengths, rnn_like_trace
from .svg import render_plan

__all__ = [
    "AllocAfterClose",
    "Arena",
    "BlockRequest",
    "CapacityTooSmall",
    "CollidingPairs",
    "ContainmentViolation",
    "DoubleFree",
    "DsaInstance",
    "EmptyLifetime",
    "ExactResult",
    "ExtraRequest",
    "GenSpec",
    "IllegalLift",
    "Infeasible",
    "InvalidPlan",
    "LiveBlocksAtReset",
    "MemplanError",
    "MissingOffset",
    "NegativeSize",
    "OffsetLine",
    "OffsetLineSet",
    "OutOfMemory",
    "Plan",
    "PoolAllocator",
    "Profile",
    "Provenance",
    "TimeLimitZero",
    "TooLarge",
    "TraceEvent",
    "TraceSyntaxError",
    "UnbalancedResume",
    "UnknownBlockRef",
    "UnknownId",
    "VerifyReport",
    "Violation",
    "ZeroBaseline",
    "ZeroSize",
    "alloc",
    "brute_force_peak",
    "build_instance",
    "clique_lower_bound",
    "cnn_like_trace",
    "colliding_pairs",
    "find_block",
    "free",
    "generate",
    "interrupt",
    "parse_trace",
    "plan_from_json",
    "plan_to_json",
    "profile_to_instance",
    "record",
    "reduction_vs",
    "render_plan",
    "replay_events",
    "report_to_json",
    "resume",
    "rnn_epoch_lengths",
    "rnn_like_trace",
    "simulate_pool",
    "solve_bestfit",
    "solve_exact",
    "verify_plan",
]
