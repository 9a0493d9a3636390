"""Replay-time allocators: the planned arena and the dynamic pool baseline.

An Arena serves precomputed addresses in request order: the k-th monitored
allocation of an epoch receives ``base + offset_k`` straight from the
plan.  Requests larger than profiled trigger reoptimization with the
grown sizes; requests inside interrupt regions fall back to a dynamic
pool.  The PoolAllocator is also usable standalone as the baseline it
models: reuse the smallest pooled block that fits, whole, otherwise
bump-allocate, and under a finite capacity flush the pool before giving
up.

No real memory moves here; reoptimization remaps live blocks in place,
which a real integration would have to pay for with data movement or by
deferring to a pass boundary.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .core import (
    DoubleFree,
    DsaInstance,
    MemplanError,
    Plan,
    UnbalancedResume,
    build_instance,
)
from .bestfit import solve_bestfit
from .profiler import ALLOC, FREE, INTERRUPT, RESUME, TraceEvent
from .verifier import verify_plan


class InvalidPlan(MemplanError):
    """Arena opened over a plan that fails verification."""


class ExtraRequest(MemplanError):
    """More monitored allocations than the plan covers (strict mode)."""


class AllocAfterClose(MemplanError):
    """Allocation from a closed arena."""


class LiveBlocksAtReset(MemplanError):
    """Reset with monitored blocks still live (strict mode)."""


class UnknownId(MemplanError):
    """Free of an allocation reference that was never served."""


class OutOfMemory(MemplanError):
    """Pool bump allocation beyond a finite capacity, even after a flush."""


class PoolAllocator:
    """Dynamic pool: smallest sufficient free block, reused whole.

    Freed blocks keep their full size (no splitting) and return to the
    pool.  When a bump allocation would exceed a finite capacity, all
    pooled blocks are dropped first; if the request still does not fit,
    allocation fails.  ``peak`` is the high-water mark of bytes held.
    """

    def __init__(self, capacity: int | None = None):
        self.capacity = capacity
        self._free: list[tuple[int, int]] = []  # (size, addr), sorted
        self._live: dict[int, tuple[int, int]] = {}  # ref -> (addr, size)
        self._ever: set[int] = set()
        self._next_ref = 1
        self._cursor = 0  # bump frontier; addresses are never reused
        self._reserved = 0  # bytes currently held (live + pooled)
        self._peak = 0

    @property
    def peak(self) -> int:
        return self._peak

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def last_ref(self) -> int:
        """Reference of the most recent allocation."""
        return self._next_ref - 1

    def alloc(self, size: int) -> int:
        if size < 1:
            raise ValueError(f"pool allocation size must be >= 1, got {size}")
        ref = self._next_ref
        self._next_ref += 1
        self._ever.add(ref)
        idx = bisect.bisect_left(self._free, (size, -1))
        if idx < len(self._free):
            bsize, addr = self._free.pop(idx)
            self._live[ref] = (addr, bsize)
            return addr
        if self.capacity is not None and self._reserved + size > self.capacity:
            # flush: drop every unused block, then retry the bump
            for bsize, _ in self._free:
                self._reserved -= bsize
            self._free.clear()
            if self._reserved + size > self.capacity:
                raise OutOfMemory(
                    f"request of {size} bytes over capacity {self.capacity} "
                    f"with {self._reserved} bytes live"
                )
        addr = self._cursor
        self._cursor += size
        self._reserved += size
        if self._reserved > self._peak:
            self._peak = self._reserved
        self._live[ref] = (addr, size)
        return addr

    def free(self, ref: int) -> None:
        if ref not in self._live:
            if ref in self._ever:
                raise DoubleFree(f"pool allocation {ref} freed twice")
            raise UnknownId(f"unknown pool allocation {ref}")
        addr, size = self._live.pop(ref)
        bisect.insort(self._free, (size, addr))

    def live_bytes(self) -> int:
        return sum(size for _, size in self._live.values())


@dataclass(frozen=True)
class _BlockDef:
    size: int
    alloc_time: int
    free_time: int
    label: str | None


# per-epoch allocation bookkeeping
_MANAGED = "managed"
_POOL = "pool"
_ZERO = "zero"


class Arena:
    """Serves one sequential request stream against a static plan.

    Monitored allocations are matched positionally: the running counter
    selects the next planned block, so replayed traces must keep the
    profiled event structure.  ``mode`` decides how surprises are handled:
    ``"strict"`` raises on extra requests and on resets with live blocks,
    ``"lenient"`` (the default) grows the plan and force-closes.
    """

    def __init__(
        self,
        plan: Plan,
        instance: DsaInstance,
        base: int = 0,
        mode: str = "lenient",
    ):
        if mode not in ("strict", "lenient"):
            raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
        report = verify_plan(instance, plan)
        if not report.valid:
            raise InvalidPlan(
                f"plan fails verification ({len(report.violations)} violations)"
            )
        self.base = base
        self.mode = mode
        self.fallback = PoolAllocator()
        self.reopt_count = 0
        self.forced_closes = 0
        self._plan = plan
        self._defs: list[_BlockDef] = [
            _BlockDef(b.size, b.alloc_time, b.free_time, b.label)
            for b in instance.blocks
        ]
        self._alignment = instance.alignment
        self._expected = {b.id: b.size for b in instance.blocks}
        self._observed: dict[int, int] = {}
        self._lam = 1
        self._alloc_seq: list[tuple[str, int]] = []
        self._freed: set[int] = set()
        self._live: dict[int, tuple[int, int]] = {}  # block id -> (addr, size)
        self._depth = 0
        self._closed = False

    @property
    def plan(self) -> Plan:
        return self._plan

    @property
    def lam(self) -> int:
        """Id the next monitored allocation will receive."""
        return self._lam

    @property
    def interrupted_depth(self) -> int:
        return self._depth

    def live_blocks(self) -> dict[int, tuple[int, int]]:
        return dict(self._live)

    def observed_sizes(self) -> dict[int, int]:
        return dict(self._observed)

    def expected_sizes(self) -> dict[int, int]:
        return dict(self._expected)

    def peak_usage(self) -> int:
        """Plan bytes plus whatever the fallback pool ever held."""
        return self._plan.peak + self.fallback.peak

    def interrupt(self) -> None:
        self._depth += 1

    def resume(self) -> None:
        if self._depth == 0:
            raise UnbalancedResume("resume without matching interrupt")
        self._depth -= 1

    def close(self) -> None:
        self._closed = True

    def alloc(self, size: int) -> int:
        """Serve the next allocation of the epoch; returns an address."""
        if self._closed:
            raise AllocAfterClose("arena is closed")
        if size < 0:
            raise ValueError(f"negative allocation size {size}")
        if size == 0:
            self._alloc_seq.append((_ZERO, 0))
            return self.base
        if self._depth > 0:
            addr = self.fallback.alloc(size)
            self._alloc_seq.append((_POOL, self.fallback.last_ref))
            return addr
        bid = self._lam
        if bid > len(self._defs):
            if self.mode == "strict":
                raise ExtraRequest(
                    f"allocation {bid} beyond the {len(self._defs)}-block plan"
                )
            self._append_block(size)
        self._observed[bid] = max(self._observed.get(bid, 0), size)
        if size > self._expected[bid]:
            self.reoptimize()
        addr = self.base + self._plan.offsets[bid]
        self._live[bid] = (addr, size)
        self._alloc_seq.append((_MANAGED, bid))
        self._lam += 1
        return addr

    def free(self, ref: int) -> None:
        """Release the ref-th allocation of the current epoch."""
        if ref < 1 or ref > len(self._alloc_seq):
            raise UnknownId(
                f"free of allocation {ref}, but only "
                f"{len(self._alloc_seq)} allocations this epoch"
            )
        if ref in self._freed:
            raise DoubleFree(f"allocation {ref} freed twice")
        self._freed.add(ref)
        kind, ident = self._alloc_seq[ref - 1]
        if kind == _MANAGED:
            self._live.pop(ident, None)
        elif kind == _POOL:
            self.fallback.free(ident)
        # zero-size entries: free is a no-op

    def reset(self) -> None:
        """Start a new epoch: the id counter returns to 1.

        The plan and the observed running maxima persist.  Live monitored
        blocks at reset are an error in strict mode and are force-closed
        (counted) in lenient mode; fallback blocks live on, since their
        lifetimes are not bound to the epoch.
        """
        if self._live:
            if self.mode == "strict":
                raise LiveBlocksAtReset(
                    f"{len(self._live)} monitored blocks live at reset"
                )
            self.forced_closes += len(self._live)
            self._live.clear()
        self._lam = 1
        self._alloc_seq.clear()
        self._freed.clear()
        self._depth = 0

    def _append_block(self, size: int) -> None:
        """Lenient count growth: add a block conflicting with everything."""
        if self._defs:
            t_lo = min(d.alloc_time for d in self._defs)
            t_hi = max(d.free_time for d in self._defs)
        else:
            t_lo, t_hi = 0, 1
        self._defs.append(_BlockDef(size, t_lo, t_hi, None))
        self._expected[len(self._defs)] = 0  # force the reoptimize below

    def reoptimize(self) -> Plan:
        """Re-plan with sizes grown to the observed maxima and swap.

        Live blocks are remapped to their new offsets (simulation only).
        """
        specs = []
        for bid, d in enumerate(self._defs, start=1):
            size = max(d.size, self._observed.get(bid, 0))
            specs.append((size, d.alloc_time, d.free_time, d.label))
        instance = build_instance(specs, capacity=None, alignment=self._alignment)
        self._defs = [
            _BlockDef(b.size, b.alloc_time, b.free_time, b.label)
            for b in instance.blocks
        ]
        self._expected = {b.id: b.size for b in instance.blocks}
        self._plan = solve_bestfit(instance)
        for bid, (_, size) in list(self._live.items()):
            self._live[bid] = (self.base + self._plan.offsets[bid], size)
        self.reopt_count += 1
        return self._plan


def replay_events(arena: Arena, events: list[TraceEvent]) -> list[int]:
    """Drive one epoch's events through the arena; returns the addresses
    served to allocations, in order.  Does not reset."""
    addresses = []
    for ev in events:
        if ev.kind == ALLOC:
            addresses.append(arena.alloc(ev.size))
        elif ev.kind == FREE:
            arena.free(ev.ref)
        elif ev.kind == INTERRUPT:
            arena.interrupt()
        elif ev.kind == RESUME:
            arena.resume()
        else:
            raise MemplanError(f"unknown event kind {ev.kind!r}")
    return addresses


def simulate_pool(
    events: list[TraceEvent],
    pool: PoolAllocator | None = None,
) -> PoolAllocator:
    """Run a trace through the pool baseline, which has no notion of
    interrupt regions and serves every allocation dynamically."""
    if pool is None:
        pool = PoolAllocator()
    refs: list[int] = []  # trace allocation index -> pool ref (0 for zero-size)
    for ev in events:
        if ev.kind == ALLOC:
            if ev.size == 0:
                refs.append(0)
            else:
                pool.alloc(ev.size)
                refs.append(pool.last_ref)
        elif ev.kind == FREE:
            if ev.ref < 1 or ev.ref > len(refs):
                raise UnknownId(f"free of unknown allocation {ev.ref}")
            if refs[ev.ref - 1]:
                pool.free(refs[ev.ref - 1])
    return pool
