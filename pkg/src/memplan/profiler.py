"""Allocation-trace parsing and replay into planning instances.

Trace file format (line-oriented text, one event per line)::

    A <size> [label]   allocation of <size> bytes (decimal, non-negative)
    F <k>              free of the k-th allocation (1-based, counting ALL
                       allocations, including those inside interrupt regions
                       and zero-sized ones)
    I                  interrupt monitoring (nestable)
    R                  resume monitoring
    # ...              comment; blank lines are skipped

Recording follows a global clock y that starts at 1 and advances after
every allocation and every free, whether monitored or not, so the relative
interleaving of monitored lifetimes stays faithful to the real run.  Each
monitored allocation takes the next block id; allocations inside interrupt
regions are only counted; zero-size allocations are dropped (no id, no
clock advance) but still consume a free reference.  Blocks never freed are
closed at the final clock value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BlockRequest,
    DoubleFree,
    DsaInstance,
    MemplanError,
    UnbalancedResume,
    build_instance,
)

ALLOC = "alloc"
FREE = "free"
INTERRUPT = "interrupt"
RESUME = "resume"


class TraceSyntaxError(MemplanError):
    """Malformed trace line; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NegativeSize(TraceSyntaxError):
    """An allocation with a negative size."""


class UnknownBlockRef(MemplanError):
    """A free referencing an allocation that does not exist (yet)."""


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    size: int = 0
    ref: int = 0
    label: str | None = None


def alloc(size: int, label: str | None = None) -> TraceEvent:
    return TraceEvent(ALLOC, size=size, label=label)


def free(ref: int) -> TraceEvent:
    return TraceEvent(FREE, ref=ref)


def interrupt() -> TraceEvent:
    return TraceEvent(INTERRUPT)


def resume() -> TraceEvent:
    return TraceEvent(RESUME)


@dataclass(frozen=True)
class Profile:
    """Result of recording a trace: monitored blocks plus bookkeeping.

    ``managed`` holds the blocks allocated outside interrupt regions with
    their clock-assigned lifetimes; ``unmanaged_count`` counts allocations
    inside interrupt regions; ``horizon`` is the final clock value.
    """

    managed: tuple[BlockRequest, ...]
    unmanaged_count: int
    horizon: int


def parse_trace(text: str) -> list[TraceEvent]:
    """Parse trace text into events; purely syntactic (refs not checked)."""
    events: list[TraceEvent] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        op = parts[0]
        if op == "A":
            if len(parts) < 2:
                raise TraceSyntaxError("A needs a size", line_no)
            try:
                size = int(parts[1])
            except ValueError:
                raise TraceSyntaxError(f"bad size {parts[1]!r}", line_no) from None
            if size < 0:
                raise NegativeSize(f"negative size {size}", line_no)
            label = parts[2].strip() if len(parts) > 2 else None
            events.append(alloc(size, label))
        elif op == "F":
            if len(parts) != 2:
                raise TraceSyntaxError("F needs exactly one block ref", line_no)
            try:
                ref = int(parts[1])
            except ValueError:
                raise TraceSyntaxError(f"bad block ref {parts[1]!r}", line_no) from None
            if ref < 1:
                raise TraceSyntaxError(f"block ref must be >= 1, got {ref}", line_no)
            events.append(free(ref))
        elif op == "I":
            if len(parts) != 1:
                raise TraceSyntaxError("I takes no arguments", line_no)
            events.append(interrupt())
        elif op == "R":
            if len(parts) != 1:
                raise TraceSyntaxError("R takes no arguments", line_no)
            events.append(resume())
        else:
            raise TraceSyntaxError(f"unknown directive {op!r}", line_no)
    return events


class _OpenBlock:
    __slots__ = ("size", "alloc_time", "free_time", "label")

    def __init__(self, size: int, alloc_time: int, label: str | None):
        self.size = size
        self.alloc_time = alloc_time
        self.free_time: int | None = None
        self.label = label


# alloc-table entry kinds
_MANAGED = 0
_UNMANAGED = 1
_ZERO = 2


def record(events: list[TraceEvent]) -> Profile:
    """Run the monitoring discipline over parsed events.

    The clock starts at 1 and advances after every non-zero alloc and every
    free of a non-zero block.  Frees are always recorded, even inside
    interrupt regions: a free of a managed block writes its free time, a
    free of an unmanaged block only advances the clock.
    """
    clock = 1
    depth = 0
    managed: list[_OpenBlock] = []
    alloc_table: list[tuple[int, int]] = []  # (kind, managed index or 0)
    freed: set[int] = set()
    unmanaged_count = 0

    for ev in events:
        if ev.kind == ALLOC:
            if ev.size < 0:
                raise NegativeSize(f"negative size {ev.size}")
            if ev.size == 0:
                alloc_table.append((_ZERO, 0))
            elif depth > 0:
                alloc_table.append((_UNMANAGED, 0))
                unmanaged_count += 1
                clock += 1
            else:
                alloc_table.append((_MANAGED, len(managed)))
                managed.append(_OpenBlock(ev.size, clock, ev.label))
                clock += 1
        elif ev.kind == FREE:
            ref = ev.ref
            if ref < 1 or ref > len(alloc_table):
                raise UnknownBlockRef(
                    f"free of allocation {ref}, but only "
                    f"{len(alloc_table)} allocations seen"
                )
            if ref in freed:
                raise DoubleFree(f"allocation {ref} freed twice")
            freed.add(ref)
            kind, idx = alloc_table[ref - 1]
            if kind == _MANAGED:
                managed[idx].free_time = clock
                clock += 1
            elif kind == _UNMANAGED:
                clock += 1
            # zero-size entries: free is a no-op
        elif ev.kind == INTERRUPT:
            depth += 1
        elif ev.kind == RESUME:
            if depth == 0:
                raise UnbalancedResume("resume without matching interrupt")
            depth -= 1
        else:
            raise MemplanError(f"unknown event kind {ev.kind!r}")

    horizon = clock
    blocks = tuple(
        BlockRequest(
            id=i,
            size=ob.size,
            alloc_time=ob.alloc_time,
            free_time=ob.free_time if ob.free_time is not None else horizon,
            label=ob.label,
        )
        for i, ob in enumerate(managed, start=1)
    )
    return Profile(managed=blocks, unmanaged_count=unmanaged_count, horizon=horizon)


def profile_to_instance(
    profile: Profile,
    capacity: int | None = None,
    alignment: int = 1,
) -> DsaInstance:
    """Build a planning instance from a profile's managed blocks."""
    return build_instance(profile.managed, capacity=capacity, alignment=alignment)
