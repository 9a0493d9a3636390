"""Domain types for offline memory planning.

A profiled workload is reduced to a set of memory blocks, each with a fixed
byte size and a half-open lifetime interval ``[alloc_time, free_time)``.
Planning assigns every block a byte offset so that no two blocks whose
lifetimes intersect share address space, while minimizing the peak offset
in use (the dynamic storage allocation problem, a strip-packing special
case where the time axis is fixed).

This module holds the problem and solution types shared by the solvers,
the verifier, and the replay arena, plus the colliding-pair derivation and
the peak-live-bytes lower bound.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class MemplanError(Exception):
    """Base class for every error raised by this package."""


class ZeroSize(MemplanError):
    """A block request with size < 1."""


class EmptyLifetime(MemplanError):
    """A block whose alloc time is not strictly before its free time."""


class CapacityTooSmall(MemplanError):
    """An explicit capacity smaller than the largest single block."""


class MissingOffset(MemplanError):
    """A plan that does not cover every block of its instance."""


class DoubleFree(MemplanError):
    """A block reference freed twice."""


class UnbalancedResume(MemplanError):
    """A resume with no matching interrupt."""


class Provenance(enum.Enum):
    """Which solver produced a plan and whether optimality is proven."""

    BESTFIT = "bestfit"
    EXACT = "exact"
    EXACT_TIMEOUT = "exact_timeout"


@dataclass(frozen=True)
class BlockRequest:
    """One profiled memory block: size, half-open lifetime, 1-based id."""

    id: int
    size: int
    alloc_time: int
    free_time: int
    label: str | None = None

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError(f"block id must be positive, got {self.id}")
        if self.size < 1:
            raise ZeroSize(f"block {self.id} has size {self.size}")
        if self.alloc_time < 0:
            raise ValueError(
                f"block {self.id} has negative alloc_time {self.alloc_time}"
            )
        if self.alloc_time >= self.free_time:
            raise EmptyLifetime(
                f"block {self.id} has empty lifetime "
                f"[{self.alloc_time}, {self.free_time})"
            )

    @property
    def lifetime(self) -> int:
        """Number of ticks the block is alive."""
        return self.free_time - self.alloc_time


@dataclass(frozen=True)
class DsaInstance:
    """A full planning problem: blocks, capacity, and size granularity.

    Blocks carry ids 1..n with no gaps; all sizes are multiples of
    ``alignment``.  ``capacity`` is the available address-space budget the
    verifier checks plans against (solvers themselves do not enforce it).
    """

    blocks: tuple[BlockRequest, ...]
    capacity: int
    alignment: int = 1

    def __post_init__(self) -> None:
        if self.alignment < 1:
            raise ValueError(f"alignment must be positive, got {self.alignment}")
        for pos, blk in enumerate(self.blocks, start=1):
            if blk.id != pos:
                raise ValueError(
                    f"block ids must be exactly 1..{len(self.blocks)}; "
                    f"position {pos} holds id {blk.id}"
                )
            if blk.size % self.alignment:
                raise ValueError(
                    f"block {blk.id} size {blk.size} is not a multiple of "
                    f"alignment {self.alignment}"
                )
        max_size = max((b.size for b in self.blocks), default=0)
        if self.capacity < max_size:
            raise CapacityTooSmall(
                f"capacity {self.capacity} < largest block size {max_size}"
            )

    def span(self) -> tuple[int, int]:
        """(earliest alloc tick, latest free tick); (0, 0) when empty."""
        if not self.blocks:
            return 0, 0
        return (
            min(b.alloc_time for b in self.blocks),
            max(b.free_time for b in self.blocks),
        )

    @property
    def total_bytes(self) -> int:
        return sum(b.size for b in self.blocks)


@dataclass(frozen=True)
class CollidingPairs:
    """Pairs (i, j), i < j, whose lifetimes intersect as half-open intervals."""

    pairs: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))


@dataclass(frozen=True)
class Plan:
    """Solver output: per-block byte offsets and the peak byte in use."""

    offsets: dict[int, int]
    peak: int
    provenance: Provenance

    @classmethod
    def from_offsets(
        cls,
        instance: DsaInstance,
        offsets: dict[int, int],
        provenance: Provenance,
    ) -> "Plan":
        """Build a plan computing the peak from the instance's sizes."""
        peak = 0
        for blk in instance.blocks:
            if blk.id not in offsets:
                raise MissingOffset(f"no offset for block {blk.id}")
            peak = max(peak, offsets[blk.id] + blk.size)
        return cls(offsets=dict(offsets), peak=peak, provenance=provenance)


BlockSpec = Union[BlockRequest, Sequence]


def _round_up(value: int, align: int) -> int:
    return -(-value // align) * align


def build_instance(
    blocks: Iterable[BlockSpec],
    capacity: int | None = None,
    alignment: int = 1,
) -> DsaInstance:
    """Normalize raw block requests into a DsaInstance.

    Sizes are rounded up to ``alignment`` multiples and ids renumbered
    1..n preserving input order.  ``capacity`` defaults to the sum of the
    rounded sizes, which is always feasible.  Blocks may be given as
    BlockRequest values (ids ignored) or ``(size, alloc_time, free_time
    [, label])`` tuples.
    """
    if alignment < 1:
        raise ValueError(f"alignment must be positive, got {alignment}")
    normalized: list[BlockRequest] = []
    for pos, item in enumerate(blocks, start=1):
        if isinstance(item, BlockRequest):
            size, alloc_t, free_t, label = (
                item.size,
                item.alloc_time,
                item.free_time,
                item.label,
            )
        else:
            size, alloc_t, free_t = item[0], item[1], item[2]
            label = item[3] if len(item) > 3 else None
        if size < 1:
            raise ZeroSize(f"block at position {pos} has size {size}")
        normalized.append(
            BlockRequest(
                id=pos,
                size=_round_up(size, alignment),
                alloc_time=alloc_t,
                free_time=free_t,
                label=label,
            )
        )
    if capacity is None:
        capacity = sum(b.size for b in normalized)
    return DsaInstance(tuple(normalized), capacity=capacity, alignment=alignment)


def colliding_pairs(instance: DsaInstance) -> CollidingPairs:
    """The set E of block pairs with intersecting lifetimes.

    Sweeps the sorted event times keeping an active set, so the cost is
    O(n log n + |E|) rather than testing all pairs.  Frees sort before
    allocs at the same tick: half-open intervals that merely touch do not
    collide.
    """
    events: list[tuple[int, int, int]] = []
    for blk in instance.blocks:
        events.append((blk.alloc_time, 1, blk.id))
        events.append((blk.free_time, 0, blk.id))
    events.sort()
    active: set[int] = set()
    pairs: set[tuple[int, int]] = set()
    for _, kind, bid in events:
        if kind == 0:
            active.discard(bid)
        else:
            for other in active:
                pairs.add((other, bid) if other < bid else (bid, other))
            active.add(bid)
    return CollidingPairs(frozenset(pairs))


def clique_lower_bound(instance: DsaInstance) -> int:
    """Peak live bytes over all ticks: a lower bound on any feasible peak."""
    events: list[tuple[int, int, int]] = []
    for blk in instance.blocks:
        events.append((blk.alloc_time, 1, blk.size))
        events.append((blk.free_time, 0, blk.size))
    events.sort()
    live = 0
    best = 0
    for _, kind, size in events:
        if kind == 0:
            live -= size
        else:
            live += size
            if live > best:
                best = live
    return best


def plan_to_json(instance: DsaInstance, plan: Plan) -> str:
    """Serialize a plan with its instance as a JSON document."""
    block_docs = []
    for blk in instance.blocks:
        if blk.id not in plan.offsets:
            raise MissingOffset(f"no offset for block {blk.id}")
        doc = {
            "id": blk.id,
            "size": blk.size,
            "alloc_time": blk.alloc_time,
            "free_time": blk.free_time,
            "offset": plan.offsets[blk.id],
        }
        if blk.label is not None:
            doc["label"] = blk.label
        block_docs.append(doc)
    doc = {
        "peak": plan.peak,
        "capacity": instance.capacity,
        "alignment": instance.alignment,
        "provenance": plan.provenance.value,
        "blocks": block_docs,
    }
    return json.dumps(doc, indent=2) + "\n"


def plan_from_json(text: str) -> tuple[DsaInstance, Plan]:
    """Parse a document produced by plan_to_json; exact round-trip."""
    doc = json.loads(text)
    try:
        blocks = tuple(
            BlockRequest(
                id=b["id"],
                size=b["size"],
                alloc_time=b["alloc_time"],
                free_time=b["free_time"],
                label=b.get("label"),
            )
            for b in doc["blocks"]
        )
        instance = DsaInstance(
            blocks, capacity=doc["capacity"], alignment=doc["alignment"]
        )
        offsets = {b["id"]: b["offset"] for b in doc["blocks"]}
        plan = Plan(
            offsets=offsets,
            peak=doc["peak"],
            provenance=Provenance(doc["provenance"]),
        )
    except KeyError as exc:
        raise MemplanError(f"malformed plan document: missing field {exc}") from exc
    return instance, plan
