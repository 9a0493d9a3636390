"""Best-fit skyline heuristic for dynamic storage allocation.

The solver maintains a set of *offset lines*: maximal-height skyline
segments partitioning the instance's time span.  It repeats two steps
until every block is placed:

1. choose the lowest line (leftmost on ties);
2. among unplaced blocks whose lifetime fits inside the line's span, place
   the one with the longest lifetime (ties: larger size, then smaller id)
   at the line's height.

If no block fits the chosen line, the line is *lifted up*: merged into the
lower of its neighbors (into both when their heights are equal).  Every
step either places a block or reduces the candidate set, so the loop runs
O(n) times; the per-step block search is linear, giving O(n^2) overall.

A block "fits" a line only when its lifetime is fully contained in the
line's span; partial overlap would collide with the higher neighbors.
The heuristic never looks at the instance capacity — feasibility against
it is the verifier's job.
"""

from __future__ import annotations

import heapq
from itertools import count
from typing import Iterable, Optional

import numpy as np

from .core import BlockRequest, DsaInstance, MemplanError, Plan, Provenance


class IllegalLift(MemplanError):
    """Lift-up requested on a line with no neighbor to merge into."""


class ContainmentViolation(MemplanError):
    """Placement of a block whose lifetime is not inside the line's span."""


class OffsetLine:
    """One skyline segment: half-open time span at a candidate height."""

    __slots__ = ("time_lo", "time_hi", "height", "_prev", "_next", "_alive")

    def __init__(self, time_lo: int, time_hi: int, height: int):
        if time_lo >= time_hi:
            raise ValueError(f"empty line span [{time_lo}, {time_hi})")
        self.time_lo = time_lo
        self.time_hi = time_hi
        self.height = height
        self._prev: OffsetLine | None = None
        self._next: OffsetLine | None = None
        self._alive = True

    def __repr__(self) -> str:
        return f"[{self.time_lo},{self.time_hi})@{self.height}"


class OffsetLineSet:
    """The heuristic's working skyline over a fixed time span.

    Lines tile the span exactly and adjacent lines always have distinct
    heights.  Retrieval of the lowest-leftmost line goes through a lazy
    heap keyed by (height, time_lo).
    """

    def __init__(self, time_lo: int, time_hi: int):
        first = OffsetLine(time_lo, time_hi, 0)
        self._first: OffsetLine = first
        self._heap: list[tuple[int, int, int, OffsetLine]] = []
        self._seq = count()
        self._push(first)

    @classmethod
    def from_lines(cls, triples: Iterable[tuple[int, int, int]]) -> "OffsetLineSet":
        """Build a set from explicit (time_lo, time_hi, height) segments."""
        triples = list(triples)
        if not triples:
            raise ValueError("at least one line required")
        ls = cls(triples[0][0], triples[-1][1])
        seed = ls._first
        prev: OffsetLine | None = None
        for lo, hi, height in triples:
            line = OffsetLine(lo, hi, height)
            if prev is None:
                ls._first = line
            else:
                if prev.time_hi != lo:
                    raise ValueError("lines must tile the span with no gaps")
                if prev.height == height:
                    raise ValueError("adjacent lines must have distinct heights")
                prev._next = line
                line._prev = prev
            ls._push(line)
            prev = line
        seed._alive = False
        return ls

    def _push(self, line: OffsetLine) -> None:
        heapq.heappush(self._heap, (line.height, line.time_lo, next(self._seq), line))

    def lines(self) -> list[OffsetLine]:
        out = []
        node: OffsetLine | None = self._first
        while node is not None:
            out.append(node)
            node = node._next
        return out

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [(l.time_lo, l.time_hi, l.height) for l in self.lines()]

    def choose_offset(self) -> OffsetLine:
        """The line minimizing (height, time_lo); does not consume it."""
        heap = self._heap
        while heap and not heap[0][3]._alive:
            heapq.heappop(heap)
        if not heap:
            raise MemplanError("no offset lines left")
        return heap[0][3]

    def _splice(self, first: OffsetLine, last: OffsetLine, repl: list[OffsetLine]) -> None:
        """Replace the chain first..last (inclusive) with repl."""
        before = first._prev
        after = last._next
        node: OffsetLine | None = first
        while node is not None:
            node._alive = False
            if node is last:
                break
            node = node._next
        for a, b in zip(repl, repl[1:]):
            a._next = b
            b._prev = a
        head, tail = repl[0], repl[-1]
        head._prev = before
        tail._next = after
        if before is None:
            self._first = head
        else:
            before._next = head
        if after is not None:
            after._prev = tail
        for line in repl:
            self._push(line)

    def place(self, line: OffsetLine, block: BlockRequest) -> int:
        """Raise the block's lifetime sub-span by its size; return the offset.

        Leftover sub-spans keep the old height; a raised segment flush with
        an equal-height neighbor is re-merged to keep lines maximal.
        """
        if not line._alive:
            raise MemplanError("line already consumed")
        if not (line.time_lo <= block.alloc_time and block.free_time <= line.time_hi):
            raise ContainmentViolation(
                f"block {block.id} lifetime [{block.alloc_time},{block.free_time}) "
                f"not contained in line {line!r}"
            )
        offset = line.height
        raised = OffsetLine(block.alloc_time, block.free_time, line.height + block.size)
        repl: list[OffsetLine] = []
        if line.time_lo < block.alloc_time:
            repl.append(OffsetLine(line.time_lo, block.alloc_time, line.height))
        repl.append(raised)
        if block.free_time < line.time_hi:
            repl.append(OffsetLine(block.free_time, line.time_hi, line.height))
        self._splice(line, line, repl)
        if raised._prev is not None and raised._prev.height == raised.height:
            merged = OffsetLine(raised._prev.time_lo, raised.time_hi, raised.height)
            self._splice(raised._prev, raised, [merged])
            raised = merged
        if raised._next is not None and raised._next.height == raised.height:
            merged = OffsetLine(raised.time_lo, raised._next.time_hi, raised.height)
            self._splice(raised, raised._next, [merged])
        return offset

    def lift_up(self, line: OffsetLine) -> None:
        """Merge the line into the lower of its neighbors (both on a tie)."""
        if not line._alive:
            raise MemplanError("line already consumed")
        prev, nxt = line._prev, line._next
        if prev is None and nxt is None:
            raise IllegalLift("cannot lift the only offset line")
        if prev is None:
            merged = OffsetLine(line.time_lo, nxt.time_hi, nxt.height)
            self._splice(line, nxt, [merged])
        elif nxt is None:
            merged = OffsetLine(prev.time_lo, line.time_hi, prev.height)
            self._splice(prev, line, [merged])
        elif prev.height == nxt.height:
            merged = OffsetLine(prev.time_lo, nxt.time_hi, prev.height)
            self._splice(prev, nxt, [merged])
        elif prev.height < nxt.height:
            merged = OffsetLine(prev.time_lo, line.time_hi, prev.height)
            self._splice(prev, line, [merged])
        else:
            merged = OffsetLine(line.time_lo, nxt.time_hi, nxt.height)
            self._splice(line, nxt, [merged])


def find_block(
    line: OffsetLine, blocks: Iterable[BlockRequest]
) -> Optional[BlockRequest]:
    """The unplaced block to put on the line, or None if none fits.

    Among blocks whose lifetime is contained in the line's span, picks the
    longest lifetime, breaking ties by larger size then smaller id.
    """
    best: BlockRequest | None = None
    best_key: tuple[int, int, int] | None = None
    for blk in blocks:
        if line.time_lo <= blk.alloc_time and blk.free_time <= line.time_hi:
            key = (blk.lifetime, blk.size, -blk.id)
            if best_key is None or key > best_key:
                best = blk
                best_key = key
    return best


class _RemainingBlocks:
    """Unplaced blocks, sorted by alloc time, queried by vectorized scan.

    The query is still a linear search over the candidate window (the
    O(n^2) contract); numpy only shrinks the constant.  Blocks taken out
    are masked dead and compacted away once they dominate the arrays.
    """

    def __init__(self, blocks: tuple[BlockRequest, ...]):
        order = sorted(blocks, key=lambda b: (b.alloc_time, b.id))
        self._blocks = order
        self._alloc = np.array([b.alloc_time for b in order], dtype=np.int64)
        self._free = np.array([b.free_time for b in order], dtype=np.int64)
        self._life = self._free - self._alloc
        self._size = np.array([b.size for b in order], dtype=np.int64)
        self._bid = np.array([b.id for b in order], dtype=np.int64)
        self._live = np.ones(len(order), dtype=bool)
        self._dead = 0
        self._id_sentinel = len(order) + 1

    def take_best(self, time_lo: int, time_hi: int) -> Optional[BlockRequest]:
        i0 = int(np.searchsorted(self._alloc, time_lo, side="left"))
        i1 = int(np.searchsorted(self._alloc, time_hi, side="left"))
        if i0 >= i1:
            return None
        fits = self._live[i0:i1] & (self._free[i0:i1] <= time_hi)
        if not fits.any():
            return None
        life = np.where(fits, self._life[i0:i1], -1)
        top_life = life.max()
        size = np.where(life == top_life, self._size[i0:i1], -1)
        top_size = size.max()
        bid = np.where(size == top_size, self._bid[i0:i1], self._id_sentinel)
        pos = i0 + int(bid.argmin())
        block = self._blocks[pos]
        self._live[pos] = False
        self._dead += 1
        if self._dead * 2 > len(self._blocks):
            self._compact()
        return block

    def _compact(self) -> None:
        keep = self._live
        self._blocks = [b for b, k in zip(self._blocks, keep) if k]
        self._alloc = self._alloc[keep]
        self._free = self._free[keep]
        self._life = self._life[keep]
        self._size = self._size[keep]
        self._bid = self._bid[keep]
        self._live = np.ones(len(self._blocks), dtype=bool)
        self._dead = 0


def solve_bestfit(instance: DsaInstance) -> Plan:
    """Pack all blocks with the best-fit skyline heuristic.

    Deterministic for a given instance; the produced plan always passes
    verification, and its peak equals the maximum skyline height at
    termination.
    """
    blocks = instance.blocks
    n = len(blocks)
    if n == 0:
        return Plan(offsets={}, peak=0, provenance=Provenance.BESTFIT)
    t_lo = min(b.alloc_time for b in blocks)
    t_hi = max(b.free_time for b in blocks)
    lines = OffsetLineSet(t_lo, t_hi)
    remaining = _RemainingBlocks(blocks)
    offsets: dict[int, int] = {}
    peak = 0
    placed = 0
    steps = 0
    while placed < n:
        steps += 1
        assert steps <= 3 * n + 4, "best-fit loop exceeded its iteration bound"
        line = lines.choose_offset()
        block = remaining.take_best(line.time_lo, line.time_hi)
        if block is None:
            lines.lift_up(line)
            continue
        offset = lines.place(line, block)
        offsets[block.id] = offset
        top = offset + block.size
        if top > peak:
            peak = top
        placed += 1
    return Plan(offsets=offsets, peak=peak, provenance=Provenance.BESTFIT)
