"""Provably optimal planning via branch and bound over pair orderings.

For every colliding pair (i, j) either i lies below j (x_i + w_i <= x_j)
or j lies below i.  The search branches on that orientation, pair by pair,
keeping the componentwise-minimal offsets consistent with the constraints
chosen so far (a longest-path computation over the growing constraint
graph, updated incrementally).  A branch is pruned as soon as its forced
peak reaches the incumbent; the incumbent starts from the best-fit plan.
Orienting a cycle forces offsets past the incumbent, so infeasible
branches prune themselves.

Mirroring a packing top-to-bottom flips every orientation and preserves
the peak, so the heaviest pair's orientation is fixed up front.

``brute_force_peak`` is the deliberately dumb test oracle: it materializes
all 2^|E| orientation vectors as array rows and relaxes them in lockstep.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import (
    DsaInstance,
    MemplanError,
    Plan,
    Provenance,
    clique_lower_bound,
    colliding_pairs,
)
from .bestfit import solve_bestfit


class Infeasible(MemplanError):
    """No packing fits the instance capacity."""


class TooLarge(MemplanError):
    """Instance beyond the brute-force oracle's enumeration limit."""


class TimeLimitZero(MemplanError):
    """A non-positive time limit."""


_BRUTE_FORCE_MAX_PAIRS = 20


@dataclass
class ExactResult:
    plan: Plan
    proven_optimal: bool
    nodes_explored: int
    elapsed: float


class _Timeout(Exception):
    pass


def solve_exact(instance: DsaInstance, time_limit: float = 60.0) -> ExactResult:
    """Minimize the peak exactly, or return the best incumbent on timeout.

    Raises Infeasible when the lower bound already exceeds the capacity,
    or when a completed search proves the optimum does.  Recommended for
    instances with at most a few dozen colliding pairs.
    """
    if time_limit <= 0:
        raise TimeLimitZero(f"time limit must be positive, got {time_limit}")
    started = time.perf_counter()
    deadline = started + time_limit

    w_cap = instance.capacity
    lb = clique_lower_bound(instance)
    if lb > w_cap:
        raise Infeasible(f"peak lower bound {lb} exceeds capacity {w_cap}")

    blocks = instance.blocks
    n = len(blocks)
    if n == 0:
        plan = Plan(offsets={}, peak=0, provenance=Provenance.EXACT)
        return ExactResult(plan, True, 0, time.perf_counter() - started)

    seed = solve_bestfit(instance)
    w = [b.size for b in blocks]
    pairs = [
        (i - 1, j - 1) for i, j in sorted(colliding_pairs(instance).pairs)
    ]
    pairs.sort(key=lambda p: (-(w[p[0]] + w[p[1]]), p))

    incumbent_peak = seed.peak
    incumbent = [seed.offsets[b.id] for b in blocks]

    x = [0] * n
    out_edges: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    trail: list[tuple[int, int]] = []
    cur_peak = max(w)
    nodes = 0

    def apply_edge(a: int, b: int) -> bool:
        """Add constraint x_b >= x_a + w_a and cascade; False when the
        forced peak reaches the incumbent (also catches cycles, whose
        offsets grow without bound)."""
        nonlocal cur_peak
        stack = [(b, x[a] + w[a])]
        while stack:
            v, nv = stack.pop()
            if nv <= x[v]:
                continue
            trail.append((v, x[v]))
            x[v] = nv
            top = nv + w[v]
            if top > cur_peak:
                cur_peak = top
                if cur_peak >= incumbent_peak:
                    return False
            for u, wt in out_edges[v]:
                if nv + wt > x[u]:
                    stack.append((u, nv + wt))
        return True

    def dfs(k: int) -> None:
        nonlocal nodes, incumbent_peak, incumbent, cur_peak
        nodes += 1
        if nodes % 1024 == 0 and time.perf_counter() > deadline:
            raise _Timeout
        if cur_peak >= incumbent_peak or incumbent_peak <= lb:
            return
        if k == len(pairs):
            incumbent_peak = cur_peak
            incumbent = x.copy()
            return
        i, j = pairs[k]
        below = (i, j)
        above = (j, i)
        if k == 0:
            # mirror symmetry: one orientation of the heaviest pair suffices
            choices = (below,)
        elif x[i] + w[i] <= x[j]:
            choices = (below, above)
        elif x[j] + w[j] <= x[i]:
            choices = (above, below)
        elif (x[i] + w[i]) - x[j] <= (x[j] + w[j]) - x[i]:
            choices = (below, above)
        else:
            choices = (above, below)
        for a, b in choices:
            mark = len(trail)
            saved_peak = cur_peak
            out_edges[a].append((b, w[a]))
            if apply_edge(a, b):
                dfs(k + 1)
            out_edges[a].pop()
            while len(trail) > mark:
                v, old = trail.pop()
                x[v] = old
            cur_peak = saved_peak

    proven = True
    try:
        dfs(0)
    except _Timeout:
        proven = False

    elapsed = time.perf_counter() - started
    offsets = {b.id: incumbent[idx] for idx, b in enumerate(blocks)}
    if proven:
        if incumbent_peak > w_cap:
            raise Infeasible(
                f"proven optimal peak {incumbent_peak} exceeds capacity {w_cap}"
            )
        provenance = Provenance.EXACT
    else:
        provenance = Provenance.EXACT_TIMEOUT
    plan = Plan(offsets=offsets, peak=incumbent_peak, provenance=provenance)
    return ExactResult(plan, proven, nodes, elapsed)


def brute_force_peak(instance: DsaInstance) -> int:
    """Exact optimum by enumerating every orientation of every pair.

    Test oracle only: all 2^|E| orientation vectors are laid out as rows
    and relaxed simultaneously until fixpoint; rows still changing after
    n-1 sweeps carry a cycle and are infeasible.  Capacity is ignored.
    """
    blocks = instance.blocks
    n = len(blocks)
    if n == 0:
        return 0
    pairs = sorted(colliding_pairs(instance).pairs)
    m = len(pairs)
    if m > _BRUTE_FORCE_MAX_PAIRS:
        raise TooLarge(f"{m} colliding pairs exceeds 2^{_BRUTE_FORCE_MAX_PAIRS} limit")

    sizes = [b.size for b in blocks]
    # offsets stay below (passes * m + 1) * max_w even on cyclic rows
    bound = (n * m + 1) * max(sizes)
    dtype = np.int32 if bound < 2**31 else np.int64
    w = np.array(sizes, dtype=dtype)
    rows = 1 << m
    assignments = np.arange(rows, dtype=np.uint32)
    # bit k set means block j of pairs[k] goes below block i
    above = [(assignments >> k) & 1 == 1 for k in range(m)]
    below = [~mask for mask in above]
    x = np.zeros((rows, n), dtype=dtype)
    scratch = np.empty(rows, dtype=dtype)

    def sweep_apply() -> bool:
        before = int(x.sum(dtype=np.int64))
        for k, (i, j) in enumerate(pairs):
            a, b = i - 1, j - 1
            np.add(x[:, a], w[a], out=scratch)
            np.maximum(x[:, b], scratch, out=x[:, b], where=below[k])
            np.add(x[:, b], w[b], out=scratch)
            np.maximum(x[:, a], scratch, out=x[:, a], where=above[k])
        return int(x.sum(dtype=np.int64)) != before

    converged = False
    for _ in range(max(n - 1, 0)):
        if not sweep_apply():
            converged = True
            break

    peaks = (x + w).max(axis=1)
    if not converged:
        # rows still violating a constraint carry a cycle: infeasible
        infeasible = np.zeros(rows, dtype=bool)
        for k, (i, j) in enumerate(pairs):
            a, b = i - 1, j - 1
            infeasible |= below[k] & (x[:, a] + w[a] > x[:, b])
            infeasible |= above[k] & (x[:, b] + w[b] > x[:, a])
        peaks[infeasible] = np.iinfo(dtype).max
    return int(peaks.min())
