import random

import pytest

from memplan import (
    AllocAfterClose,
    Arena,
    DoubleFree,
    ExtraRequest,
    InvalidPlan,
    LiveBlocksAtReset,
    OutOfMemory,
    Plan,
    PoolAllocator,
    Provenance,
    UnknownId,
    build_instance,
    parse_trace,
    profile_to_instance,
    record,
    replay_events,
    simulate_pool,
    solve_bestfit,
)


@pytest.fixture
def worked_arena(worked_instance):
    plan = solve_bestfit(worked_instance)  # offsets {1: 2, 2: 0, 3: 2}
    return Arena(plan, worked_instance)


class TestArenaAlloc:
    def test_serves_planned_addresses_in_order(self, worked_arena):
        assert worked_arena.alloc(4) == 2
        assert worked_arena.alloc(2) == 0
        worked_arena.free(1)
        assert worked_arena.alloc(3) == 2
        assert worked_arena.reopt_count == 0

    def test_smaller_request_keeps_address_and_skips_reopt(self, worked_arena):
        assert worked_arena.alloc(3) == 2  # expected 4
        assert worked_arena.reopt_count == 0

    def test_growth_triggers_reoptimization(self, worked_arena):
        addr = worked_arena.alloc(5)  # block 1 expected 4
        assert worked_arena.reopt_count == 1
        assert worked_arena.plan.peak == 7
        assert addr == worked_arena.base + worked_arena.plan.offsets[1] == 2

    def test_base_offsets_addresses(self, worked_instance):
        plan = solve_bestfit(worked_instance)
        arena = Arena(plan, worked_instance, base=1000)
        assert arena.alloc(4) == 1002

    def test_live_blocks_stay_disjoint_after_growth(self, worked_arena):
        worked_arena.alloc(4)
        worked_arena.alloc(2)
        worked_arena.free(1)
        worked_arena.alloc(7)  # block 3 grows 3 -> 7
        assert worked_arena.reopt_count == 1
        live = sorted(worked_arena.live_blocks().values())
        for (a1, s1), (a2, s2) in zip(live, live[1:]):
            assert a1 + s1 <= a2

    def test_interrupted_requests_go_to_fallback(self, worked_arena):
        worked_arena.interrupt()
        addr = worked_arena.alloc(9)
        worked_arena.resume()
        assert addr == 0  # pool bump starts at its own cursor
        assert worked_arena.fallback.peak == 9
        assert worked_arena.peak_usage() == 6 + 9
        assert worked_arena.lam == 1  # no plan slot consumed

    def test_zero_size_serves_base_and_consumes_no_slot(self, worked_arena):
        assert worked_arena.alloc(0) == worked_arena.base
        assert worked_arena.lam == 1
        assert worked_arena.alloc(4) == 2  # block 1 still next

    def test_invalid_plan_rejected(self, worked_instance):
        bad = Plan({1: 0, 2: 0, 3: 2}, peak=6, provenance=Provenance.BESTFIT)
        with pytest.raises(InvalidPlan):
            Arena(bad, worked_instance)

    def test_alloc_after_close(self, worked_arena):
        worked_arena.close()
        with pytest.raises(AllocAfterClose):
            worked_arena.alloc(4)


class TestArenaFree:
    def test_free_shrinks_live(self, worked_arena):
        worked_arena.alloc(4)
        assert len(worked_arena.live_blocks()) == 1
        worked_arena.free(1)
        assert not worked_arena.live_blocks()

    def test_double_free(self, worked_arena):
        worked_arena.alloc(4)
        worked_arena.free(1)
        with pytest.raises(DoubleFree):
            worked_arena.free(1)

    def test_unknown_ref(self, worked_arena):
        with pytest.raises(UnknownId):
            worked_arena.free(3)

    def test_fallback_block_returns_to_pool(self, worked_arena):
        worked_arena.interrupt()
        worked_arena.alloc(9)
        worked_arena.resume()
        worked_arena.free(1)
        # the pooled block is reused by the next interrupted request
        worked_arena.interrupt()
        assert worked_arena.alloc(5) == 0
        assert worked_arena.fallback.peak == 9


class TestArenaReset:
    def test_reset_rewinds_lambda(self, worked_arena):
        worked_arena.alloc(4)
        worked_arena.free(1)
        worked_arena.reset()
        assert worked_arena.lam == 1
        assert worked_arena.alloc(4) == 2

    def test_strict_reset_with_live_block_errors(self, worked_instance):
        arena = Arena(solve_bestfit(worked_instance), worked_instance, mode="strict")
        arena.alloc(4)
        with pytest.raises(LiveBlocksAtReset):
            arena.reset()

    def test_lenient_reset_force_closes_with_count(self, worked_arena):
        worked_arena.alloc(4)
        worked_arena.reset()
        assert worked_arena.forced_closes == 1
        assert not worked_arena.live_blocks()


class TestExtraRequests:
    def test_strict_mode_errors(self, worked_instance):
        arena = Arena(solve_bestfit(worked_instance), worked_instance, mode="strict")
        for size in (4, 2, 3):
            arena.alloc(size)
        with pytest.raises(ExtraRequest):
            arena.alloc(1)

    def test_lenient_mode_grows_the_plan(self, worked_arena):
        # follow the profiled structure (free block 1 before the third
        # alloc), then issue one allocation beyond the plan
        worked_arena.alloc(4)
        worked_arena.alloc(2)
        worked_arena.free(1)
        worked_arena.alloc(3)
        addr = worked_arena.alloc(5)
        assert worked_arena.reopt_count == 1
        assert worked_arena.lam == 5
        assert addr == worked_arena.plan.offsets[4]
        # the appended block conflicts with everything, so it must not
        # overlap any live block
        live = sorted(worked_arena.live_blocks().values())
        for (a1, s1), (a2, s2) in zip(live, live[1:]):
            assert a1 + s1 <= a2
        # next epoch replays without further growth
        for ref in (2, 3, 4):
            worked_arena.free(ref)
        worked_arena.reset()
        worked_arena.alloc(4)
        worked_arena.alloc(2)
        worked_arena.free(1)
        worked_arena.alloc(3)
        worked_arena.alloc(5)
        assert worked_arena.reopt_count == 1


class TestReplayDeterminism:
    def test_identical_epochs_identical_addresses(self):
        trace = "A 4\nA 2\nF 1\nA 3\nF 2\nF 3\n"
        events = parse_trace(trace)
        inst = profile_to_instance(record(events))
        arena = Arena(solve_bestfit(inst), inst)
        first = replay_events(arena, events)
        arena.reset()
        second = replay_events(arena, events)
        arena.reset()
        assert first == second
        assert arena.reopt_count == 0

    def test_shrinking_any_request_changes_nothing(self):
        rng = random.Random(4)
        trace = "A 8\nA 6\nF 1\nA 4\nF 3\nA 2\nF 2\nF 4\n"
        events = parse_trace(trace)
        inst = profile_to_instance(record(events))
        plan = solve_bestfit(inst)
        arena = Arena(plan, inst)
        baseline = replay_events(arena, events)
        arena.reset()
        for _ in range(10):
            k = rng.choice([i for i, e in enumerate(events) if e.kind == "alloc"])
            shrunk = list(events)
            ev = shrunk[k]
            shrunk[k] = type(ev)(ev.kind, size=max(1, ev.size - rng.randint(1, 3)))
            arena2 = Arena(plan, inst)
            assert replay_events(arena2, shrunk) == baseline
            assert arena2.reopt_count == 0

    def test_live_blocks_never_overlap_during_replay(self):
        rng = random.Random(12)
        for _ in range(20):
            lines = []
            live = []
            count = 0
            for _ in range(rng.randint(1, 30)):
                if live and rng.random() < 0.45:
                    lines.append(f"F {live.pop(rng.randrange(len(live)))}")
                else:
                    count += 1
                    live.append(count)
                    lines.append(f"A {rng.randint(1, 16)}")
            events = parse_trace("\n".join(lines) + "\n")
            inst = profile_to_instance(record(events))
            arena = Arena(solve_bestfit(inst), inst)
            for ev in events:
                if ev.kind == "alloc":
                    arena.alloc(ev.size)
                    spans = sorted(arena.live_blocks().values())
                    for (a1, s1), (a2, s2) in zip(spans, spans[1:]):
                        assert a1 + s1 <= a2
                else:
                    arena.free(ev.ref)


class TestPool:
    def test_smallest_fit_reuse_then_bump(self):
        events = parse_trace("A 4\nF 1\nA 2\nA 2\nF 2\nF 3\n")
        pool = simulate_pool(events)
        assert pool.peak == 6

    def test_reuse_takes_whole_block(self):
        pool = PoolAllocator()
        assert pool.alloc(4) == 0
        pool.free(1)
        assert pool.alloc(2) == 0  # 4-byte block reused whole
        assert pool.alloc(2) == 4  # nothing pooled: bump
        assert pool.peak == 6

    def test_smallest_sufficient_block_chosen(self):
        pool = PoolAllocator()
        pool.alloc(8)
        pool.alloc(3)
        pool.free(1)
        pool.free(2)
        assert pool.alloc(2) == 8  # the 3-byte block, not the 8-byte one
        assert pool.alloc(5) == 0

    def test_alloc_into_empty_pool_bumps_at_zero(self):
        pool = PoolAllocator()
        assert pool.alloc(7) == 0
        assert pool.cursor == 7

    def test_errors(self):
        pool = PoolAllocator()
        pool.alloc(4)
        with pytest.raises(UnknownId):
            pool.free(2)
        pool.free(1)
        with pytest.raises(DoubleFree):
            pool.free(1)
        with pytest.raises(ValueError):
            pool.alloc(0)

    def test_capacity_flush_then_retry(self):
        pool = PoolAllocator(capacity=8)
        pool.alloc(6)
        pool.free(1)
        # 8 does not fit next to the pooled 6: the flush drops it first
        assert pool.alloc(8) == 6
        assert pool.peak == 8

    def test_out_of_memory_when_live_blocks_pin_capacity(self):
        pool = PoolAllocator(capacity=8)
        pool.alloc(6)
        with pytest.raises(OutOfMemory):
            pool.alloc(6)

    def test_pool_baseline_never_beats_the_plan(self):
        # corpus invariant over generated and random traces
        from memplan import GenSpec, cnn_like_trace, rnn_like_trace

        traces = []
        for seed in range(6):
            traces.append(cnn_like_trace(GenSpec(model="cnn", layers=10, seed=seed)))
            traces.append(
                rnn_like_trace(GenSpec(model="rnn", layers=4, seed=seed), 12)
            )
        rng = random.Random(31)
        for _ in range(30):
            lines = []
            live = []
            count = 0
            for _ in range(rng.randint(1, 60)):
                if live and rng.random() < 0.45:
                    lines.append(f"F {live.pop(rng.randrange(len(live)))}")
                else:
                    count += 1
                    live.append(count)
                    lines.append(f"A {rng.randint(1, 64)}")
            traces.append("\n".join(lines) + "\n")
        for text in traces:
            events = parse_trace(text)
            inst = profile_to_instance(record(events))
            plan = solve_bestfit(inst)
            pool = simulate_pool(events)
            assert plan.peak <= pool.peak


class TestPeakUsage:
    def test_fresh_arena_reports_plan_peak(self, worked_arena):
        assert worked_arena.peak_usage() == 6

    def test_fallback_adds_to_plan_peak(self, worked_arena):
        worked_arena.interrupt()
        worked_arena.alloc(9)
        assert worked_arena.peak_usage() == 15

    def test_empty_plan_arena_serves_fallback_only(self):
        inst = build_instance([])
        arena = Arena(solve_bestfit(inst), inst)
        arena.interrupt()
        assert arena.alloc(5) == 0
        assert arena.peak_usage() == 5
