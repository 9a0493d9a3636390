import random

import pytest

from memplan import (
    DoubleFree,
    NegativeSize,
    TraceSyntaxError,
    UnbalancedResume,
    UnknownBlockRef,
    alloc,
    colliding_pairs,
    free,
    interrupt,
    parse_trace,
    profile_to_instance,
    record,
    resume,
)


class TestParseTrace:
    def test_simple(self):
        events = parse_trace("A 4\nA 2\nF 1\nF 2\n")
        assert events == [alloc(4), alloc(2), free(1), free(2)]

    def test_labels_comments_and_markers(self):
        events = parse_trace("# hdr\nA 4 conv1\nI\nA 9\nR\nF 1\n")
        assert events == [
            alloc(4, "conv1"), interrupt(), alloc(9), resume(), free(1),
        ]

    def test_blank_lines_skipped(self):
        assert parse_trace("\n\nA 1\n\n") == [alloc(1)]

    def test_free_parses_even_if_ref_is_dangling(self):
        # refs are a replay-time concern; parsing is syntactic only
        assert parse_trace("F 3\n") == [free(3)]

    def test_syntax_errors_carry_line_numbers(self):
        with pytest.raises(TraceSyntaxError, match="line 2"):
            parse_trace("A 4\nX 1\n")
        with pytest.raises(TraceSyntaxError, match="line 1"):
            parse_trace("A\n")
        with pytest.raises(TraceSyntaxError, match="line 3"):
            parse_trace("A 1\nA 2\nF x\n")
        with pytest.raises(TraceSyntaxError):
            parse_trace("F 0\n")
        with pytest.raises(TraceSyntaxError):
            parse_trace("I now\n")

    def test_negative_size(self):
        with pytest.raises(NegativeSize):
            parse_trace("A -3\n")

    def test_zero_size_parses(self):
        assert parse_trace("A 0\n") == [alloc(0)]


class TestRecord:
    def test_worked_example(self):
        prof = record(parse_trace("A 4\nA 2\nF 1\nA 3\nF 2\nF 3\n"))
        got = [(b.id, b.size, b.alloc_time, b.free_time) for b in prof.managed]
        assert got == [(1, 4, 1, 3), (2, 2, 2, 5), (3, 3, 4, 6)]
        assert prof.horizon == 7
        assert prof.unmanaged_count == 0

    def test_never_freed_closes_at_horizon(self):
        prof = record([alloc(4)])
        blk = prof.managed[0]
        assert (blk.alloc_time, blk.free_time) == (1, 2)
        assert prof.horizon == 2

    def test_interrupted_alloc_is_unmanaged(self):
        prof = record([alloc(4), interrupt(), alloc(9), resume(), free(1)])
        assert len(prof.managed) == 1
        blk = prof.managed[0]
        # the unmanaged alloc still advanced the clock
        assert (blk.size, blk.alloc_time, blk.free_time) == (4, 1, 3)
        assert prof.unmanaged_count == 1

    def test_free_inside_interrupt_region_still_records(self):
        prof = record([alloc(4), interrupt(), free(1), resume()])
        blk = prof.managed[0]
        assert (blk.alloc_time, blk.free_time) == (1, 2)

    def test_free_of_unmanaged_advances_clock_only(self):
        prof = record([interrupt(), alloc(9), resume(), alloc(4), free(1), free(2)])
        blk = prof.managed[0]
        assert (blk.alloc_time, blk.free_time) == (2, 4)
        assert prof.unmanaged_count == 1

    def test_zero_size_skipped_entirely(self):
        prof = record([alloc(0), alloc(4), free(1), free(2)])
        blk = prof.managed[0]
        # free refs count the zero alloc, but it has no id and no clock tick
        assert (blk.id, blk.size, blk.alloc_time, blk.free_time) == (1, 4, 1, 2)
        assert prof.horizon == 3

    def test_labels_flow_through(self):
        prof = record([alloc(4, "conv1")])
        assert prof.managed[0].label == "conv1"

    def test_unknown_ref(self):
        with pytest.raises(UnknownBlockRef):
            record([free(3)])

    def test_double_free(self):
        with pytest.raises(DoubleFree):
            record([alloc(4), free(1), free(1)])

    def test_unbalanced_resume(self):
        with pytest.raises(UnbalancedResume):
            record([resume()])

    def test_nested_interrupts(self):
        prof = record(
            [interrupt(), interrupt(), alloc(5), resume(), alloc(6), resume(), alloc(7)]
        )
        assert prof.unmanaged_count == 2
        assert [b.size for b in prof.managed] == [7]

    def test_clock_discipline(self):
        # without interrupts, event k (1-based) happens at time k
        rng = random.Random(0)
        for _ in range(30):
            events = []
            live = []
            n_alloc = 0
            for _ in range(rng.randint(1, 40)):
                if live and rng.random() < 0.4:
                    k = live.pop(rng.randrange(len(live)))
                    events.append(free(k))
                else:
                    n_alloc += 1
                    live.append(n_alloc)
                    events.append(alloc(rng.randint(1, 9)))
            prof = record(events)
            times = sorted(
                [b.alloc_time for b in prof.managed]
                + [b.free_time for b in prof.managed if b.free_time < prof.horizon]
            )
            assert times == list(range(1, len(times) + 1))
            # ids equal rank in allocation order
            by_alloc = sorted(prof.managed, key=lambda b: b.alloc_time)
            assert [b.id for b in by_alloc] == list(range(1, len(by_alloc) + 1))

    def test_interrupt_neutrality(self):
        base = [alloc(4), alloc(2), free(1), free(2)]
        with_empty_region = [alloc(4), interrupt(), resume(), alloc(2), free(1), free(2)]
        assert record(base) == record(with_empty_region)

    def test_interrupt_region_with_frees_keeps_collisions(self):
        base = [alloc(4), alloc(2), free(1), free(2)]
        wrapped = [alloc(4), alloc(2), interrupt(), free(1), resume(), free(2)]
        inst_a = profile_to_instance(record(base))
        inst_b = profile_to_instance(record(wrapped))
        assert [b.size for b in inst_a.blocks] == [b.size for b in inst_b.blocks]
        assert colliding_pairs(inst_a).pairs == colliding_pairs(inst_b).pairs


class TestProfileToInstance:
    def test_composition(self):
        prof = record(parse_trace("A 4\nA 2\nF 1\nA 3\nF 2\nF 3\n"))
        inst = profile_to_instance(prof)
        assert [(b.size, b.alloc_time, b.free_time) for b in inst.blocks] == [
            (4, 1, 3), (2, 2, 5), (3, 4, 6),
        ]
        assert inst.capacity == 9

    def test_empty_trace(self):
        inst = profile_to_instance(record([]))
        assert not inst.blocks

    def test_all_interrupted(self):
        prof = record([interrupt(), alloc(4), alloc(2), resume()])
        assert prof.unmanaged_count == 2
        assert not profile_to_instance(prof).blocks

    def test_alignment_applied(self):
        inst = profile_to_instance(record([alloc(5)]), alignment=4)
        assert inst.blocks[0].size == 8
