import pytest

from memplan import (
    GenSpec,
    cnn_like_trace,
    generate,
    parse_trace,
    profile_to_instance,
    record,
    rnn_epoch_lengths,
    rnn_like_trace,
)


class TestGenSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GenSpec(model="mlp")
        with pytest.raises(ValueError):
            GenSpec(model="cnn", layers=0)
        with pytest.raises(ValueError):
            GenSpec(model="rnn", batch=0)
        with pytest.raises(ValueError):
            GenSpec(model="rnn", variable_length=(5, 3))


class TestCnnLike:
    def test_block_counts(self):
        spec = GenSpec(model="cnn", layers=3, seed=1)
        prof = record(parse_trace(cnn_like_trace(spec)))
        labels = [b.label for b in prof.managed]
        assert labels == ["act1", "ws1", "act2", "ws2", "act3", "ws3"]

    def test_no_workspace(self):
        spec = GenSpec(model="cnn", layers=3, seed=1, workspace=False)
        prof = record(parse_trace(cnn_like_trace(spec)))
        assert [b.label for b in prof.managed] == ["act1", "act2", "act3"]

    def test_activations_nest(self):
        spec = GenSpec(model="cnn", layers=5, seed=2)
        prof = record(parse_trace(cnn_like_trace(spec)))
        acts = [b for b in prof.managed if b.label.startswith("act")]
        for outer, inner in zip(acts, acts[1:]):
            assert outer.alloc_time < inner.alloc_time
            assert inner.free_time < outer.free_time

    def test_deterministic_per_seed(self):
        spec = GenSpec(model="cnn", layers=4, seed=9)
        assert cnn_like_trace(spec) == cnn_like_trace(spec)
        other = GenSpec(model="cnn", layers=4, seed=10)
        assert cnn_like_trace(spec) != cnn_like_trace(other)

    def test_deep_nets_stay_bounded(self):
        spec = GenSpec(model="cnn", layers=2000, seed=0)
        inst = profile_to_instance(record(parse_trace(cnn_like_trace(spec))))
        assert len(inst.blocks) == 4000
        assert max(b.size for b in inst.blocks) < 2**32


class TestRnnLike:
    def test_event_structure_is_length_independent(self):
        spec = GenSpec(model="rnn", layers=4, seed=3, variable_length=(10, 50))
        short = parse_trace(rnn_like_trace(spec, 10))
        long = parse_trace(rnn_like_trace(spec, 50))
        assert len(short) == len(long)
        assert [e.kind for e in short] == [e.kind for e in long]
        diffs = [
            (a.size, b.size)
            for a, b in zip(short, long)
            if a.kind == "alloc" and a.size != b.size
        ]
        assert len(diffs) == 1  # only the sequence buffer scales
        assert diffs[0][1] == diffs[0][0] * 5  # 50/10

    def test_lengths_deterministic_and_in_range(self):
        spec = GenSpec(model="rnn", seed=7, variable_length=(10, 50))
        lengths = rnn_epoch_lengths(spec, 100)
        assert lengths == rnn_epoch_lengths(spec, 100)
        assert all(10 <= l <= 50 for l in lengths)

    def test_fixed_length_range_means_hot_trace(self):
        spec = GenSpec(model="rnn", seed=5, variable_length=(16, 16))
        lengths = rnn_epoch_lengths(spec, 20)
        assert set(lengths) == {16}
        assert rnn_like_trace(spec, 16) == generate(spec)

    def test_untimed_region_emits_markers(self):
        spec = GenSpec(model="rnn", layers=2, seed=1, untimed=True)
        text = rnn_like_trace(spec, 8)
        assert "\nI\n" in text and "\nR\n" in text
        prof = record(parse_trace(text))
        assert prof.unmanaged_count == 1

    def test_traces_free_everything(self):
        spec = GenSpec(model="rnn", layers=3, seed=2)
        prof = record(parse_trace(rnn_like_trace(spec, 12)))
        assert all(b.free_time < prof.horizon for b in prof.managed)
