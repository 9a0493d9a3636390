"""Synthetic trace generators: desk-scale CNN-like and RNN-like workloads.

The CNN-like model emits the classic training shape: layer-i's activation
is allocated at forward step i and freed at backward step 2L-i, so the
activations nest, plus an optional short-lived workspace block per layer.
Activation sizes shrink with depth while workspaces grow, which is what
makes the dynamic pool baseline fragment.

The RNN-like model keeps its event structure fixed across epochs: one
sequence buffer whose size scales with the drawn sequence length, plus
fixed-size per-layer state and scratch blocks.  Only the buffer size
varies, so an epoch that sets a new length record triggers exactly one
reoptimization downstream.

All output is deterministic per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class GenSpec:
    """Knobs for the synthetic generators."""

    model: str  # "cnn" | "rnn"
    layers: int = 8
    batch: int = 32
    seed: int = 0
    variable_length: tuple[int, int] | None = None  # rnn sequence-length range
    workspace: bool = True  # cnn: emit per-layer workspace blocks
    untimed: bool = False  # rnn: wrap a scratch region in interrupt/resume

    def __post_init__(self) -> None:
        if self.model not in ("cnn", "rnn"):
            raise ValueError(f"model must be 'cnn' or 'rnn', got {self.model!r}")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        if self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch}")
        if self.variable_length is not None:
            lo, hi = self.variable_length
            if not (1 <= lo <= hi):
                raise ValueError(f"bad length range {self.variable_length}")


def cnn_like_trace(spec: GenSpec) -> str:
    """Forward/backward triangular trace; n = 2*layers blocks (or layers
    without workspace)."""
    rng = random.Random(spec.seed)
    lines = [f"# cnn-like: layers={spec.layers} batch={spec.batch} seed={spec.seed}"]
    act_refs = []
    ref = 0
    for i in range(1, spec.layers + 1):
        # activations shrink with depth (spatial pooling), workspaces grow
        # (channel counts); both saturate so arbitrarily deep nets stay sane
        act = spec.batch * max(8, round(2048 * 0.88 ** min(i, 64) * rng.uniform(0.75, 1.3)))
        lines.append(f"A {act} act{i}")
        ref += 1
        act_refs.append(ref)
        if spec.workspace:
            grow = 1.0 + 4.0 * i / (i + 12.0)
            ws = spec.batch * max(8, round(320 * grow * rng.uniform(0.85, 1.2)))
            lines.append(f"A {ws} ws{i}")
            ref += 1
            lines.append(f"F {ref}")
    for i in range(spec.layers, 0, -1):
        lines.append(f"F {act_refs[i - 1]}")
    return "\n".join(lines) + "\n"


def rnn_epoch_lengths(spec: GenSpec, epochs: int) -> list[int]:
    """The seeded sequence-length draw for each epoch."""
    lo, hi = spec.variable_length if spec.variable_length else (16, 16)
    rng = random.Random(f"{spec.seed}-lengths")
    return [rng.randint(lo, hi) for _ in range(epochs)]


def rnn_like_trace(spec: GenSpec, length: int) -> str:
    """One epoch's trace for the given sequence length.

    The event sequence (kinds, order, count) is identical for every
    length; only the sequence buffer's size scales with it.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    rng = random.Random(spec.seed)  # per-layer constants, length-independent
    state = [
        spec.batch * max(8, round(512 * rng.uniform(0.7, 1.4)))
        for _ in range(spec.layers)
    ]
    scratch = [
        spec.batch * max(8, round(96 * rng.uniform(0.5, 1.6)))
        for _ in range(spec.layers)
    ]
    untimed_size = spec.batch * max(8, round(640 * rng.uniform(0.8, 1.2)))

    lines = [
        f"# rnn-like: layers={spec.layers} batch={spec.batch} "
        f"seed={spec.seed} length={length}"
    ]
    ref = 0
    seq = spec.batch * 64 * length
    lines.append(f"A {seq} seq")
    ref += 1
    seq_ref = ref
    state_refs = []
    for i in range(1, spec.layers + 1):
        lines.append(f"A {state[i - 1]} h{i}")
        ref += 1
        state_refs.append(ref)
        lines.append(f"A {scratch[i - 1]} tmp{i}")
        ref += 1
        lines.append(f"F {ref}")
    if spec.untimed:
        lines.append("I")
        lines.append(f"A {untimed_size} beam")
        ref += 1
        lines.append(f"F {ref}")
        lines.append("R")
    for r in reversed(state_refs):
        lines.append(f"F {r}")
    lines.append(f"F {seq_ref}")
    return "\n".join(lines) + "\n"


def generate(spec: GenSpec) -> str:
    """Trace text for the given settings; rnn uses the first drawn length."""
    if spec.model == "cnn":
        return cnn_like_trace(spec)
    return rnn_like_trace(spec, rnn_epoch_lengths(spec, 1)[0])
