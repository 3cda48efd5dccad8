"""Reproducible random sampling: a counter-mixing generator and shard plumbing.

The generator is SplitMix64: output k of a stream with base b is

    finalize((b + (k+1) * GOLDEN) mod 2^64)

where GOLDEN = 0x9E3779B97F4A7C15 and finalize is the usual xor-shift /
multiply avalanche chain (z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27;
z *= 0x94D049BB133111EB; z ^= z>>31).  Streams for shard i (and, for
multi-coordinate models, coordinate j) are derived by feeding the indices
through the same mix: derive_stream(seed, i) = finalize(seed + (i+1)*GOLDEN),
applied once per index.  Because outputs are a pure function of (base,
counter), results are bit-reproducible and independent of internal batch
sizes.

Bounded draws use rejection below the largest multiple of the bound, so
there is no modulo bias: the k-th draw in [0, bound) is (the k-th raw
output below floor(2^64/bound)*bound) mod bound.  The stream counter
advances over every raw output examined, accepted or not.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """The SplitMix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def derive_stream(seed: int, *indices: int) -> int:
    """Fold shard/coordinate indices into a stream base, one mix per index."""
    base = seed & MASK64
    for i in indices:
        base = mix64((base + (i + 1) * GOLDEN) & MASK64)
    return base


_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_GOLDEN_NP = np.uint64(GOLDEN)


def _mix64_batch(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _MUL1
    z = z ^ (z >> np.uint64(27))
    z = z * _MUL2
    z = z ^ (z >> np.uint64(31))
    return z


class SplitMix64:
    """One stream of the counter-mixing generator described in the module docs."""

    def __init__(self, base: int):
        self.base = base & MASK64
        self.counter = 0  # raw outputs examined so far

    def _raw_block(self, count: int) -> np.ndarray:
        """Raw outputs at counter positions counter+1 .. counter+count (no advance)."""
        start = (self.base + self.counter * GOLDEN) & MASK64
        ks = np.arange(1, count + 1, dtype=np.uint64)
        return _mix64_batch(np.uint64(start) + ks * _GOLDEN_NP)

    def integers_below(self, bound: int, count: int) -> np.ndarray:
        """The next ``count`` uniform draws in [0, bound), as int64.

        Rejection sampling against the largest multiple of ``bound``; the
        counter lands exactly after the raw output that produced the last
        accepted draw, so results do not depend on the batch size used here.
        """
        if bound < 1:
            raise DomainError(f"bound must be >= 1, got {bound}")
        if count < 0:
            raise DomainError(f"count must be >= 0, got {count}")
        limit = ((1 << 64) // bound) * bound
        accept_all = limit == 1 << 64
        bound_np = np.uint64(bound)
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            need = count - filled
            batch = max(need + 16, 1024)
            raws = self._raw_block(batch)
            if accept_all:
                hits = np.arange(batch)
            else:
                hits = np.flatnonzero(raws < np.uint64(limit))
            if len(hits) >= need:
                # stop right after the raw that produced the last needed draw
                taken = hits[:need]
                out[filled : filled + need] = (raws[taken] % bound_np).astype(np.int64)
                self.counter += int(taken[-1]) + 1
                filled = count
            else:
                out[filled : filled + len(hits)] = (raws[hits] % bound_np).astype(np.int64)
                self.counter += batch
                filled += len(hits)
        return out


@dataclass(frozen=True)
class SimResult:
    """Histogram of a simulated statistic plus everything needed to replay it."""

    histogram: dict[int, int]
    trials: int
    seed: int
    shards: int
    model: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if sum(self.histogram.values()) != self.trials:
            raise DomainError("histogram counts do not add up to the trial count")


def shard_sizes(trials: int, shards: int) -> list[int]:
    """Split trials across shards: shard i gets trials//shards, the first
    trials % shards shards one extra."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if shards < 1:
        raise DomainError(f"shards must be >= 1, got {shards}")
    base, extra = divmod(trials, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def merge_histograms(parts: list[Counter]) -> dict[int, int]:
    total: Counter[int] = Counter()
    for part in parts:
        total.update(part)
    return {a: total[a] for a in sorted(total)}
