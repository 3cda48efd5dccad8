"""The ball-and-urn model: statistic, exact formula, enumeration oracle, sampler.

N distinguishable balls land uniformly in M urns.  The statistic X is the
largest r in {1..M} such that urns 1..k hold at least k balls for every
k <= r.  Its law matches the avalanche law with p = 1/M, which the
exhaustive enumerator checks against the closed formula with no shared
arithmetic between the two routes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from .distributions import Pmf, rational_pow
from .errors import DomainError, ResourceLimitError
from .sampling import SimResult, SplitMix64, derive_stream, merge_histograms, shard_sizes

# Cap on M**N for the exhaustive oracle; keeps a default run in the seconds
# range on one core.
DEFAULT_ENUMERATION_CAP = 10**7

# Trials processed per vectorized block inside the sampler (memory bound,
# not a semantics knob: draws are consumed in trial-major order regardless).
_BLOCK_TRIALS = 1 << 16


@dataclass(frozen=True)
class UrnConfig:
    """N balls thrown into M urns."""

    N: int
    M: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")


def urn_statistic(assignment: Sequence[int], M: int) -> int:
    """X for one assignment (entry j = urn of ball j, urns numbered 1..M).

    Single left-to-right cumulative scan: X is one less than the first k
    whose cumulative count falls short, 0 if urn 1 is empty, and at most
    min(N, M).
    """
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    n = len(assignment)
    cap = min(n, M)
    counts = [0] * (cap + 1)
    for u in assignment:
        if not 1 <= u <= M:
            raise DomainError(f"urn id {u} outside 1..{M}")
        if u <= cap:
            counts[u] += 1
    cum = 0
    for k in range(1, cap + 1):
        cum += counts[k]
        if cum < k:
            return k - 1
    return cap


def _statistic_rows(urns: np.ndarray, M: int) -> np.ndarray:
    """X per row of an (trials, N) array of urn ids in 1..M.

    Sorting makes the cumulative condition columnwise: with row sorted
    ascending, urns 1..k hold >= k balls iff the k-th smallest id is <= k,
    so X is the length of the leading run of sorted[k] <= k.
    """
    n = urns.shape[1]
    cap = min(n, M)
    s = np.sort(urns, axis=1)[:, :cap]
    ok = s <= np.arange(1, cap + 1, dtype=urns.dtype)
    return np.cumprod(ok, axis=1).sum(axis=1)


def urn_pmf_formula(cfg: UrnConfig) -> Pmf:
    """Exact law of X from the closed formula:

        P(X=a) = C(N,a) (a+1)^(a-1) M^(-a) (1 - (a+1)/M)^(N-a).

    Requires M >= N+1 so every factor with a positive exponent stays
    nonnegative; the statistic itself is defined for any M.
    """
    if cfg.M < cfg.N + 1:
        raise DomainError(f"formula path needs M >= N+1, got N={cfg.N}, M={cfg.M}")
    N, M = cfg.N, cfg.M
    probs = tuple(
        comb(N, a)
        * rational_pow(a + 1, a - 1)
        * rational_pow(Fraction(1, M), a)
        * rational_pow(1 - Fraction(a + 1, M), N - a)
        for a in range(N + 1)
    )
    return Pmf(
        support=tuple(range(N + 1)),
        probs=probs,
        exact=True,
        label=f"urn-formula(N={N},M={M})",
    )


def urn_pmf_bruteforce(cfg: UrnConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> Pmf:
    """Exact law of X by enumerating all M^N assignments and scoring each one."""
    N, M = cfg.N, cfg.M
    total = M**N
    if total > cap:
        raise ResourceLimitError(f"{M}^{N} = {total} assignments exceed the cap of {cap}")
    counts = Counter(
        urn_statistic(assignment, M) for assignment in product(range(1, M + 1), repeat=N)
    )
    probs = tuple(Fraction(counts.get(a, 0), total) for a in range(N + 1))
    return Pmf(
        support=tuple(range(N + 1)),
        probs=probs,
        exact=True,
        label=f"urn-bruteforce(N={N},M={M})",
    )


def simulate_urns(cfg: UrnConfig, trials: int, seed: int, shards: int = 1) -> SimResult:
    """Histogram of X over i.i.d. uniform assignments.

    Shard i draws from the stream derive_stream(seed, i); within a shard,
    draws are consumed trial-major (trial 0 balls 1..N, then trial 1, ...),
    so the result is a pure function of (cfg, trials, seed, shards).
    """
    parts = []
    for i, n_trials in enumerate(shard_sizes(trials, shards)):
        stream = SplitMix64(derive_stream(seed, i))
        hist: Counter[int] = Counter()
        done = 0
        while done < n_trials:
            block = min(_BLOCK_TRIALS, n_trials - done)
            draws = stream.integers_below(cfg.M, block * cfg.N)
            urns = draws.reshape(block, cfg.N) + 1
            xs = _statistic_rows(urns, cfg.M)
            binned = np.bincount(xs, minlength=cfg.N + 1)
            hist.update({a: int(c) for a, c in enumerate(binned) if c})
            done += block
        parts.append(hist)
    return SimResult(
        histogram=merge_histograms(parts),
        trials=trials,
        seed=seed,
        shards=shards,
        model="urn",
        params={"N": cfg.N, "M": cfg.M},
    )
