"""Product system of cyclic towers, its avalanche-size function, and exact laws.

Each coordinate lives on Z_L with the shift x -> x + w (mod L), base
B = {0..w-1} and excited top level U = {h*w .. h*w + w - 1}; the levels
S^k(B), k = 0..h, are pairwise disjoint because (h+1)*w <= L, and the
uniform measure gives U exact mass w/L.  Heights must exceed the coordinate
count (h + 1 > N) so no coordinate can pass through its excited set twice
within one cascade.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .combinatorics import Composition, _compositions_into, cascade_weight, multinomial
from .distributions import Pmf
from .errors import DomainError, ResourceLimitError
from .sampling import SimResult, SplitMix64, derive_stream, merge_histograms, shard_sizes

# Cap on the product of the L_i for the exhaustive oracle.
DEFAULT_STATE_CAP = 10**7

# Cap on N for the exact heterogeneous law (the partition sum over r and
# block sizes; cheap after the block-constant factoring below, but kept as a
# contract: at N=10 the full pmf evaluates in well under a second).
DEFAULT_GENERAL_N_CAP = 10

_BLOCK_TRIALS = 1 << 16


@dataclass(frozen=True)
class CoordinateTower:
    """One cyclic coordinate: state space size L, base width w, height h."""

    L: int
    w: int
    height: int

    def __post_init__(self) -> None:
        if self.w < 1:
            raise DomainError(f"base width must be >= 1, got {self.w}")
        if self.height < 0:
            raise DomainError(f"height must be >= 0, got {self.height}")
        if (self.height + 1) * self.w > self.L:
            raise DomainError(
                f"levels not disjoint: ({self.height}+1)*{self.w} > {self.L}"
            )

    @property
    def p(self) -> Fraction:
        """Exact mass of the excited set under the uniform measure."""
        return Fraction(self.w, self.L)

    def in_excited(self, x: int) -> bool:
        return self.height * self.w <= x < (self.height + 1) * self.w

    def step(self, x: int, l: int = 1) -> int:
        return (x + l * self.w) % self.L


@dataclass(frozen=True)
class TowerSystem:
    """N coordinate towers driven jointly by the product shift."""

    coords: tuple[CoordinateTower, ...]

    def __post_init__(self) -> None:
        n = len(self.coords)
        if n < 1:
            raise DomainError("a system needs at least one coordinate")
        for i, c in enumerate(self.coords):
            if c.height + 1 <= n:
                raise DomainError(
                    f"coordinate {i}: height+1 = {c.height + 1} must exceed N = {n}"
                )

    @property
    def N(self) -> int:
        return len(self.coords)

    def ps(self) -> tuple[Fraction, ...]:
        return tuple(c.p for c in self.coords)


def make_tower_system(specs: Sequence[tuple[int, int, int]]) -> TowerSystem:
    """Build and validate a system from (L, w, height) triples."""
    return TowerSystem(coords=tuple(CoordinateTower(L, w, h) for L, w, h in specs))


def _check_state(x: Sequence[int], sys: TowerSystem) -> None:
    if len(x) != sys.N:
        raise DomainError(f"state has {len(x)} coordinates, system has {sys.N}")
    for i, (xi, c) in enumerate(zip(x, sys.coords)):
        if not 0 <= xi < c.L:
            raise DomainError(f"coordinate {i}: {xi} outside 0..{c.L - 1}")


def avalanche_trace(x: Sequence[int], sys: TowerSystem) -> list[int]:
    """The cascade counts A(x,1), A(x,2), ... up to and including the first repeat.

    A(x,1) counts coordinates already excited; A(x,k+1) counts coordinates i
    with S_i^l(x_i) excited for some 0 <= l <= A(x,k).  The sequence is
    nondecreasing and repeats within N steps; the final value is the
    avalanche size.
    """
    _check_state(x, sys)

    def fires_by(i: int, horizon: int) -> bool:
        c = sys.coords[i]
        return any(c.in_excited(c.step(x[i], l)) for l in range(horizon + 1))

    trace = [sum(1 for i in range(sys.N) if sys.coords[i].in_excited(x[i]))]
    while True:
        horizon = trace[-1]
        nxt = sum(1 for i in range(sys.N) if fires_by(i, horizon))
        trace.append(nxt)
        if nxt == horizon:
            return trace
        if len(trace) > sys.N + 1:
            raise AssertionError("cascade failed to stabilize within N steps")


def avalanche_size(x: Sequence[int], sys: TowerSystem) -> int:
    """The stable value of the cascade count at x."""
    return avalanche_trace(x, sys)[-1]


def _hit_times(states: np.ndarray, tower: CoordinateTower, horizon: int) -> np.ndarray:
    """Per-state smallest l <= horizon with S^l(x) excited; horizon+1 if none.

    Inside the tower (x < (h+1)w) the hit happens at l = h - x//w, the
    number of levels still to climb; outside it no iterate within
    l <= N <= h can re-enter the top level, because the levels are disjoint
    and wrapping lands strictly below it.
    """
    level = states // tower.w
    in_tower = states < (tower.height + 1) * tower.w
    t = np.where(in_tower, tower.height - level, horizon + 1)
    return np.minimum(t, horizon + 1).astype(np.int64)


def _sizes_from_hits(hits: np.ndarray) -> np.ndarray:
    """Vector fixed point of the cascade recursion given per-coordinate hit times."""
    a = (hits == 0).sum(axis=1)
    for _ in range(hits.shape[1] + 1):
        nxt = (hits <= a[:, None]).sum(axis=1)
        if np.array_equal(nxt, a):
            return a
        a = nxt
    raise AssertionError("cascade failed to stabilize within N steps")


def simulate_tower(sys: TowerSystem, trials: int, seed: int, shards: int = 1) -> SimResult:
    """Histogram of the avalanche size over i.i.d. product-uniform states.

    Shard i, coordinate j draws from derive_stream(seed, i, j); trial t uses
    the t-th draw of each coordinate stream.  Same determinism contract as
    simulate_urns.
    """
    parts = []
    for i, n_trials in enumerate(shard_sizes(trials, shards)):
        streams = [SplitMix64(derive_stream(seed, i, j)) for j in range(sys.N)]
        hist: Counter[int] = Counter()
        done = 0
        while done < n_trials:
            block = min(_BLOCK_TRIALS, n_trials - done)
            hits = np.empty((block, sys.N), dtype=np.int64)
            for j, (stream, tower) in enumerate(zip(streams, sys.coords)):
                states = stream.integers_below(tower.L, block)
                hits[:, j] = _hit_times(states, tower, sys.N)
            sizes = _sizes_from_hits(hits)
            binned = np.bincount(sizes, minlength=sys.N + 1)
            hist.update({a: int(c) for a, c in enumerate(binned) if c})
            done += block
        parts.append(hist)
    return SimResult(
        histogram=merge_histograms(parts),
        trials=trials,
        seed=seed,
        shards=shards,
        model="tower",
        params={"coords": [[c.L, c.w, c.height] for c in sys.coords]},
    )


def tower_pmf_bruteforce(sys: TowerSystem, cap: int = DEFAULT_STATE_CAP) -> Pmf:
    """Exact avalanche law by scoring every state of the product space.

    Probabilities are rationals with denominator prod(L_i).  Uses the
    literal cascade recursion per state, so the cost is O(states * N^2).
    """
    total = 1
    for c in sys.coords:
        total *= c.L
    if total > cap:
        raise ResourceLimitError(f"{total} states exceed the cap of {cap}")
    counts: Counter[int] = Counter()
    for x in product(*(range(c.L) for c in sys.coords)):
        counts[avalanche_size(x, sys)] += 1
    probs = tuple(Fraction(counts.get(a, 0), total) for a in range(sys.N + 1))
    return Pmf(
        support=tuple(range(sys.N + 1)),
        probs=probs,
        exact=True,
        label=f"tower-bruteforce(N={sys.N})",
    )


def avalanche_pmf_general(
    ps: Sequence[Fraction], n_cap: int = DEFAULT_GENERAL_N_CAP
) -> Pmf:
    """Exact avalanche law for heterogeneous excitation masses p_1..p_N.

    P(A=a) sums, over the cascade depth r, the block sizes (k_1,...,k_r)
    with k_1+...+k_r = a, and the ordered partitions of the coordinates into
    blocks I_1..I_r plus the never-firing block, the product

        prod_{I_1} p_i * prod_{l=2..r} prod_{I_l} k_{l-1} p_i
            * prod_{rest} (1 - (a+1) p_i).

    Every firing block multiplies p_i by a block-constant, so summing over
    the partitions of a fixed firing set S factors exactly into
    multinomial(a; k_1..k_r) * k_1^{k_2}...k_{r-1}^{k_r} * prod_{S} p_i, and
    the partition sum reduces to an enumeration of compositions of a times
    an enumeration of firing sets S.  The a = 0 term is prod(1 - p_i).
    """
    ps = tuple(Fraction(p) for p in ps)
    n = len(ps)
    if n < 1:
        raise DomainError("need at least one coordinate")
    if n > n_cap:
        raise ResourceLimitError(f"N = {n} exceeds the cap of {n_cap}")
    for i, p in enumerate(ps):
        if p < 0 or n * p > 1:
            raise DomainError(f"coordinate {i}: p = {p} outside [0, 1/N]")

    probs = [Fraction(0)] * (n + 1)
    probs[0] = _product(1 - p for p in ps)
    for a in range(1, n + 1):
        comp_sum = 0
        for r in range(1, a + 1):
            for parts in _compositions_into(a, r):
                comp_sum += multinomial(a, parts) * cascade_weight(Composition(parts))
        subset_sum = Fraction(0)
        for firing in combinations(range(n), a):
            fire = set(firing)
            term = Fraction(1)
            for i, p in enumerate(ps):
                term *= p if i in fire else 1 - (a + 1) * p
            subset_sum += term
        probs[a] = comp_sum * subset_sum
    return Pmf(
        support=tuple(range(n + 1)),
        probs=tuple(probs),
        exact=True,
        label=f"avalanche-general(N={n})",
    )


def _product(factors) -> Fraction:
    out = Fraction(1)
    for f in factors:
        out *= f
    return out
