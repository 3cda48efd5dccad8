"""Exact composition identities and a labeled-tree census that certifies them.

Everything here is integer arithmetic.  The central quantity is the sum of
multinomial(n; k_1..k_r) * k_1^{k_2} * ... * k_{r-1}^{k_r} over all ordered
compositions (k_1,...,k_r) of n, which equals (n+1)^(n-1): the number of
labeled trees on n+1 vertices rooted at a fixed vertex, each composition
collecting the trees whose breadth-first level sizes are (k_1,...,k_r).
The tree census enumerates those trees outright (via Pruefer sequences) and
is the independent oracle for the identity, term by term.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, ResourceLimitError

# Enumeration cap for tree_census, in vertices (n + 1 <= cap).  7^5 = 16807
# decodes at 7 vertices stay well under a second; the cap guards against
# accidental calls with large n, not against deliberate larger runs.
DEFAULT_TREE_ENUM_VERTICES = 8


@dataclass(frozen=True)
class Composition:
    """An ordered tuple of positive integers; ``n`` is their sum, ``r`` the length."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise DomainError("a composition needs at least one part")
        if any(k < 1 for k in self.parts):
            raise DomainError(f"composition parts must be >= 1, got {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def r(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class LabeledTree:
    """A labeled tree given by its edge set, with a distinguished root vertex."""

    vertex_count: int
    edges: frozenset[tuple[int, int]]
    root: int = 0

    def __post_init__(self) -> None:
        if len(self.edges) != self.vertex_count - 1:
            raise DomainError(
                f"{self.vertex_count} vertices need {self.vertex_count - 1} edges, "
                f"got {len(self.edges)}"
            )
        if not (0 <= self.root < self.vertex_count):
            raise DomainError(f"root {self.root} outside vertex range")
        for u, v in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise DomainError(f"edge ({u}, {v}) outside vertex range")
        # edge count n-1 plus connectivity makes it a tree
        if self.vertex_count > 1 and len(self._levels()) == 0:
            raise DomainError("edge set is not connected")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def _levels(self) -> list[int]:
        """Sizes of the breadth-first levels below the root; [] if disconnected."""
        adj = self.adjacency()
        seen = [False] * self.vertex_count
        seen[self.root] = True
        frontier = [self.root]
        sizes = []
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        nxt.append(v)
            if nxt:
                sizes.append(len(nxt))
            frontier = nxt
        if not all(seen):
            return []
        return sizes

    def level_profile(self) -> Composition:
        """Composition (|V_1|,...,|V_r|) of vertices at distance 1,...,r from the root."""
        if self.vertex_count == 1:
            raise DomainError("single-vertex tree has no levels below the root")
        return Composition(tuple(self._levels()))


@dataclass(frozen=True)
class TreeCensus:
    """Count of rooted labeled trees on n+1 vertices, broken down by level profile."""

    n: int
    total: int
    profiles: dict[Composition, int] = field(compare=False)

    def __post_init__(self) -> None:
        if sum(self.profiles.values()) != self.total:
            raise DomainError("profile counts do not add up to the census total")


def compositions(n: int) -> Iterator[Composition]:
    """All 2^(n-1) compositions of n, in ascending part count then lexicographic order.

    The order is fixed so fixtures and serialized profiles are reproducible:
    n=3 yields (3), (1,2), (2,1), (1,1,1).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    for r in range(1, n + 1):
        for parts in _compositions_into(n, r):
            yield Composition(parts)


def _compositions_into(n: int, r: int) -> Iterator[tuple[int, ...]]:
    """Compositions of n into exactly r positive parts, lexicographically."""
    if r == 1:
        yield (n,)
        return
    for first in range(1, n - r + 2):
        for rest in _compositions_into(n - first, r - 1):
            yield (first,) + rest


def multinomial(n: int, parts: Composition | Iterable[int]) -> int:
    """Exact multinomial coefficient n! / (k_1! * ... * k_r!)."""
    ks = tuple(parts.parts if isinstance(parts, Composition) else parts)
    if any(k < 0 for k in ks):
        raise DomainError(f"multinomial parts must be >= 0, got {ks}")
    if sum(ks) != n:
        raise DomainError(f"parts {ks} sum to {sum(ks)}, expected {n}")
    out = math.factorial(n)
    for k in ks:
        out //= math.factorial(k)
    return out


def cascade_weight(c: Composition) -> int:
    """Product k_1^{k_2} * k_2^{k_3} * ... * k_{r-1}^{k_r}; 1 for a single part."""
    w = 1
    for prev, cur in zip(c.parts, c.parts[1:]):
        w *= prev**cur
    return w


def identity_lhs(n: int) -> int:
    """Sum of multinomial(n,c) * cascade_weight(c) over all compositions c of n.

    Walks the composition tree once, carrying the running factorial product
    and cascade weight, so n=18 (2^17 compositions) stays in the seconds
    range.  Equals identity_rhs(n) for every n.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    fact = [math.factorial(i) for i in range(n + 1)]
    total = 0

    def extend(remaining: int, last: int, denom: int, weight: int) -> None:
        nonlocal total
        for k in range(1, remaining + 1):
            d = denom * fact[k]
            w = weight * last**k if last else weight
            if k == remaining:
                total += (fact[n] // d) * w
            else:
                extend(remaining - k, k, d, w)

    extend(n, 0, 1, 1)
    return total


def identity_rhs(n: int) -> int:
    """(n+1)^(n-1): rooted labeled trees on n+1 vertices (Cayley)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return (n + 1) ** (n - 1)


def induction_step_check(n: int, s: int) -> tuple[int, int]:
    """Split (n+1)^(n-1) into the first s composition layers plus a remainder.

    Returns (partial, remainder) where partial sums multinomial * cascade
    over compositions with at most s parts, and remainder sums, over all
    (k_1,...,k_s) >= 1 with k_1+...+k_s < n,

        n!/(k_1!...k_s!(n-m)!) * k_s * k_1^{k_2}...k_{s-1}^{k_s} * b^(n-m-1)

    with m = k_1+...+k_s and b = n - k_1 - ... - k_{s-1}.  The two always
    add up to identity_rhs(n).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 1 <= s <= n:
        raise DomainError(f"s must lie in 1..{n}, got {s}")
    fact = [math.factorial(i) for i in range(n + 1)]

    partial = 0
    for r in range(1, s + 1):
        for parts in _compositions_into(n, r):
            partial += multinomial(n, parts) * cascade_weight(Composition(parts))

    remainder = 0
    for m in range(s, n):
        for parts in _compositions_into(m, s):
            denom = fact[n - m]
            for k in parts:
                denom *= fact[k]
            base = n - (m - parts[-1])
            term = (fact[n] // denom) * parts[-1]
            term *= cascade_weight(Composition(parts))
            term *= base ** (n - m - 1)
            remainder += term
    return partial, remainder


def forest_identity_lhs(n: int) -> int:
    """Forest-style analogue: sum over compositions of multinomial * prod k^(k-1),
    with the r-part layer divided by r!.

    The division removes the ordering of the blocks: a set partition into r
    blocks is hit r! times by ordered compositions, so the raw ordered sum
    overcounts (4 instead of 3 already at n=2).  The divided sum equals
    identity_rhs(n); the inner sum is always divisible by r!, and a failed
    division is a bug, not an input error.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    total = 0
    for r in range(1, n + 1):
        inner = 0
        for parts in _compositions_into(n, r):
            term = multinomial(n, parts)
            for k in parts:
                term *= k ** (k - 1)
            inner += term
        q, rem = divmod(inner, math.factorial(r))
        if rem:
            raise AssertionError(f"layer r={r} of n={n} not divisible by r!")
        total += q
    return total


def forest_identity_ordered_sum(n: int) -> int:
    """The raw ordered sum (no 1/r!); differs from identity_rhs(n) for n >= 2."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    total = 0
    for c in compositions(n):
        term = multinomial(c.n, c)
        for k in c.parts:
            term *= k ** (k - 1)
        total += term
    return total


def prufer_decode(seq: Sequence[int]) -> LabeledTree:
    """Decode a Pruefer sequence of length m-2 into the labeled tree on {0..m-1}.

    Uses the standard smallest-leaf convention, a bijection onto all m^(m-2)
    labeled trees on m vertices.  The returned tree is rooted at 0.
    """
    m = len(seq) + 2
    for v in seq:
        if not 0 <= v < m:
            raise DomainError(f"sequence entry {v} outside vertex set 0..{m - 1}")
    deg = [1] * m
    for v in seq:
        deg[v] += 1
    leaves = [v for v in range(m) if deg[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        deg[leaf] -= 1
        deg[v] -= 1
        if deg[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return LabeledTree(vertex_count=m, edges=frozenset(edges), root=0)


def tree_census(n: int, max_vertices: int = DEFAULT_TREE_ENUM_VERTICES) -> TreeCensus:
    """Enumerate all labeled trees on {0..n}, rooted at 0, grouped by level profile.

    Decodes every Pruefer sequence over n+1 labels, so the total is
    (n+1)^(n-1) by construction of the bijection, and each profile count is
    an independently enumerated value to hold against
    multinomial(n, c) * cascade_weight(c).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    m = n + 1
    if m > max_vertices:
        raise ResourceLimitError(
            f"census over {m} vertices exceeds the cap of {max_vertices}"
        )
    counts: Counter[Composition] = Counter()
    for seq in itertools.product(range(m), repeat=m - 2):
        tree = prufer_decode(seq)
        counts[tree.level_profile()] += 1
    total = sum(counts.values())
    return TreeCensus(n=n, total=total, profiles=dict(counts))
