"""Noncrossing partition lattices NC(n) and their incidence algebra.

Provides canonical enumeration of noncrossing partitions, the refinement
order, the incidence functions zeta / delta / Möbius (exact rationals), the
Kreweras complement, the interleaving of two partitions on odd/even slots,
and the even-block sublattice enumeration.

All values are immutable and all functions are pure; memoization tables are
module-level dicts mutated only through single atomic assignments, so
results are identical regardless of thread interleaving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    CrossingPartition,
    DegreeCapExceeded,
    DimensionMismatch,
    OddLength,
)

#: Default ceiling for ground-set sizes; NC(10) has 16,796 elements.
DEFAULT_DEGREE_CAP = 10
#: Absolute ceiling; enumeration above this is refused unconditionally.
HARD_DEGREE_CAP = 12


def catalan(n: int) -> int:
    """The n-th Catalan number C_n = binom(2n, n) / (n + 1)."""
    if n < 0:
        raise ValueError(f"catalan undefined for n={n}")
    return math.comb(2 * n, n) // (n + 1)


def _is_noncrossing(blocks: Sequence[Sequence[int]]) -> bool:
    """True iff no a<b<c<d has {a,c} and {b,d} in two different blocks.

    Two disjoint blocks cross exactly when their merged, sorted elements
    switch between the two blocks at least three times (the alternating
    pattern a b a b); nesting produces at most two switches.
    """
    spans = [(min(b), max(b), set(b)) for b in blocks]
    for i, (lo1, hi1, set1) in enumerate(spans):
        for lo2, hi2, set2 in spans[i + 1 :]:
            if hi1 < lo2 or hi2 < lo1:
                continue  # separated spans never cross
            merged = sorted(set1 | set2)
            sides = [x in set1 for x in merged]
            switches = sum(a != b for a, b in zip(sides, sides[1:]))
            if switches >= 3:
                return False
    return True


@dataclass(frozen=True)
class NcPartition:
    """A noncrossing partition of {1, ..., n} in canonical form.

    Blocks are stored sorted internally and ordered by their minima; two
    partitions are equal iff their canonical forms are equal.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "NcPartition":
        """Canonicalize and validate a partition given as iterables."""
        cleaned: list[tuple[int, ...]] = []
        for b in blocks:
            block = tuple(sorted(set(b)))
            if not block:
                raise ValueError("empty block in partition")
            cleaned.append(block)
        canon = tuple(sorted(cleaned, key=lambda b: b[0]))
        seen: set[int] = set()
        for block in canon:
            for x in block:
                if not 1 <= x <= n:
                    raise ValueError(f"element {x} outside 1..{n}")
                if x in seen:
                    raise ValueError(f"element {x} appears in two blocks")
                seen.add(x)
        if len(seen) != n:
            raise ValueError(f"blocks cover {len(seen)} of {n} elements")
        if not _is_noncrossing(canon):
            raise CrossingPartition(f"blocks {canon} cross")
        return NcPartition(n, canon)

    def block_of(self) -> dict[int, int]:
        """Map each element to the index of its block in canonical order."""
        out: dict[int, int] = {}
        for i, block in enumerate(self.blocks):
            for x in block:
                out[x] = i
        return out

    def to_json_obj(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return "{" + ",".join(
            "(" + ",".join(str(x) for x in b) + ")" for b in self.blocks
        ) + "}"


def zero_partition(n: int) -> NcPartition:
    """0_n: the all-singletons partition (lattice minimum)."""
    return NcPartition(n, tuple((i,) for i in range(1, n + 1)))


def one_partition(n: int) -> NcPartition:
    """1_n: the single-block partition (lattice maximum)."""
    return NcPartition(n, (tuple(range(1, n + 1)),))


def _check_n(n: int, cap: int | None) -> None:
    limit = DEFAULT_DEGREE_CAP if cap is None else cap
    if limit > HARD_DEGREE_CAP:
        limit = HARD_DEGREE_CAP
    if n < 1:
        raise ValueError(f"ground-set size must be positive, got {n}")
    if n > limit:
        raise DegreeCapExceeded(
            f"NC({n}) exceeds the degree cap {limit}"
        )


def _generate_nc(elements: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    """All noncrossing partitions of an ordered ground set, unsorted.

    Recursive decomposition by the block containing the least element: any
    choice S of that block cuts the rest into independent gap intervals,
    each of which carries an arbitrary noncrossing partition.
    """
    if not elements:
        return [()]
    first, rest = elements[0], elements[1:]
    out: list[tuple[tuple[int, ...], ...]] = []
    for mask in range(1 << len(rest)):
        block = [first] + [rest[i] for i in range(len(rest)) if mask >> i & 1]
        gaps: list[list[int]] = []
        cut = iter(block[1:] + [None])
        bound = next(cut)
        current: list[int] = []
        for x in rest:
            if bound is not None and x == bound:
                gaps.append(current)
                current = []
                bound = next(cut)
            elif x not in block:
                current.append(x)
        gaps.append(current)
        partials: list[tuple[tuple[int, ...], ...]] = [(tuple(block),)]
        for gap in gaps:
            if not gap:
                continue
            sub = _generate_nc(tuple(gap))
            partials = [p + q for p in partials for q in sub]
        out.extend(partials)
    return out


@lru_cache(maxsize=None)
def _enumerate_nc_cached(n: int) -> tuple[NcPartition, ...]:
    raw = _generate_nc(tuple(range(1, n + 1)))
    parts = [
        NcPartition(n, tuple(sorted(blocks, key=lambda b: b[0])))
        for blocks in raw
    ]
    parts.sort(key=lambda p: p.blocks)
    return tuple(parts)


def enumerate_nc(n: int, cap: int | None = None) -> list[NcPartition]:
    """All of NC(n), in lexicographic order on canonical block lists."""
    _check_n(n, cap)
    return list(_enumerate_nc_cached(n))


def enumerate_nc_even(m: int, cap: int | None = None) -> list[NcPartition]:
    """All partitions in NC(m) whose blocks all have even size."""
    if m % 2 != 0:
        raise OddLength(f"even-block partitions require even size, got {m}")
    _check_n(m, cap)
    return [
        p
        for p in _enumerate_nc_cached(m)
        if all(len(b) % 2 == 0 for b in p.blocks)
    ]


def _require_same_n(theta: NcPartition, pi: NcPartition) -> None:
    if theta.n != pi.n:
        raise DimensionMismatch(
            f"partitions of different ground sets: {theta.n} vs {pi.n}"
        )


def leq(theta: NcPartition, pi: NcPartition) -> bool:
    """Refinement order: every block of theta lies inside a block of pi."""
    _require_same_n(theta, pi)
    of_pi = pi.block_of()
    return all(
        len({of_pi[x] for x in block}) == 1 for block in theta.blocks
    )


def zeta(theta: NcPartition, pi: NcPartition) -> Fraction:
    """zeta(theta, pi) = 1 if theta <= pi else 0."""
    return Fraction(1) if leq(theta, pi) else Fraction(0)


def delta(theta: NcPartition, pi: NcPartition) -> Fraction:
    """delta(theta, pi) = 1 if theta == pi else 0."""
    _require_same_n(theta, pi)
    return Fraction(1) if theta == pi else Fraction(0)


class NcLattice:
    """NC(n) with its order relation and Möbius function, cached per n.

    ``below[i]`` is the set of indices j with element j <= element i, and
    ``above[i]`` the dual; intervals are intersections of the two.
    """

    def __init__(self, n: int):
        self.n = n
        self.elements = list(_enumerate_nc_cached(n))
        self.index = {p: i for i, p in enumerate(self.elements)}
        size = len(self.elements)
        # labels[j][x] = block index of element x in partition j
        labels: list[list[int]] = []
        for p in self.elements:
            lab = [0] * (n + 1)
            for b, block in enumerate(p.blocks):
                for x in block:
                    lab[x] = b
            labels.append(lab)
        # chains[i] = adjacent same-block element pairs of partition i;
        # theta_i <= pi_j iff every chained pair shares a block of pi_j
        chains = [
            [(b[k], b[k + 1]) for b in p.blocks for k in range(len(b) - 1)]
            for p in self.elements
        ]
        self.below: list[set[int]] = [set() for _ in range(size)]
        self.above: list[set[int]] = [set() for _ in range(size)]
        for i in range(size):
            pairs = chains[i]
            for j in range(size):
                lab = labels[j]
                if all(lab[x] == lab[y] for x, y in pairs):
                    self.below[j].add(i)
                    self.above[i].add(j)
        self._mu: dict[tuple[int, int], Fraction] = {}
        self._mu_to_top: list[Fraction] | None = None

    def interval(self, lo: int, hi: int) -> set[int]:
        """Indices of elements sigma with lo <= sigma <= hi."""
        return self.above[lo] & self.below[hi]

    def mu(self, lo: int, hi: int) -> Fraction:
        """Möbius function on the interval [lo, hi], by index."""
        if lo == hi:
            return Fraction(1)
        if lo not in self.below[hi]:
            return Fraction(0)
        key = (lo, hi)
        cached = self._mu.get(key)
        if cached is not None:
            return cached
        total = Fraction(0)
        for mid in self.interval(lo, hi):
            if mid != hi:
                total -= self.mu(lo, mid)
        self._mu[key] = total
        return total

    def mu_to_top(self) -> list[Fraction]:
        """mu(sigma, 1_n) for every sigma, indexed like ``elements``."""
        if self._mu_to_top is None:
            top = self.index[one_partition(self.n)]
            self._mu_to_top = [
                self.mu(i, top) for i in range(len(self.elements))
            ]
        return self._mu_to_top


@lru_cache(maxsize=None)
def lattice(n: int) -> NcLattice:
    _check_n(n, HARD_DEGREE_CAP)
    return NcLattice(n)


def mobius(theta: NcPartition, pi: NcPartition) -> Fraction:
    """Möbius function of the interval [theta, pi] in NC(n).

    Returns 0 whenever theta is not below pi, matching the incidence-algebra
    convention. Computed by the memoized recursion
    mu(theta, pi) = -sum_{theta <= sigma < pi} mu(theta, sigma).
    """
    _require_same_n(theta, pi)
    lat = lattice(theta.n)
    return lat.mu(lat.index[theta], lat.index[pi])


def kreweras(pi: NcPartition) -> NcPartition:
    """The Kreweras complement of pi.

    On the interleaved points 1, 1', 2, 2', ..., n, n' (pi on unprimed,
    complement on primed), Kr(pi) is the coarsest partition of the primed
    points whose union with pi is noncrossing. Two primed points i' < j'
    are joined exactly when {i+1, ..., j} is a union of blocks of pi.
    """
    n = pi.n
    of_pi = pi.block_of()
    blocks = [set(b) for b in pi.blocks]

    def interval_is_union(i: int, j: int) -> bool:
        members = set(range(i + 1, j + 1))
        touched = {of_pi[x] for x in members}
        return all(blocks[b] <= members for b in touched)

    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if interval_is_union(i, j):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for x in range(1, n + 1):
        groups.setdefault(find(x), []).append(x)
    return NcPartition.from_blocks(n, groups.values())


def interleave(pi: NcPartition, sigma: NcPartition) -> NcPartition:
    """The partition of {1,...,2n} with pi on odd and sigma on even slots.

    Raises CrossingPartition if the union crosses (i.e. sigma is not below
    the Kreweras complement of pi).
    """
    _require_same_n(pi, sigma)
    n = pi.n
    blocks = [tuple(2 * x - 1 for x in b) for b in pi.blocks]
    blocks += [tuple(2 * x for x in b) for b in sigma.blocks]
    return NcPartition.from_blocks(2 * n, blocks)
