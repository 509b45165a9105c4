"""Simple undirected graphs, seeded bijections, and the disagreement-based
statistics built on them (densities, alignment strength, match ratio)."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import ContractError, DegenerateStrengthError, UndefinedDensityError


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def _xor_popcount(a, b):
    total = 0
    for i in range(a.shape[0]):
        for w in range(a.shape[1]):
            x = a[i, w] ^ b[i, w]
            # SWAR popcount on 64-bit words
            x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
            x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
            x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
            total += (x * np.uint64(0x0101010101010101)) >> np.uint64(56)
    return total


_xor_popcount_numba = _accel.njit(_xor_popcount)


def _pack(adj: np.ndarray) -> np.ndarray:
    """Pack boolean rows into little-endian uint64 words."""
    n = adj.shape[0]
    words = max(1, -(-n // 64))
    padded = np.zeros((n, words * 64), dtype=bool)
    padded[:, :n] = adj
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(n, words)


def xor_popcount(a: np.ndarray, b: np.ndarray) -> int:
    """Number of differing bits between two packed bit-matrices."""
    if _accel.USE_NUMBA:
        return int(_xor_popcount_numba(a, b))
    return int(np.bitwise_count(a ^ b).sum())


class Graph:
    """Simple undirected graph on vertices ``0..n_vertices-1``.

    Adjacency is held as a read-only boolean matrix plus a packed bit-matrix
    (one row of uint64 words per vertex) used for XOR-popcount disagreement
    counts.
    """

    __slots__ = ("_adj", "__dict__")

    def __init__(self, adjacency):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ContractError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] < 1:
            raise ContractError("graph needs at least one vertex")
        if adj.diagonal().any():
            raise ContractError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ContractError("adjacency must be symmetric")
        adj.flags.writeable = False
        self._adj = adj

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = np.zeros((n_vertices, n_vertices), dtype=bool)
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size:
            if (e < 0).any() or (e >= n_vertices).any():
                raise ContractError("edge endpoint out of range")
            if (e[:, 0] == e[:, 1]).any():
                raise ContractError("self-loops are not allowed")
            adj[e[:, 0], e[:, 1]] = True
            adj[e[:, 1], e[:, 0]] = True
        return cls(adj)

    @classmethod
    def _trusted(cls, adj: np.ndarray) -> "Graph":
        # Internal constructor for matrices already known to be simple graphs.
        g = cls.__new__(cls)
        adj = np.asarray(adj, dtype=bool)
        adj.flags.writeable = False
        g._adj = adj
        return g

    @property
    def n_vertices(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    @cached_property
    def packed(self) -> np.ndarray:
        return _pack(self._adj)

    @cached_property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self._adj)) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u, v])

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1)

    def edges(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``, sorted."""
        return np.argwhere(np.triu(self._adj, 1))

    def relabel(self, perm: np.ndarray) -> "Graph":
        """Graph ``H`` with ``H[i, j] = self[perm[i], perm[j]]``."""
        return Graph._trusted(self._adj[np.ix_(perm, perm)])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj.shape == other._adj.shape and np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.n_vertices, self.packed.tobytes()))

    def __repr__(self):
        return f"Graph(n_vertices={self.n_vertices}, edges={self.edge_count})"


@dataclass(frozen=True)
class SeedPartition:
    """Seed pairs ``(v1, v2)`` plus the ordered nonseed lists of each side."""

    n_total: int
    seed_pairs: tuple[tuple[int, int], ...] = ()
    nonseeds_1: np.ndarray = field(init=False, repr=False, compare=False)
    nonseeds_2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_total < 1:
            raise ContractError("partition needs at least one vertex")
        pairs = tuple((int(a), int(b)) for a, b in self.seed_pairs)
        object.__setattr__(self, "seed_pairs", pairs)
        first = [a for a, _ in pairs]
        second = [b for _, b in pairs]
        for side in (first, second):
            if len(set(side)) != len(side):
                raise ContractError("seed coordinates must be distinct on each side")
            if any(v < 0 or v >= self.n_total for v in side):
                raise ContractError("seed vertex out of range")
        for name, side in (("nonseeds_1", first), ("nonseeds_2", second)):
            mask = np.ones(self.n_total, dtype=bool)
            mask[side] = False
            rest = np.flatnonzero(mask)
            rest.flags.writeable = False
            object.__setattr__(self, name, rest)

    @classmethod
    def identity_seeds(cls, n_total: int, seeds: Sequence[int] = ()) -> "SeedPartition":
        return cls(n_total, tuple((int(v), int(v)) for v in seeds))

    @property
    def s(self) -> int:
        return len(self.seed_pairs)

    @property
    def n(self) -> int:
        return self.n_total - self.s

    @property
    def seeds_1(self) -> np.ndarray:
        return np.array([a for a, _ in self.seed_pairs], dtype=np.int64)

    @property
    def seeds_2(self) -> np.ndarray:
        return np.array([b for _, b in self.seed_pairs], dtype=np.int64)

    def swapped(self) -> "SeedPartition":
        return SeedPartition(self.n_total, tuple((b, a) for a, b in self.seed_pairs))


class Matching:
    """A seed-respecting bijection ``V1 -> V2``.

    ``assignment[i]`` is the G2 vertex matched to ``partition.nonseeds_1[i]``;
    seed pairs are matched implicitly.
    """

    __slots__ = ("partition", "assignment", "__dict__")

    def __init__(self, partition: SeedPartition, assignment):
        a = np.array(assignment, dtype=np.int64, copy=True).reshape(-1)
        if a.shape[0] != partition.n:
            raise ContractError(f"assignment has {a.shape[0]} entries, partition has {partition.n} nonseeds")
        if not np.array_equal(np.sort(a), partition.nonseeds_2):
            raise ContractError("assignment is not a bijection onto the G2 nonseeds")
        a.flags.writeable = False
        self.partition = partition
        self.assignment = a

    @classmethod
    def identity(cls, partition: SeedPartition) -> "Matching":
        """Each nonseed maps to the same-index vertex; requires identical nonseed sets."""
        return cls(partition, partition.nonseeds_1)

    @classmethod
    def from_permutation(cls, partition: SeedPartition, perm) -> "Matching":
        perm = np.asarray(perm, dtype=np.int64)
        if perm.shape != (partition.n_total,):
            raise ContractError("permutation length does not match the partition")
        for a, b in partition.seed_pairs:
            if perm[a] != b:
                raise ContractError(f"permutation sends seed {a} to {perm[a]}, expected {b}")
        return cls(partition, perm[partition.nonseeds_1])

    @cached_property
    def permutation(self) -> np.ndarray:
        """Full map as an array: ``permutation[v1] = v2``."""
        p = np.empty(self.partition.n_total, dtype=np.int64)
        p[self.partition.seeds_1] = self.partition.seeds_2
        p[self.partition.nonseeds_1] = self.assignment
        p.flags.writeable = False
        return p

    def inverse(self) -> "Matching":
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(self.partition.n_total)
        swapped = self.partition.swapped()
        return Matching(swapped, inv[swapped.nonseeds_1])

    def __eq__(self, other):
        if not isinstance(other, Matching):
            return NotImplemented
        return self.partition == other.partition and np.array_equal(self.assignment, other.assignment)

    def __repr__(self):
        return f"Matching(n_total={self.partition.n_total}, s={self.partition.s})"


def _check(g1: Graph, g2: Graph, m: Matching) -> None:
    if not (g1.n_vertices == g2.n_vertices == m.partition.n_total):
        raise ContractError(
            f"size mismatch: graphs have {g1.n_vertices} and {g2.n_vertices} vertices, "
            f"matching covers {m.partition.n_total}"
        )


def full_disagreements(g1: Graph, g2: Graph, m: Matching) -> int:
    """Unordered pairs of V1 whose adjacency differs from that of their images."""
    _check(g1, g2, m)
    aligned = g2.relabel(m.permutation)
    return xor_popcount(g1.packed, aligned.packed) // 2


def restricted_disagreements(g1: Graph, g2: Graph, m: Matching) -> int:
    """As :func:`full_disagreements`, over nonseed pairs only."""
    _check(g1, g2, m)
    n1 = m.partition.nonseeds_1
    sub1 = g1.adjacency[np.ix_(n1, n1)]
    sub2 = g2.adjacency[np.ix_(m.assignment, m.assignment)]
    return int(np.count_nonzero(sub1 != sub2)) // 2


def full_density(g: Graph) -> float:
    if g.n_vertices < 2:
        raise UndefinedDensityError("density needs at least 2 vertices")
    return g.edge_count / _pairs(g.n_vertices)


def restricted_density(g: Graph, partition: SeedPartition, side: int) -> float:
    """Density of the subgraph induced on ``side``'s nonseeds (side is 1 or 2)."""
    if side not in (1, 2):
        raise ContractError("side must be 1 or 2")
    if g.n_vertices != partition.n_total:
        raise ContractError("graph and partition sizes differ")
    if partition.n < 2:
        raise UndefinedDensityError("restricted density needs at least 2 nonseeds")
    idx = partition.nonseeds_1 if side == 1 else partition.nonseeds_2
    edges = int(np.count_nonzero(g.adjacency[np.ix_(idx, idx)])) // 2
    return edges / _pairs(partition.n)


def _strength(disagreements: int, pairs: int, d1: float, d2: float) -> float:
    chance = d1 * (1.0 - d2) + (1.0 - d1) * d2
    if chance == 0.0:
        raise DegenerateStrengthError(d1, d2)
    return 1.0 - (disagreements / pairs) / chance


def restricted_alignment_strength(g1: Graph, g2: Graph, m: Matching) -> float:
    """1 minus nonseed disagreements relative to their average over all
    seed-respecting bijections. Signed: below 0 means worse than chance."""
    _check(g1, g2, m)
    d1 = restricted_density(g1, m.partition, 1)
    d2 = restricted_density(g2, m.partition, 2)
    return _strength(restricted_disagreements(g1, g2, m), _pairs(m.partition.n), d1, d2)


def full_alignment_strength(g1: Graph, g2: Graph, m: Matching) -> float:
    _check(g1, g2, m)
    d1, d2 = full_density(g1), full_density(g2)
    return _strength(full_disagreements(g1, g2, m), _pairs(g1.n_vertices), d1, d2)


def match_ratio(m: Matching, truth: Matching) -> float:
    """Fraction of nonseeds that ``m`` maps as ``truth`` does."""
    if m.partition != truth.partition:
        raise ContractError("matchings use different seed partitions")
    if m.partition.n == 0:
        raise ContractError("match ratio is undefined without nonseeds")
    return float(np.count_nonzero(m.assignment == truth.assignment)) / m.partition.n
