"""Correlated Bernoulli graph pairs and the distributions that feed them.

Every sampler takes an explicit ``numpy.random.Generator``. Parallel trials
get their own generator from :func:`derive_seed`, which hashes a root seed
together with trial coordinates.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import ContractError, DegenerateMeanError, SpecError, UndefinedDensityError
from .graph import Graph, Matching, SeedPartition, full_density


def derive_seed(root: int, *coords) -> int:
    """Child seed for ``coords`` under ``root``: the first 8 bytes (big endian,
    top bit cleared) of SHA-256 over ``"root|c1|c2|..."``."""
    text = "|".join(str(x) for x in (int(root),) + coords)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def as_root_seed(rng) -> int:
    """Integers pass through; a Generator contributes one draw."""
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63 - 1))
    if rng is None:
        raise ContractError("a seed or generator is required")
    return int(rng)


# -- parameter distributions -------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    p: float

    def validate(self):
        if not 0.0 <= self.p <= 1.0:
            raise SpecError(f"point mass {self.p} outside [0, 1]")

    @property
    def mean(self) -> float:
        return float(self.p)

    @property
    def variance(self) -> float:
        return 0.0

    def sample(self, size: int, rng) -> np.ndarray:
        return np.full(size, float(self.p))

    def describe(self) -> str:
        return f"point({self.p:g})"


@dataclass(frozen=True)
class UniformInterval:
    lo: float
    hi: float

    def validate(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise SpecError(f"uniform interval [{self.lo}, {self.hi}] not inside [0, 1]")

    @property
    def mean(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12

    def sample(self, size: int, rng) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def describe(self) -> str:
        return f"uniform({self.lo:g},{self.hi:g})"


def delta_max(alpha: float, beta: float, mean: float) -> float:
    """Largest support width keeping ``delta*Beta(alpha,beta)`` shifted to
    ``mean`` inside [0, 1]."""
    return min((alpha + beta) / alpha * mean, (alpha + beta) / beta * (1 - mean))


@dataclass(frozen=True)
class ScaledBeta:
    """``delta * Beta(alpha, beta) + mean - delta * alpha / (alpha + beta)``.

    Support has width ``delta`` and the distribution has mean ``mean``.
    """

    alpha: float
    beta: float
    delta: float
    mean_: float

    def validate(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise SpecError("Beta shape parameters must be positive")
        if not 0.0 <= self.mean_ <= 1.0:
            raise SpecError(f"mean {self.mean_} outside [0, 1]")
        if self.delta < 0:
            raise SpecError("delta must be nonnegative")
        limit = delta_max(self.alpha, self.beta, self.mean_)
        if self.delta > limit * (1 + 1e-12) + 1e-15:
            raise SpecError(f"delta {self.delta} exceeds delta_max {limit} for this Beta shape and mean")

    @property
    def offset(self) -> float:
        return self.mean_ - self.delta * self.alpha / (self.alpha + self.beta)

    @property
    def mean(self) -> float:
        return float(self.mean_)

    @property
    def variance(self) -> float:
        a, b = self.alpha, self.beta
        return self.delta**2 * a * b / ((a + b) ** 2 * (a + b + 1))

    def sample(self, size: int, rng) -> np.ndarray:
        if self.delta == 0:
            return np.full(size, float(self.mean_))
        # Beta from two Gammas
        x = rng.standard_gamma(self.alpha, size)
        y = rng.standard_gamma(self.beta, size)
        b = x / (x + y)
        return np.clip(self.delta * b + self.offset, 0.0, 1.0)

    def describe(self) -> str:
        return f"beta({self.alpha:g},{self.beta:g},delta={self.delta:g},mean={self.mean_:g})"


@dataclass(frozen=True)
class Empirical:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def validate(self):
        if not self.values:
            raise SpecError("empirical distribution needs at least one value")
        if min(self.values) < 0 or max(self.values) > 1:
            raise SpecError("empirical values must lie in [0, 1]")

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def variance(self) -> float:
        return float(np.var(self.values))

    def sample(self, size: int, rng) -> np.ndarray:
        return rng.choice(np.asarray(self.values), size=size)

    def describe(self) -> str:
        return f"empirical(k={len(self.values)})"


ParamDistribution = Union[PointMass, UniformInterval, ScaledBeta, Empirical]


def distribution_stats(d: ParamDistribution) -> tuple[float, float, float]:
    """``(mean, variance, heterogeneity correlation)`` in closed form."""
    d.validate()
    mu, var = d.mean, d.variance
    if mu <= 0.0 or mu >= 1.0:
        raise DegenerateMeanError(f"distribution mean {mu} must lie strictly inside (0, 1)")
    return mu, var, var / (mu * (1 - mu))


@dataclass(frozen=True)
class BlockModelSpec:
    """Vertices fall in block ``i`` with probability ``pi[i]``; a pair in
    blocks ``(i, j)`` draws its Bernoulli parameter from ``dists[i][j]``."""

    pi: tuple[float, ...]
    dists: tuple[tuple[ParamDistribution, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(float(x) for x in self.pi))
        object.__setattr__(self, "dists", tuple(tuple(row) for row in self.dists))

    @classmethod
    def point_masses(cls, pi, M) -> "BlockModelSpec":
        M = np.asarray(M, dtype=float)
        return cls(tuple(pi), tuple(tuple(PointMass(float(x)) for x in row) for row in M))

    @property
    def K(self) -> int:
        return len(self.pi)

    @property
    def means(self) -> np.ndarray:
        return np.array([[d.mean for d in row] for row in self.dists])

    def validate(self):
        pi = np.asarray(self.pi)
        if self.K < 1:
            raise SpecError("block model needs at least one block")
        if (pi < 0).any() or abs(pi.sum() - 1.0) > 1e-12:
            raise SpecError(f"block probabilities {self.pi} must be nonnegative and sum to 1")
        if len(self.dists) != self.K or any(len(row) != self.K for row in self.dists):
            raise SpecError("block distribution table must be K x K")
        for i in range(self.K):
            for j in range(self.K):
                if self.dists[i][j] != self.dists[j][i]:
                    raise SpecError("block distribution table must be symmetric")
                self.dists[i][j].validate()


# -- Bernoulli parameters ----------------------------------------------------


@dataclass(frozen=True)
class BernoulliParams:
    """Per-pair edge probabilities as a symmetric matrix (diagonal ignored),
    plus block labels when drawn from a block model."""

    probabilities: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ContractError("probability matrix must be square")
        if p.shape[0] >= 2:
            iu = np.triu_indices(p.shape[0], 1)
            vals = p[iu]
            if (vals < 0).any() or (vals > 1).any():
                raise ContractError("probabilities must lie in [0, 1]")
            if not np.array_equal(vals, p.T[iu]):
                raise ContractError("probability matrix must be symmetric")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_pair_values(cls, n_vertices: int, values: np.ndarray, labels=None) -> "BernoulliParams":
        """Build from upper-triangle values in row-major order."""
        p = np.zeros((n_vertices, n_vertices))
        iu = np.triu_indices(n_vertices, 1)
        p[iu] = values
        p.T[iu] = values
        return cls(p, labels)

    @property
    def n_vertices(self) -> int:
        return self.probabilities.shape[0]

    def pair_values(self) -> np.ndarray:
        return self.probabilities[np.triu_indices(self.n_vertices, 1)]

    @property
    def mean(self) -> float:
        return float(self.pair_values().mean())

    @property
    def variance(self) -> float:
        v = self.pair_values()
        return float(np.mean((v - v.mean()) ** 2))


def sample_params(spec, n_vertices: int, rng) -> BernoulliParams:
    """Independent per-pair parameters from a distribution or block model.

    Pairs are drawn in row-major upper-triangle order. For a block model the
    labels are drawn first (i.i.d. from ``pi``), then block pairs ``(i, j)``
    with ``i <= j`` are filled in lexicographic order.
    """
    rng = as_generator(rng)
    spec.validate()
    if n_vertices < 1:
        raise ContractError("need at least one vertex")
    iu = np.triu_indices(n_vertices, 1)
    if isinstance(spec, BlockModelSpec):
        labels = rng.choice(spec.K, size=n_vertices, p=np.asarray(spec.pi))
        bi, bj = labels[iu[0]], labels[iu[1]]
        lo, hi = np.minimum(bi, bj), np.maximum(bi, bj)
        values = np.empty(iu[0].size)
        for i in range(spec.K):
            for j in range(i, spec.K):
                mask = (lo == i) & (hi == j)
                count = int(mask.sum())
                if count:
                    values[mask] = spec.dists[i][j].sample(count, rng)
        return BernoulliParams.from_pair_values(n_vertices, values, labels)
    values = spec.sample(iu[0].size, rng)
    return BernoulliParams.from_pair_values(n_vertices, values)


def heterogeneity_correlation(params: BernoulliParams) -> float:
    """Variance over ``mu * (1 - mu)`` of the per-pair parameters."""
    if params.n_vertices < 2:
        raise UndefinedDensityError("need at least 2 vertices")
    mu = params.mean
    if mu <= 0.0 or mu >= 1.0:
        raise DegenerateMeanError(f"Bernoulli mean {mu} must lie strictly inside (0, 1)")
    return min(1.0, params.variance / (mu * (1 - mu)))


def total_correlation(rho_h: float, rho_e: float) -> float:
    return 1.0 - (1.0 - rho_h) * (1.0 - rho_e)


def joint_cell_probs(p: float, rho_e: float) -> np.ndarray:
    """Joint law of one pair's adjacency in (G1, G2) given parameter ``p``.

    Returns ``[[P11, P10], [P01, P00]]`` where the first index is G1
    adjacency (1 = edge) and the second is G2.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= rho_e <= 1.0):
        raise ContractError(f"need p and rho_e in [0, 1], got {p}, {rho_e}")
    q = p * (1 - p)
    both = p * p + rho_e * q
    one = (1 - rho_e) * q
    neither = (1 - p) ** 2 + rho_e * q
    return np.array([[both, one], [one, neither]])


# -- correlated pairs --------------------------------------------------------


@dataclass(frozen=True)
class CorrelatedPairSpec:
    """``n`` nonseeds, ``s`` seeds, edge correlation ``edge_corr`` and a
    source of Bernoulli parameters (distribution, block model, or explicit)."""

    n: int
    s: int
    edge_corr: float
    source: object

    @property
    def n_total(self) -> int:
        return self.n + self.s

    def validate(self):
        if self.n < 0 or self.s < 0 or self.n_total < 2:
            raise SpecError("need n, s >= 0 and n + s >= 2")
        if not 0.0 <= self.edge_corr <= 1.0:
            raise SpecError(f"edge correlation {self.edge_corr} outside [0, 1]")
        if isinstance(self.source, BernoulliParams):
            if self.source.n_vertices != self.n_total:
                raise SpecError("explicit parameters do not match n + s")
        else:
            self.source.validate()


class CorrelatedPair(NamedTuple):
    g1: Graph
    g2: Graph
    partition: SeedPartition
    truth: Matching
    params: BernoulliParams


def sample_pair_adjacency(pair_probs: np.ndarray, rho_e: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Edge indicators for G1 and G2, one uniform draw per pair.

    The unit interval is cut into the four joint cells (both, G1 only,
    G2 only, neither); with ``rho_e == 1`` the middle cells are empty so the
    graphs coincide exactly.
    """
    p = pair_probs
    q = p * (1 - p)
    both = p * p + rho_e * q
    one = (1 - rho_e) * q
    u = rng.random(p.shape[0])
    e1 = u < both + one
    e2 = (u < both) | ((u >= both + one) & (u < both + 2 * one))
    return e1, e2


def symmetric_adjacency(n: int, iu, values: np.ndarray) -> np.ndarray:
    a = np.zeros((n, n), dtype=bool)
    a[iu] = values
    a.T[iu] = values
    return a


def choose_seeds(n_total: int, s: int, rng) -> np.ndarray:
    """``s`` distinct vertices, uniformly, by a partial Fisher-Yates shuffle."""
    if not 0 <= s <= n_total:
        raise ContractError(f"cannot pick {s} seeds from {n_total} vertices")
    pool = np.arange(n_total)
    for i in range(s):
        j = int(rng.integers(i, n_total))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:s].copy()


def sample_correlated_pair(spec: CorrelatedPairSpec, rng) -> CorrelatedPair:
    """Draw parameters, then both graphs, then the seeds. Truth is identity."""
    rng = as_generator(rng)
    spec.validate()
    N = spec.n_total
    if isinstance(spec.source, BernoulliParams):
        params = spec.source
    else:
        params = sample_params(spec.source, N, rng)
    iu = np.triu_indices(N, 1)
    e1, e2 = sample_pair_adjacency(params.probabilities[iu], spec.edge_corr, rng)
    g1 = Graph._trusted(symmetric_adjacency(N, iu, e1))
    g2 = Graph._trusted(symmetric_adjacency(N, iu, e2))
    partition = SeedPartition.identity_seeds(N, choose_seeds(N, spec.s, rng))
    return CorrelatedPair(g1, g2, partition, Matching.identity(partition), params)


class ParamSummary(NamedTuple):
    mean: float
    variance: float
    pairs: int


def sample_correlated_pair_streamed(spec: CorrelatedPairSpec, seed: int):
    """Low-memory variant for large ``n``: parameters are generated row by row
    and never stored.

    Row ``u`` (pairs ``(u, v)`` with ``v > u``) uses its own generator seeded
    by ``derive_seed(seed, "row", u)``, so any row can be regenerated
    independently. Seeds come from ``derive_seed(seed, "seeds")``. Returns the
    pair graphs, partition, truth, and a :class:`ParamSummary` in place of
    the parameter matrix. Block models are not supported here.
    """
    spec.validate()
    if isinstance(spec.source, (BlockModelSpec, BernoulliParams)):
        raise SpecError("streamed sampling needs a per-pair distribution")
    N = spec.n_total
    a1 = np.zeros((N, N), dtype=bool)
    a2 = np.zeros((N, N), dtype=bool)
    total = 0.0
    total_sq = 0.0
    count = 0
    for u in range(N - 1):
        row_rng = np.random.default_rng(derive_seed(seed, "row", u))
        p = spec.source.sample(N - 1 - u, row_rng)
        e1, e2 = sample_pair_adjacency(p, spec.edge_corr, row_rng)
        a1[u, u + 1 :] = e1
        a2[u, u + 1 :] = e2
        total += float(p.sum())
        total_sq += float(np.dot(p, p))
        count += p.size
    a1 |= a1.T
    a2 |= a2.T
    mean = total / count
    variance = max(0.0, total_sq / count - mean * mean)
    seeds = choose_seeds(N, spec.s, np.random.default_rng(derive_seed(seed, "seeds")))
    partition = SeedPartition.identity_seeds(N, seeds)
    return (
        Graph._trusted(a1),
        Graph._trusted(a2),
        partition,
        Matching.identity(partition),
        ParamSummary(mean, variance, count),
    )


def erdos_renyi(n_vertices: int, p: float, rng) -> Graph:
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"edge probability {p} outside [0, 1]")
    rng = as_generator(rng)
    iu = np.triu_indices(n_vertices, 1)
    return Graph._trusted(symmetric_adjacency(n_vertices, iu, rng.random(iu[0].size) < p))


def noised_rendition(g: Graph, rho: float, rng, return_mask: bool = False):
    """Mixture of ``g`` and an independent Erdos-Renyi graph of the same density.

    Each pair keeps ``g``'s adjacency with probability ``rho`` and takes the
    noise graph's otherwise. With ``return_mask=True`` also returns the
    per-pair copy indicators (row-major upper triangle).
    """
    if not 0.0 <= rho <= 1.0:
        raise ContractError(f"rho {rho} outside [0, 1]")
    if g.n_vertices < 2:
        raise UndefinedDensityError("noised rendition needs at least 2 vertices")
    rng = as_generator(rng)
    N = g.n_vertices
    iu = np.triu_indices(N, 1)
    noise = rng.random(iu[0].size) < full_density(g)
    copy = rng.random(iu[0].size) < rho
    values = np.where(copy, g.adjacency[iu], noise)
    out = Graph._trusted(symmetric_adjacency(N, iu, values))
    if return_mask:
        return out, copy
    return out


def apportion(n_total: int, pi: Sequence[float]) -> np.ndarray:
    """Deterministic block labels with counts proportional to ``pi``
    (largest-remainder rounding, ties to the lower block index)."""
    pi = np.asarray(pi, dtype=float)
    raw = pi * n_total
    counts = np.floor(raw).astype(int)
    short = n_total - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[:short]] += 1
    return np.repeat(np.arange(pi.size), counts)


def expected_pair_mean(pi: Sequence[float], M) -> float:
    pi = np.asarray(pi, dtype=float)
    return float(pi @ np.asarray(M, dtype=float) @ pi)
