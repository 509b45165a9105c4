"""Phantom alignment strength: the strength a matcher reports on graphs that
share no signal at all, and the threshold rule built on it."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError, SpecError
from .graph import Graph, SeedPartition, restricted_alignment_strength
from .matchers import SgmConfig, sgm_match
from .parallel import map_trials
from .random_models import (
    BernoulliParams,
    BlockModelSpec,
    symmetric_adjacency,
    apportion,
    as_root_seed,
    choose_seeds,
    derive_seed,
    erdos_renyi,
    sample_pair_adjacency,
)

DEFAULT_REPLICATES = 10
DEFAULT_EPSILON = 0.03


class DensityMode(str, enum.Enum):
    COMBINED = "combined"
    PER_GRAPH = "per-graph"
    BLOCK = "block"


@dataclass(frozen=True)
class PhantomEstimate:
    q_hat: float
    replicates: int
    per_replicate_strengths: tuple[float, ...]
    density_mode: DensityMode
    n: int
    s: int
    densities: tuple[float, ...]
    seeds: tuple[int, ...] = ()

    @property
    def std(self) -> float:
        return float(np.std(self.per_replicate_strengths, ddof=1)) if self.replicates > 1 else 0.0


class Verdict(str, enum.Enum):
    CREDIBLE_TRUTH = "credible-truth"
    NO_CONFIDENCE = "no-confidence"


@dataclass(frozen=True)
class TruthDecision:
    observed_strength: float
    q_hat: float
    epsilon: float
    verdict: Verdict


def _er_replicate(args):
    n, s, p1, p2, cfg, seed = args
    rng = np.random.default_rng(seed)
    N = n + s
    h1 = erdos_renyi(N, p1, rng)
    h2 = erdos_renyi(N, p2, rng)
    partition = SeedPartition.identity_seeds(N, choose_seeds(N, s, rng))
    result = sgm_match(h1, h2, partition, cfg, rng=rng)
    return restricted_alignment_strength(h1, h2, result.matching)


def _block_replicate(args):
    n, s, labels, M, cfg, seed = args
    rng = np.random.default_rng(seed)
    N = n + s
    iu = np.triu_indices(N, 1)
    probs = M[labels[iu[0]], labels[iu[1]]]
    # rho_e = 0: the two graphs are independent given the parameters
    e1, e2 = sample_pair_adjacency(probs, 0.0, rng)
    h1 = Graph._trusted(symmetric_adjacency(N, iu, e1))
    h2 = Graph._trusted(symmetric_adjacency(N, iu, e2))
    partition = SeedPartition.identity_seeds(N, choose_seeds(N, s, rng))
    result = sgm_match(h1, h2, partition, cfg, rng=rng)
    return restricted_alignment_strength(h1, h2, result.matching)


def _summarize(strengths, mode, n, s, densities, seeds) -> PhantomEstimate:
    strengths = tuple(float(x) for x in strengths)
    return PhantomEstimate(
        q_hat=float(np.mean(strengths)),
        replicates=len(strengths),
        per_replicate_strengths=strengths,
        density_mode=mode,
        n=n,
        s=s,
        densities=tuple(densities),
        seeds=tuple(seeds),
    )


def calibrate_phantom(
    n: int,
    s: int,
    density: float | tuple[float, float],
    replicates: int = DEFAULT_REPLICATES,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
) -> PhantomEstimate:
    """Estimate the phantom strength for ``n`` nonseeds and ``s`` seeds.

    Each replicate matches two independent Erdos-Renyi graphs on ``n + s``
    vertices with ``s`` uniformly chosen seeds and records the restricted
    alignment strength of the SGM result. Pass one density to use it for
    both graphs (the combined density of the observed pair), or a pair
    ``(d1, d2)`` to give each graph its own.

    Replicate ``i`` uses the seed ``derive_seed(root, "phantom", i)``.
    """
    if isinstance(density, (tuple, list)):
        d1, d2 = (float(x) for x in density)
        mode = DensityMode.PER_GRAPH
        densities = (d1, d2)
    else:
        d1 = d2 = float(density)
        mode = DensityMode.COMBINED
        densities = (d1,)
    for d in (d1, d2):
        if not 0.0 < d < 1.0:
            raise SpecError(f"density {d} must lie strictly inside (0, 1)")
    _check_sizes(n, s, replicates)
    cfg = cfg or SgmConfig()
    root = as_root_seed(rng)
    seeds = [derive_seed(root, "phantom", i) for i in range(replicates)]
    tasks = [(n, s, d1, d2, cfg, seed) for seed in seeds]
    return _summarize(map_trials(_er_replicate, tasks, jobs), mode, n, s, densities, seeds)


def calibrate_phantom_block(
    n: int,
    s: int,
    pi: Sequence[float],
    M,
    replicates: int = DEFAULT_REPLICATES,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
) -> PhantomEstimate:
    """Phantom strength for a block model with block probabilities ``pi``
    and mean matrix ``M``.

    Vertices are split among blocks in proportion to ``pi`` (largest
    remainder), every pair uses the ``M`` entry of its blocks as an edge
    probability, and the two graphs are drawn independently.
    """
    M = np.asarray(M, dtype=float)
    spec = BlockModelSpec.point_masses(pi, M)
    spec.validate()
    _check_sizes(n, s, replicates)
    cfg = cfg or SgmConfig()
    labels = apportion(n + s, spec.pi)
    mean = BernoulliParams(M[np.ix_(labels, labels)] * (1 - np.eye(n + s))).mean
    if not 0.0 < mean < 1.0:
        raise SpecError("block model has a degenerate overall density")
    root = as_root_seed(rng)
    seeds = [derive_seed(root, "phantom-block", i) for i in range(replicates)]
    tasks = [(n, s, labels, M, cfg, seed) for seed in seeds]
    strengths = map_trials(_block_replicate, tasks, jobs)
    return _summarize(strengths, DensityMode.BLOCK, n, s, tuple(M.ravel()), seeds)


def _check_sizes(n: int, s: int, replicates: int) -> None:
    if n < 2:
        raise ContractError("need at least 2 nonseeds")
    if s < 0:
        raise ContractError("seed count must be nonnegative")
    if replicates < 1:
        raise ContractError("need at least one replicate")


def decide_truthful(
    observed_strength: float,
    estimate: PhantomEstimate | float,
    epsilon: float = DEFAULT_EPSILON,
) -> TruthDecision:
    """Credible truth iff the observed strength exceeds the phantom level by
    strictly more than ``epsilon``."""
    if not epsilon > 0:
        raise ContractError("epsilon must be positive")
    q_hat = estimate.q_hat if isinstance(estimate, PhantomEstimate) else float(estimate)
    verdict = Verdict.CREDIBLE_TRUTH if observed_strength > q_hat + epsilon else Verdict.NO_CONFIDENCE
    return TruthDecision(float(observed_strength), q_hat, float(epsilon), verdict)
