"""Monte Carlo experiment drivers.

Every trial gets its own generator seeded with
``derive_seed(root, experiment_id, trial_index)``, so results do not depend
on the worker count or on scheduling order. Records come back sorted by
``(experiment_id, trial_index)``.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, SpecError
from .graph import Graph, SeedPartition, Matching, full_density, match_ratio
from .io import ExperimentRecord
from .matchers import MatchResult, SgmConfig, exact_match, sgm_match
from .parallel import map_trials
from .random_models import (
    BlockModelSpec,
    CorrelatedPairSpec,
    PointMass,
    ScaledBeta,
    UniformInterval,
    as_root_seed,
    choose_seeds,
    delta_max,
    derive_seed,
    expected_pair_mean,
    heterogeneity_correlation,
    noised_rendition,
    sample_correlated_pair,
    total_correlation,
)

# exact solver size used for the small-graph hockey stick (15 nonseeds)
HOCKEY_EXACT_LIMIT = 15


@dataclass(frozen=True)
class _Trial:
    experiment_id: str
    trial_index: int
    seed: int
    spec: CorrelatedPairSpec | None
    solver: str
    cfg: SgmConfig
    mu_prime: float
    descriptor: str
    timing: bool
    exact_limit: int = HOCKEY_EXACT_LIMIT
    graph: Graph | None = None  # noised-rendition trials only
    seed_count: int = 0


def _solve(trial: _Trial, g1, g2, partition, rng) -> MatchResult:
    if trial.solver == "exact":
        return exact_match(g1, g2, partition, limit=trial.exact_limit)
    return sgm_match(g1, g2, partition, trial.cfg, rng=rng)


def _nan_if_none(x):
    return float("nan") if x is None else float(x)


def _run_trial(trial: _Trial) -> ExperimentRecord:
    start = time.perf_counter()
    rng = np.random.default_rng(trial.seed)
    if trial.graph is None:
        pair = sample_correlated_pair(trial.spec, rng)
        g1, g2, partition, truth = pair.g1, pair.g2, pair.partition, pair.truth
        rho_e = float(trial.spec.edge_corr)
        rho_h = heterogeneity_correlation(pair.params)
    else:
        g1 = trial.graph
        N = g1.n_vertices
        rho_e = float(trial.spec.edge_corr)
        g2 = noised_rendition(g1, rho_e, rng)
        partition = SeedPartition.identity_seeds(N, choose_seeds(N, trial.seed_count, rng))
        truth = Matching.identity(partition)
        # a fixed graph carries no parameter heterogeneity beyond itself
        rho_h = 0.0
    result = _solve(trial, g1, g2, partition, rng)
    elapsed = (time.perf_counter() - start) * 1000.0 if trial.timing else 0.0
    return ExperimentRecord(
        experiment_id=trial.experiment_id,
        trial_index=trial.trial_index,
        n=partition.n,
        s=partition.s,
        mu_prime=float(trial.mu_prime),
        dist_descriptor=trial.descriptor,
        rho_e=rho_e,
        rho_h_realized=float(rho_h),
        rho_T=float(total_correlation(rho_h, rho_e)),
        match_ratio=float(match_ratio(result.matching, truth)),
        restricted_strength=_nan_if_none(result.restricted_strength),
        full_strength=_nan_if_none(result.full_strength),
        solver=result.solver,
        iterations=int(result.iterations),
        rng_seed=int(trial.seed),
        wall_time_ms=float(elapsed),
    )


def _execute(trials: list[_Trial], jobs) -> list[ExperimentRecord]:
    records = map_trials(_run_trial, trials, jobs)
    return sorted(records, key=lambda r: (r.experiment_id, r.trial_index))


def _grid(values, name) -> list[float]:
    out = [float(v) for v in values]
    if not out:
        raise ContractError(f"{name} grid is empty")
    for v in out:
        if not 0.0 <= v <= 1.0:
            raise SpecError(f"{name} value {v} outside [0, 1]")
    return out


def _check_reps(reps: int) -> None:
    if reps < 1:
        raise ContractError("reps must be at least 1")


def run_hockey_exact(
    rho_grid: Sequence[float],
    reps: int = 10,
    n: int = 15,
    s: int = 15,
    p: float = 0.5,
    rng=0,
    jobs: int | None = None,
    timing: bool = True,
    exact_limit: int = HOCKEY_EXACT_LIMIT,
    experiment_id: str = "hockey-exact",
) -> list[ExperimentRecord]:
    """Correlated Erdos-Renyi pairs matched to certified optimality."""
    grid = _grid(rho_grid, "rho_e")
    _check_reps(reps)
    if n > exact_limit:
        raise ContractError(f"n={n} exceeds the exact solver limit {exact_limit}")
    root = as_root_seed(rng)
    source = PointMass(p)
    trials = []
    for idx, (rho, _) in enumerate(itertools.product(grid, range(reps))):
        trials.append(
            _Trial(
                experiment_id=experiment_id,
                trial_index=idx,
                seed=derive_seed(root, experiment_id, idx),
                spec=CorrelatedPairSpec(n, s, rho, source),
                solver="exact",
                cfg=SgmConfig(),
                mu_prime=p,
                descriptor=source.describe(),
                timing=timing,
                exact_limit=exact_limit,
            )
        )
    for t in trials:
        t.spec.validate()
    return _execute(trials, jobs)


def run_hockey_sgm(
    beta_pairs: Sequence[tuple[float, float]],
    mu_prime: float,
    s_values: Sequence[int],
    rho_grid: Sequence[float],
    deltas: Sequence[float] | None = None,
    n: int = 500,
    reps: int = 1,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
    timing: bool = True,
    delta_fractions: Sequence[float] | None = None,
    experiment_id: str = "hockey-sgm",
) -> list[ExperimentRecord]:
    """Sweep over (alpha, beta) pairs, seed counts, deltas and rho_e.

    Give either absolute ``deltas`` (each checked against delta_max for its
    pair) or ``delta_fractions`` of delta_max. ``delta = 0`` is a point
    mass at ``mu_prime``.
    """
    grid = _grid(rho_grid, "rho_e")
    _check_reps(reps)
    if (deltas is None) == (delta_fractions is None):
        raise ContractError("give exactly one of deltas or delta_fractions")
    if not beta_pairs or not s_values:
        raise ContractError("beta_pairs and s_values must be non-empty")
    cfg = cfg or SgmConfig()
    root = as_root_seed(rng)
    trials = []
    idx = 0
    for alpha, beta in beta_pairs:
        dmax = delta_max(alpha, beta, mu_prime)
        if deltas is not None:
            dvals = [float(d) for d in deltas]
            for d in dvals:
                if d < 0 or d > dmax * (1 + 1e-12):
                    raise SpecError(
                        f"delta {d} outside [0, {dmax}] for alpha={alpha}, beta={beta}, mean={mu_prime}"
                    )
        else:
            fr = [float(f) for f in delta_fractions]
            if any(f < 0 or f > 1 for f in fr):
                raise SpecError("delta fractions must lie in [0, 1]")
            dvals = [f * dmax for f in fr]
        for s, d, rho, _ in itertools.product(s_values, dvals, grid, range(reps)):
            source = ScaledBeta(alpha, beta, min(d, dmax), mu_prime) if d > 0 else PointMass(mu_prime)
            spec = CorrelatedPairSpec(n, int(s), rho, source)
            spec.validate()
            trials.append(
                _Trial(
                    experiment_id=experiment_id,
                    trial_index=idx,
                    seed=derive_seed(root, experiment_id, idx),
                    spec=spec,
                    solver="sgm",
                    cfg=cfg,
                    mu_prime=mu_prime,
                    descriptor=source.describe() if d > 0 else f"beta({alpha:g},{beta:g},delta=0,mean={mu_prime:g})",
                    timing=timing,
                )
            )
            idx += 1
    return _execute(trials, jobs)


@dataclass(frozen=True)
class ThresholdFit:
    p: float
    d_p: float
    c_p: float
    residual_rms: float
    points: tuple[tuple[int, float], ...] = field(default=())

    def predict(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return self.d_p + self.c_p * np.sqrt(np.log(n) / n)


def fit_threshold(points: Sequence[tuple[int, float]], p: float = float("nan")) -> ThresholdFit:
    """Least squares fit of ``strength ~ d + c * sqrt(log n / n)``."""
    pts = [(int(n), float(y)) for n, y in points]
    if len({n for n, _ in pts}) < 3:
        raise ContractError("threshold fit needs at least 3 distinct n values")
    if any(n < 2 for n, _ in pts):
        raise ContractError("threshold fit needs n >= 2")
    ns = np.array([n for n, _ in pts], dtype=float)
    y = np.array([v for _, v in pts])
    X = np.column_stack([np.ones_like(ns), np.sqrt(np.log(ns) / ns)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return ThresholdFit(
        p=float(p),
        d_p=float(coef[0]),
        c_p=float(coef[1]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        points=tuple(pts),
    )


def run_threshold_scan(
    p_values: Sequence[float],
    n_values: Sequence[int],
    reps: int = 3,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
    timing: bool = True,
    experiment_id: str = "threshold",
) -> tuple[list[ExperimentRecord], dict[float, ThresholdFit]]:
    """Phantom strength against n for uncorrelated ER pairs without seeds,
    then one curve fit per ``p``."""
    _check_reps(reps)
    if len(set(int(n) for n in n_values)) < 3:
        raise ContractError("threshold scan needs at least 3 distinct n values")
    p_values = [float(p) for p in p_values]
    if not p_values:
        raise ContractError("p grid is empty")
    cfg = cfg or SgmConfig()
    root = as_root_seed(rng)
    trials = []
    idx = 0
    for p, n, _ in itertools.product(p_values, n_values, range(reps)):
        spec = CorrelatedPairSpec(int(n), 0, 0.0, PointMass(p))
        spec.validate()
        trials.append(
            _Trial(
                experiment_id=experiment_id,
                trial_index=idx,
                seed=derive_seed(root, experiment_id, idx),
                spec=spec,
                solver="sgm",
                cfg=cfg,
                mu_prime=p,
                descriptor=PointMass(p).describe(),
                timing=timing,
            )
        )
        idx += 1
    records = _execute(trials, jobs)
    fits = {}
    for p in p_values:
        pts = [(r.n, r.restricted_strength) for r in records if r.mu_prime == p]
        fits[p] = fit_threshold(pts, p)
    return records, fits


def _wide_interval(m: float) -> UniformInterval:
    # widest interval centred on m inside [0, 1]
    half = min(m, 1.0 - m)
    return UniformInterval(m - half, m + half)


def _narrow_interval(m: float, half: float = 0.05) -> UniformInterval:
    return UniformInterval(max(0.0, m - half), min(1.0, m + half))


def block_variants(pi, M, variant: str) -> list[tuple[str, BlockModelSpec]]:
    """Named block specs for a variant.

    ``A``: point masses at ``M``. ``B``: as A but the last diagonal block
    uses the widest uniform interval centred on its mean. ``C``: every
    combination of narrow (half-width 0.05) or widest intervals on the upper
    triangle of ``M``; 2**(K(K+1)/2) specs.
    """
    M = np.asarray(M, dtype=float)
    K = M.shape[0]
    cells = [(i, j) for i in range(K) for j in range(i, K)]
    variant = variant.upper()

    def build(choice):
        dists = [[None] * K for _ in range(K)]
        for (i, j), d in zip(cells, choice):
            dists[i][j] = dists[j][i] = d
        spec = BlockModelSpec(tuple(pi), tuple(tuple(row) for row in dists))
        spec.validate()
        return spec

    if variant == "A":
        choice = [PointMass(M[i, j]) for i, j in cells]
        return [("A", build(choice))]
    if variant == "B":
        choice = [PointMass(M[i, j]) for i, j in cells]
        choice[-1] = _wide_interval(M[K - 1, K - 1])
        return [("B", build(choice))]
    if variant == "C":
        out = []
        for flags in itertools.product((0, 1), repeat=len(cells)):
            choice = [
                _wide_interval(M[i, j]) if f else _narrow_interval(M[i, j])
                for (i, j), f in zip(cells, flags)
            ]
            tag = "C-" + "".join("b" if f else "a" for f in flags)
            out.append((tag, build(choice)))
        return out
    raise SpecError(f"unknown block variant {variant!r}")


def run_block_experiment(
    n: int = 1000,
    s: int = 40,
    pi: Sequence[float] = (0.2, 0.8),
    M=((0.3, 0.4), (0.4, 0.5)),
    variants: Sequence[str] = ("A",),
    rho_grid: Sequence[float] = (0.0,),
    reps: int = 1,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
    timing: bool = True,
    experiment_id: str = "block",
) -> list[ExperimentRecord]:
    grid = _grid(rho_grid, "rho_e")
    _check_reps(reps)
    cfg = cfg or SgmConfig()
    mu = expected_pair_mean(pi, M)
    specs = [vs for v in variants for vs in block_variants(pi, M, v)]
    root = as_root_seed(rng)
    trials = []
    idx = 0
    for (tag, bspec), rho, _ in itertools.product(specs, grid, range(reps)):
        spec = CorrelatedPairSpec(n, s, rho, bspec)
        spec.validate()
        trials.append(
            _Trial(
                experiment_id=experiment_id,
                trial_index=idx,
                seed=derive_seed(root, experiment_id, idx),
                spec=spec,
                solver="sgm",
                cfg=cfg,
                mu_prime=mu,
                descriptor=tag,
                timing=timing,
            )
        )
        idx += 1
    return _execute(trials, jobs)


def run_noisy_experiment(
    g: Graph,
    rho_grid: Sequence[float],
    reps: int = 1,
    seed_fraction: float = 0.0,
    cfg: SgmConfig | None = None,
    rng=0,
    jobs: int | None = None,
    timing: bool = True,
    experiment_id: str = "noisy",
) -> list[ExperimentRecord]:
    """Match ``g`` against rho-noised renditions of itself with
    ``ceil(seed_fraction * N)`` uniform seeds; the truth is the identity."""
    grid = _grid(rho_grid, "rho")
    _check_reps(reps)
    if not 0.0 <= seed_fraction < 1.0:
        raise ContractError("seed_fraction must lie in [0, 1)")
    N = g.n_vertices
    n_seeds = math.ceil(seed_fraction * N)
    if N - n_seeds < 1:
        raise ContractError("no nonseed vertices left")
    mu = full_density(g)
    cfg = cfg or SgmConfig()
    root = as_root_seed(rng)
    trials = []
    for idx, (rho, _) in enumerate(itertools.product(grid, range(reps))):
        trials.append(
            _Trial(
                experiment_id=experiment_id,
                trial_index=idx,
                seed=derive_seed(root, experiment_id, idx),
                spec=CorrelatedPairSpec(N - n_seeds, n_seeds, rho, PointMass(mu)),
                solver="sgm",
                cfg=cfg,
                mu_prime=mu,
                descriptor="noised",
                timing=timing,
                graph=g,
                seed_count=n_seeds,
            )
        )
    return _execute(trials, jobs)
