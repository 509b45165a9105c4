import numpy as np
import pytest

from oracles import brute_min_full_disagreements, random_graph, random_partition
from seedmatch import (
    ContractError,
    CorrelatedPairSpec,
    Graph,
    Init,
    Matching,
    PointMass,
    SeedPartition,
    SgmConfig,
    SizeLimitError,
    exact_match,
    full_disagreements,
    sample_correlated_pair,
    sgm_match,
)
from seedmatch import _accel


def _pair(n, s, rho, p=0.5, seed=0):
    return sample_correlated_pair(CorrelatedPairSpec(n, s, rho, PointMass(p)), seed)


def test_exact_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(25):
        N = int(rng.integers(2, 9))
        s = int(rng.integers(0, N - 1))
        g1, g2 = random_graph(N, rng.uniform(0.2, 0.8), rng), random_graph(N, rng.uniform(0.2, 0.8), rng)
        part = random_partition(N, s, rng)
        res = exact_match(g1, g2, part)
        assert res.proven_optimal
        assert res.full_disagreements == brute_min_full_disagreements(g1, g2, part)


def test_exact_python_kernel_agrees(monkeypatch):
    rng = np.random.default_rng(1)
    cases = []
    for _ in range(8):
        N = int(rng.integers(4, 9))
        part = random_partition(N, int(rng.integers(0, 3)), rng)
        cases.append((random_graph(N, 0.5, rng), random_graph(N, 0.5, rng), part))
    fast = [exact_match(*c).full_disagreements for c in cases]
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    slow = [exact_match(*c).full_disagreements for c in cases]
    assert fast == slow


def test_exact_finds_isomorphism():
    pair = _pair(12, 2, 1.0, seed=3)
    perm = np.random.default_rng(4).permutation(14)
    g2 = pair.g2.relabel(np.argsort(perm))
    part = SeedPartition(14, tuple((int(v), int(perm[v])) for v in pair.partition.seeds_1))
    res = exact_match(pair.g1, g2, part)
    assert res.full_disagreements == 0
    assert res.full_strength == 1.0


def test_exact_size_limit():
    pair = _pair(16, 0, 0.5)
    with pytest.raises(SizeLimitError):
        exact_match(pair.g1, pair.g2, pair.partition)


def test_trivial_sizes():
    g = Graph.from_edges(3, [(0, 1)])
    part = SeedPartition.identity_seeds(3, [0, 1])
    for solve in (exact_match, sgm_match):
        res = solve(g, g, part)
        assert res.matching == Matching.identity(part)
        assert res.restricted_strength is None  # one nonseed: no pairs


def test_size_mismatch():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ContractError):
        sgm_match(g, g, SeedPartition(4))


def test_sgm_recovers_identical_graphs_with_seeds():
    pair = _pair(150, 10, 1.0, seed=5)
    res = sgm_match(pair.g1, pair.g2, pair.partition)
    assert res.matching == pair.truth
    assert res.full_disagreements == 0


def test_sgm_high_correlation():
    pair = _pair(200, 20, 0.9, seed=6)
    res = sgm_match(pair.g1, pair.g2, pair.partition)
    assert res.matching == pair.truth


def test_sgm_never_beats_exact():
    for seed in range(6):
        pair = _pair(9, 2, 0.3, seed=seed)
        sgm = sgm_match(pair.g1, pair.g2, pair.partition)
        ex = exact_match(pair.g1, pair.g2, pair.partition)
        assert ex.full_disagreements <= sgm.full_disagreements


def test_iterates_are_doubly_stochastic_and_ascend():
    pair = _pair(80, 5, 0.2, seed=7)
    seen = []

    def cb(it, P, value):
        seen.append((it, P.copy(), value))

    for init in (Init.BARYCENTER, Init.RANDOM):
        seen.clear()
        sgm_match(pair.g1, pair.g2, pair.partition, SgmConfig(initialization=init), rng=1, callback=cb)
        assert seen
        values = [v for _, _, v in seen]
        for _, P, _ in seen:
            assert P.min() >= -1e-12
            assert np.abs(P.sum(0) - 1).max() < 1e-9
            assert np.abs(P.sum(1) - 1).max() < 1e-9
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_relaxed_value_matches_definition():
    pair = _pair(40, 4, 0.5, seed=8)
    part = pair.partition
    A, B = pair.g1.adjacency.astype(float), pair.g2.adjacency.astype(float)
    s1, s2, n1, n2 = part.seeds_1, part.seeds_2, part.nonseeds_1, part.nonseeds_2
    S = A[np.ix_(n1, s1)] @ B[np.ix_(n2, s2)].T
    A22, B22 = A[np.ix_(n1, n1)], B[np.ix_(n2, n2)]
    log = []
    sgm_match(pair.g1, pair.g2, part, callback=lambda it, P, v: log.append((P.copy(), v)))
    for P, v in log:
        assert v == pytest.approx(2 * np.vdot(S, P) + np.vdot(A22 @ P @ B22, P), rel=1e-9)


def test_identity_init_at_rho_one_stays_put():
    pair = _pair(60, 0, 1.0, seed=9)
    res = sgm_match(pair.g1, pair.g2, pair.partition, SgmConfig(initialization="identity"))
    assert res.full_disagreements == 0


def test_restarts_do_not_hurt():
    pair = _pair(60, 3, 0.4, seed=10)
    base = sgm_match(pair.g1, pair.g2, pair.partition)
    more = sgm_match(pair.g1, pair.g2, pair.partition, SgmConfig(restarts=2), rng=0)
    assert more.full_disagreements <= base.full_disagreements


def test_backends_give_same_sgm_result():
    pair = _pair(70, 5, 0.6, seed=11)
    a = sgm_match(pair.g1, pair.g2, pair.partition, backend="numba")
    b = sgm_match(pair.g1, pair.g2, pair.partition, backend="numpy")
    assert a.matching == b.matching


def test_result_statistics_are_recomputed():
    pair = _pair(50, 5, 0.5, seed=12)
    res = sgm_match(pair.g1, pair.g2, pair.partition)
    assert res.full_disagreements == full_disagreements(pair.g1, pair.g2, res.matching)


def test_config_validation():
    with pytest.raises(ContractError):
        SgmConfig(max_iterations=0)
    with pytest.raises(ContractError):
        SgmConfig(convergence_tol=0)
    with pytest.raises(ValueError):
        SgmConfig(initialization="sideways")
