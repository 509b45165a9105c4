"""Acceptance criteria, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary at the
end lists one PASS/FAIL line per criterion. The Monte Carlo criteria (5, 6,
7, 9) take minutes.
"""
import time

import numpy as np
import pytest

from acceptance_report import record
from oracles import brute_lap, brute_min_full_disagreements, definitional_strengths, random_graph, random_partition
from seedmatch import (
    CorrelatedPairSpec,
    DegenerateStrengthError,
    Matching,
    PointMass,
    ScaledBeta,
    SgmConfig,
    calibrate_phantom,
    emit_csv,
    exact_match,
    full_alignment_strength,
    joint_cell_probs,
    load_edge_list,
    restricted_alignment_strength,
    run_block_experiment,
    run_hockey_exact,
    run_hockey_sgm,
    run_threshold_scan,
    sample_correlated_pair,
    save_edge_list,
    sgm_match,
    solve_lap_min,
    UndefinedDensityError,
)
from seedmatch.random_models import distribution_stats, sample_pair_adjacency


def test_criterion_01_closed_form_equals_definition():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    while checked < 200:
        N = int(rng.integers(3, 8))
        s = int(rng.integers(0, 3))
        g1 = random_graph(N, rng.uniform(0.1, 0.9), rng)
        g2 = random_graph(N, rng.uniform(0.1, 0.9), rng)
        part = random_partition(N, s, rng)
        m = Matching(part, rng.permutation(part.nonseeds_2))
        try:
            r = restricted_alignment_strength(g1, g2, m)
            f = full_alignment_strength(g1, g2, m)
        except (DegenerateStrengthError, UndefinedDensityError):
            continue  # strength undefined for this instance
        r0, f0 = definitional_strengths(g1, g2, m)
        worst = max(worst, abs(r - r0), abs(f - f0))
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10
    assert record(1, ok, f"max |closed - enumerated| = {worst:.1e} over 200 instances, {elapsed:.1f}s")


def test_criterion_02_exact_matcher_oracle():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    mismatches = 0
    for k in range(50):
        n = int(rng.integers(2, 9))
        s = int(rng.integers(0, 4))
        spec = CorrelatedPairSpec(n, s, float(rng.uniform(0, 1)), PointMass(float(rng.uniform(0.2, 0.8))))
        pair = sample_correlated_pair(spec, rng)
        got = exact_match(pair.g1, pair.g2, pair.partition).full_disagreements
        mismatches += got != brute_min_full_disagreements(pair.g1, pair.g2, pair.partition)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    assert record(2, ok, f"{mismatches} mismatches in 50 pairs, {elapsed:.1f}s")


def test_criterion_03_lap_oracle():
    rng = np.random.default_rng(303)
    solve_lap_min(np.zeros((2, 2)))  # JIT warm-up outside the clock
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(1, 8))
        cost = rng.integers(-20, 20, size=(n, n)).astype(float)
        mismatches += solve_lap_min(cost).objective != brute_lap(cost)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 5
    assert record(3, ok, f"{mismatches} mismatches in 500 matrices, {elapsed:.1f}s")


def test_criterion_04_truth_strength_tracks_rho():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    errors = {}
    for rho in (0.3, 0.6, 0.9):
        vals = []
        for _ in range(10):
            pair = sample_correlated_pair(CorrelatedPairSpec(1000, 0, rho, PointMass(0.5)), rng)
            vals.append(full_alignment_strength(pair.g1, pair.g2, pair.truth))
        errors[rho] = abs(np.mean(vals) - rho)
    elapsed = time.perf_counter() - t0
    ok = max(errors.values()) <= 0.02 and elapsed < 120
    detail = ", ".join(f"rho={r}: {e:.4f}" for r, e in errors.items())
    assert record(4, ok, f"|mean str' - rho_e| {detail}; {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_05_small_graph_phantom():
    t0 = time.perf_counter()
    recs = run_hockey_exact([0.0], reps=50, n=15, s=15, p=0.5, rng=505)
    elapsed = time.perf_counter() - t0
    mean = float(np.mean([r.restricted_strength for r in recs]))
    ok = 0.36 <= mean <= 0.52 and elapsed < 1800 and all(r.solver == "exact" for r in recs)
    assert record(5, ok, f"mean exact-match strength {mean:.4f} (target [0.36, 0.52]), 50 reps, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_06_hockey_stick_shape():
    t0 = time.perf_counter()
    grid = [round(0.1 * k, 1) for k in range(11)]
    recs = run_hockey_sgm([(1, 1)], 0.5, [50], grid, delta_fractions=[0.0], n=500, reps=3, rng=606)
    est = calibrate_phantom(500, 50, 0.5, replicates=10, rng=607)
    elapsed = time.perf_counter() - t0
    high = [r for r in recs if r.rho_T >= 0.8]
    low = [r for r in recs if r.rho_T <= 0.05]
    frac_perfect = np.mean([r.match_ratio == 1.0 for r in high])
    worst_high = max(abs(r.restricted_strength - r.rho_T) for r in high)
    worst_ratio = max(r.match_ratio for r in low)
    worst_low = max(abs(r.restricted_strength - est.q_hat) for r in low)
    ok = (
        frac_perfect >= 0.95
        and worst_high <= 0.03
        and worst_ratio <= 0.1
        and worst_low <= 0.04
        and elapsed < 1800
    )
    assert record(
        6,
        ok,
        f"high rho_T: {frac_perfect:.0%} perfect, max |str - rho_T| {worst_high:.4f}; "
        f"low rho_T: max ratio {worst_ratio:.3f}, max |str - q_hat| {worst_low:.4f} (q_hat {est.q_hat:.4f}); "
        f"{elapsed:.0f}s",
    )


@pytest.mark.slow
def test_criterion_07_threshold_fit():
    t0 = time.perf_counter()
    _, fits = run_threshold_scan([0.5, 0.05], [500, 750, 1000, 1500, 2000], reps=3, rng=707)
    elapsed = time.perf_counter() - t0
    f5, f05 = fits[0.5], fits[0.05]
    ok = 1.32 <= f5.c_p <= 1.62 and abs(f5.d_p) <= 0.05 and f05.c_p > f5.c_p and elapsed < 2700
    assert record(
        7,
        ok,
        f"p=0.5: c={f5.c_p:.3f} d={f5.d_p:.4f}; p=0.05: c={f05.c_p:.3f} d={f05.d_p:.4f}; {elapsed:.0f}s",
    )


def test_criterion_08_distribution_invariance():
    t0 = time.perf_counter()
    # Beta(1,1) and Beta(2,2) widths chosen so both have mean 0.5 and variance 0.03
    specs = [ScaledBeta(1, 1, 0.6, 0.5), ScaledBeta(2, 2, 0.6 * np.sqrt(20 / 12), 0.5)]
    rho_e = 0.3
    size = 100_000
    rng = np.random.default_rng(808)
    zs = []
    for spec in specs:
        mu, _, rho_f = distribution_stats(spec)
        target = mu * (1 - mu) * (1 - rho_e) * (1 - rho_f)
        e1, e2 = sample_pair_adjacency(spec.sample(size, rng), rho_e, rng)
        est = np.mean(e1 & ~e2)
        zs.append(abs(est - target) / np.sqrt(target * (1 - target) / size))
    elapsed = time.perf_counter() - t0
    rho_fs = [distribution_stats(s)[2] for s in specs]
    ok = max(zs) <= 3 and abs(rho_fs[0] - rho_fs[1]) < 1e-12 and elapsed < 30
    assert record(8, ok, f"z-scores {zs[0]:.2f}, {zs[1]:.2f} (limit 3), rho_F={rho_fs[0]:.4f}; {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_09_block_plateau():
    t0 = time.perf_counter()
    recs = run_block_experiment(
        n=1000, s=40, pi=(0.2, 0.8), M=((0.3, 0.4), (0.4, 0.5)), variants=["A"], rho_grid=[0.0], reps=5, rng=909
    )
    elapsed = time.perf_counter() - t0
    mean_str = float(np.mean([r.restricted_strength for r in recs]))
    rho_h = [r.rho_h_realized for r in recs]
    worst = max(abs(x - 0.0129) for x in rho_h)
    ok = 0.08 <= mean_str <= 0.16 and worst <= 0.004 and elapsed < 1200
    assert record(
        9,
        ok,
        f"mean strength {mean_str:.4f} (target [0.08, 0.16]); rho_h {min(rho_h):.4f}..{max(rho_h):.4f} "
        f"(max dev {worst:.4f}); {elapsed:.0f}s",
    )


def test_criterion_10_property_suites(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1010)
    failures = []

    # joint table normalization and marginals
    worst = 0.0
    for p, rho in rng.random((1000, 2)):
        t = joint_cell_probs(p, rho)
        worst = max(worst, abs(t.sum() - 1), abs(t[0].sum() - p), abs(t[:, 0].sum() - p))
    if worst > 1e-15:
        failures.append(f"joint table error {worst:.1e}")

    # Frank-Wolfe iterates stay doubly stochastic and the relaxed objective ascends
    ds_err = 0.0
    descents = 0
    for k in range(5):
        pair = sample_correlated_pair(CorrelatedPairSpec(60, 5, 0.1 * k, PointMass(0.4)), rng)
        values = []

        def cb(it, P, value):
            nonlocal ds_err
            ds_err = max(ds_err, np.abs(P.sum(0) - 1).max(), np.abs(P.sum(1) - 1).max(), -P.min())
            values.append(value)

        sgm_match(pair.g1, pair.g2, pair.partition, SgmConfig(initialization="random"), rng=k, callback=cb)
        descents += sum(b < a - 1e-9 for a, b in zip(values, values[1:]))
    if ds_err > 1e-9:
        failures.append(f"doubly stochastic error {ds_err:.1e}")
    if descents:
        failures.append(f"{descents} objective decreases")

    # CSV byte-determinism under a fixed root seed
    kw = dict(beta_pairs=[(1, 1)], mu_prime=0.5, s_values=[5], rho_grid=[0.0, 0.9], delta_fractions=[0, 1])
    for name in ("a", "b"):
        recs = run_hockey_sgm(n=40, reps=2, rng=42, timing=False, **kw)
        emit_csv(recs, tmp_path / f"{name}.csv")
    if (tmp_path / "a.csv").read_bytes() != (tmp_path / "b.csv").read_bytes():
        failures.append("CSV output differs between runs")

    # edge-list round trip
    for k in range(50):
        g = random_graph(int(rng.integers(1, 60)), rng.random(), rng)
        save_edge_list(g, tmp_path / "g.txt")
        if load_edge_list(tmp_path / "g.txt") != g:
            failures.append("edge-list round trip changed a graph")
            break

    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    assert record(10, ok, ("; ".join(failures) or "all property suites hold") + f", {elapsed:.1f}s")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
