import pytest

from seedmatch import (
    ContractError,
    DensityMode,
    SpecError,
    Verdict,
    calibrate_phantom,
    calibrate_phantom_block,
    decide_truthful,
)


def test_estimate_fields_and_reproducibility():
    a = calibrate_phantom(60, 5, 0.3, replicates=4, rng=7)
    b = calibrate_phantom(60, 5, 0.3, replicates=4, rng=7)
    assert a == b
    assert a.replicates == 4 and len(a.per_replicate_strengths) == 4
    assert a.density_mode is DensityMode.COMBINED
    assert a.q_hat == pytest.approx(sum(a.per_replicate_strengths) / 4)
    assert 0 < a.q_hat < 1


def test_jobs_do_not_change_results():
    a = calibrate_phantom(50, 0, 0.5, replicates=3, rng=1, jobs=1)
    b = calibrate_phantom(50, 0, 0.5, replicates=3, rng=1, jobs=3)
    assert a.per_replicate_strengths == b.per_replicate_strengths


def test_per_graph_densities():
    est = calibrate_phantom(40, 0, (0.2, 0.4), replicates=2, rng=0)
    assert est.density_mode is DensityMode.PER_GRAPH
    assert est.densities == (0.2, 0.4)


def test_phantom_shrinks_with_n():
    small = calibrate_phantom(40, 0, 0.5, replicates=3, rng=2).q_hat
    large = calibrate_phantom(300, 0, 0.5, replicates=3, rng=2).q_hat
    assert large < small


def test_single_block_matches_er_level():
    er = calibrate_phantom(120, 5, 0.4, replicates=4, rng=3).q_hat
    blk = calibrate_phantom_block(120, 5, [1.0], [[0.4]], replicates=4, rng=3).q_hat
    assert blk == pytest.approx(er, abs=0.03)


@pytest.mark.parametrize("density", [0.0, 1.0, (0.5, 1.0)])
def test_bad_density(density):
    with pytest.raises(SpecError):
        calibrate_phantom(20, 0, density, replicates=1)


def test_bad_sizes():
    with pytest.raises(ContractError):
        calibrate_phantom(1, 0, 0.5)
    with pytest.raises(ContractError):
        calibrate_phantom(20, 0, 0.5, replicates=0)


def test_decision_rule():
    assert decide_truthful(0.5, 0.4).verdict is Verdict.CREDIBLE_TRUTH
    assert decide_truthful(0.42, 0.4).verdict is Verdict.NO_CONFIDENCE
    # exactly at the margin is not enough (dyadic values avoid rounding)
    assert decide_truthful(0.75, 0.5, 0.25).verdict is Verdict.NO_CONFIDENCE
    with pytest.raises(ContractError):
        decide_truthful(0.5, 0.4, 0.0)


def test_decision_accepts_estimate():
    est = calibrate_phantom(40, 0, 0.5, replicates=2, rng=0)
    d = decide_truthful(1.0, est)
    assert d.q_hat == est.q_hat and d.verdict is Verdict.CREDIBLE_TRUTH


def test_decision_shift_invariance():
    # shifting observed and q_hat together keeps the verdict
    for obs, q in [(0.5, 0.25), (0.25, 0.25), (0.375, 0.25)]:
        base = decide_truthful(obs, q, 0.125).verdict
        assert decide_truthful(obs + 0.5, q + 0.5, 0.125).verdict is base
