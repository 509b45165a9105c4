"""Seeded graph matching: alignment strength, correlated random graph
models, exact and Frank-Wolfe matchers, phantom calibration and a Monte
Carlo experiment harness."""
from .assignment import Assignment, solve_lap_max, solve_lap_min
from .errors import (
    ContractError,
    DegenerateMeanError,
    DegenerateStrengthError,
    ParseError,
    SizeLimitError,
    SpecError,
    UndefinedDensityError,
)
from .experiments import (
    ThresholdFit,
    fit_threshold,
    run_block_experiment,
    run_hockey_exact,
    run_hockey_sgm,
    run_noisy_experiment,
    run_threshold_scan,
)
from .graph import (
    Graph,
    Matching,
    SeedPartition,
    full_alignment_strength,
    full_density,
    full_disagreements,
    match_ratio,
    restricted_alignment_strength,
    restricted_density,
    restricted_disagreements,
)
from .io import (
    ExperimentRecord,
    emit_csv,
    load_csv,
    load_edge_list,
    load_seed_pairs,
    save_edge_list,
)
from .matchers import EXACT_LIMIT, Init, MatchResult, SgmConfig, exact_match, sgm_match
from .phantom import (
    DensityMode,
    PhantomEstimate,
    TruthDecision,
    Verdict,
    calibrate_phantom,
    calibrate_phantom_block,
    decide_truthful,
)
from .random_models import (
    BernoulliParams,
    BlockModelSpec,
    CorrelatedPair,
    CorrelatedPairSpec,
    Empirical,
    PointMass,
    ScaledBeta,
    UniformInterval,
    derive_seed,
    erdos_renyi,
    heterogeneity_correlation,
    joint_cell_probs,
    noised_rendition,
    sample_correlated_pair,
    sample_params,
    total_correlation,
)

__version__ = "0.1.0"
