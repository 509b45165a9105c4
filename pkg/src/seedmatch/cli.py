"""Command line entry point: ``seedmatch <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments as ex
from . import io
from .errors import ContractError
from .graph import SeedPartition, match_ratio
from .matchers import EXACT_LIMIT, Init, SgmConfig, exact_match, sgm_match
from .phantom import (
    DEFAULT_EPSILON,
    DEFAULT_REPLICATES,
    calibrate_phantom,
    calibrate_phantom_block,
    decide_truthful,
)
from .random_models import CorrelatedPairSpec, PointMass, ScaledBeta, UniformInterval, sample_correlated_pair


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return _floats(text)


def _matrix(text: str) -> np.ndarray:
    # rows separated by ';', entries by ','
    return np.array([_floats(row) for row in text.split(";")])


def _sgm_config(args) -> SgmConfig:
    return SgmConfig(
        max_iterations=args.max_iter,
        convergence_tol=args.tol,
        initialization=Init(args.init),
        restarts=args.restarts,
    )


def _add_sgm(p):
    p.add_argument("--max-iter", type=int, default=30)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--init", choices=[i.value for i in Init], default=Init.BARYCENTER.value)
    p.add_argument("--restarts", type=int, default=0)


def _add_common(p, reps=1):
    p.add_argument("--seed", type=int, default=0, help="root RNG seed")
    p.add_argument("--reps", type=int, default=reps)
    p.add_argument("--jobs", type=int, default=None)


def _source(args):
    if args.dist == "point":
        return PointMass(args.p)
    if args.dist == "uniform":
        return UniformInterval(args.lo, args.hi)
    return ScaledBeta(args.alpha, args.beta, args.delta, args.p)


def cmd_generate(args) -> int:
    spec = CorrelatedPairSpec(args.n, args.s, args.rho, _source(args))
    pair = sample_correlated_pair(spec, np.random.default_rng(args.seed))
    prefix = args.prefix
    io.save_edge_list(pair.g1, f"{prefix}.g1.txt")
    io.save_edge_list(pair.g2, f"{prefix}.g2.txt")
    io.save_seed_pairs(pair.partition, f"{prefix}.seeds.txt")
    io.save_correspondence(pair.truth, f"{prefix}.truth.txt")
    print(f"wrote {prefix}.g1.txt {prefix}.g2.txt {prefix}.seeds.txt {prefix}.truth.txt")
    return 0


def cmd_match(args) -> int:
    g1 = io.load_edge_list(args.g1)
    g2 = io.load_edge_list(args.g2)
    if g1.n_vertices != g2.n_vertices:
        raise ContractError("graphs must have the same number of vertices")
    N = g1.n_vertices
    partition = io.load_seed_pairs(args.seeds, N) if args.seeds else SeedPartition(N, ())
    if args.solver == "exact":
        result = exact_match(g1, g2, partition, limit=args.limit)
    else:
        result = sgm_match(g1, g2, partition, _sgm_config(args), rng=np.random.default_rng(args.seed))
    report = {
        "n": partition.n,
        "s": partition.s,
        "solver": result.solver,
        "iterations": result.iterations,
        "proven_optimal": result.proven_optimal,
        "full_disagreements": result.full_disagreements,
        "restricted_disagreements": result.restricted_disagreements,
        "restricted_strength": result.restricted_strength,
        "full_strength": result.full_strength,
    }
    if args.truth:
        truth = io.load_correspondence(args.truth, partition)
        report["match_ratio"] = match_ratio(result.matching, truth)
    if args.out:
        io.save_correspondence(result.matching, args.out)
    print(json.dumps(report, indent=2))
    return 0


def cmd_calibrate(args) -> int:
    cfg = _sgm_config(args)
    if args.pi is not None:
        est = calibrate_phantom_block(
            args.n, args.s, _floats(args.pi), _matrix(args.M), args.reps, cfg, args.seed, args.jobs
        )
    else:
        dens = _floats(args.density)
        density = dens[0] if len(dens) == 1 else tuple(dens)
        est = calibrate_phantom(args.n, args.s, density, args.reps, cfg, args.seed, args.jobs)
    print(
        json.dumps(
            {
                "q_hat": est.q_hat,
                "std": est.std,
                "replicates": est.replicates,
                "density_mode": est.density_mode.value,
                "strengths": list(est.per_replicate_strengths),
            },
            indent=2,
        )
    )
    return 0


def cmd_decide(args) -> int:
    d = decide_truthful(args.strength, args.q_hat, args.epsilon)
    print(d.verdict.value)
    return 0


def cmd_experiment(args) -> int:
    timing = not args.no_timing
    common = dict(rng=args.seed, jobs=args.jobs, timing=timing)
    kind = args.kind
    if kind == "hockey-exact":
        records = ex.run_hockey_exact(
            _grid(args.rho), args.reps, args.n, args.s, args.p, exact_limit=args.limit, **common
        )
    elif kind == "hockey-sgm":
        pairs = [tuple(_floats(x)) for x in args.beta_pairs.split(";")]
        kw = {"deltas": _floats(args.deltas)} if args.deltas else {"delta_fractions": _grid(args.delta_fractions)}
        records = ex.run_hockey_sgm(
            pairs, args.mu, _ints(args.s_values), _grid(args.rho), n=args.n, reps=args.reps,
            cfg=_sgm_config(args), **kw, **common,
        )
    elif kind == "threshold":
        records, fits = ex.run_threshold_scan(
            _floats(args.p_values), _ints(args.n_values), args.reps, _sgm_config(args), **common
        )
        for p, fit in fits.items():
            print(f"p={p:g} d={fit.d_p:.4f} c={fit.c_p:.4f} rms={fit.residual_rms:.4f}", file=sys.stderr)
    elif kind == "block":
        records = ex.run_block_experiment(
            args.n, args.s, _floats(args.pi), _matrix(args.M), args.variants.split(","),
            _grid(args.rho), args.reps, _sgm_config(args), **common,
        )
    else:
        g = io.load_edge_list(args.graph)
        records = ex.run_noisy_experiment(
            g, _grid(args.rho), args.reps, args.seed_fraction, _sgm_config(args), **common
        )
    io.emit_csv(records, args.out or sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedmatch", description="Seeded graph matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a correlated pair to edge-list files")
    p.add_argument("--n", type=int, required=True, help="nonseed count")
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.0, help="edge correlation")
    p.add_argument("--dist", choices=["point", "uniform", "beta"], default="point")
    p.add_argument("--p", type=float, default=0.5, help="mean (point/beta)")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("match", help="match two edge-list files")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--seeds")
    p.add_argument("--truth", help="full correspondence file for the match ratio")
    p.add_argument("--solver", choices=["sgm", "exact"], default="sgm")
    p.add_argument("--limit", type=int, default=EXACT_LIMIT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the matching here")
    _add_sgm(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("calibrate", help="estimate the phantom strength")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--density", default="0.5", help="d or d1,d2")
    p.add_argument("--pi", help="block probabilities, comma separated")
    p.add_argument("--M", help="block means, rows split by ';'")
    _add_common(p, reps=DEFAULT_REPLICATES)
    _add_sgm(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("decide", help="threshold decision")
    p.add_argument("--strength", type=float, required=True)
    p.add_argument("--q-hat", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("experiment", help="run a Monte Carlo sweep and write CSV")
    p.add_argument("kind", choices=["hockey-exact", "hockey-sgm", "threshold", "block", "noisy"])
    p.add_argument("--out")
    p.add_argument("--no-timing", action="store_true", help="record wall_time_ms as 0 for byte-stable output")
    p.add_argument("--rho", default="0:1:0.1", help="rho_e grid: list or start:stop:step")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--limit", type=int, default=ex.HOCKEY_EXACT_LIMIT)
    p.add_argument("--beta-pairs", default="1,1;2,2")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--s-values", default="50")
    p.add_argument("--deltas")
    p.add_argument("--delta-fractions", default="0")
    p.add_argument("--p-values", default="0.5")
    p.add_argument("--n-values", default="500,750,1000")
    p.add_argument("--pi", default="0.2,0.8")
    p.add_argument("--M", default="0.3,0.4;0.4,0.5")
    p.add_argument("--variants", default="A")
    p.add_argument("--graph", help="edge-list file (noisy)")
    p.add_argument("--seed-fraction", type=float, default=0.1)
    _add_common(p)
    _add_sgm(p)
    p.set_defaults(func=cmd_experiment)
    return parser


_SIZE_DEFAULTS = {
    "hockey-exact": (15, 15),
    "hockey-sgm": (500, None),
    "block": (1000, 40),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "experiment":
        n_def, s_def = _SIZE_DEFAULTS.get(args.kind, (None, None))
        args.n = n_def if args.n is None else args.n
        args.s = s_def if args.s is None else args.s
        if args.kind == "noisy" and not args.graph:
            parser.error("noisy needs --graph")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:  # ContractError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
