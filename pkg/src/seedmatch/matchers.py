"""Seeded graph matching solvers.

``exact_match`` is a branch and bound that certifies a global minimum of the
full disagreement count; practical up to roughly 15 nonseeds.
``sgm_match`` is the Frank-Wolfe relaxation over doubly stochastic matrices
with seed-to-nonseed adjacency entering as a linear term.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _accel
from .assignment import _lap_kernel, _lap_numba, lap_with_duals
from .errors import ContractError, DegenerateStrengthError, SizeLimitError, UndefinedDensityError
from .graph import (
    Graph,
    Matching,
    SeedPartition,
    full_alignment_strength,
    full_disagreements,
    restricted_alignment_strength,
    restricted_disagreements,
)
from .random_models import as_generator

EXACT_LIMIT = 14


class Init(str, enum.Enum):
    BARYCENTER = "barycenter"
    IDENTITY = "identity"
    RANDOM = "random"


@dataclass(frozen=True)
class SgmConfig:
    """Frank-Wolfe settings.

    Iteration stops after ``max_iterations``, when the iterate moves by less
    than ``convergence_tol * sqrt(n)`` in Frobenius norm, or when the
    Frank-Wolfe gap vanishes. ``restarts`` extra runs start from random
    doubly stochastic matrices; the lowest-disagreement result wins.
    """

    max_iterations: int = 30
    convergence_tol: float = 0.05
    initialization: Init = Init.BARYCENTER
    restarts: int = 0

    def __post_init__(self):
        object.__setattr__(self, "initialization", Init(self.initialization))
        if self.max_iterations < 1:
            raise ContractError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ContractError("convergence_tol must be > 0")
        if self.restarts < 0:
            raise ContractError("restarts must be >= 0")


@dataclass(frozen=True)
class MatchResult:
    """Solver output with its statistics recomputed from the graphs.

    Strength fields are ``None`` when undefined for the instance (fewer than
    two nonseeds, or both graphs empty/complete on the relevant vertices).
    """

    matching: Matching
    full_disagreements: int
    restricted_disagreements: int
    restricted_strength: float | None
    full_strength: float | None
    solver: str
    iterations: int
    proven_optimal: bool


def _maybe(fn, *args):
    try:
        return fn(*args)
    except (DegenerateStrengthError, UndefinedDensityError):
        return None


def _result(g1, g2, matching, solver, iterations, proven) -> MatchResult:
    return MatchResult(
        matching=matching,
        full_disagreements=full_disagreements(g1, g2, matching),
        restricted_disagreements=restricted_disagreements(g1, g2, matching),
        restricted_strength=_maybe(restricted_alignment_strength, g1, g2, matching),
        full_strength=_maybe(full_alignment_strength, g1, g2, matching),
        solver=solver,
        iterations=iterations,
        proven_optimal=proven,
    )


def _check_inputs(g1: Graph, g2: Graph, partition: SeedPartition) -> None:
    if not (g1.n_vertices == g2.n_vertices == partition.n_total):
        raise ContractError(
            f"size mismatch: graphs have {g1.n_vertices} and {g2.n_vertices} vertices, "
            f"partition covers {partition.n_total}"
        )


def objective_from_disagreements(g1: Graph, g2: Graph, m: Matching) -> int:
    """Full disagreement count; the quantity both solvers minimize."""
    return full_disagreements(g1, g2, m)


def _blocks(g1: Graph, g2: Graph, partition: SeedPartition):
    s1, s2 = partition.seeds_1, partition.seeds_2
    n1, n2 = partition.nonseeds_1, partition.nonseeds_2
    A, B = g1.adjacency, g2.adjacency
    return (
        A[np.ix_(n1, s1)],
        B[np.ix_(n2, s2)],
        A[np.ix_(n1, n1)],
        B[np.ix_(n2, n2)],
        int(np.count_nonzero(A[np.ix_(s1, s1)] != B[np.ix_(s2, s2)])) // 2,
    )


# -- Frank-Wolfe -------------------------------------------------------------


def _sinkhorn(K: np.ndarray, tol: float = 1e-14, max_iter: int = 10_000) -> np.ndarray:
    K = K.copy()
    for _ in range(max_iter):
        K /= K.sum(axis=1, keepdims=True)
        K /= K.sum(axis=0, keepdims=True)
        if np.abs(K.sum(axis=1) - 1).max() < tol:
            break
    return K


def _initial(n: int, init: Init, rng) -> np.ndarray:
    if init is Init.BARYCENTER:
        return np.full((n, n), 1.0 / n)
    if init is Init.IDENTITY:
        return np.eye(n)
    K = _sinkhorn(rng.random((n, n)) + 1e-3)
    return (np.full((n, n), 1.0 / n) + K) / 2


def _frank_wolfe(S, A22, B22, P, cfg: SgmConfig, backend, callback):
    """Maximize ``2<S, P> + <A22 P B22, P>`` over doubly stochastic ``P``.

    Returns the final relaxed iterate and the iteration count.
    """
    n = P.shape[0]
    M = A22 @ P @ B22
    value = 2 * np.vdot(S, P) + np.vdot(M, P)
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        grad = 2 * S + 2 * M
        cols, _, _ = lap_with_duals(-grad, backend)
        # Q is the permutation matrix with Q[i, cols[i]] = 1
        gap = grad[np.arange(n), cols].sum() - np.vdot(grad, P)
        if gap <= 0:
            break
        MQ = A22 @ B22[cols]
        Q = np.zeros_like(P)
        Q[np.arange(n), cols] = 1.0
        R = Q - P
        curv = np.vdot(MQ - M, R)
        if curv < 0 and -gap / (2 * curv) < 1:
            step = -gap / (2 * curv)
        else:
            step = 1.0
        P = P + step * R
        M = M + step * (MQ - M)
        value = value + step * gap + step * step * curv
        if callback is not None:
            callback(it, P, value)
        if step * np.linalg.norm(R) < cfg.convergence_tol * np.sqrt(n):
            break
    return P, it


def sgm_match(
    g1: Graph,
    g2: Graph,
    partition: SeedPartition,
    cfg: SgmConfig | None = None,
    rng=None,
    callback: Callable[[int, np.ndarray, float], None] | None = None,
    backend: str | None = None,
) -> MatchResult:
    """Approximate seeded graph matching by Frank-Wolfe.

    Minimizing disagreements is equivalent to maximizing the number of
    common edges, whose relaxation over the nonseed block is

        2 <A21 B21^T, P> + <A22 P B22, P>

    (seed-seed terms are constant). Each iteration solves a max-weight
    assignment on the gradient and takes an exact line search step; the
    final relaxed iterate is projected to a permutation by another
    max-weight assignment.

    ``callback(iteration, P, objective)`` is called after every step with
    the relaxed iterate and the relaxed objective above.
    """
    cfg = cfg or SgmConfig()
    _check_inputs(g1, g2, partition)
    n = partition.n
    if n <= 1:
        return _result(g1, g2, Matching(partition, partition.nonseeds_2), "sgm", 0, False)

    A21, B21, A22, B22, _ = _blocks(g1, g2, partition)
    S = A21.astype(np.float64) @ B21.T.astype(np.float64)
    A22 = A22.astype(np.float64)
    B22 = B22.astype(np.float64)

    starts = [cfg.initialization] + [Init.RANDOM] * cfg.restarts
    if Init.RANDOM in starts:
        rng = as_generator(rng if rng is not None else 0)
    best = None
    total_iterations = 0
    for init in starts:
        P0 = _initial(n, init, rng)
        P, iterations = _frank_wolfe(S, A22, B22, P0, cfg, backend, callback)
        total_iterations += iterations
        cols, _, _ = lap_with_duals(-P, backend)
        m = Matching(partition, partition.nonseeds_2[cols])
        d = full_disagreements(g1, g2, m)
        if best is None or d < best[0]:
            best = (d, m)
    return _result(g1, g2, best[1], "sgm", total_iterations, False)


# -- branch and bound --------------------------------------------------------


def _make_bnb(lap):
    def bnb(A, B, L, best_perm, best_cost):
        # A: nonseed adjacency of G1 in search order, B: of G2, L: seed terms.
        # Objective: sum_r L[r, c_r] + sum_{r<k} [A[r,k] != B[c_r, c_k]].
        n = A.shape[0]
        best_perm = best_perm.copy()
        cross = L.astype(np.float64).copy()
        col_of = np.full(n, -1, dtype=np.int64)
        used = np.zeros(n, dtype=np.bool_)
        fixed = np.zeros(n + 1)
        cand = np.zeros((n, n), dtype=np.int64)
        cand_lb = np.zeros((n, n))
        ncand = np.zeros(n, dtype=np.int64)
        ptr = np.zeros(n, dtype=np.int64)
        free_cols = np.zeros(n, dtype=np.int64)
        deg1 = np.zeros(n)
        deg2 = np.zeros(n)
        nodes = 0
        d = 0
        entering = True
        while True:
            if entering:
                nodes += 1
                if d == n:
                    if fixed[n] < best_cost:
                        best_cost = fixed[n]
                        for r in range(n):
                            best_perm[r] = col_of[r]
                    entering = False
                    d -= 1
                    if d < 0:
                        break
                    c = col_of[d]
                    for r in range(d + 1, n):
                        for cc in range(n):
                            if A[r, d] != B[cc, c]:
                                cross[r, cc] -= 1.0
                    used[c] = False
                    col_of[d] = -1
                    continue
                m = n - d
                k = 0
                for c in range(n):
                    if not used[c]:
                        free_cols[k] = c
                        k += 1
                for r in range(d, n):
                    t = 0.0
                    for q in range(d, n):
                        t += A[r, q]
                    deg1[r] = t
                for a in range(m):
                    c = free_cols[a]
                    t = 0.0
                    for b in range(m):
                        t += B[c, free_cols[b]]
                    deg2[c] = t
                C = np.empty((m, m))
                for i in range(m):
                    r = d + i
                    for a in range(m):
                        c = free_cols[a]
                        C[i, a] = cross[r, c] + 0.5 * abs(deg1[r] - deg2[c])
                col4row, u, v, ok = lap(C)
                lap_val = 0.0
                for i in range(m):
                    lap_val += u[i]
                for a in range(m):
                    lap_val += v[a]
                bound = fixed[d] + lap_val
                nc = 0
                if np.ceil(bound - 1e-9) < best_cost:
                    for a in range(m):
                        lb = bound + (C[0, a] - u[0] - v[a])
                        if np.ceil(lb - 1e-9) < best_cost:
                            cand[d, nc] = free_cols[a]
                            cand_lb[d, nc] = lb
                            nc += 1
                    # insertion sort by child bound, ties by column index
                    for x in range(1, nc):
                        kc = cand[d, x]
                        kl = cand_lb[d, x]
                        y = x - 1
                        while y >= 0 and (cand_lb[d, y] > kl or (cand_lb[d, y] == kl and cand[d, y] > kc)):
                            cand[d, y + 1] = cand[d, y]
                            cand_lb[d, y + 1] = cand_lb[d, y]
                            y -= 1
                        cand[d, y + 1] = kc
                        cand_lb[d, y + 1] = kl
                ncand[d] = nc
                ptr[d] = 0
                entering = False
            # pick next child at depth d
            advanced = False
            while ptr[d] < ncand[d]:
                k = ptr[d]
                ptr[d] += 1
                if np.ceil(cand_lb[d, k] - 1e-9) >= best_cost:
                    continue
                c = cand[d, k]
                col_of[d] = c
                used[c] = True
                fixed[d + 1] = fixed[d] + cross[d, c]
                for r in range(d + 1, n):
                    for cc in range(n):
                        if A[r, d] != B[cc, c]:
                            cross[r, cc] += 1.0
                d += 1
                entering = True
                advanced = True
                break
            if advanced:
                continue
            d -= 1
            if d < 0:
                break
            c = col_of[d]
            for r in range(d + 1, n):
                for cc in range(n):
                    if A[r, d] != B[cc, c]:
                        cross[r, cc] -= 1.0
            used[c] = False
            col_of[d] = -1
        return best_perm, best_cost, nodes

    return bnb


def _two_opt(A, B, L, perm):
    n = A.shape[0]
    perm = perm.copy()
    improved = True
    while improved:
        improved = False
        for i in range(n):
            for j in range(i + 1, n):
                ci = perm[i]
                cj = perm[j]
                delta = L[i, cj] + L[j, ci] - L[i, ci] - L[j, cj]
                for k in range(n):
                    if k == i or k == j:
                        continue
                    ck = perm[k]
                    delta += int(A[i, k] != B[cj, ck]) - int(A[i, k] != B[ci, ck])
                    delta += int(A[j, k] != B[ci, ck]) - int(A[j, k] != B[cj, ck])
                if delta < 0:
                    perm[i] = cj
                    perm[j] = ci
                    improved = True
    return perm


def _objective(A, B, L, perm) -> int:
    n = A.shape[0]
    lin = int(L[np.arange(n), perm].sum())
    quad = int(np.count_nonzero(A != B[np.ix_(perm, perm)])) // 2
    return lin + quad


_bnb_numba = _accel.njit(_make_bnb(_lap_numba))
_bnb_python = _make_bnb(_lap_kernel)
_two_opt_numba = _accel.njit(_two_opt)


def exact_match(
    g1: Graph,
    g2: Graph,
    partition: SeedPartition,
    limit: int = EXACT_LIMIT,
) -> MatchResult:
    """Certified minimizer of the full disagreement count over seed-respecting
    bijections.

    Depth-first branch and bound over nonseeds of G1, most edges first. A
    node's bound is its fixed cost plus an assignment bound on the remaining
    rows: each unassigned (row, column) pair costs its disagreements with the
    seeds and already-assigned vertices, plus half the difference of their
    degrees into the unassigned sets (every unassigned-unassigned pair is
    seen from both ends, and a bijection between those sets mismatches at
    least that many pairs per endpoint). Children are ordered and pruned by
    the assignment's reduced costs.

    ``iterations`` on the result counts search nodes.
    """
    _check_inputs(g1, g2, partition)
    n = partition.n
    if n > limit:
        raise SizeLimitError(f"{n} nonseeds exceeds the exact limit of {limit}; use sgm_match")
    if n <= 1:
        return _result(g1, g2, Matching(partition, partition.nonseeds_2), "exact", 1, True)

    A21, B21, A22, B22, seed_const = _blocks(g1, g2, partition)
    # L[i, j]: seed disagreements if G1 nonseed i goes to G2 nonseed j
    a = A21.astype(np.int64)
    b = B21.astype(np.int64)
    L = a.sum(1)[:, None] + b.sum(1)[None, :] - 2 * (a @ b.T)

    order = np.argsort(-A22.sum(axis=1) - A21.sum(axis=1), kind="stable")
    A = np.ascontiguousarray(A22[np.ix_(order, order)].astype(np.int64))
    B = np.ascontiguousarray(B22.astype(np.int64))
    Lo = np.ascontiguousarray(L[order])

    # incumbent: best of an assignment heuristic and SGM, each polished by 2-opt
    two_opt = _two_opt_numba if _accel.USE_NUMBA else _two_opt
    deg_gap = np.abs(A.sum(1)[:, None] - B.sum(1)[None, :])
    starts = [lap_with_duals(Lo + 0.5 * deg_gap)[0]]
    sgm = sgm_match(g1, g2, partition)
    pos2 = np.searchsorted(partition.nonseeds_2, sgm.matching.assignment)
    starts.append(pos2[order])
    incumbents = [two_opt(A, B, Lo, np.asarray(p, dtype=np.int64)) for p in starts]
    costs = [_objective(A, B, Lo, p) for p in incumbents]
    k = int(np.argmin(costs))

    bnb = _bnb_numba if _accel.USE_NUMBA else _bnb_python
    perm, cost, nodes = bnb(A, B, Lo, incumbents[k], float(costs[k]))
    cols = np.empty(n, dtype=np.int64)
    cols[order] = perm
    m = Matching(partition, partition.nonseeds_2[cols])
    result = _result(g1, g2, m, "exact", int(nodes), True)
    if result.full_disagreements != seed_const + int(round(cost)):
        raise AssertionError("branch-and-bound objective disagrees with the recomputed count")
    return result
