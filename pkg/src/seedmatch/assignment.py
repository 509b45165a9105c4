"""Dense square linear assignment.

Shortest augmenting path with dual potentials (the Jonker-Volgenant family),
O(n^3) worst case. Rows are inserted one at a time; each insertion runs a
Dijkstra-style search over columns on reduced costs until it reaches a free
column, then augments and updates the duals.

Tie-breaking is deterministic: among columns sharing the minimal tentative
distance, a free column is taken first if one exists, otherwise the lowest
index. Both backends follow exactly the same rule so they return identical
permutations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import ContractError


@dataclass(frozen=True)
class Assignment:
    """``perm[i]`` is the column assigned to row ``i``."""

    perm: np.ndarray
    objective: float


def _lap_kernel(cost):
    # Plain scalar loops: compiled by numba, far too slow interpreted.
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(n, -1, dtype=np.int64)
    shortest = np.empty(n)
    path = np.full(n, -1, dtype=np.int64)
    remaining = np.empty(n, dtype=np.int64)
    visited_rows = np.zeros(n, dtype=np.bool_)
    visited_cols = np.zeros(n, dtype=np.bool_)

    for cur_row in range(n):
        for j in range(n):
            shortest[j] = np.inf
            path[j] = -1
            remaining[j] = n - 1 - j
            visited_rows[j] = False
            visited_cols[j] = False
        num_remaining = n
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            visited_rows[i] = True
            index = -1
            lowest = np.inf
            for it in range(num_remaining):
                j = remaining[it]
                r = min_val + cost[i, j] - u[i] - v[j]
                if r < shortest[j]:
                    path[j] = i
                    shortest[j] = r
                d = shortest[j]
                if d < lowest:
                    lowest = d
                    index = it
                elif d == lowest and index >= 0:
                    jb = remaining[index]
                    free_j = row4col[j] == -1
                    free_b = row4col[jb] == -1
                    if (free_j and not free_b) or (free_j == free_b and j < jb):
                        index = it
            min_val = lowest
            if min_val == np.inf:
                return col4row, u, v, False
            j = remaining[index]
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            visited_cols[j] = True
            num_remaining -= 1
            remaining[index] = remaining[num_remaining]

        u[cur_row] += min_val
        for r in range(n):
            if visited_rows[r] and r != cur_row:
                u[r] += min_val - shortest[col4row[r]]
        for c in range(n):
            if visited_cols[c]:
                v[c] -= min_val - shortest[c]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            prev = col4row[i]
            col4row[i] = j
            j = prev
            if i == cur_row:
                break
    return col4row, u, v, True


_lap_numba = _accel.njit(_lap_kernel)


def _lap_numpy(cost):
    """Same algorithm with the column scan vectorized; used when numba is off."""
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(n, -1, dtype=np.int64)
    for cur_row in range(n):
        shortest = np.full(n, np.inf)
        path = np.full(n, -1, dtype=np.int64)
        visited_rows = np.zeros(n, dtype=bool)
        open_cols = np.ones(n, dtype=bool)
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            visited_rows[i] = True
            reduced = min_val + cost[i] - u[i] - v
            improve = open_cols & (reduced < shortest)
            shortest[improve] = reduced[improve]
            path[improve] = i
            dist = np.where(open_cols, shortest, np.inf)
            lowest = dist.min()
            if lowest == np.inf:
                return col4row, u, v, False
            ties = np.flatnonzero(dist == lowest)
            free = ties[row4col[ties] == -1]
            j = int(free[0]) if free.size else int(ties[0])
            min_val = lowest
            open_cols[j] = False
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])
        u[cur_row] += min_val
        others = visited_rows.copy()
        others[cur_row] = False
        rows = np.flatnonzero(others)
        u[rows] += min_val - shortest[col4row[rows]]
        closed = ~open_cols
        v[closed] -= min_val - shortest[closed]
        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            prev = int(col4row[i])
            col4row[i] = j
            j = prev
            if i == cur_row:
                break
    return col4row, u, v, True


def lap_with_duals(cost: np.ndarray, backend: str | None = None):
    """Minimize; return ``(perm, row_duals, col_duals)``.

    At the optimum ``cost[i, j] - u[i] - v[j] >= 0`` with equality on the
    assignment, so ``u.sum() + v.sum()`` is the optimal value.
    """
    cost = _validate(cost)
    if backend is None:
        backend = _accel.backend_name()
    if backend == "numba":
        perm, u, v, ok = _lap_numba(cost)
    elif backend == "numpy":
        perm, u, v, ok = _lap_numpy(cost)
    else:
        raise ContractError(f"unknown backend {backend!r}")
    if not ok:  # only reachable with infinite entries, which _validate rejects
        raise ContractError("cost matrix admits no finite assignment")
    return perm, u, v


def _validate(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ContractError(f"cost matrix must be square, got shape {c.shape}")
    if c.shape[0] < 1:
        raise ContractError("cost matrix must have dimension >= 1")
    if not np.isfinite(c).all():
        raise ContractError("cost matrix has non-finite entries")
    return np.ascontiguousarray(c)


def solve_lap_min(cost, backend: str | None = None) -> Assignment:
    c = _validate(cost)
    perm, _, _ = lap_with_duals(c, backend)
    return Assignment(perm, float(c[np.arange(len(perm)), perm].sum()))


def solve_lap_max(cost, backend: str | None = None) -> Assignment:
    c = _validate(cost)
    perm, _, _ = lap_with_duals(-c, backend)
    return Assignment(perm, float(c[np.arange(len(perm)), perm].sum()))
