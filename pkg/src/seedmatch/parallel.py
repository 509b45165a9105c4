"""Trial execution pool.

Trials are independent and own their RNG, so they can run in any order;
results come back in submission order. ``SEEDMATCH_JOBS`` overrides the
default worker count (1).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_jobs() -> int:
    raw = os.environ.get("SEEDMATCH_JOBS", "").strip()
    if not raw:
        return 1
    jobs = int(raw)
    return os.cpu_count() or 1 if jobs <= 0 else jobs


def map_trials(fn: Callable[[T], R], tasks: Sequence[T], jobs: int | None = None) -> list[R]:
    # Threads suffice: numba kernels run with nogil and BLAS releases the GIL.
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))
