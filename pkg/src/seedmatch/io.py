"""File formats.

Edge list::

    N M
    u v        (M lines, 0-based, whitespace separated, undirected)

Duplicate edge lines (in either orientation) collapse to one edge, so
``M`` counts lines, not distinct edges. Blank lines are ignored.

Seed / correspondence files hold one ``v1 v2`` pair per line.
"""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ParseError
from .graph import Graph, Matching, SeedPartition


def _lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if text:
                yield lineno, text


def _ints(path, lineno, text, count):
    parts = text.split()
    if len(parts) != count:
        raise ParseError(path, lineno, f"expected {count} integers, got {text!r}")
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise ParseError(path, lineno, f"not an integer in {text!r}") from None


def load_edge_list(path) -> Graph:
    lines = _lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError(path, 1, "missing 'N M' header") from None
    n_vertices, n_edges = _ints(path, lineno, header, 2)
    if n_vertices < 1 or n_edges < 0:
        raise ParseError(path, lineno, "header needs N >= 1 and M >= 0")
    adj = np.zeros((n_vertices, n_vertices), dtype=bool)
    seen = 0
    for lineno, text in lines:
        u, v = _ints(path, lineno, text, 2)
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise ParseError(path, lineno, f"vertex out of range 0..{n_vertices - 1}")
        if u == v:
            raise ParseError(path, lineno, f"self-loop at vertex {u}")
        adj[u, v] = adj[v, u] = True
        seen += 1
        if seen > n_edges:
            raise ParseError(path, lineno, f"more edge lines than the {n_edges} declared")
    if seen != n_edges:
        raise ParseError(path, lineno, f"header declares {n_edges} edge lines, found {seen}")
    return Graph._trusted(adj)


def save_edge_list(g: Graph, path) -> None:
    edges = g.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n_vertices} {len(edges)}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")


def _pairs_file(path, n_total: int | None):
    pairs = []
    first, second = {}, {}
    for lineno, text in _lines(path):
        a, b = _ints(path, lineno, text, 2)
        if min(a, b) < 0 or (n_total is not None and max(a, b) >= n_total):
            raise ParseError(path, lineno, "vertex out of range")
        if a in first:
            raise ParseError(path, lineno, f"vertex {a} already paired on line {first[a]}")
        if b in second:
            raise ParseError(path, lineno, f"vertex {b} already paired on line {second[b]}")
        first[a] = second[b] = lineno
        pairs.append((a, b))
    return pairs


def load_seed_pairs(path, n_total: int) -> SeedPartition:
    return SeedPartition(n_total, tuple(_pairs_file(path, n_total)))


def save_seed_pairs(partition: SeedPartition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in partition.seed_pairs:
            fh.write(f"{a} {b}\n")


def load_correspondence(path, partition: SeedPartition) -> Matching:
    """A full bijection file (one pair per vertex), checked against the seeds."""
    pairs = _pairs_file(path, partition.n_total)
    if len(pairs) != partition.n_total:
        raise ParseError(path, 0, f"expected {partition.n_total} pairs, found {len(pairs)}")
    perm = np.empty(partition.n_total, dtype=np.int64)
    for a, b in pairs:
        perm[a] = b
    return Matching.from_permutation(partition, perm)


def save_correspondence(m: Matching, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in enumerate(m.permutation):
            fh.write(f"{a} {b}\n")


@dataclass(frozen=True)
class ExperimentRecord:
    experiment_id: str
    trial_index: int
    n: int
    s: int
    mu_prime: float
    dist_descriptor: str
    rho_e: float
    rho_h_realized: float
    rho_T: float
    match_ratio: float
    restricted_strength: float
    full_strength: float
    solver: str
    iterations: int
    rng_seed: int
    wall_time_ms: float


RECORD_FIELDS = tuple(f.name for f in dataclasses.fields(ExperimentRecord))
_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentRecord)}
_PARSE = {"int": int, "float": float, "str": str}


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records: Iterable[ExperimentRecord], path) -> None:
    """Header plus one row per record; floats are written with ``repr`` so
    they parse back exactly. ``path`` may also be an open text stream."""
    if hasattr(path, "write"):
        _write_rows(records, path)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(records, fh)


def _write_rows(records, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        writer.writerow([_format(getattr(rec, name)) for name in RECORD_FIELDS])


def load_csv(path) -> list[ExperimentRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_FIELDS:
            raise ParseError(path, 1, "unexpected CSV header")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RECORD_FIELDS):
                raise ParseError(path, lineno, "wrong number of columns")
            try:
                values = {k: _PARSE[_TYPES[k]](v) for k, v in zip(RECORD_FIELDS, row)}
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            out.append(ExperimentRecord(**values))
    return out
