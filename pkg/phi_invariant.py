"""
Phi Invariant - the recursive count φ(Γ) of strong reductions
=============================================================

φ(Γ) for a pointed graph Γ:

  1. 0 when Γ is not strongly connected
  2. invariant under smoothing an ordinary loop-free (1,1) vertex
  3. l! for the bare • with l loops
  4. otherwise the sum of φ(Γ − e) over every edge copy e

Values are memoized in a PhiCache keyed by the canonical form of the
smoothed graph. A cache can be backed by a tab-separated file so that
long runs (the weight-3 coefficients touch pointed graphs of weight 9)
are paid for once.

count_strong_reductions() counts the same thing by walking the removal
sequences on a labelled networkx multigraph. It shares no code with
phi() beyond the graph types and exists to certify it.
"""
from __future__ import annotations

import logging
import math
import threading
from pathlib import Path
from typing import Optional, Union

import networkx as nx

from digraph_core import (
    BULLET,
    PointedGraph,
    canonical_form,
    delete_edge,
    is_strongly_connected,
    smooth_all,
    weight,
)

log = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════
# CACHE
# ═══════════════════════════════════════════════════════════════════


class PhiCache:
    """Canonical key → φ value, optionally persisted as "key<TAB>value" lines.

    Reads are lock-free dict lookups; inserts take a lock and append one
    line to the backing file. Re-inserting an equal value is a no-op and a
    conflicting value is an error, so entries never change once written.
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path else None
        self._values: dict[str, int] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with self.path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                key, sep, value = line.partition("\t")
                if not sep:
                    raise ValueError(f"{self.path}:{lineno}: expected 'key<TAB>value'")
                self._remember(key, int(value))
        log.info("phi cache: loaded %d entries from %s", len(self._values), self.path)

    def _remember(self, key: str, value: int) -> bool:
        known = self._values.get(key)
        if known is not None:
            if known != value:
                raise ValueError(f"conflicting phi values for {key}: {known} != {value}")
            return False
        self._values[key] = value
        return True

    def get(self, key: str) -> Optional[int]:
        value = self._values.get(key)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def store(self, key: str, value: int):
        if value < 0:
            raise ValueError(f"phi values are non-negative, got {value} for {key}")
        with self._lock:
            if not self._remember(key, value):
                return
            if self.path is not None:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(f"{key}\t{value}\n")
                    fh.flush()

    def __contains__(self, key: str) -> bool:
        return key in self._values

    def __len__(self) -> int:
        return len(self._values)

    def stats(self) -> dict:
        return {
            "entries": len(self._values),
            "hits": self.hits,
            "misses": self.misses,
            "path": str(self.path) if self.path else None,
        }

    def clear(self):
        with self._lock:
            self._values.clear()
            self.hits = self.misses = 0
            if self.path is not None and self.path.exists():
                self.path.write_text("", encoding="utf-8")
        log.info("phi cache cleared")


# ═══════════════════════════════════════════════════════════════════
# PHI
# ═══════════════════════════════════════════════════════════════════


def phi(g: PointedGraph, cache: Optional[PhiCache] = None) -> int:
    """φ(Γ). Without a cache a private in-memory one is used for this call."""
    if not isinstance(g, PointedGraph):
        raise TypeError(f"phi needs a PointedGraph, got {type(g).__name__}")
    return _phi(g, cache if cache is not None else PhiCache())


def _phi(g: PointedGraph, cache: PhiCache) -> int:
    if not is_strongly_connected(g):
        return 0
    g = smooth_all(g)
    if g.vertex_count == 1:
        return math.factorial(g.adjacency[BULLET][BULLET])

    key = canonical_form(g)
    known = cache.get(key)
    if known is not None:
        return known

    # a non-redundant deletion lands in rule (i) and contributes 0
    total = sum(mult * _phi(delete_edge(g, u, v), cache) for u, v, mult in g.edges())
    cache.store(key, total)
    return total


def phi_loop_split(g: PointedGraph) -> tuple[int, PointedGraph]:
    """(C(w, l)·l!, Γ′) where Γ′ is Γ without its l loops at •.

    The l loops at • are redundant at every step of a strong reduction, so
    they occupy any l of the w removal slots in any order:
    φ(Γ) = C(w, l)·l!·φ(Γ′).
    """
    loops = g.adjacency[BULLET][BULLET]
    factor = math.comb(weight(g), loops) * math.factorial(loops)
    stripped = g
    for _ in range(loops):
        stripped = delete_edge(stripped, BULLET, BULLET)
    return factor, stripped


# ═══════════════════════════════════════════════════════════════════
# STRONG-REDUCTION ORACLE
# ═══════════════════════════════════════════════════════════════════


def _labelled(g: PointedGraph) -> nx.MultiDiGraph:
    mg = nx.MultiDiGraph()
    mg.add_nodes_from(range(g.vertex_count))
    for u, v, mult in g.edges():
        for copy in range(mult):
            mg.add_edge(u, v, key=(u, v, copy))
    return mg


def _smooth_eagerly(mg: nx.MultiDiGraph):
    while True:
        node = next(
            (
                n
                for n in sorted(mg.nodes)
                if n != BULLET
                and mg.in_degree(n) == 1
                and mg.out_degree(n) == 1
                and not mg.has_edge(n, n)
            ),
            None,
        )
        if node is None:
            return
        (u, _, k_in), = mg.in_edges(node, keys=True)
        (_, w, k_out), = mg.out_edges(node, keys=True)
        mg.remove_node(node)
        mg.add_edge(u, w, key=(k_in, k_out))


def _state(mg: nx.MultiDiGraph) -> tuple:
    return tuple(sorted(mg.nodes)), tuple(sorted((u, v, repr(k)) for u, v, k in mg.edges(keys=True)))


def _strongly_connected(mg: nx.MultiDiGraph) -> bool:
    return mg.number_of_nodes() <= 1 or nx.is_strongly_connected(mg)


def count_strong_reductions(g: PointedGraph) -> int:
    """Number of strong reductions of Γ, each edge copy a distinct choice."""
    mg = _labelled(g)
    if not _strongly_connected(mg):
        return 0
    _smooth_eagerly(mg)
    target = weight(g)
    memo: dict[tuple, int] = {}

    def walk(state: nx.MultiDiGraph, removed: int) -> int:
        # smoothing keeps the weight, every removal drops it by one
        assert removed + state.number_of_edges() - (state.number_of_nodes() - 1) == target
        if state.number_of_nodes() == 1 and state.number_of_edges() == 0:
            assert removed == target, f"reduction removed {removed} edges, expected {target}"
            return 1
        key = _state(state)
        if key in memo:
            return memo[key]
        total = 0
        for u, v, k in list(state.edges(keys=True)):
            nxt = state.copy()
            nxt.remove_edge(u, v, key=k)
            if not _strongly_connected(nxt):
                continue
            _smooth_eagerly(nxt)
            total += walk(nxt, removed + 1)
        memo[key] = total
        return total

    return walk(mg, 0)
