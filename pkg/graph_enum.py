"""
Graph enumeration - stable graphs and stable strongly connected pointed graphs
==============================================================================

Stable graphs of weight n have at most n vertices (every vertex needs two
out- and two in-edges, so |E| ≥ 2|V|). Pointed stable strongly connected
graphs of weight k have at most k−1 ordinary vertices (• also needs an
edge each way once anything else is present).

Stable matrices are generated row by row with running column-deficit
pruning. Semistable pointed graphs are grown from a cycle through • by
adding ears. Both are deduplicated by canonical form and come out in
canonical-key order.
"""
from __future__ import annotations

import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from digraph_core import (
    AnyGraph,
    MultiDigraph,
    PointedGraph,
    aut_order,
    canonical_form,
    canonical_graph,
    is_stable,
    is_strongly_connected,
)
from phi_invariant import PhiCache, phi

log = logging.getLogger(__name__)

# ═══════════════════════════════════════════════════════════════════
# CONFIG
# ═══════════════════════════════════════════════════════════════════

STABLE_WEIGHT_BOUND = int(os.getenv("KHEAT_WEIGHT_BOUND", "4"))
POINTED_WEIGHT_BOUND = STABLE_WEIGHT_BOUND + 1


class WeightBoundError(ValueError):
    pass


def _check_weight(n: int, bound: int, what: str):
    if not isinstance(n, int) or n < 1 or n > bound:
        raise WeightBoundError(f"{what} weight must be in 1..{bound}, got {n!r}")


# ═══════════════════════════════════════════════════════════════════
# GRAPH SUMS
# ═══════════════════════════════════════════════════════════════════


@dataclass
class GraphSum:
    """Formal Σ coefficient·graph over canonical keys; zero terms are dropped."""

    coefficients: dict[str, Fraction] = field(default_factory=dict)
    graphs: dict[str, AnyGraph] = field(default_factory=dict)

    def add(self, graph: AnyGraph, coefficient) -> "GraphSum":
        key = canonical_form(graph)
        total = self.coefficients.get(key, Fraction(0)) + Fraction(coefficient)
        if total == 0:
            self.coefficients.pop(key, None)
            self.graphs.pop(key, None)
        else:
            self.coefficients[key] = total
            self.graphs.setdefault(key, canonical_graph(graph))
        return self

    def coefficient(self, graph: AnyGraph) -> Fraction:
        return self.coefficients.get(canonical_form(graph), Fraction(0))

    def terms(self) -> Iterator[tuple[str, AnyGraph, Fraction]]:
        for key in sorted(self.coefficients):
            yield key, self.graphs[key], self.coefficients[key]

    def is_zero(self) -> bool:
        return not self.coefficients

    def __len__(self) -> int:
        return len(self.coefficients)

    def __eq__(self, other) -> bool:
        return isinstance(other, GraphSum) and self.coefficients == other.coefficients


# ═══════════════════════════════════════════════════════════════════
# MATRIX GENERATION
# ═══════════════════════════════════════════════════════════════════


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _matrices(
    size: int, total: int, minimum: Sequence[int], sorted_from: int = 0
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Non-negative size×size matrices with entry sum `total` whose row and
    column sums are at least minimum[i].

    Row sums from index `sorted_from` on are non-decreasing; callers that
    deduplicate by canonical form lose no isomorphism class this way.
    """
    rows: list[tuple[int, ...]] = []
    cols = [0] * size
    sums: list[int] = []

    def extend(i: int, remaining: int):
        if i == size:
            if remaining == 0 and all(c >= m for c, m in zip(cols, minimum)):
                yield tuple(rows)
            return
        reserve = sum(minimum[i + 1:])
        high = remaining - reserve
        low = high if i == size - 1 else minimum[i]
        if i > sorted_from:
            low = max(low, sums[-1])
        for row_sum in range(low, high + 1):
            for row in _compositions(row_sum, size):
                for j, x in enumerate(row):
                    cols[j] += x
                deficit = sum(max(0, m - c) for c, m in zip(cols, minimum))
                if deficit <= remaining - row_sum:
                    rows.append(row)
                    sums.append(row_sum)
                    yield from extend(i + 1, remaining - row_sum)
                    rows.pop()
                    sums.pop()
                for j, x in enumerate(row):
                    cols[j] -= x

    yield from extend(0, total)


# ═══════════════════════════════════════════════════════════════════
# ENUMERATION
# ═══════════════════════════════════════════════════════════════════


def enumerate_stable(n: int, bound: Optional[int] = None) -> list[MultiDigraph]:
    """One representative per isomorphism class of stable graphs of weight n."""
    _check_weight(n, bound or STABLE_WEIGHT_BOUND, "stable")
    found: dict[str, MultiDigraph] = {}
    for size in range(1, n + 1):
        for rows in _matrices(size, n + size, [2] * size, sorted_from=0):
            g = MultiDigraph(rows)
            key = canonical_form(g)
            if key not in found:
                found[key] = canonical_graph(g)
    log.info("weight %d: %d stable graphs", n, len(found))
    return [found[key] for key in sorted(found)]


def enumerate_pointed_stable_strong(k: int, bound: Optional[int] = None) -> list[PointedGraph]:
    """Strongly connected stable pointed graphs of weight k, one per class (• fixed)."""
    _check_weight(k, bound or POINTED_WEIGHT_BOUND, "pointed")
    found: dict[str, PointedGraph] = {}
    for ordinary in range(0, k):
        minimum = [1 if ordinary else 0] + [2] * ordinary
        for rows in _matrices(ordinary + 1, k + ordinary, minimum, sorted_from=1):
            g = PointedGraph(MultiDigraph(rows))
            if not is_stable(g) or not is_strongly_connected(g):
                continue
            key = canonical_form(g)
            if key not in found:
                found[key] = canonical_graph(g)
    log.info("weight %d: %d stable strongly connected pointed graphs", k, len(found))
    return [found[key] for key in sorted(found)]


def laplacian_power(k: int, cache: Optional[PhiCache] = None, bound: Optional[int] = None) -> GraphSum:
    """□^k = Σ (−1)^{|V(Γ)|−1} φ(Γ)/|Aut(Γ)| · Γ, |V| counting •."""
    cache = cache if cache is not None else PhiCache()
    result = GraphSum()
    for g in enumerate_pointed_stable_strong(k, bound):
        sign = -1 if (g.vertex_count - 1) % 2 else 1
        result.add(g, Fraction(sign * phi(g, cache), aut_order(g)))
    return result


def _short_count(degree: list[int]) -> int:
    return sum(1 for v in range(1, len(degree)) if degree[v] < 3)


def _with_path(edges: Counter, degree: list[int], path: Sequence[int], fresh: int) -> tuple[Counter, list[int]]:
    edges = edges.copy()
    degree = degree + [0] * fresh
    for a, b in zip(path, path[1:]):
        edges[(a, b)] += 1
        degree[a] += 1
        degree[b] += 1
    return edges, degree


def _as_rows(n: int, edges: Counter) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(edges.get((u, v), 0) for v in range(n)) for u in range(n))


def _ear_graphs(w: int, cap: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Labelled strongly connected pointed graphs of weight w ≥ 1 with at most
    `cap` ordinary vertices, each of total degree ≥ 3.

    Every such graph is a cycle through • followed by w − 1 ears: directed
    paths (closed ones included) whose ends exist already and whose inner
    vertices are new. Ears without inner vertices are single edges; they
    come last and are chosen as a multiset. Each ear lifts at most two
    vertices of degree 2, which bounds how many may remain.
    """

    def plain(n, edges, degree, pairs, start, left):
        if _short_count(degree) > 2 * left:
            return
        if left == 0:
            yield _as_rows(n, edges)
            return
        for idx in range(start, len(pairs)):
            a, b = pairs[idx]
            edges[(a, b)] += 1
            degree[a] += 1
            degree[b] += 1
            yield from plain(n, edges, degree, pairs, idx, left - 1)
            edges[(a, b)] -= 1
            degree[a] -= 1
            degree[b] -= 1

    def grow(n, edges, degree, left):
        short = _short_count(degree)
        if short > 2 * left:
            return
        pairs = [(a, b) for a in range(n) for b in range(n)]
        yield from plain(n, edges, degree, pairs, 0, left)
        if left == 0:
            return
        for inner in range(1, cap - (n - 1) + 1):
            if short + inner - 2 > 2 * (left - 1):
                break
            for a in range(n):
                for b in range(n):
                    path = [a, *range(n, n + inner), b]
                    yield from grow(n + inner, *_with_path(edges, degree, path, inner), left - 1)

    for length in range(1, cap + 2):
        cycle = [*range(length), 0]
        yield from grow(length, *_with_path(Counter(), [0], cycle, length - 1), w - 1)


def enumerate_pointed_semistable_strong(w: int, max_ordinary: Optional[int] = None) -> list[PointedGraph]:
    """Strongly connected semistable pointed graphs of weight w, one per class.

    Every ordinary vertex has total degree ≥ 3, so 2|E| ≥ 3|V₋| + 2 and
    |V₋| ≤ 2w − 2. `max_ordinary` lowers that cap.
    """
    if w < 0:
        raise WeightBoundError(f"weight must be >= 0, got {w}")
    if w == 0:
        return [PointedGraph.bullet(0)]
    cap = max(0, 2 * w - 2) if max_ordinary is None else max_ordinary
    found: dict[str, PointedGraph] = {}
    seen: set = set()
    for rows in _ear_graphs(w, cap):
        if rows in seen:
            continue
        seen.add(rows)
        g = PointedGraph(MultiDigraph(rows))
        key = canonical_form(g)
        if key not in found:
            found[key] = canonical_graph(g)
    log.info("weight %d: %d semistable strongly connected pointed graphs from %d labelled", w, len(found), len(seen))
    return [found[key] for key in sorted(found)]
