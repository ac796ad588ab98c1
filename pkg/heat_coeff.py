"""
Heat coefficients - cuttings, z(G), aₙ and the σ basis at weight 3
==================================================================

aₙ = Σ z(G)·G over the stable graphs G of weight n, with

    z(G) = (−1)^{|V|} 2^{w} / |Aut(G)| · Σ_C (−1)^{m(C)} φ(Γ_C) / (m(C) + w)!

C runs over the edge-cuttings of G. Cut edges u→v are rerouted as
u→•, •→v through a new distinguished vertex. Parallel copies are
interchangeable for φ, so a cutting is a cut count per edge class
weighted by ∏ C(mult, count).

At weight 3 the fifteen graphs τ₁..τ₁₅ are converted to the basis of
fifteen independent curvature invariants σ₁..σ₁₅ by a fixed table.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from digraph_core import (
    AnyGraph,
    EdgeError,
    GraphError,
    MultiDigraph,
    PointedGraph,
    aut_order,
    canonical_form,
    format_compact,
    to_json,
    weak_components,
    weight,
)
from graph_enum import GraphSum, enumerate_stable
from phi_invariant import PhiCache, phi

log = logging.getLogger(__name__)


class TauBasisError(ValueError):
    pass


class RenderFormatError(ValueError):
    pass


RENDER_FORMATS = ("text", "json", "latex")

# ═══════════════════════════════════════════════════════════════════
# GRAPH CATALOGUE
# ═══════════════════════════════════════════════════════════════════


def _g(n: int, *edges: tuple[int, int, int]) -> MultiDigraph:
    return MultiDigraph.from_edges(n, list(edges))


A1_GRAPH = _g(1, (0, 0, 2))

# a₂ display order: g_{iijjkk}, g_{iijj}g_{kkll}, ...
WEIGHT2_GRAPHS = (
    _g(1, (0, 0, 3)),
    _g(2, (0, 0, 2), (1, 1, 2)),
    _g(2, (0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 1)),
    _g(2, (0, 1, 2), (1, 0, 2)),
)

TAU_GRAPHS = (
    _g(3, (0, 0, 2), (1, 1, 2), (2, 2, 2)),
    _g(3, (0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 1), (2, 2, 2)),
    _g(3, (0, 1, 2), (1, 0, 2), (2, 2, 2)),
    _g(3, (0, 1, 1), (0, 2, 1), (1, 0, 1), (2, 0, 1), (1, 1, 1), (2, 2, 1)),
    _g(3, (0, 1, 1), (0, 2, 1), (1, 2, 1), (2, 0, 2), (1, 1, 1)),
    _g(3, (0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 0, 1), (1, 1, 1), (2, 2, 1)),
    _g(3, (0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (0, 2, 1), (2, 0, 1)),
    _g(2, (0, 0, 2), (1, 1, 3)),
    _g(2, (0, 0, 1), (1, 1, 2), (0, 1, 1), (1, 0, 1)),
    _g(2, (0, 0, 1), (0, 1, 2), (1, 0, 2)),
    _g(2, (0, 0, 2), (1, 1, 2), (0, 1, 1)),
    _g(2, (0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 2)),
    _g(2, (0, 1, 3), (1, 0, 2)),
    _g(1, (0, 0, 4)),
    _g(3, (0, 1, 2), (1, 2, 2), (2, 0, 2)),
)

# τᵢ as combinations of σⱼ (1-based on both sides)
TAU_TO_SIGMA: dict[int, dict[int, int]] = {
    **{i: {i: -1} for i in range(1, 8)},
    8: {2: -2, 3: -1, 8: 1},
    9: {4: -1, 5: -1, 6: -1, 9: 1},
    10: {5: -2, 10: 1, 15: -1},
    11: {11: 1},
    12: {12: 1},
    13: {13: 1},
    14: {4: -3, 5: -12, 6: -3, 7: 6, 9: 7, 10: 8, 12: 10, 13: 3, 14: -1, 15: -6},
    15: {15: -1},
}

SIGMA_NAMES = (
    "rho^3",
    "rho Ric_{i jbar} Ric_{j ibar}",
    "rho R_{i jbar k lbar} R_{j ibar l kbar}",
    "Ric_{i jbar} Ric_{k lbar} R_{j ibar l kbar}",
    "Ric_{i jbar} R_{k ibar l mbar} R_{j kbar m lbar}",
    "Ric_{i jbar} Ric_{j kbar} Ric_{k ibar}",
    "R_{i jbar k lbar} R_{j ibar m nbar} R_{l kbar n mbar}",
    "rho Box rho",
    "Ric_{i jbar} Ric_{j ibar/k kbar}",
    "R_{i jbar k lbar} R_{j ibar l kbar/m mbar}",
    "rho_{/i} rho_{/ibar}",
    "Ric_{i jbar/k} Ric_{j ibar/kbar}",
    "R_{i jbar k lbar/m} R_{j ibar l kbar/mbar}",
    "Box^2 rho",
    "R_{i jbar k lbar} R_{j mbar l nbar} R_{m ibar n kbar}",
)

_TAU_INDEX = {canonical_form(g): i for i, g in enumerate(TAU_GRAPHS, 1)}
_DISPLAY_ORDER = {
    canonical_form(g): i for i, g in enumerate((A1_GRAPH,) + WEIGHT2_GRAPHS + TAU_GRAPHS)
}


def tau_index(g: MultiDigraph) -> Optional[int]:
    return _TAU_INDEX.get(canonical_form(g))


# ═══════════════════════════════════════════════════════════════════
# CUTTINGS & PAIRINGS
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class Cutting:
    """Cut counts per edge class (u, v, mult) of a graph."""

    graph: MultiDigraph
    counts: tuple[int, ...]

    def __post_init__(self):
        classes = list(self.graph.edges())
        if len(classes) != len(self.counts):
            raise EdgeError(f"{len(self.counts)} cut counts for {len(classes)} edge classes")
        for (u, v, mult), cut in zip(classes, self.counts):
            if not 0 <= cut <= mult:
                raise EdgeError(f"cut count {cut} on {u}>{v} outside 0..{mult}")

    @property
    def m(self) -> int:
        return sum(self.counts)

    @property
    def multiplicity(self) -> int:
        return math.prod(math.comb(mult, cut) for (_, _, mult), cut in zip(self.graph.edges(), self.counts))

    def cut_edges(self) -> Iterator[tuple[int, int, int]]:
        for (u, v, _), cut in zip(self.graph.edges(), self.counts):
            if cut:
                yield u, v, cut


@dataclass(frozen=True)
class Pairing:
    """Rejoined loose ends (u, v): the edge u→• is spliced to •→v."""

    pairs: tuple[tuple[int, int], ...]


def cuttings(g: MultiDigraph) -> Iterator[tuple[Cutting, int]]:
    ranges = [range(mult + 1) for _, _, mult in g.edges()]
    for counts in itertools.product(*ranges):
        cutting = Cutting(g, tuple(counts))
        yield cutting, cutting.multiplicity


def gamma_of_cutting(g: MultiDigraph, cutting: Cutting) -> PointedGraph:
    if cutting.graph != g:
        raise EdgeError("cutting belongs to a different graph")
    n = g.vertex_count + 1
    rows = [[0] * n for _ in range(n)]
    for u, v, mult in g.edges():
        rows[u + 1][v + 1] = mult
    for u, v, cut in cutting.cut_edges():
        rows[u + 1][v + 1] -= cut
        rows[u + 1][0] += cut
        rows[0][v + 1] += cut
    return PointedGraph.from_rows(rows)


def pairings(g: PointedGraph) -> Iterator[tuple[Pairing, MultiDigraph]]:
    """All m! rejoinings of the loose ends left by deleting •."""
    adj = g.adjacency
    if adj[0][0]:
        raise GraphError("pairings need a pointed graph without loops at •")
    outward = [u for u in g.ordinary_vertices for _ in range(adj[u][0])]
    inward = [v for v in g.ordinary_vertices for _ in range(adj[0][v])]
    if len(outward) != len(inward):
        raise GraphError(f"• has outdegree {len(inward)} but indegree {len(outward)}")
    base = [list(row[1:]) for row in adj[1:]]
    for order in itertools.permutations(range(len(inward))):
        rows = [row[:] for row in base]
        pairs = []
        for u, j in zip(outward, order):
            v = inward[j]
            rows[u - 1][v - 1] += 1
            pairs.append((u - 1, v - 1))
        yield Pairing(tuple(pairs)), MultiDigraph.from_rows(rows)


def pairing_cutting_sides(gamma: PointedGraph, g: MultiDigraph) -> tuple[Fraction, Fraction]:
    """(#{P | G_P ≅ G}/|Aut Γ|, #{C | Γ_C ≅ Γ}/|Aut G|), cuttings counted with multiplicity."""
    g_key = canonical_form(g)
    gamma_key = canonical_form(gamma)
    left = sum(1 for _, gp in pairings(gamma) if canonical_form(gp) == g_key)
    right = sum(mult for c, mult in cuttings(g) if canonical_form(gamma_of_cutting(g, c)) == gamma_key)
    return Fraction(left, aut_order(gamma)), Fraction(right, aut_order(g))


def verify_pairing_cutting_duality(gamma: PointedGraph, g: MultiDigraph) -> bool:
    left, right = pairing_cutting_sides(gamma, g)
    return left == right


# ═══════════════════════════════════════════════════════════════════
# COEFFICIENTS
# ═══════════════════════════════════════════════════════════════════


def z(g: MultiDigraph, cache: Optional[PhiCache] = None) -> Fraction:
    if not isinstance(g, MultiDigraph):
        raise TypeError(f"z needs an unpointed MultiDigraph, got {type(g).__name__}")
    cache = cache if cache is not None else PhiCache()
    w = weight(g)
    total = Fraction(0)
    for cutting, mult in cuttings(g):
        value = phi(gamma_of_cutting(g, cutting), cache)
        if value:
            sign = -1 if cutting.m % 2 else 1
            total += Fraction(sign * mult * value, math.factorial(cutting.m + w))
    sign = -1 if g.vertex_count % 2 else 1
    result = sign * Fraction(2) ** w / aut_order(g) * total
    log.debug("z(%s) = %s", format_compact(g), result)
    return result


def z_from_components(g: MultiDigraph, cache: Optional[PhiCache] = None) -> Fraction:
    """z through the connected components: ∏ z(Gⱼ) / |Sym(G₁, …, G_k)|."""
    cache = cache if cache is not None else PhiCache()
    parts = weak_components(g)
    classes = Counter(canonical_form(p) for p in parts)
    representatives = {canonical_form(p): p for p in parts}
    result = Fraction(1)
    for key, count in classes.items():
        result *= z(representatives[key], cache) ** count / math.factorial(count)
    return result


def heat_coefficient(n: int, cache: Optional[PhiCache] = None, bound: Optional[int] = None) -> GraphSum:
    cache = cache if cache is not None else PhiCache()
    result = GraphSum()
    for g in enumerate_stable(n, bound):
        result.add(g, z(g, cache))
    log.info("a_%d: %d terms, phi cache %s", n, len(result), cache.stats())
    return result


# ═══════════════════════════════════════════════════════════════════
# SIGMA BASIS
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class SigmaVector:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 15:
            raise ValueError(f"a sigma vector has 15 entries, got {len(self.values)}")

    @classmethod
    def zero(cls) -> "SigmaVector":
        return cls(tuple(Fraction(0) for _ in range(15)))

    def coefficient(self, i: int) -> Fraction:
        """cᵢ, 1-based like σ₁..σ₁₅."""
        return self.values[i - 1]


def tau_to_sigma(a3: GraphSum) -> SigmaVector:
    values = [Fraction(0)] * 15
    for key, graph, coeff in a3.terms():
        i = _TAU_INDEX.get(key)
        if i is None:
            raise TauBasisError(f"{format_compact(graph)} is not one of the weight-3 graphs")
        for j, factor in TAU_TO_SIGMA[i].items():
            values[j - 1] += coeff * factor
    return SigmaVector(tuple(values))


# ═══════════════════════════════════════════════════════════════════
# RENDERING
# ═══════════════════════════════════════════════════════════════════

_LETTERS = "ijklmnpqrstuvwxyabcdefgh"


def format_rational(x: Union[Fraction, int]) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _latex_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else rf"\frac{{{x.numerator}}}{{{x.denominator}}}"


def tensor_notation(g: AnyGraph, latex: bool = False) -> str:
    """g_{i ibar j jbar}-style product, one factor per vertex; • prints as f."""
    pointed = isinstance(g, PointedGraph)
    out_idx: dict[int, list[str]] = {v: [] for v in range(g.vertex_count)}
    in_idx: dict[int, list[str]] = {v: [] for v in range(g.vertex_count)}
    count = 0
    for u, v, mult in g.edges():
        for _ in range(mult):
            letter = _LETTERS[count] if count < len(_LETTERS) else f"i{count}"
            count += 1
            out_idx[u].append(letter)
            in_idx[v].append(letter)
    factors = []
    for v in range(g.vertex_count):
        slots = []
        for a, b in itertools.zip_longest(out_idx[v], in_idx[v]):
            if a is not None:
                slots.append(a)
            if b is not None:
                slots.append(rf"\bar{{{b}}}" if latex else f"{b}bar")
        name = "f" if pointed and v == 0 else "g"
        sep = "" if latex else " "
        factors.append(f"{name}_{{{sep.join(slots)}}}")
    return " ".join(factors)


def _ordered_terms(s: GraphSum) -> list[tuple[str, AnyGraph, Fraction]]:
    return sorted(s.terms(), key=lambda t: (_DISPLAY_ORDER.get(t[0], len(_DISPLAY_ORDER)), t[0]))


def render(value: Union[GraphSum, SigmaVector], fmt: str = "text") -> str:
    if fmt not in RENDER_FORMATS:
        raise RenderFormatError(f"unknown format {fmt!r}, expected one of {', '.join(RENDER_FORMATS)}")
    if isinstance(value, SigmaVector):
        return _render_sigma(value, fmt)
    return _render_sum(value, fmt)


def _latex_sum(terms) -> str:
    parts = []
    for coeff, symbol in terms:
        body = f"{_latex_rational(abs(coeff))} {symbol}"
        if not parts:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f"{'-' if coeff < 0 else '+'} {body}")
    return " ".join(parts)


def _render_sum(s: GraphSum, fmt: str) -> str:
    terms = _ordered_terms(s)
    if fmt == "json":
        w = weight(terms[0][1]) if terms else 0
        return json.dumps(
            {
                "weight": w,
                "terms": [
                    {"graph": to_json(graph), "canonical": key, "z": format_rational(coeff)}
                    for key, graph, coeff in terms
                ],
            },
            indent=2,
        )
    if not terms:
        return "0"
    if fmt == "latex":
        return _latex_sum((coeff, tensor_notation(graph, latex=True)) for _, graph, coeff in terms)
    lines = []
    for _, graph, coeff in terms:
        compact = ("•" if isinstance(graph, PointedGraph) else "") + format_compact(graph)
        lines.append(f"{format_rational(coeff)} {tensor_notation(graph)}  [{compact}]")
    return "\n".join(lines)


def _render_sigma(vec: SigmaVector, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"basis": "sigma", "coefficients": [format_rational(c) for c in vec.values]}, indent=2)
    nonzero = [(i, c) for i, c in enumerate(vec.values, 1) if c]
    if not nonzero:
        return "0"
    if fmt == "latex":
        return _latex_sum((c, rf"\sigma_{{{i}}}") for i, c in nonzero)
    return "\n".join(f"c{i} = {format_rational(c)}  sigma{i} = {SIGMA_NAMES[i - 1]}" for i, c in nonzero)
