"""
Digraph Core - multi-digraphs, pointed graphs and the surgeries on them
=======================================================================

A graph is a finite directed multigraph with loops, stored as a square
matrix of edge multiplicities: adjacency[u][v] = number of edges u→v,
diagonal entries are loop counts.

A pointed graph carries a distinguished vertex •, always at index 0.
Its weight excludes • from the vertex count and stability is only asked
of the ordinary vertices.

Everything here is immutable: every surgery returns a new value.
"""
from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import networkx as nx

# ═══════════════════════════════════════════════════════════════════
# CONFIG
# ═══════════════════════════════════════════════════════════════════

# Brute-force canonical labelling walks vertex permutations inside colour
# classes; 10 vertices is the largest graph it is asked to handle.
MAX_CANONICAL_VERTICES = 10

BULLET = 0

# ═══════════════════════════════════════════════════════════════════
# ERRORS
# ═══════════════════════════════════════════════════════════════════


class GraphError(ValueError):
    """Base class for invalid graph input or an illegal surgery."""


class VertexIndexError(GraphError):
    pass


class EdgeError(GraphError):
    pass


class SurgeryError(GraphError):
    pass


class CanonicalBoundError(GraphError):
    pass


class GraphParseError(GraphError):
    pass


# ═══════════════════════════════════════════════════════════════════
# TYPES
# ═══════════════════════════════════════════════════════════════════

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MultiDigraph:
    adjacency: Matrix

    def __post_init__(self):
        n = len(self.adjacency)
        for row in self.adjacency:
            if len(row) != n:
                raise GraphError(f"adjacency must be square, got a row of length {len(row)} for {n} vertices")
            for entry in row:
                if not isinstance(entry, int) or entry < 0:
                    raise GraphError(f"edge multiplicities must be non-negative integers, got {entry!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "MultiDigraph":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Sequence[tuple[int, int, int]]) -> "MultiDigraph":
        if vertex_count < 0:
            raise GraphError(f"vertex count must be >= 0, got {vertex_count}")
        rows = [[0] * vertex_count for _ in range(vertex_count)]
        for u, v, mult in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise VertexIndexError(f"edge {u}>{v} outside 0..{vertex_count - 1}")
            if mult < 1:
                raise GraphError(f"edge {u}>{v} has multiplicity {mult}, expected >= 1")
            rows[u][v] += mult
        return cls.from_rows(rows)

    @classmethod
    def empty(cls, vertex_count: int) -> "MultiDigraph":
        return cls.from_rows([[0] * vertex_count for _ in range(vertex_count)])

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(sum(row) for row in self.adjacency)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Edge classes (u, v, multiplicity) in lexicographic order."""
        for u, row in enumerate(self.adjacency):
            for v, mult in enumerate(row):
                if mult:
                    yield u, v, mult

    def __str__(self) -> str:
        return format_compact(self)


@dataclass(frozen=True)
class PointedGraph:
    graph: MultiDigraph
    distinguished: int = BULLET

    def __post_init__(self):
        if self.distinguished != BULLET:
            raise GraphError("the distinguished vertex of a pointed graph is always index 0")
        if self.graph.vertex_count < 1:
            raise GraphError("a pointed graph needs at least the distinguished vertex")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "PointedGraph":
        return cls(MultiDigraph.from_rows(rows))

    @classmethod
    def bullet(cls, loops: int = 0) -> "PointedGraph":
        return cls.from_rows([[loops]])

    @property
    def adjacency(self) -> Matrix:
        return self.graph.adjacency

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @property
    def ordinary_vertices(self) -> range:
        return range(1, self.vertex_count)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        return self.graph.edges()

    def __str__(self) -> str:
        return "•" + format_compact(self.graph)


AnyGraph = Union[MultiDigraph, PointedGraph]


def _unpack(g: AnyGraph) -> tuple[Matrix, bool]:
    if isinstance(g, PointedGraph):
        return g.graph.adjacency, True
    return g.adjacency, False


def _repack(rows: Sequence[Sequence[int]], pointed: bool) -> AnyGraph:
    graph = MultiDigraph.from_rows(rows)
    return PointedGraph(graph) if pointed else graph


def _ordinary(adj: Matrix, pointed: bool) -> range:
    return range(1 if pointed else 0, len(adj))


# ═══════════════════════════════════════════════════════════════════
# DEGREES, WEIGHT, STABILITY
# ═══════════════════════════════════════════════════════════════════


def degrees(g: AnyGraph, v: int) -> tuple[int, int]:
    """(outdegree, indegree) of v; a loop counts once each way."""
    adj, _ = _unpack(g)
    if not 0 <= v < len(adj):
        raise VertexIndexError(f"vertex {v} outside 0..{len(adj) - 1}")
    return sum(adj[v]), sum(row[v] for row in adj)


def weight(g: AnyGraph) -> int:
    adj, pointed = _unpack(g)
    edges = sum(sum(row) for row in adj)
    vertices = len(adj) - 1 if pointed else len(adj)
    return edges - vertices


def is_stable(g: AnyGraph) -> bool:
    adj, pointed = _unpack(g)
    for v in _ordinary(adj, pointed):
        out_deg, in_deg = degrees(g, v)
        if out_deg < 2 or in_deg < 2:
            return False
    return True


def is_semistable(g: AnyGraph) -> bool:
    adj, pointed = _unpack(g)
    for v in _ordinary(adj, pointed):
        out_deg, in_deg = degrees(g, v)
        if out_deg < 1 or in_deg < 1 or out_deg + in_deg < 3:
            return False
    return True


# ═══════════════════════════════════════════════════════════════════
# CONNECTIVITY
# ═══════════════════════════════════════════════════════════════════


def to_networkx(g: AnyGraph) -> nx.DiGraph:
    adj, _ = _unpack(g)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(adj)))
    dg.add_edges_from((u, v) for u, row in enumerate(adj) for v, mult in enumerate(row) if mult and u != v)
    return dg


def is_strongly_connected(g: AnyGraph) -> bool:
    adj, _ = _unpack(g)
    if len(adj) <= 1:
        return True
    return nx.is_strongly_connected(to_networkx(g))


def weak_components(g: MultiDigraph) -> list[MultiDigraph]:
    """Connected components of the underlying undirected graph, in vertex order."""
    if g.vertex_count == 0:
        return []
    parts = sorted((sorted(c) for c in nx.weakly_connected_components(to_networkx(g))), key=lambda c: c[0])
    return [induced_subgraph(g, part) for part in parts]


def induced_subgraph(g: MultiDigraph, vertices: Sequence[int]) -> MultiDigraph:
    return MultiDigraph.from_rows([[g.adjacency[u][v] for v in vertices] for u in vertices])


def disjoint_union(*graphs: MultiDigraph) -> MultiDigraph:
    n = sum(h.vertex_count for h in graphs)
    rows = [[0] * n for _ in range(n)]
    offset = 0
    for h in graphs:
        for u, v, mult in h.edges():
            rows[offset + u][offset + v] = mult
        offset += h.vertex_count
    return MultiDigraph.from_rows(rows)


# ═══════════════════════════════════════════════════════════════════
# CANONICAL FORM & AUTOMORPHISMS
# ═══════════════════════════════════════════════════════════════════


def _signature(adj: Matrix, v: int) -> tuple[int, int, int]:
    return sum(adj[v]), sum(row[v] for row in adj), adj[v][v]


def _refined_colours(adj: Matrix, pointed: bool) -> list[int]:
    """Colour refinement from the degree signature until the partition is stable.

    Colours are ranks of sorted invariant tuples, so isomorphic graphs get
    the same colour per matched vertex. • keeps a colour of its own.
    """
    n = len(adj)
    colours = [(-1,) if pointed and v == BULLET else _signature(adj, v) for v in range(n)]
    ranks = {c: i for i, c in enumerate(sorted(set(colours)))}
    current = [ranks[c] for c in colours]
    while True:
        refined = [
            (
                current[v],
                tuple(sorted((current[w], adj[v][w]) for w in range(n) if adj[v][w] and w != v)),
                tuple(sorted((current[u], adj[u][v]) for u in range(n) if adj[u][v] and u != v)),
            )
            for v in range(n)
        ]
        ranks = {c: i for i, c in enumerate(sorted(set(refined)))}
        nxt = [ranks[c] for c in refined]
        if len(ranks) == len(set(current)):
            return nxt
        current = nxt


def _candidate_orders(adj: Matrix, pointed: bool) -> Iterator[tuple[int, ...]]:
    """Vertex orders sorted by refined colour, permuting only inside a colour class."""
    colours = _refined_colours(adj, pointed)
    classes: dict[int, list[int]] = {}
    for v in _ordinary(adj, pointed):
        classes.setdefault(colours[v], []).append(v)
    blocks = [classes[key] for key in sorted(classes)]
    head = (BULLET,) if pointed else ()
    for choice in itertools.product(*(itertools.permutations(block) for block in blocks)):
        yield head + tuple(itertools.chain.from_iterable(choice))


def canonical_form(g: AnyGraph) -> str:
    """Isomorphism-invariant key; pointed graphs only relabel ordinary vertices."""
    adj, pointed = _unpack(g)
    n = len(adj)
    if n > MAX_CANONICAL_VERTICES:
        raise CanonicalBoundError(f"{n} vertices exceeds the canonical-form bound {MAX_CANONICAL_VERTICES}")
    best: Optional[tuple[int, ...]] = None
    for order in _candidate_orders(adj, pointed):
        flat = tuple(adj[a][b] for a in order for b in order)
        if best is None or flat < best:
            best = flat
    body = ".".join(map(str, best or ()))
    return f"{'P' if pointed else 'G'}{n}:{body}"


def canonical_graph(g: AnyGraph) -> AnyGraph:
    """The relabelled representative whose flattened matrix is the canonical key."""
    adj, pointed = _unpack(g)
    best_order = min(_candidate_orders(adj, pointed), key=lambda o: tuple(adj[a][b] for a in o for b in o))
    return permute(g, best_order)


def permute(g: AnyGraph, order: Sequence[int]) -> AnyGraph:
    """New graph whose vertex i is old vertex order[i]."""
    adj, pointed = _unpack(g)
    if sorted(order) != list(range(len(adj))):
        raise GraphError(f"{list(order)} is not a permutation of the vertices")
    if pointed and order[0] != BULLET:
        raise GraphError("relabelling a pointed graph must fix the distinguished vertex")
    return _repack([[adj[a][b] for b in order] for a in order], pointed)


def vertex_automorphism_count(g: AnyGraph) -> int:
    """Adjacency-preserving vertex permutations (fixing • when pointed)."""
    adj, pointed = _unpack(g)
    identity = tuple(range(len(adj)))
    reference = None
    count = 0
    for order in _candidate_orders(adj, pointed):
        if reference is None:
            reference = order
        # order and reference list the same colour classes position by
        # position, so the map reference[i] -> order[i] respects degrees
        mapping = dict(zip(reference, order))
        if all(adj[mapping[a]][mapping[b]] == adj[a][b] for a in identity for b in identity):
            count += 1
    return count


def aut_order(g: AnyGraph) -> int:
    """|Aut|: vertex automorphisms times the free permutations of parallel edges and loops."""
    adj, _ = _unpack(g)
    edge_perms = 1
    for row in adj:
        for mult in row:
            edge_perms *= math.factorial(mult)
    return vertex_automorphism_count(g) * edge_perms


def are_isomorphic(a: AnyGraph, b: AnyGraph) -> bool:
    return isinstance(a, PointedGraph) == isinstance(b, PointedGraph) and canonical_form(a) == canonical_form(b)


# ═══════════════════════════════════════════════════════════════════
# SURGERIES
# ═══════════════════════════════════════════════════════════════════


def _rows(adj: Matrix) -> list[list[int]]:
    return [list(row) for row in adj]


def _drop_vertex(rows: list[list[int]], v: int) -> list[list[int]]:
    return [[x for j, x in enumerate(row) if j != v] for i, row in enumerate(rows) if i != v]


def delete_edge(g: AnyGraph, u: int, v: int) -> AnyGraph:
    """Remove one copy of u→v, keeping both endpoints."""
    adj, pointed = _unpack(g)
    n = len(adj)
    if not (0 <= u < n and 0 <= v < n):
        raise VertexIndexError(f"edge {u}>{v} outside 0..{n - 1}")
    if adj[u][v] < 1:
        raise EdgeError(f"no edge {u}>{v} to delete")
    rows = _rows(adj)
    rows[u][v] -= 1
    return _repack(rows, pointed)


def add_edge(g: AnyGraph, u: int, v: int, mult: int = 1) -> AnyGraph:
    adj, pointed = _unpack(g)
    rows = _rows(adj)
    rows[u][v] += mult
    return _repack(rows, pointed)


def is_smoothable(g: PointedGraph, v: int) -> bool:
    adj = g.adjacency
    return v != BULLET and adj[v][v] == 0 and degrees(g, v) == (1, 1)


def smooth_vertex(g: PointedGraph, v: int) -> PointedGraph:
    """Replace u→v→w by u→w and drop v (a loop when u = w)."""
    if not 0 <= v < g.vertex_count:
        raise VertexIndexError(f"vertex {v} outside 0..{g.vertex_count - 1}")
    if not is_smoothable(g, v):
        raise SurgeryError(f"vertex {v} is not an ordinary loop-free vertex of degree (1,1)")
    adj = g.adjacency
    u = next(i for i, row in enumerate(adj) if row[v])
    w = next(j for j, mult in enumerate(adj[v]) if mult)
    rows = _rows(adj)
    rows[u][v] -= 1
    rows[v][w] -= 1
    rows[u][w] += 1
    return PointedGraph(MultiDigraph.from_rows(_drop_vertex(rows, v)))


def smooth_all(g: PointedGraph) -> PointedGraph:
    """Normal form under smoothing; the result does not depend on the order."""
    while True:
        v = next((v for v in g.ordinary_vertices if is_smoothable(g, v)), None)
        if v is None:
            return g
        g = smooth_vertex(g, v)


def is_contractible(g: PointedGraph, u: int, v: int) -> bool:
    adj = g.adjacency
    if u == v or adj[u][v] < 1:
        return False
    return (u != BULLET and degrees(g, u)[0] == 1) or (v != BULLET and degrees(g, v)[1] == 1)


def contract_edge(g: PointedGraph, u: int, v: int) -> PointedGraph:
    """Merge u and v along one copy of u→v; • absorbs its partner."""
    if not is_contractible(g, u, v):
        raise SurgeryError(f"edge {u}>{v} is not contractible")
    keep, gone = min(u, v), max(u, v)
    rows = _rows(g.adjacency)
    rows[u][v] -= 1
    n = len(rows)
    for j in range(n):
        rows[keep][j] += rows[gone][j]
        rows[gone][j] = 0
    for i in range(n):
        rows[i][keep] += rows[i][gone]
        rows[i][gone] = 0
    return PointedGraph(MultiDigraph.from_rows(_drop_vertex(rows, gone)))


def stabilize(g: PointedGraph) -> PointedGraph:
    """Contract contractible edges until every ordinary vertex is stable."""
    if not is_semistable(g):
        raise SurgeryError("only semistable pointed graphs can be stabilized")
    while not is_stable(g):
        edge = next(((u, v) for u, v, _ in g.edges() if is_contractible(g, u, v)), None)
        if edge is None:
            raise SurgeryError(f"{g} is not stabilizable: unstable but nothing is contractible")
        g = contract_edge(g, *edge)
    return g


def is_redundant(g: AnyGraph, u: int, v: int) -> bool:
    adj, _ = _unpack(g)
    if adj[u][v] < 1:
        raise EdgeError(f"no edge {u}>{v}")
    return is_strongly_connected(delete_edge(g, u, v))


def essential_edges(g: AnyGraph) -> list[tuple[int, int]]:
    """Edge classes whose single-copy removal breaks strong connectivity."""
    return [(u, v) for u, v, _ in g.edges() if not is_redundant(g, u, v)]


# ═══════════════════════════════════════════════════════════════════
# SERIALIZATION
# ═══════════════════════════════════════════════════════════════════

_COMPACT_EDGE = re.compile(r"^\s*(\d+)\s*>\s*(\d+)\s*(?:\*\s*(\d+))?\s*$")


def to_json(g: AnyGraph) -> dict:
    adj, pointed = _unpack(g)
    return {
        "vertices": len(adj),
        "pointed": pointed,
        "edges": [[u, v, mult] for u, v, mult in MultiDigraph(adj).edges()],
    }


def from_json(data: Union[dict, str]) -> AnyGraph:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise GraphParseError(f"invalid graph JSON: {e}") from e
    try:
        n = int(data["vertices"])
        edges = [(int(u), int(v), int(m)) for u, v, m in data.get("edges", [])]
        pointed = bool(data.get("pointed", False))
    except (KeyError, TypeError, ValueError) as e:
        raise GraphParseError(f"malformed graph object: {e}") from e
    if n < 0:
        raise GraphParseError(f"vertex count must be >= 0, got {n}")
    graph = MultiDigraph.from_edges(n, edges)
    return PointedGraph(graph) if pointed else graph


def format_compact(g: AnyGraph) -> str:
    adj, _ = _unpack(g)
    edges = ", ".join(f"{u}>{v}*{m}" if m > 1 else f"{u}>{v}" for u, v, m in MultiDigraph(adj).edges())
    return f"{len(adj)}; {edges}" if edges else f"{len(adj)};"


def parse_compact(text: str, pointed: bool = False) -> AnyGraph:
    """Parse "k; u>v*m, ..." (multiplicity optional, repeated edges add up)."""
    head, sep, body = text.partition(";")
    if not sep:
        raise GraphParseError(f"expected 'k; u>v*m, ...', got {text!r}")
    try:
        n = int(head.strip())
    except ValueError as e:
        raise GraphParseError(f"bad vertex count {head.strip()!r}") from e
    if n < 0:
        raise GraphParseError(f"vertex count must be >= 0, got {n}")
    edges = []
    for chunk in body.split(","):
        if not chunk.strip():
            continue
        m = _COMPACT_EDGE.match(chunk)
        if not m:
            raise GraphParseError(f"bad edge {chunk.strip()!r}, expected u>v or u>v*m")
        edges.append((int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)))
    graph = MultiDigraph.from_edges(n, edges)
    return PointedGraph(graph) if pointed else graph


def parse_graph(text: str, pointed: bool = False) -> AnyGraph:
    """Accepts either the JSON object or the compact text form."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return from_json(stripped)
    return parse_compact(stripped, pointed=pointed)
