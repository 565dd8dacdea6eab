"""Graph data model for pseudorange and GNSS frameworks.

Vertices are dense integer ids ``0..n-1``. Undirected edges are stored as
sorted pairs ``(u, v)`` with ``u < v``; arcs keep their direction.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

Edge = tuple[int, int]
Arc = tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graph input."""


class DecompositionLimitError(RuntimeError):
    """Too many single edges for exhaustive enumeration."""


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _check_vertex(n: int, v: int) -> None:
    if not (isinstance(v, (int, np.integer)) and 0 <= v < n):
        raise GraphError(f"vertex id {v!r} out of range for n={n}")


@dataclass(frozen=True)
class DirectedPseudorangeGraph:
    """Simple directed graph of one-way pseudorange constraints.

    Arc order is significant: it fixes the row order of every matrix
    assembled from the graph.
    """

    n: int
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        arcs = tuple((int(u), int(v)) for u, v in self.arcs)
        seen = set()
        for u, v in arcs:
            _check_vertex(self.n, u)
            _check_vertex(self.n, v)
            if u == v:
                raise GraphError(f"self-loop arc {u}->{v}")
            if (u, v) in seen:
                raise GraphError(f"duplicate arc {u}->{v}")
            seen.add((u, v))
        object.__setattr__(self, "arcs", arcs)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def reversed(self, which: Iterable[int] | None = None) -> "DirectedPseudorangeGraph":
        """Copy with the arcs at positions ``which`` reversed (all if None)."""
        idx = set(range(self.m)) if which is None else set(which)
        arcs = tuple((v, u) if k in idx else (u, v) for k, (u, v) in enumerate(self.arcs))
        return DirectedPseudorangeGraph(self.n, arcs)

    def with_arc(self, arc: Arc) -> "DirectedPseudorangeGraph":
        return DirectedPseudorangeGraph(self.n, self.arcs + (tuple(arc),))


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected simple graph; edges are sorted pairs in a fixed order."""

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        edges = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            _check_vertex(self.n, u)
            _check_vertex(self.n, v)
            if u == v:
                raise GraphError(f"self-loop edge {u}-{v}")
            e = _edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            edges.append(e)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @classmethod
    def complete(cls, n: int, vertices: Sequence[int] | None = None, size: int | None = None):
        verts = range(n) if vertices is None else vertices
        return cls(n if size is None else size, tuple(itertools.combinations(sorted(verts), 2)))


@dataclass(frozen=True)
class UndirectedMultigraph:
    """Multigraph induced by a pseudorange graph (multiplicities 1 or 2)."""

    n: int
    single_edges: frozenset[Edge] = frozenset()
    double_edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        single = frozenset(_edge(*e) for e in self.single_edges)
        double = frozenset(_edge(*e) for e in self.double_edges)
        if single & double:
            raise GraphError("an edge cannot be both single and double")
        for u, v in single | double:
            _check_vertex(self.n, u)
            _check_vertex(self.n, v)
            if u == v:
                raise GraphError("self-loop in multigraph")
        object.__setattr__(self, "single_edges", single)
        object.__setattr__(self, "double_edges", double)

    def elements(self) -> list[Edge]:
        """Edge elements in a deterministic order, double edges listed twice."""
        out = []
        for e in sorted(self.single_edges | self.double_edges):
            out.append(e)
            if e in self.double_edges:
                out.append(e)
        return out

    @property
    def support(self) -> SimpleGraph:
        return SimpleGraph(self.n, tuple(sorted(self.single_edges | self.double_edges)))


@dataclass(frozen=True)
class Decomposition:
    """Split of a multigraph into a distance graph and a synchronization graph."""

    g_d: SimpleGraph
    g_s: SimpleGraph


@dataclass(frozen=True)
class GnssGraph:
    """Pseudorange arcs, distance edges and synchronization edges on one vertex set."""

    gamma: DirectedPseudorangeGraph
    g_d: SimpleGraph | None = None
    g_s: SimpleGraph | None = None

    def __post_init__(self):
        n = self.gamma.n
        if self.g_d is None:
            object.__setattr__(self, "g_d", SimpleGraph(n))
        if self.g_s is None:
            object.__setattr__(self, "g_s", SimpleGraph(n))
        if not (self.g_d.n == self.g_s.n == n):
            raise GraphError("GNSS graph components must share one vertex count")

    @property
    def n(self) -> int:
        return self.gamma.n


def underlying_multigraph(gamma: DirectedPseudorangeGraph) -> UndirectedMultigraph:
    arcs = set(gamma.arcs)
    single, double = set(), set()
    for u, v in arcs:
        if (v, u) in arcs:
            double.add(_edge(u, v))
        else:
            single.add(_edge(u, v))
    return UndirectedMultigraph(gamma.n, frozenset(single), frozenset(double))


def incidence_matrix(g: SimpleGraph | Sequence[Edge], n: int | None = None) -> np.ndarray:
    """Signed incidence matrix, ``n x m``.

    Each edge is oriented from its smaller id (``-1``) to its larger id
    (``+1``). A plain edge sequence may be passed together with ``n``.
    """
    if isinstance(g, SimpleGraph):
        n, edges = g.n, g.edges
    else:
        if n is None:
            raise ValueError("n is required when passing a raw edge list")
        edges = [_edge(*e) for e in g]
    B = np.zeros((n, len(edges)))
    for k, (u, v) in enumerate(edges):
        B[u, k] = -1.0
        B[v, k] = 1.0
    return B


def connected_components(g: SimpleGraph) -> list[list[int]]:
    """Vertex blocks of ``g``, each sorted, ordered by smallest member."""
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * g.n
    blocks = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, block = [s], []
        while stack:
            u = stack.pop()
            block.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        blocks.append(sorted(block))
    return blocks


def enumerate_decompositions(m: UndirectedMultigraph, limit: int = 20) -> Iterator[Decomposition]:
    """Yield all ``2**|E1|`` decompositions of ``m``.

    Exhaustive; meant as a test oracle. Use the matroid-union routines in
    :mod:`pseudorange_rigidity.combinatorics` for anything larger than ``limit``.
    """
    singles = sorted(m.single_edges)
    if len(singles) > limit:
        raise DecompositionLimitError(
            f"{len(singles)} single edges exceeds the enumeration limit {limit}; "
            "use combinatorics.matroid_union_rank / find_rigid_decomposition instead"
        )
    doubles = sorted(m.double_edges)
    for mask in range(1 << len(singles)):
        to_d = [e for k, e in enumerate(singles) if mask >> k & 1]
        to_s = [e for k, e in enumerate(singles) if not mask >> k & 1]
        yield Decomposition(
            SimpleGraph(m.n, tuple(sorted(doubles + to_d))),
            SimpleGraph(m.n, tuple(sorted(doubles + to_s))),
        )


def validate_decomposition(m: UndirectedMultigraph, d: Decomposition) -> bool:
    if not (d.g_d.n == d.g_s.n == m.n):
        return False
    ed, es = d.g_d.edge_set, d.g_s.edge_set
    return (ed | es) == (m.single_edges | m.double_edges) and (ed & es) == m.double_edges


# --- Graph JSON -----------------------------------------------------------


def graph_from_dict(doc: dict) -> GnssGraph:
    """Parse the graph document ``{"n", "arcs", "edges_distance", "edges_sync"}``."""
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    if "n" not in doc:
        raise GraphError("graph document: missing field 'n'")
    n = doc["n"]
    if not isinstance(n, int) or n < 0:
        raise GraphError("graph document: field 'n' must be a non-negative integer")

    def pairs(key):
        raw = doc.get(key, [])
        if not isinstance(raw, list):
            raise GraphError(f"graph document: field {key!r} must be a list")
        out = []
        for k, p in enumerate(raw):
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p)):
                raise GraphError(f"graph document: {key}[{k}] must be a pair of integer ids")
            out.append((p[0], p[1]))
        return tuple(out)

    try:
        return GnssGraph(
            DirectedPseudorangeGraph(n, pairs("arcs")),
            SimpleGraph(n, pairs("edges_distance")),
            SimpleGraph(n, pairs("edges_sync")),
        )
    except GraphError as exc:
        raise GraphError(f"graph document: {exc}") from None


def graph_to_dict(gg: GnssGraph | DirectedPseudorangeGraph) -> dict:
    if isinstance(gg, DirectedPseudorangeGraph):
        gg = GnssGraph(gg)
    return {
        "n": gg.n,
        "arcs": [list(a) for a in gg.gamma.arcs],
        "edges_distance": [list(e) for e in gg.g_d.edges],
        "edges_sync": [list(e) for e in gg.g_s.edges],
    }


def load_graph(path: str | Path) -> GnssGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))
