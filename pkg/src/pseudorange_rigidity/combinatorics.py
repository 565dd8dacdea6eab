"""Combinatorial generic ranks.

The generic pseudorange rank of a multigraph is the rank of the union of the
distance rigidity matroid and the cycle matroid on its edge elements (a
double edge contributes two parallel elements). The union is computed with
the matroid-partition augmenting-path algorithm, which also hands back the
split of the edges used as a witness decomposition.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import (
    Decomposition,
    Edge,
    GnssGraph,
    SimpleGraph,
    UndirectedMultigraph,
    _edge,
)
from .numeric import TolerancePolicy, as_seed_sequence, numeric_rank, sample_configuration
from .rigidity import distance_rigidity_matrix, s_d, s_p, trial_seeds

log = logging.getLogger(__name__)

D_SIDE, S_SIDE = "D", "S"


class OracleInconsistencyError(RuntimeError):
    """A rank oracle contradicted the matroid axioms."""


class _TrialDisagreement(Exception):
    pass


# --- pebble game ----------------------------------------------------------


def _pebble_game(n: int, edges: Iterable[Edge]) -> list[bool]:
    """(2,3)-pebble game; returns the accept flag of each edge in input order."""
    pebbles = [2] * n
    out: list[list[int]] = [[] for _ in range(n)]

    def fetch(root: int, blocked: int) -> bool:
        # depth-first search along oriented edges for a free pebble
        parent = {root: None, blocked: None}
        stack = [root]
        while stack:
            w = stack.pop()
            for x in sorted(out[w], reverse=True):
                if x in parent:
                    continue
                parent[x] = w
                if pebbles[x] > 0:
                    # reverse the path x <- ... <- root, moving the pebble to root
                    pebbles[x] -= 1
                    pebbles[root] += 1
                    cur = x
                    while cur != root:
                        prev = parent[cur]
                        out[prev].remove(cur)
                        out[cur].append(prev)
                        cur = prev
                    return True
                stack.append(x)
        return False

    accepted = []
    for u, v in edges:
        if u == v:
            raise ValueError("self-loop in pebble game")
        while pebbles[u] < 2 and fetch(u, v):
            pass
        while pebbles[v] < 2 and fetch(v, u):
            pass
        ok = pebbles[u] + pebbles[v] == 4
        if ok:
            pebbles[u] -= 1
            out[u].append(v)
        accepted.append(ok)
    return accepted


def laman_rank_2d(g: SimpleGraph | Sequence[Edge], n: int | None = None) -> int:
    """Generic rank of the 2D distance rigidity matroid via the (2,3)-pebble game."""
    if isinstance(g, SimpleGraph):
        n, edges = g.n, g.edges
    else:
        edges = [_edge(*e) for e in g]
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
    return sum(_pebble_game(n, edges))


# --- rank oracles ---------------------------------------------------------


class MatroidRankOracle:
    """Rank function on subsets of a fixed ground set of edges.

    Subsets are given as collections of ground-set indices. Ranks are cached.
    """

    def __init__(self, n: int, ground: Sequence[Edge]):
        self.n = n
        self.ground = [_edge(*e) for e in ground]
        self._cache: dict[frozenset[int], int] = {}

    def _rank(self, edges: list[Edge]) -> int:
        raise NotImplementedError

    def _rank_indices(self, idx: list[int]) -> int:
        return self._rank([self.ground[i] for i in idx])

    def rank(self, subset: Iterable[int]) -> int:
        key = frozenset(subset)
        r = self._cache.get(key)
        if r is None:
            r = self._rank_indices(sorted(key))
            if r > len(key) or r < 0:
                raise OracleInconsistencyError(f"rank {r} out of range for {len(key)} elements")
            self._cache[key] = r
        return r

    def is_independent(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        return self.rank(s) == len(s)

    def circuit(self, indep: frozenset[int], y: int) -> set[int]:
        """Elements ``z`` of ``indep`` with ``indep - z + y`` independent,
        assuming ``indep + y`` is dependent."""
        return {z for z in indep if self.is_independent((indep - {z}) | {y})}

    def edge_rank(self, edges: Iterable[Edge]) -> int:
        """Rank of an arbitrary edge collection (not necessarily in the ground set)."""
        return self._rank([_edge(*e) for e in edges])


class GraphicOracle(MatroidRankOracle):
    """Cycle matroid: rank = covered vertices - components."""

    def _rank(self, edges):
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        r = 0
        for u, v in edges:
            a, b = find(u), find(v)
            if a != b:
                parent[a] = b
                r += 1
        return r

    def circuit(self, indep, y):
        # fundamental cycle: the forest path between the endpoints of y
        adj: dict[int, list[tuple[int, int]]] = {}
        for i in indep:
            u, v = self.ground[i]
            adj.setdefault(u, []).append((v, i))
            adj.setdefault(v, []).append((u, i))
        src, dst = self.ground[y]
        prev: dict[int, tuple[int, int] | None] = {src: None}
        queue = deque([src])
        while queue:
            a = queue.popleft()
            if a == dst:
                break
            for b, i in adj.get(a, []):
                if b not in prev:
                    prev[b] = (a, i)
                    queue.append(b)
        if dst not in prev:
            return set()
        path, cur = set(), dst
        while prev[cur] is not None:
            a, i = prev[cur]
            path.add(i)
            cur = a
        return path


class Laman2DOracle(MatroidRankOracle):
    """2D distance rigidity matroid through the pebble game."""

    def _rank(self, edges):
        return sum(_pebble_game(self.n, edges))


class RandomizedDistanceOracle(MatroidRankOracle):
    """Distance rigidity matroid in ``R^d`` from random configurations.

    The rank of a subset is the numeric rank of its distance rigidity rows
    at ``trials`` random configurations. With ``strict=True`` a disagreement
    between trials raises, so the caller can resample.
    """

    def __init__(
        self,
        n: int,
        ground: Sequence[Edge],
        d: int,
        trials: int = 5,
        seed=None,
        range_: float = 1.0,
        strict: bool = True,
        tol: TolerancePolicy | float | None = None,
    ):
        super().__init__(n, ground)
        self.d = d
        self.seeds = trial_seeds(seed, trials)
        self.strict = strict
        self.tol = tol
        self.configs = [sample_configuration(n, d, seed=s, range_=range_) for s in self.seeds]
        # rows of the whole ground set, assembled once per configuration
        self._rows = [distance_rigidity_matrix(self.ground, c) for c in self.configs]

    def _agree(self, ranks: list[int]) -> int:
        if len(set(ranks)) > 1:
            if self.strict:
                raise _TrialDisagreement(ranks)
            log.warning("distance rank disagreement across trials %s; keeping max", ranks)
        return max(ranks)

    def _rank(self, edges):
        if not edges:
            return 0
        return self._agree([numeric_rank(distance_rigidity_matrix(edges, c), self.tol) for c in self.configs])

    def _rank_indices(self, idx):
        if not idx:
            return 0
        return self._agree([numeric_rank(rows[idx], self.tol) for rows in self._rows])

    def circuit(self, indep, y):
        # the row of y is a unique combination of the independent rows;
        # its support is the circuit
        idx = sorted(indep)
        if not idx:
            return set()
        found = []
        for rows in self._rows:
            coef, *_ = np.linalg.lstsq(rows[idx].T, rows[y], rcond=None)
            scale = max(float(np.abs(coef).max()), 1.0)
            found.append(frozenset(z for z, c in zip(idx, coef) if abs(c) > 1e-8 * scale))
        if len(set(found)) == 1:
            return set(found[0])
        return super().circuit(indep, y)


def randomized_distance_rank(g: SimpleGraph, d: int, trials: int = 5, seed=None) -> int:
    """Generic distance rank estimated as the max numeric rank over random configurations."""
    oracle = RandomizedDistanceOracle(g.n, g.edges, d, trials, seed, strict=False)
    return oracle.rank(range(g.m))


def graphic_rank(g: SimpleGraph | Sequence[Edge], n: int | None = None) -> int:
    if isinstance(g, SimpleGraph):
        n, edges = g.n, list(g.edges)
    else:
        edges = [_edge(*e) for e in g]
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
    return GraphicOracle(n, edges).rank(range(len(edges)))


def distance_oracle(n: int, ground: Sequence[Edge], d: int, trials: int = 5, seed=None,
                    range_: float = 1.0, strict: bool = True) -> MatroidRankOracle:
    """Pebble game for ``d == 2``, randomized numeric rank otherwise."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if d == 2:
        return Laman2DOracle(n, ground)
    return RandomizedDistanceOracle(n, ground, d, trials, seed, range_=range_, strict=strict)


# --- matroid union --------------------------------------------------------


@dataclass
class UnionResult:
    rank: int
    sides: dict[int, str]  # element index -> side for every assigned element
    elements: list[Edge]
    seeds: tuple[int, ...] = ()


def _matroid_partition(
    elements: Sequence[Edge],
    allowed: Sequence[frozenset[str]],
    oracles: dict[str, MatroidRankOracle],
) -> dict[int, str]:
    """Greedy matroid partition with shortest augmenting paths.

    Returns the side of each assigned element. The union rank is the number
    of assigned elements.
    """
    side: dict[int, str] = {}
    members: dict[str, set[int]] = {k: set() for k in oracles}

    for x in range(len(elements)):
        parent: dict[int, int | None] = {x: None}
        queue = deque([x])
        sink = None
        while queue and sink is None:
            y = queue.popleft()
            for k in sorted(allowed[y]):
                if side.get(y) == k:
                    continue
                cur = frozenset(members[k])
                if oracles[k].is_independent(cur | {y}):
                    sink = (y, k)
                    break
                for z in sorted(oracles[k].circuit(cur, y)):
                    if z not in parent:
                        parent[z] = y
                        queue.append(z)
        if sink is None:
            continue
        # shift each element along the path into the side vacated by its successor
        y, k = sink
        moves = [(y, k)]
        cur = y
        while parent[cur] is not None:
            p = parent[cur]
            moves.append((p, side[cur]))
            cur = p
        for e, _ in moves:
            if e in side:
                members[side[e]].discard(e)
        for e, k in moves:
            side[e] = k
            members[k].add(e)

    for k, mem in members.items():
        if not oracles[k].is_independent(mem):
            raise OracleInconsistencyError(f"side {k} ended dependent after augmentation")
    return side


def _union(n, elements, allowed, d, trials, seed, distance=None) -> UnionResult:
    attempts = 4
    range_ = 1.0
    seq = as_seed_sequence(seed)
    for attempt in range(attempts):
        child = seq.spawn(1)[0]
        dist = distance or distance_oracle(
            n, elements, d, trials, child, range_=range_, strict=attempt < attempts - 1
        )
        oracles = {D_SIDE: dist, S_SIDE: GraphicOracle(n, elements)}
        try:
            sides = _matroid_partition(elements, allowed, oracles)
        except _TrialDisagreement as exc:
            log.warning("randomized oracle disagreement %s; retrying at larger range", exc.args[0])
            range_ *= 16.0
            continue
        seeds = getattr(dist, "seeds", ())
        return UnionResult(len(sides), sides, list(elements), seeds)
    raise AssertionError("unreachable")


def matroid_union_rank(
    m: UndirectedMultigraph,
    d: int,
    oracles: MatroidRankOracle | None = None,
    trials: int = 5,
    seed=None,
) -> int:
    """Generic pseudorange rank of a multigraph, computed combinatorially.

    ``oracles`` optionally overrides the distance-matroid oracle; it must be
    built on ``m.elements()``.
    """
    elements = m.elements()
    allowed = [frozenset({D_SIDE, S_SIDE})] * len(elements)
    return _union(m.n, elements, allowed, d, trials, seed, oracles).rank


def union_rank_two(
    n: int,
    elements: Sequence[Edge],
    first: MatroidRankOracle,
    second: MatroidRankOracle,
) -> int:
    """Rank of the union of two arbitrary matroids on ``elements``."""
    allowed = [frozenset({D_SIDE, S_SIDE})] * len(elements)
    return len(_matroid_partition(elements, allowed, {D_SIDE: first, S_SIDE: second}))


@dataclass(frozen=True)
class DecompositionWitness:
    decomposition: Decomposition
    rank_d: int
    rank_s: int

    @property
    def rank(self) -> int:
        return self.rank_d + self.rank_s


@dataclass(frozen=True)
class FlexibleCertificate:
    rank: int
    bound: int
    best: DecompositionWitness

    @property
    def deficit(self) -> int:
        return self.bound - self.rank


def _witness(n, union: UnionResult, fixed_d=(), fixed_s=(), double=()):
    ed, es = set(fixed_d) | set(double), set(fixed_s) | set(double)
    for i, e in enumerate(union.elements):
        k = union.sides.get(i)
        if k == S_SIDE:
            es.add(e)
        elif k == D_SIDE:
            ed.add(e)
    # unassigned single edges are redundant; file them with the distance side
    for i, e in enumerate(union.elements):
        if i not in union.sides and e not in es:
            ed.add(e)
    g_d = SimpleGraph(n, tuple(sorted(ed)))
    g_s = SimpleGraph(n, tuple(sorted(es)))
    rank_d = sum(1 for k in union.sides.values() if k == D_SIDE)
    rank_s = sum(1 for k in union.sides.values() if k == S_SIDE)
    return DecompositionWitness(Decomposition(g_d, g_s), rank_d, rank_s)


def find_rigid_decomposition(
    m: UndirectedMultigraph, d: int, trials: int = 5, seed=None
) -> DecompositionWitness | FlexibleCertificate:
    """Decomposition with a distance-rigid part and a connected part, if any."""
    elements = m.elements()
    allowed = [frozenset({D_SIDE, S_SIDE})] * len(elements)
    union = _union(m.n, elements, allowed, d, trials, seed)
    w = _witness(m.n, union, double=m.double_edges)
    bound = s_p(m.n, d)
    if union.rank == bound:
        return w
    return FlexibleCertificate(union.rank, bound, w)


def gnss_union(gg: GnssGraph, d: int, trials: int = 5, seed=None) -> UnionResult:
    from .graphs import underlying_multigraph

    multi = underlying_multigraph(gg.gamma)
    elements = multi.elements()
    allowed = [frozenset({D_SIDE, S_SIDE})] * len(elements)
    elements += list(gg.g_d.edges) + list(gg.g_s.edges)
    allowed += [frozenset({D_SIDE})] * gg.g_d.m + [frozenset({S_SIDE})] * gg.g_s.m
    return _union(gg.n, elements, allowed, d, trials, seed)


def find_gnss_decomposition(
    gg: GnssGraph, d: int, trials: int = 5, seed=None
) -> DecompositionWitness | FlexibleCertificate:
    """Split the pseudorange edges between the GNSS distance and
    synchronization graphs so that the first is distance rigid and the
    second connected, if possible."""
    from .graphs import underlying_multigraph

    union = gnss_union(gg, d, trials, seed)
    multi = underlying_multigraph(gg.gamma)
    w = _witness(gg.n, union, gg.g_d.edges, gg.g_s.edges, multi.double_edges)
    bound = s_p(gg.n, d)
    if union.rank == bound:
        return w
    return FlexibleCertificate(union.rank, bound, w)


def witness_ranks(w: DecompositionWitness, d: int, trials: int = 5, seed=None) -> tuple[int, int]:
    """Recompute ``(rank_d, rank_s)`` of a witness with fresh oracles."""
    g_d, g_s = w.decomposition.g_d, w.decomposition.g_s
    if d == 2:
        rd = laman_rank_2d(g_d)
    else:
        rd = randomized_distance_rank(g_d, d, trials, seed)
    return rd, graphic_rank(g_s)


__all__ = [
    "OracleInconsistencyError",
    "MatroidRankOracle",
    "GraphicOracle",
    "Laman2DOracle",
    "RandomizedDistanceOracle",
    "DecompositionWitness",
    "FlexibleCertificate",
    "UnionResult",
    "laman_rank_2d",
    "randomized_distance_rank",
    "graphic_rank",
    "distance_oracle",
    "matroid_union_rank",
    "union_rank_two",
    "find_rigid_decomposition",
    "find_gnss_decomposition",
    "gnss_union",
    "witness_ranks",
    "s_d",
]
