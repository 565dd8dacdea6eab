import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _helpers import double_banana, exhaustive_decomposition_rank, random_digraph, random_digraph_bounded
from pseudorange_rigidity.combinatorics import (
    DecompositionWitness,
    FlexibleCertificate,
    GraphicOracle,
    Laman2DOracle,
    MatroidRankOracle,
    OracleInconsistencyError,
    RandomizedDistanceOracle,
    distance_oracle,
    find_gnss_decomposition,
    find_rigid_decomposition,
    graphic_rank,
    laman_rank_2d,
    matroid_union_rank,
    randomized_distance_rank,
    union_rank_two,
    witness_ranks,
)
from pseudorange_rigidity.graphs import (
    DirectedPseudorangeGraph,
    GnssGraph,
    SimpleGraph,
    underlying_multigraph,
    validate_decomposition,
)
from pseudorange_rigidity.rigidity import generic_rank_numeric, s_p


def random_simple_graph(rng, n, p):
    return SimpleGraph(n, tuple(e for e in itertools.combinations(range(n), 2) if rng.random() < p))


class TestPebbleGame:
    @pytest.mark.parametrize(
        "edges, n, rank",
        [
            ([], 3, 0),
            ([(0, 1), (1, 2), (0, 2)], 3, 3),
            (list(itertools.combinations(range(4), 2)), 4, 5),
            (list(itertools.combinations(range(5), 2)), 5, 7),
            ([(0, 1), (1, 2), (2, 3), (3, 0)], 4, 4),
        ],
    )
    def test_known_ranks(self, edges, n, rank):
        assert laman_rank_2d(SimpleGraph(n, tuple(edges))) == rank

    def test_agrees_with_randomized_rank(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            g = random_simple_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.9)))
            assert laman_rank_2d(g) == randomized_distance_rank(g, 2, seed=1)

    def test_raw_edge_list(self):
        assert laman_rank_2d([(0, 1), (1, 2)]) == 2


class TestDistanceRank:
    def test_double_banana_is_flexible(self):
        g = double_banana()
        assert g.m == 3 * g.n - 6 == 18
        assert randomized_distance_rank(g, 3, seed=0) == 17

    def test_k5_in_3d(self):
        assert randomized_distance_rank(SimpleGraph.complete(5), 3, seed=0) == 9

    def test_small_complete_graphs(self):
        for n in range(2, 5):
            assert randomized_distance_rank(SimpleGraph.complete(n), 3, seed=n) == n * (n - 1) // 2

    def test_distance_oracle_kinds(self):
        assert isinstance(distance_oracle(3, [(0, 1)], 2), Laman2DOracle)
        assert isinstance(distance_oracle(3, [(0, 1)], 3, seed=0), RandomizedDistanceOracle)
        with pytest.raises(ValueError):
            distance_oracle(3, [(0, 1)], 1)


class TestGraphicOracle:
    @given(st.integers(0, 2**32 - 1))
    def test_rank_is_forest_size(self, seed):
        rng = np.random.default_rng(seed)
        g = random_simple_graph(rng, int(rng.integers(1, 9)), 0.4)
        from pseudorange_rigidity.graphs import connected_components

        assert graphic_rank(g) == g.n - len(connected_components(g))

    def test_fundamental_circuit(self):
        ground = [(0, 1), (1, 2), (2, 3), (0, 3), (3, 4)]
        o = GraphicOracle(5, ground)
        assert o.circuit(frozenset({0, 1, 2, 4}), 3) == {0, 1, 2}

    @given(st.integers(0, 2**32 - 1))
    def test_circuit_matches_generic_definition(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 7))
        ground = list(itertools.combinations(range(n), 2))
        o = GraphicOracle(n, ground)
        order = rng.permutation(len(ground))
        indep: frozenset = frozenset()
        for y in order:
            if o.is_independent(indep | {y}):
                indep = indep | {y}
            else:
                assert o.circuit(indep, y) == MatroidRankOracle.circuit(o, indep, y)

    @pytest.mark.parametrize("d", [2, 3])
    def test_randomized_circuit_matches_generic_definition(self, d):
        rng = np.random.default_rng(d)
        n = 7
        ground = list(itertools.combinations(range(n), 2))
        for trial in range(5):
            o = RandomizedDistanceOracle(n, ground, d, seed=trial)
            indep: frozenset = frozenset()
            for y in rng.permutation(len(ground)):
                if o.is_independent(indep | {y}):
                    indep = indep | {y}
                else:
                    assert o.circuit(indep, y) == MatroidRankOracle.circuit(o, indep, y)

    def test_rank_out_of_range_detected(self):
        class Liar(MatroidRankOracle):
            def _rank(self, edges):
                return len(edges) + 1

        with pytest.raises(OracleInconsistencyError):
            Liar(2, [(0, 1)]).rank([0])


def brute_union_rank(elements, r1, r2):
    best = 0
    m = len(elements)
    for mask in range(1 << m):
        a = [i for i in range(m) if mask >> i & 1]
        b = [i for i in range(m) if not mask >> i & 1]
        best = max(best, r1.rank(a) + r2.rank(b))
    return best


class TestMatroidUnion:
    @given(st.integers(0, 2**32 - 1))
    def test_union_against_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 6))
        pairs = list(itertools.combinations(range(n), 2))
        elements = [pairs[i] for i in rng.integers(len(pairs), size=int(rng.integers(1, 11)))]
        first = Laman2DOracle(n, elements)
        second = GraphicOracle(n, elements)
        assert union_rank_two(n, elements, first, second) == brute_union_rank(elements, first, second)

    def test_hyperbolic_certificate(self, graph_fixture):
        g = graph_fixture("fig2a.json").gamma
        res = find_rigid_decomposition(underlying_multigraph(g), 2, seed=0)
        assert isinstance(res, FlexibleCertificate)
        assert (res.rank, res.bound, res.deficit) == (4, 5, 1)

    def test_rigid_witness(self, graph_fixture):
        g = graph_fixture("fig2c.json").gamma
        w = find_rigid_decomposition(underlying_multigraph(g), 2, seed=0)
        assert isinstance(w, DecompositionWitness)
        assert (w.rank_d, w.rank_s) == (5, 3)
        assert validate_decomposition(underlying_multigraph(g), w.decomposition)

    @pytest.mark.parametrize("d, n_max", [(2, 7), (3, 6)])
    def test_three_way_agreement(self, d, n_max):
        rng = np.random.default_rng(100 + d)
        for k in range(25):
            g = random_digraph_bounded(rng, n_max, max_single=10)
            union = matroid_union_rank(underlying_multigraph(g), d, seed=k)
            assert union == exhaustive_decomposition_rank(g, d, seed=k)
            assert union == generic_rank_numeric(g, d, seed=k)

    @pytest.mark.parametrize("d", [2, 3])
    def test_witness_soundness(self, d):
        rng = np.random.default_rng(7 * d)
        for k in range(30):
            g = random_digraph(rng, int(rng.integers(3, 7)), 0.5)
            m = underlying_multigraph(g)
            res = find_rigid_decomposition(m, d, seed=k)
            w = res if isinstance(res, DecompositionWitness) else res.best
            assert validate_decomposition(m, w.decomposition)
            assert witness_ranks(w, d, seed=k + 1) == (w.rank_d, w.rank_s)
            assert res.rank == generic_rank_numeric(g, d, seed=k)
            assert isinstance(res, DecompositionWitness) == (res.rank == s_p(g.n, d))

    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
    def test_union_rank_bounded(self, seed, d):
        rng = np.random.default_rng(seed)
        g = random_digraph(rng, int(rng.integers(2, 7)), float(rng.uniform(0.1, 0.9)))
        r = matroid_union_rank(underlying_multigraph(g), d, seed=seed)
        assert r <= s_p(g.n, d) and r <= g.m

    def test_custom_oracle(self):
        g = DirectedPseudorangeGraph(3, ((0, 1), (1, 0), (0, 2), (1, 2)))
        m = underlying_multigraph(g)
        assert matroid_union_rank(m, 2, oracles=Laman2DOracle(3, m.elements())) == 4

    def test_empty(self):
        assert matroid_union_rank(underlying_multigraph(DirectedPseudorangeGraph(3)), 2, seed=0) == 0

    def test_restricted_sides_for_gnss(self):
        # distance edges may only serve the distance side
        gg = GnssGraph(DirectedPseudorangeGraph(3), SimpleGraph(3, ((0, 1), (0, 2), (1, 2))), SimpleGraph(3))
        res = find_gnss_decomposition(gg, 2, seed=0)
        assert res.rank == 3
        assert res.best.rank_s == 0
