import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudorange_rigidity.combinatorics import DecompositionWitness, FlexibleCertificate, graphic_rank
from pseudorange_rigidity.gnss import (
    InfeasibleCountsError,
    Receiver,
    Scenario,
    ScenarioError,
    asymptotic_savings,
    build_gnss_graph,
    dump_scenario,
    estimate,
    formation_graph,
    formation_savings,
    generate_random_scenario,
    is_solvable,
    load_scenario,
    measurement_function,
    measurement_jacobian,
    min_measurements,
    minimal_solvable_scenario,
    partition_parameters,
    position_errors,
    scenario_from_dict,
    scenario_to_dict,
    scene_scale,
    simulate_measurements,
)
from pseudorange_rigidity.combinatorics import randomized_distance_rank
from pseudorange_rigidity.rigidity import generic_rank_numeric, s_p


def drop_measurements(s: Scenario, keep_pr, keep_dist) -> Scenario:
    return Scenario(s.d, s.constellations, s.receivers,
                    tuple(s.pseudoranges[i] for i in keep_pr),
                    tuple(s.distances[i] for i in keep_dist))


class TestGraphConstruction:
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(2, 3), st.integers(0, 10**6))
    def test_arcs_point_from_satellites_to_receivers(self, R, C, d, seed):
        s = generate_random_scenario(R, C, d + 1, d, visibility=2, inter_receiver_edges=min(1, R - 1), seed=seed)
        gg = build_gnss_graph(s)
        n_sat = len(s.satellites)
        assert all(u < n_sat <= v for u, v in gg.gamma.arcs)
        assert all(u >= n_sat and v >= n_sat for u, v in gg.g_d.edges[: len(s.distances)])
        # satellite clique plus receiver ranges
        assert gg.g_d.m == len(s.distances) + n_sat * (n_sat - 1) // 2
        # one spanning path per constellation
        assert gg.g_s.m == n_sat - C
        assert graphic_rank(gg.g_s) == n_sat - C

    def test_fixture_sizes(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        assert (s.n_agents, s.n_measurements, len(s.constellations)) == (10, 9, 2)


class TestSolvability:
    def test_two_receivers_one_constellation_unsolvable(self, scenario_fixture):
        rep = is_solvable(scenario_fixture("fig1a_scenario.json"), seed=0)
        assert not rep.solvable and rep.numeric_rank <= 32 and rep.bound == 33
        assert isinstance(rep.decomposition, FlexibleCertificate)
        assert rep.agree and rep.deficit == 33 - rep.numeric_rank

    def test_two_receivers_two_constellations_solvable(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        rep = is_solvable(s, seed=0)
        assert rep.solvable and rep.numeric_rank == rep.bound == 33 and rep.agree
        w = rep.decomposition
        assert isinstance(w, DecompositionWitness)
        assert randomized_distance_rank(w.decomposition.g_d, 3, seed=1) == 3 * s.n_agents - 6
        assert graphic_rank(w.decomposition.g_s) == s.n_agents - 1

    def test_single_receiver_pvt(self, scenario_fixture):
        rep = is_solvable(scenario_fixture("pvt_scenario.json"), seed=0)
        assert rep.solvable and rep.bound == 13

    @pytest.mark.parametrize("seed", range(3))
    def test_bi_constellation_generator_shape(self, seed):
        s = generate_random_scenario(2, 2, 2, 3, visibility=2, inter_receiver_edges=1, seed=seed)
        assert is_solvable(s, seed=seed).solvable

    def test_few_satellites_skip_combinatorial(self):
        s = generate_random_scenario(1, 1, 1, 3, visibility=1, seed=0)
        with pytest.warns(RuntimeWarning, match="combinatorial test skipped"):
            rep = is_solvable(s, seed=0)
        assert rep.combinatorial_solvable is None and not rep.solvable and rep.agree

    def test_numeric_and_combinatorial_agree(self):
        rng = np.random.default_rng(5)
        for k in range(100):
            R, C, d = int(rng.integers(1, 3)), int(rng.integers(1, 3)), int(rng.integers(2, 4))
            sats = int(rng.integers(d, d + 2))
            vis = rng.integers(0, sats + 1, size=(R, C))
            s = generate_random_scenario(R, C, sats, d, vis, int(rng.integers(0, R)), seed=k)
            rep = is_solvable(s, seed=k)
            assert rep.agree, (k, rep)


class TestMinimumMeasurements:
    @pytest.mark.parametrize("R, C, d", [(1, 1, 3), (2, 3, 2), (3, 2, 3)])
    def test_counts(self, R, C, d):
        assert min_measurements(R, C, d) == R * (d + 1) + C - 1
        assert min_measurements(1, 1, 3) == 4

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            min_measurements(0, 1, 3)

    @pytest.mark.parametrize("use_distances", [False, True])
    @pytest.mark.parametrize("d", [2, 3])
    def test_constructed_minimal_scenario_is_solvable(self, d, use_distances):
        for R in range(1, 4):
            for C in range(1, 4):
                s = minimal_solvable_scenario(R, C, d, seed=R * 10 + C, use_distances=use_distances)
                assert s.n_measurements == min_measurements(R, C, d)
                assert is_solvable(s, seed=0).solvable

    def test_removing_a_measurement_breaks_solvability(self):
        rng = np.random.default_rng(3)
        for k in range(30):
            R, C, d = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(2, 4))
            s = minimal_solvable_scenario(R, C, d, seed=k, use_distances=bool(k % 2))
            drop = int(rng.integers(len(s.pseudoranges)))
            smaller = drop_measurements(s, [i for i in range(len(s.pseudoranges)) if i != drop],
                                        range(len(s.distances)))
            assert not is_solvable(smaller, seed=k).solvable


class TestSimulation:
    def test_noiseless_values(self, scenario_fixture):
        s = scenario_fixture("pvt_scenario.json")
        y = simulate_measurements(s)
        idx, c = s.index(), s.config()
        for k, (a, r) in enumerate(s.pseudoranges):
            u, v = idx[a], idx[r]
            assert y[k] == pytest.approx(np.linalg.norm(c.positions[u] - c.positions[v]) + c.biases[v] - c.biases[u])

    def test_noise_is_seeded(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        a = simulate_measurements(s, seed=1, sigma=0.01)
        assert np.array_equal(a, simulate_measurements(s, seed=1, sigma=0.01))
        assert not np.array_equal(a, simulate_measurements(s))

    def test_distance_rows_last(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        y = simulate_measurements(s)
        r1, r2 = (np.asarray(r.position) for r in s.receivers)
        assert y[-1] == pytest.approx(np.linalg.norm(r1 - r2))


class TestPartition:
    def test_single_receiver(self, scenario_fixture):
        p = partition_parameters(scenario_fixture("pvt_scenario.json"))
        assert p.unknown.size == 4
        assert p.unknown_labels[-1] == "r1.bias"

    def test_zero_receivers(self):
        s = generate_random_scenario(0, 1, 4, 3, seed=0)
        assert partition_parameters(s).unknown.size == 0

    def test_multi_constellation_layout(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        p = partition_parameters(s)
        assert p.unknown.size == 2 * 3 + 2 + 1
        assert p.unknown_labels[-1] == "E.bias"
        assert p.unknown[-1] == pytest.approx(s.constellations[1].bias - s.constellations[0].bias)

    def test_model_reproduces_simulation(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        assert np.allclose(measurement_function(s, partition_parameters(s).unknown), simulate_measurements(s))


class TestJacobian:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_central_differences(self, seed):
        s = generate_random_scenario(2, 2, 4, 3, visibility=3, inter_receiver_edges=1, seed=seed)
        p = partition_parameters(s).unknown + 0.05 * np.random.default_rng(seed).standard_normal(9)
        J = measurement_jacobian(s, p)
        h = 1e-6
        for k in range(p.size):
            e = np.zeros_like(p)
            e[k] = h
            fd = (measurement_function(s, p + e) - measurement_function(s, p - e)) / (2 * h)
            assert np.all(np.abs(J[:, k] - fd) <= 1e-6 * np.maximum(1.0, np.abs(J[:, k])))


def convergence_count(s, runs=100, perturb=0.1):
    y = simulate_measurements(s)
    good = silent = 0
    max_iter = 0
    for k in range(runs):
        r = estimate(s, y, init=perturb, seed=k)
        err = position_errors(s, r).max()
        ok = r.converged and err < 1e-6 and r.residual_norm < 1e-10
        good += ok
        max_iter = max(max_iter, r.iterations if ok else 0)
        # a wrong answer must never be reported as a clean success
        silent += r.converged and err >= 1e-6 and not r.diagnostic
    return good, silent, max_iter


class TestEstimator:
    def test_exact_start_is_fixed_point(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        r = estimate(s, simulate_measurements(s), init=0.0)
        assert r.converged and r.iterations == 1 and r.residual_norm < 1e-12

    def test_fixture_recovers_truth(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        good, silent, max_iter = convergence_count(s, runs=30)
        assert good >= 28 and max_iter <= 50 and silent == 0

    def test_redundant_scenarios_recover_truth(self):
        for seed in range(4):
            s = generate_random_scenario(2, 2, 4, 3, visibility=3, inter_receiver_edges=1, seed=seed)
            good, silent, _ = convergence_count(s)
            assert good >= 95 and silent == 0

    def test_minimal_scenarios_flag_failures(self):
        for seed in range(6):
            s = generate_random_scenario(2, 2, 2, 3, visibility=2, inter_receiver_edges=1, seed=seed)
            _, silent, _ = convergence_count(s, runs=40)
            assert silent == 0

    def test_exactly_determined_result_is_annotated(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        r = estimate(s, simulate_measurements(s), init=0.0)
        assert "exactly determined" in r.diagnostic

    def test_unsolvable_reports_rank_deficiency(self, scenario_fixture):
        s = scenario_fixture("fig1a_scenario.json")
        r = estimate(s, simulate_measurements(s), init=0.1, seed=0)
        assert not r.converged and r.rank_deficient
        assert r.jacobian_rank < r.n_unknowns and "rank-deficient" in r.diagnostic

    def test_noise_gives_small_error(self):
        s = generate_random_scenario(2, 2, 6, 3, visibility=5, inter_receiver_edges=1, seed=1)
        y = simulate_measurements(s, seed=0, sigma=1e-4)
        r = estimate(s, y, init=0.05, seed=0)
        assert position_errors(s, r).max() < 1e-2
        assert np.isfinite(r.residual_norm)

    def test_singular_start_is_reported_not_raised(self, scenario_fixture):
        s = scenario_fixture("pvt_scenario.json")
        p0 = partition_parameters(s).unknown.copy()
        p0[:3] = s.satellites[0].position
        r = estimate(s, simulate_measurements(s), init=p0)
        assert not r.converged and r.diagnostic

    def test_explicit_guess_shape_checked(self, scenario_fixture):
        s = scenario_fixture("pvt_scenario.json")
        with pytest.raises(ValueError):
            estimate(s, simulate_measurements(s), init=np.zeros(3))
        with pytest.raises(ValueError):
            estimate(s, np.zeros(2))

    def test_scene_scale(self, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        r1, r2 = (np.asarray(r.position) for r in s.receivers)
        assert scene_scale(s) == pytest.approx(np.linalg.norm(r1 - r2))
        pvt = scenario_fixture("pvt_scenario.json")
        dists = [np.linalg.norm(np.asarray(x.position) - pvt.receivers[0].position) for x in pvt.satellites]
        assert scene_scale(pvt) == pytest.approx(min(dists))


class TestGeneration:
    def test_deterministic(self):
        a = scenario_to_dict(generate_random_scenario(2, 2, 3, 3, 2, 1, seed=7))
        b = scenario_to_dict(generate_random_scenario(2, 2, 3, 3, 2, 1, seed=7))
        assert a == b

    def test_geometry(self):
        s = generate_random_scenario(3, 2, 5, 3, 2, 2, seed=1)
        for x in s.satellites:
            assert np.linalg.norm(x.position) == pytest.approx(10.0)
        for r in s.receivers:
            assert np.all((0 <= r.position) & (r.position <= 1)) and -1 <= r.bias <= 1
        assert len(s.pseudoranges) == 3 * 2 * 2 and len(s.distances) == 2

    @pytest.mark.parametrize(
        "kwargs",
        [dict(visibility=5), dict(inter_receiver_edges=2), dict(visibility=[[1, 1]])],
    )
    def test_infeasible(self, kwargs):
        with pytest.raises(InfeasibleCountsError):
            generate_random_scenario(2, 1, 4, 3, seed=0, **kwargs)


class TestScenarioJson:
    def test_round_trip(self, tmp_path, scenario_fixture):
        s = scenario_fixture("fig1b_scenario.json")
        dump_scenario(s, tmp_path / "s.json")
        again = load_scenario(tmp_path / "s.json")
        assert scenario_to_dict(again) == scenario_to_dict(s)

    @given(st.integers(0, 10**6))
    def test_round_trip_random(self, seed):
        s = generate_random_scenario(2, 2, 3, 3, 2, 1, seed=seed, noise_sigma=0.5)
        doc = json.loads(json.dumps(scenario_to_dict(s)))
        assert scenario_to_dict(scenario_from_dict(doc)) == scenario_to_dict(s)

    @pytest.mark.parametrize(
        "mutate, match",
        [
            (lambda d: d.update(schema=2), "schema"),
            (lambda d: d.update(dimension=1), "dimension"),
            (lambda d: d["receivers"][0].update(position=[0, 0]), r"receivers\[0\]\.position"),
            (lambda d: d["constellations"][1]["satellites"][0].pop("id"), r"constellations\[1\]\.satellites\[0\]\.id"),
            (lambda d: d.update(pseudoranges=[["r1", "G1"]]), r"pseudoranges\[0\]"),
            (lambda d: d.update(distances=[["r1", "G1"]]), r"distances\[0\]"),
            (lambda d: d.update(noise_sigma=-1.0), "noise_sigma"),
            (lambda d: d["receivers"].append(dict(d["receivers"][0])), "duplicate"),
        ],
    )
    def test_diagnostics(self, scenario_fixture, mutate, match):
        doc = scenario_to_dict(scenario_fixture("fig1b_scenario.json"))
        mutate(doc)
        with pytest.raises(ScenarioError, match=match):
            scenario_from_dict(doc)

    def test_receiver_ids_unique_against_satellites(self, scenario_fixture):
        s = scenario_fixture("pvt_scenario.json")
        with pytest.raises(ScenarioError):
            Scenario(3, s.constellations, (Receiver("G1", np.zeros(3), 0.0),))


class TestFormation:
    @pytest.mark.parametrize(
        "n, d, two_way, pr",
        [(10, 2, 34, 26), (10, 3, 48, 33), (3, 2, 6, 5), (4, 3, 12, 9)],
    )
    def test_hand_values(self, n, d, two_way, pr):
        row = formation_savings(n, d)
        assert (row["two_way"], row["pseudorange"], row["saved"]) == (two_way, pr, two_way - pr)
        assert row["ratio"] == pytest.approx((two_way - pr) / two_way)

    def test_asymptote(self):
        assert asymptotic_savings(2) == pytest.approx(0.25)
        assert asymptotic_savings(3) == pytest.approx(1 / 3)
        for d in (2, 3):
            ratios = [formation_savings(n, d)["ratio"] for n in (10, 100, 1000)]
            assert ratios == sorted(ratios) and ratios[-1] < asymptotic_savings(d)
            assert asymptotic_savings(d) - ratios[1] < 0.02

    def test_too_few_agents(self):
        with pytest.raises(ValueError):
            formation_savings(3, 3)

    @pytest.mark.parametrize("d", [2, 3])
    def test_formation_graph_is_rigid(self, d):
        for n in range(d + 1, 9):
            g = formation_graph(n, d)
            # mutual arcs among the leaders, d + 1 followed arcs per later agent
            assert g.m == d * (d + 1) + (n - d - 1) * (d + 1)
            assert generic_rank_numeric(g, d, seed=n) == s_p(n, d)

    def test_fixture_matches_builder(self, graph_fixture):
        assert graph_fixture("fig7_formation.json").gamma == formation_graph(6, 2)
