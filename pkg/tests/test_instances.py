import numpy as np
import pytest

from spinbench.instances import (
    Graph,
    InfeasibleGraphError,
    InstanceFormatError,
    InstanceMetadata,
    cut_value,
    gen_heavy_hex,
    gen_hoso_instance,
    gen_planar_spin_glass,
    gen_random_regular,
    length2_path_triples,
    load_instance,
    maxcut_name,
    maxcut_opt_energy,
    maxcut_to_ising,
    parse_maxcut_name,
    save_instance,
)
from spinbench.model import energies, energy
from spinbench.solvers import exact_ground

from oracles import all_configs, random_config


class TestRandomRegular:
    def test_k4_is_unique_cubic_graph(self):
        for seed in (0, 1, 99):
            g = gen_random_regular(4, 3, seed)
            assert g.num_edges == 6
            assert {(u, v) for u, v, _ in g.edges} == {
                (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
            }

    def test_edge_count_and_degrees(self):
        g = gen_random_regular(28, 3, 102)
        assert g.num_edges == 42
        assert (g.degrees() == 3).all()

    def test_odd_product_infeasible(self):
        with pytest.raises(InfeasibleGraphError):
            gen_random_regular(5, 3, 0)

    def test_degree_too_large(self):
        with pytest.raises(InfeasibleGraphError):
            gen_random_regular(4, 4, 0)

    def test_deterministic_per_seed(self):
        assert gen_random_regular(30, 3, 5) == gen_random_regular(30, 3, 5)
        assert gen_random_regular(30, 3, 5) != gen_random_regular(30, 3, 6)

    def test_degree_sequence_property(self):
        for seed in range(5):
            for n, d in ((12, 3), (10, 4), (16, 2)):
                g = gen_random_regular(n, d, seed)
                assert g.num_edges == n * d // 2
                assert (g.degrees() == d).all()


class TestGraphValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph.build(3, [(0, 0)])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph.build(3, [(0, 1), (1, 0)])

    def test_out_of_range_rejected(self):
        with pytest.raises(IndexError):
            Graph.build(2, [(0, 2)])


class TestMaxcutMapping:
    def test_single_edge(self):
        g = Graph.build(2, [(0, 1)])
        p = maxcut_to_ising(g)
        assert energy(p, [1, -1]) == -1.0
        assert cut_value(g, [1, -1]) == 1.0
        assert cut_value(g, [1, 1]) == 0.0
        res = exact_ground(p)
        assert res.ground_energy == -1.0

    def test_frustrated_triangle(self):
        g = Graph.build(3, [(0, 1), (1, 2), (0, 2)])
        p = maxcut_to_ising(g)
        res = exact_ground(p)
        assert res.ground_energy == -1.0
        assert res.ground_count == 6
        assert cut_value(g, res.witness) == 2.0

    def test_cut_energy_identity(self):
        # 2*cut + sum_edges w*s_i*s_j == W, exactly, for random graphs/configs
        rng = np.random.default_rng(3)
        for seed in range(5):
            g = gen_random_regular(12, 3, seed)
            p = maxcut_to_ising(g)
            for _ in range(10):
                s = random_config(rng, 12)
                same = sum(w * int(s[u]) * int(s[v]) for u, v, w in g.edges)
                assert 2 * cut_value(g, s) + same == g.total_weight
                assert energy(p, s) == same

    def test_minimizing_energy_maximizes_cut(self):
        g = gen_random_regular(10, 3, 4)
        p = maxcut_to_ising(g)
        S = all_configs(10)
        es = energies(p, S)
        cuts = np.array([cut_value(g, S[r]) for r in range(S.shape[0])])
        assert cuts[np.argmin(es)] == cuts.max()
        assert maxcut_opt_energy(g, cuts.max()) == es.min()


class TestNames:
    def test_roundtrip(self):
        assert parse_maxcut_name(maxcut_name(28, 3, 102)) == (28, 3, 102)

    def test_reject_garbage(self):
        with pytest.raises(ValueError):
            parse_maxcut_name("totally-not-a-name")


class TestHeavyHex:
    def test_eagle127(self):
        t = gen_heavy_hex("eagle127")
        assert t.graph.num_nodes == 127
        assert int(t.graph.degrees().max()) == 3

    def test_heron133(self):
        t = gen_heavy_hex("heron133")
        assert t.graph.num_nodes == 133
        assert int(t.graph.degrees().max()) == 3

    def test_generated(self):
        t = gen_heavy_hex((3, 7))
        assert int(t.graph.degrees().max()) <= 3
        assert t.spec == "generated(3,7)"
        t2 = gen_heavy_hex("3x7")
        assert t2.graph == t.graph

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            gen_heavy_hex("porcupine9000")


def _path_topology(n):
    from spinbench.instances import HeavyHexTopology

    return HeavyHexTopology(
        graph=Graph.build(n, [(i, i + 1) for i in range(n - 1)]), spec="imported"
    )


class TestHosoInstances:
    def test_three_node_path_term_counts(self):
        problem, meta = gen_hoso_instance(_path_topology(3), seed=0)
        assert len(problem.linear) == 3
        assert len(problem.quadratic) == 2
        assert len(problem.cubic) == 1
        assert meta.family == "hoso"

    def test_coefficients_are_unit(self):
        t = gen_heavy_hex("eagle127")
        problem, _ = gen_hoso_instance(t, seed=1)
        coeffs = (
            list(problem.linear.values())
            + list(problem.quadratic.values())
            + list(problem.cubic.values())
        )
        assert set(coeffs) <= {-1.0, 1.0}

    def test_energies_share_even_parity(self):
        # unit coefficients make every energy an integer; flips change it by
        # even amounts, and on the 127-node lattice the level parity is even,
        # matching reference optima like -200 and -198
        t = gen_heavy_hex("eagle127")
        problem, _ = gen_hoso_instance(t, seed=2)
        rng = np.random.default_rng(0)
        es = energies(problem, np.stack([random_config(rng, 127) for _ in range(32)]))
        assert np.allclose(es, np.round(es))
        assert set(int(e) % 2 for e in es) == {0}

    def test_triples_are_connected_paths(self):
        t = gen_heavy_hex("eagle127")
        adj = {i: set(a) for i, a in enumerate(t.graph.adjacency())}
        for (a, b, c) in length2_path_triples(t.graph):
            links = int(b in adj[a]) + int(c in adj[a]) + int(c in adj[b])
            assert links >= 2  # induced subgraph on the triple is connected

    def test_deterministic_per_seed(self):
        t = _path_topology(6)
        p1, _ = gen_hoso_instance(t, seed=9)
        p2, _ = gen_hoso_instance(t, seed=9)
        p3, _ = gen_hoso_instance(t, seed=10)
        assert p1 == p2
        assert p1 != p3


class TestPlanarSpinGlass:
    def test_coupling_range_and_size(self):
        t = gen_heavy_hex("heron133")
        p = gen_planar_spin_glass(t, seed=0)
        assert p.num_spins == 133
        assert not p.linear and not p.cubic
        assert all(abs(c) <= 1.0 for c in p.quadratic.values())

    def test_coupling_mean_statistics(self):
        # ~10^4 coupling draws across seeds: mean within 3 sigma of zero
        t = gen_heavy_hex("heron133")
        draws = []
        for seed in range(67):
            draws.extend(gen_planar_spin_glass(t, seed).quadratic.values())
        draws = np.array(draws)
        assert draws.size >= 10_000
        sigma_mean = np.sqrt((1.0 / 3.0) / draws.size)
        assert abs(draws.mean()) < 3 * sigma_mean

    def test_deterministic(self):
        t = gen_heavy_hex("heron133")
        assert gen_planar_spin_glass(t, 3) == gen_planar_spin_glass(t, 3)


class TestSerialization:
    def test_roundtrip_hoso(self, tmp_path):
        problem, meta = gen_hoso_instance(_path_topology(5), seed=4)
        path = tmp_path / "inst.json"
        save_instance(path, problem, meta)
        p2, m2 = load_instance(path)
        assert p2 == problem
        assert m2.name == meta.name
        assert m2.family == meta.family
        assert m2.opt_value == meta.opt_value
        assert m2.source == meta.source
        assert m2.provenance["seed"] == 4

    def test_roundtrip_maxcut(self, tmp_path):
        g = gen_random_regular(12, 3, 7)
        meta = InstanceMetadata(
            name=maxcut_name(12, 3, 7), family="maxcut", graph=g,
            provenance={"generator": "gen_random_regular", "seed": 7},
        )
        problem = maxcut_to_ising(g)
        path = tmp_path / "mc.json"
        save_instance(path, problem, meta)
        p2, m2 = load_instance(path)
        assert p2 == problem
        assert m2.graph == g
        assert m2.opt_value is None  # stays null until solved

    def test_roundtrip_planar(self, tmp_path):
        t = gen_heavy_hex((2, 5))
        p = gen_planar_spin_glass(t, seed=1)
        meta = InstanceMetadata(name="sg", family="planar_sg",
                                provenance={"generator": "gen_planar_spin_glass", "seed": 1})
        path = tmp_path / "sg.json"
        save_instance(path, p, meta)
        p2, _ = load_instance(path)
        assert p2 == p

    def test_duplicate_pair_key_rejected(self, tmp_path):
        path = tmp_path / "dup.json"
        path.write_text(
            '{"format_version": 1, "name": "x", "family": "hoso", "num_spins": 3,'
            ' "offset": 0.0, "opt_value": null, "provenance": {},'
            ' "linear": [], "quadratic": [[0, 1, 1.0], [1, 0, 2.0]], "cubic": []}'
        )
        with pytest.raises(InstanceFormatError, match="duplicate"):
            load_instance(path)

    def test_out_of_range_index_rejected(self, tmp_path):
        path = tmp_path / "oob.json"
        path.write_text(
            '{"format_version": 1, "name": "x", "family": "hoso", "num_spins": 2,'
            ' "offset": 0.0, "opt_value": null, "provenance": {},'
            ' "linear": [[5, 1.0]], "quadratic": [], "cubic": []}'
        )
        with pytest.raises(InstanceFormatError):
            load_instance(path)

    def test_missing_field_diagnostic(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text('{"format_version": 1, "name": "x"}')
        with pytest.raises(InstanceFormatError, match="family"):
            load_instance(path)

    def test_name_graph_consistency_checked(self, tmp_path):
        g = gen_random_regular(12, 3, 7)
        meta = InstanceMetadata(name=maxcut_name(14, 3, 7), family="maxcut", graph=g)
        path = tmp_path / "bad.json"
        save_instance(path, maxcut_to_ising(g), meta)
        with pytest.raises(InstanceFormatError, match="claims"):
            load_instance(path)

    def test_invalid_json_diagnostic(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(InstanceFormatError, match="line"):
            load_instance(path)
