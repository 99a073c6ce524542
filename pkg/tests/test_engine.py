"""Expectations, light-cone decomposition and the parameter optimizers."""

import numpy as np
import pytest

from quchain import (
    QaoaParams,
    WeightGraph,
    build_qaoa_circuit,
    decompose,
    energy_table,
    expectation_decomposed,
    expectation_full,
    interp_initialize,
    optimize,
    simulate,
)

from conftest import (
    graph_energy_min_max,
    random_graph,
    random_qaoa_params,
)


def edge_expectation_oracle(gamma, beta, j):
    """Analytic p=1 single-edge <ZZ>, derived independently of the simulator:
    conjugating ZZ by the mixer leaves cross terms Z(x)Y whose RZZ rotation
    contributes sin(2*gamma*J), weighted by 2 sin(2b)cos(2b) = sin(4b)."""
    return np.sin(4.0 * beta) * np.sin(2.0 * gamma * j)


class TestEnergyOfBitstring:
    def test_k2_aligned(self, k2_graph):
        assert k2_graph.energy([1, 1]) == 1.0

    def test_k2_anti_aligned(self, k2_graph):
        assert k2_graph.energy([1, -1]) == -1.0

    def test_demo6_partition_energy(self, demo6_graph):
        spins = [1, -1, 1, 1, -1, 1]  # partition {1,4}
        assert demo6_graph.energy(spins) == pytest.approx(-2.5)
        assert demo6_graph.energy(spins) + demo6_graph.offset == pytest.approx(-6.0)

    def test_length_mismatch(self, demo6_graph):
        with pytest.raises(ValueError):
            demo6_graph.energy([1, -1])


class TestExpectationFull:
    def test_zero_angles_give_zero(self, demo6_graph):
        e = expectation_full(demo6_graph, QaoaParams(gamma=(0.0,), beta=(0.0,)))
        assert e == pytest.approx(0.0, abs=1e-12)

    def test_single_edge_matches_analytic(self, k2_graph):
        for gamma, beta in [(np.pi / 8, np.pi / 8), (0.3, 0.2), (1.1, 0.7), (2.0, 1.2)]:
            e = expectation_full(k2_graph, QaoaParams(gamma=(gamma,), beta=(beta,)))
            assert e == pytest.approx(edge_expectation_oracle(gamma, beta, 1.0), abs=1e-12)

    def test_weighted_edge_matches_analytic(self):
        g = WeightGraph(nodes=[(0, 0.0), (1, 0.0)], edges=[(0, 1, 0.5)])
        e = expectation_full(g, QaoaParams(gamma=(0.9,), beta=(0.4,)))
        assert e == pytest.approx(0.5 * edge_expectation_oracle(0.9, 0.4, 0.5), abs=1e-12)

    def test_beta_zero_uniform_magnitudes(self, demo6_graph):
        e = expectation_full(demo6_graph, QaoaParams(gamma=(0.8,), beta=(0.0,)))
        assert e == pytest.approx(0.0, abs=1e-12)

    def test_bounds_by_brute_force(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            g = random_graph(rng, 2, 6)
            lo, hi = graph_energy_min_max(g)
            params = random_qaoa_params(rng, int(rng.integers(1, 3)))
            e = expectation_full(g, params)
            assert lo - 1e-9 <= e <= hi + 1e-9

    def test_cost_layer_commutation(self):
        # permuting RZZ/RZ gates inside one cost layer leaves the state unchanged
        rng = np.random.default_rng(5)
        g = random_graph(rng, 4, 6)
        params = random_qaoa_params(rng, 1)
        circ = build_qaoa_circuit(g, params)
        ref = simulate(circ)
        diag = [gt for gt in circ.gates if gt.kind in ("rzz", "rz")]
        others = [gt for gt in circ.gates if gt.kind not in ("rzz", "rz")]
        n_h = g.n  # H block first, then shuffled diagonal block, then mixers

        shuffled = list(diag)
        rng.shuffle(shuffled)
        resim = simulate(
            type(circ)(n=g.n, gates=others[:n_h] + shuffled + others[n_h:])
        )
        assert np.max(np.abs(ref - resim)) < 1e-9


class TestDecomposition:
    def test_path_one_hop_closure(self):
        g = WeightGraph(nodes=[(0, 0.0), (1, 0.0), (2, 0.0)], edges=[(0, 1, 1.0), (1, 2, 1.0)])
        subs = decompose(g, 1)
        first = next(s for s in subs if s.support == (0, 1))
        assert first.index_map == (0, 1, 2)
        assert first.subgraph.n == 3

    def test_edgeless_graph_single_vertex_terms(self):
        g = WeightGraph(nodes=[(0, 1.0), (1, 0.0), (2, -0.5)], edges=[])
        subs = decompose(g, 1)
        assert len(subs) == 2  # only nonzero-weight nodes
        assert all(s.subgraph.n == 1 for s in subs)

    def test_ring_of_six(self):
        edges = [(i, (i + 1) % 6, 1.0) for i in range(6)]
        g = WeightGraph(nodes=[(i, 0.0) for i in range(6)], edges=edges)
        subs = decompose(g, 1)
        assert len(subs) == 6
        for s in subs:
            assert s.subgraph.n == 4  # 1-hop closure of an edge on a ring is a 4-path
            assert len(s.subgraph.edges) == 3

    def test_subproblem_count(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            g = random_graph(rng, 2, 8)
            subs = decompose(g, 1)
            biased = sum(1 for _, w in g.nodes if w != 0.0)
            assert len(subs) == biased + len(g.edges)
            # every Hamiltonian term covered exactly once
            seen = {(s.kind, s.support) for s in subs}
            assert len(seen) == len(subs)

    def test_matches_full_expectation(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            g = random_graph(rng, 2, 8)
            p = int(rng.integers(1, 3))
            params = random_qaoa_params(rng, p)
            full = expectation_full(g, params)
            split = expectation_decomposed(g, params)
            assert split == pytest.approx(full, abs=1e-9)

    def test_k2_single_subproblem(self, k2_graph):
        subs = decompose(k2_graph, 1)
        assert len(subs) == 1
        assert subs[0].subgraph.n == 2

    def test_disconnected_union_is_additive(self):
        ga = WeightGraph(nodes=[(0, 0.3), (1, 0.0)], edges=[(0, 1, 0.8)])
        gb = WeightGraph(nodes=[(0, 0.0), (1, -0.4)], edges=[(0, 1, -0.6)])
        union = WeightGraph(
            nodes=[(0, 0.3), (1, 0.0), (2, 0.0), (3, -0.4)],
            edges=[(0, 1, 0.8), (2, 3, -0.6)],
        )
        params = QaoaParams(gamma=(0.7,), beta=(0.3,))
        assert expectation_decomposed(union, params) == pytest.approx(
            expectation_full(ga, params) + expectation_full(gb, params), abs=1e-12
        )

    def test_parallel_reduction_is_bitwise_deterministic(self, demo6_graph):
        params = QaoaParams(gamma=(0.4, 0.8), beta=(0.3, 0.1))
        serial = expectation_decomposed(demo6_graph, params, workers=1)
        threaded = expectation_decomposed(demo6_graph, params, workers=4)
        assert serial == threaded  # exact equality, not approx

    def test_oversized_light_cone_names_the_term(self):
        from quchain import CapacityError

        star = WeightGraph(
            nodes=[(i, 0.0) for i in range(30)],
            edges=[(0, i, 1.0) for i in range(1, 30)],
        )
        params = QaoaParams(gamma=(0.2,), beta=(0.1,))
        with pytest.raises(CapacityError) as err:
            expectation_decomposed(star, params)
        assert "(0, 1)" in str(err.value)


class TestEnergyTable:
    def test_table_matches_energy(self, demo6_graph):
        table = energy_table(demo6_graph)
        for z in range(1 << demo6_graph.n):
            spins = [1 - 2 * ((z >> i) & 1) for i in range(demo6_graph.n)]
            assert table[z] == pytest.approx(demo6_graph.energy(spins), abs=1e-12)


class TestInterp:
    def test_depth_one_to_two(self):
        params = QaoaParams(gamma=(0.7,), beta=(0.2,))
        out = interp_initialize(params)
        assert out.gamma == pytest.approx((0.7, 0.7))
        assert out.beta == pytest.approx((0.2, 0.2))

    def test_zero_params(self):
        out = interp_initialize(QaoaParams(gamma=(0.0, 0.0), beta=(0.0, 0.0)))
        assert out.gamma == (0.0, 0.0, 0.0)

    def test_depth_two_to_three(self):
        out = interp_initialize(QaoaParams(gamma=(0.4, 0.9), beta=(0.1, 0.3)))
        assert out.gamma == pytest.approx((0.4, 0.65, 0.9))
        assert out.beta == pytest.approx((0.1, 0.2, 0.3))


class TestOptimize:
    def test_grid_reaches_analytic_minimum(self):
        g = WeightGraph(nodes=[(0, 0.0), (1, 0.0)], edges=[(0, 1, 0.5)])
        res = optimize(g, p=1, method="grid", seed=1)
        assert res.energy == pytest.approx(-0.5, abs=0.02)

    def test_simplex_refines_to_tolerance(self):
        g = WeightGraph(nodes=[(0, 0.0), (1, 0.0)], edges=[(0, 1, 0.5)])
        res = optimize(g, p=1, method="grid+simplex", seed=1)
        assert res.energy == pytest.approx(-0.5, abs=1e-4)
        assert res.converged

    def test_zero_graph_returns_init(self):
        g = WeightGraph(nodes=[(0, 0.0), (1, 0.0)], edges=[(0, 1, 0.0)])
        init = QaoaParams(gamma=(0.4,), beta=(0.2,))
        res = optimize(g, p=1, method="simplex", init=init)
        assert res.energy == 0.0
        assert res.params.gamma == pytest.approx(init.gamma, abs=1e-9)
        assert res.params.beta == pytest.approx(init.beta, abs=1e-9)

    def test_deterministic_under_seed(self, k2_graph):
        a = optimize(k2_graph, p=1, method="grid+simplex", seed=5)
        b = optimize(k2_graph, p=1, method="grid+simplex", seed=5)
        assert a.params == b.params and a.energy == b.energy

    def test_budget_exhaustion_flags_nonconverged(self, k2_graph):
        res = optimize(k2_graph, p=1, method="grid+simplex", max_evals=50)
        assert not res.converged
        assert res.evaluations <= 50
        assert np.isfinite(res.energy)

    def test_interp_chain_improves_depth_two(self, demo6_graph):
        res1 = optimize(demo6_graph, p=1, method="grid+simplex", seed=1, grid_size=16)
        res2 = optimize(
            demo6_graph, p=2, method="grid+simplex", init="interp", seed=1, grid_size=16
        )
        assert res2.params.p == 2
        assert res2.energy <= res1.energy + 1e-9

    def test_trace_rows_shape(self, k2_graph):
        res = optimize(k2_graph, p=1, method="grid", grid_size=8)
        rows = res.trace_rows()
        assert len(rows) == 64
        assert all(len(r) == 4 for r in rows)  # index, gamma, beta, energy
        assert rows[0][0] == 0
