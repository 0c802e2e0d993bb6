import math
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import complete, complete_bipartite, cycle, from_nx, path
from rainbowturan.errors import PreconditionViolated, ThresholdUnreachable, ViolationFound
from rainbowturan.expander import (
    CONDUCTANCE,
    EXACT,
    HEURISTIC,
    ExpanderParams,
    almost_regular_expander,
    edge_expansion_check,
    extract_d_minimal,
    extract_expander,
    is_d_minimal_exact,
    min_degree_core,
    min_degree_of_minimal,
    regularize_bipartite,
    verify_expander,
)
from rainbowturan.generators import hypercube_coloured, random_graph
from rainbowturan.graph import Graph, average_degree, cut_and_density, try_bipartition


def disjoint_union(a: Graph, b: Graph, extra=()) -> Graph:
    edges = list(a.edges) + [(u + a.n, v + a.n) for u, v in b.edges] + list(extra)
    return Graph(a.n + b.n, edges)


def labels(h: Graph) -> list[int]:
    return sorted(h.label(v) for v in range(h.n))


class TestDMinimal:
    def test_k4(self):
        h = extract_d_minimal(complete(4), 3)
        assert h == complete(4)

    def test_path_plus_k4(self):
        g = disjoint_union(path(4), complete(4))
        h = extract_d_minimal(g, 3)
        assert labels(h) == [4, 5, 6, 7] and h.m == 6

    def test_c4(self):
        assert extract_d_minimal(cycle(4), 2) == cycle(4)

    def test_unreachable(self):
        with pytest.raises(ThresholdUnreachable):
            extract_d_minimal(cycle(5), 3)

    def test_min_degree_filter(self):
        assert min_degree_of_minimal(complete(4), 3)
        assert min_degree_of_minimal(cycle(4), 2)
        assert min_degree_of_minimal(from_nx(nx.star_graph(3)), Fraction(3, 2))

    @given(st.integers(3, 14), st.floats(0.2, 0.9), st.integers(0, 2 ** 20))
    def test_output_is_minimal(self, n, p, seed):
        g = random_graph(n, p, seed)
        if g.m == 0:
            return
        d = average_degree(g)
        h = extract_d_minimal(g, d)
        assert average_degree(h) >= d
        assert min_degree_of_minimal(h, d)
        assert is_d_minimal_exact(h, d)[0]


class TestVerify:
    def test_k4_passes(self):
        cert = verify_expander(complete(4), ExpanderParams(3, 0.1, 0.5))
        assert cert.holds and cert.evidence == EXACT and cert.exact

    def test_c8_fails_with_witness(self):
        p = ExpanderParams(2, 0.5, 0.25)
        cert = verify_expander(cycle(8), p)
        assert not cert.holds and cert.witness_violation
        S = cert.witness_violation
        inner, _, dens = cut_and_density(cycle(8), S)
        assert len(S) <= 6 and dens > (1 - p.eta) * p.d

    def test_six_vertex_subpath_is_a_violation(self):
        _, _, dens = cut_and_density(cycle(8), range(6))
        assert dens == Fraction(10, 6) > 1

    def test_not_minimal(self):
        cert = verify_expander(disjoint_union(complete(4), complete(4)), ExpanderParams(3, 0.1, 0.5))
        assert not cert.holds

    def test_params_validation(self):
        for bad in [(1, 0, 0.5), (1, 1, 0.5), (1, 0.5, 0), (1, 0.5, 0.6), (-1, 0.5, 0.5)]:
            with pytest.raises(ValueError):
                ExpanderParams(*bad)

    def test_large_hypercube_uses_spectral_or_heuristic(self):
        g = hypercube_coloured(6).graph
        cert = verify_expander(g, ExpanderParams(6, 0.01, 0.5))
        assert cert.evidence in (CONDUCTANCE, HEURISTIC)

    def test_large_complete_is_spectral(self):
        g = complete(30)
        cert = verify_expander(g, ExpanderParams(29, 0.05, 0.5))
        assert cert.holds and cert.evidence == CONDUCTANCE


class TestEdgeExpansion:
    def test_k4(self):
        rep = edge_expansion_check(complete(4), ExpanderParams(3, 0.1, 0.5))
        assert rep.min_slack == pytest.approx(3 - 0.15)

    def test_c4(self):
        rep = edge_expansion_check(cycle(4), ExpanderParams(2, 0.5, 0.5))
        assert rep.min_slack >= 0

    def test_k2(self):
        rep = edge_expansion_check(complete(2), ExpanderParams(1, 0.5, 0.5))
        assert rep.min_slack == pytest.approx(1 - 0.25)

    def test_violation_raises(self):
        # two triangles joined by one edge: a triangle has cut 1 < (eta d / 2) * 3
        g = disjoint_union(complete(3), complete(3), [(0, 3)])
        with pytest.raises(ViolationFound):
            edge_expansion_check(g, ExpanderParams(Fraction(7, 3), 0.9, 0.5))

    @given(st.integers(2, 12), st.floats(0.3, 1.0), st.integers(0, 2 ** 20), st.floats(0.01, 0.9))
    def test_exact_certificate_implies_expansion(self, n, p, seed, eta):
        g = random_graph(n, p, seed)
        if g.m == 0:
            return
        params = ExpanderParams(average_degree(g), eta, 0.5)
        cert = verify_expander(g, params)
        if cert.holds:
            assert edge_expansion_check(g, params).min_slack >= 0


class TestExtract:
    def test_k8(self):
        h, cert = extract_expander(complete(8), 0.5)
        assert h == complete(8) and cert.holds and cert.params.d == 7
        assert cert.params.eta == pytest.approx(0.5 / 6)

    def test_two_k8_joined(self):
        g = disjoint_union(complete(8), complete(8), [(7, 8)])
        h, cert = extract_expander(g, 0.5)
        assert cert.holds and cert.exact
        assert h.n == 8 and h.m == 28
        assert average_degree(h) >= average_degree(g) / 2

    def test_edgeless(self):
        h, cert = extract_expander(Graph(1, []), 0.5)
        assert h.n == 1 and cert.params.d == 0

    @given(st.integers(4, 16), st.floats(0.3, 0.9), st.integers(0, 2 ** 20))
    def test_half_density(self, n, p, seed):
        g = random_graph(n, p, seed)
        if g.m == 0:
            return
        h, cert = extract_expander(g, 0.5)
        if cert.exact:
            assert average_degree(h) >= average_degree(g) / 2


class TestRegularize:
    def test_regular_input_unchanged(self):
        g = hypercube_coloured(4).graph
        res = regularize_bipartite(g, 4, seed=0, relaxed=True)
        assert res.graph.m == g.m and res.branch == "truncated"

    def test_complete_bipartite(self):
        n = 32
        g = complete_bipartite(n // 2, n // 2)
        res = regularize_bipartite(g, n // 2, seed=1, relaxed=True)
        assert res.graph.max_degree <= n // 2
        assert average_degree(res.graph) >= n / (24 * math.log2(n))

    def test_sampling_branch(self):
        # unbalanced biclique forces heavy B-side degrees
        g = complete_bipartite(60, 6)
        res = regularize_bipartite(g, 6, seed=3, relaxed=True)
        assert res.graph.max_degree <= 6
        assert res.branch in ("bucket", "sampled")

    def test_preconditions(self):
        with pytest.raises(PreconditionViolated):
            regularize_bipartite(cycle(5), 2, relaxed=True)
        with pytest.raises(PreconditionViolated):
            regularize_bipartite(cycle(6), 3, relaxed=True)
        with pytest.raises(PreconditionViolated):
            regularize_bipartite(cycle(6), 2)

    @given(st.integers(4, 30), st.integers(2, 30), st.integers(0, 2 ** 20), st.floats(0.5, 1.0))
    def test_bounds_hold(self, a, b, seed, p):
        h = nx.bipartite.random_graph(a, b, p, seed=seed)
        g = from_nx(h).without_isolated()
        if g.m == 0 or not g.is_connected() or g.min_degree < 1:
            return
        d = g.min_degree
        res = regularize_bipartite(g, d, seed=seed, relaxed=True)
        assert res.graph.max_degree <= d
        assert average_degree(res.graph) >= d / (12 * math.log2(g.n))


class TestAlmostRegular:
    def test_regular_expander(self):
        g = complete_bipartite(8, 8)
        res = almost_regular_expander(g, 0.5, seed=0, relaxed=True)
        assert res.iterations == 1
        assert res.mu <= 2 * 8 / float(average_degree(res.graph))
        assert res.bounds["d_prime_ok"] and res.bounds["max_degree_ok"]

    def test_relaxed_recorded(self):
        res = almost_regular_expander(hypercube_coloured(4).graph, 0.5, seed=0, relaxed=True)
        assert res.relaxed and res.certificate.relaxed

    def test_strict_refuses_small_degree(self):
        from rainbowturan.errors import DegreeTooSmall
        with pytest.raises(DegreeTooSmall):
            almost_regular_expander(complete_bipartite(8, 8), 0.5)

    def test_not_bipartite(self):
        with pytest.raises(PreconditionViolated):
            almost_regular_expander(complete(4), 0.5, relaxed=True)

    def test_random_bipartite_terminates(self):
        h = nx.bipartite.random_graph(40, 40, 0.3, seed=2)
        g = from_nx(h).without_isolated()
        res = almost_regular_expander(g, 0.5, seed=1, relaxed=True, target="core")
        assert res.iterations >= 1 and res.graph.n >= 2
        assert try_bipartition(res.graph) is not None

    def test_min_degree_core(self):
        g = disjoint_union(complete(5), path(3))
        core = min_degree_core(g, 2)
        assert labels(core) == [0, 1, 2, 3, 4]
