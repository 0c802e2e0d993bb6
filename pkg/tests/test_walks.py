import itertools
import math
from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import complete, complete_bipartite, cycle, from_nx, rainbow, rainbow_cycle
from rainbowturan.errors import BoundViolated, BudgetExceeded, NoWalk, PreconditionViolated
from rainbowturan.generators import greedy_proper_colouring, hypercube_coloured, random_graph
from rainbowturan.graph import ColouredGraph, Graph, bipartite_subgraph, bipartition
from rainbowturan.walks import (
    BAD,
    GOOD,
    UNKNOWN,
    EdgeColourRelation,
    RainbowRelation,
    RSetIntersection,
    VertexEquality,
    WalkSampler,
    classify_pair,
    count_degenerate_exact,
    count_paths,
    degenerate_fraction_bound_check,
    estimate_degenerate,
    good_pairs,
    hom_split,
    janzer_inequality_check,
    janzer_rhs,
    relation_t,
    rho_ratio,
    sample_uniform_walk,
    walk_count_matrix,
    walk_counts_from,
    wilson_interval,
)


def all_walks(g: Graph, x: int, y: int, k: int):
    """Brute-force oracle: every x -> y walk of length k."""
    out = [[x]]
    for _ in range(k):
        out = [w + [v] for w in out for v in g.adj[w[-1]]]
    return [tuple(w) for w in out if w[-1] == y]


def brute_degenerate(cg: ColouredGraph, x: int, y: int, k: int) -> int:
    """Closed 2k-walks through x (step 0) and y (step k) that are not rainbow 2k-cycles."""
    walks = all_walks(cg.graph, x, y, k)
    bad = 0
    for P in walks:
        for Q in walks:
            cyc = list(P) + list(Q[::-1][1:-1])
            closed = cyc + [cyc[0]]
            cols = [cg.colour(a, b) for a, b in zip(closed, closed[1:])]
            if len(set(cyc)) != 2 * k or len(set(cols)) != 2 * k:
                bad += 1
    return bad


class TestCounts:
    def test_c4_antipodal(self):
        t = count_paths(cycle(4), 2)
        assert t.paths(0, 2) == 2 and t.cycles(0, 2) == 4

    def test_k2(self):
        t = count_paths(complete(2), 1)
        assert t.paths(0, 1) == 1 and t.cycles(0, 1) == 1

    @given(st.integers(2, 16), st.floats(0.1, 1), st.integers(0, 2 ** 20), st.integers(1, 10))
    def test_identities(self, n, p, seed, k):
        g = random_graph(n, p, seed)
        t = count_paths(g, k)
        A = g.adjacency().astype(np.int64).astype(object)  # Python ints, no rounding
        Ak = np.linalg.matrix_power(A, k) if k else np.eye(n, dtype=object)
        assert all(int(t.P[x, y]) == int(Ak[x, y]) for x in range(n) for y in range(n))
        assert all(t.C[x, y] == int(t.P[x, y]) ** 2 for x in range(n) for y in range(n))
        assert all(t.P[x, y] == t.P[y, x] for x in range(n) for y in range(n))
        A2k = np.linalg.matrix_power(A, 2 * k)
        assert t.hom_cycles == sum(int(A2k[x, x]) for x in range(n))
        if g.m:
            assert t.hom_paths >= n * g.min_degree ** k

    def test_big_integers(self):
        P = walk_count_matrix(complete(40), 14)
        assert P.dtype == object and int(P[0, 0]) == (39 ** 14 + 39) // 40

    def test_single_source(self):
        g = random_graph(30, 0.3, 2)
        P = walk_count_matrix(g, 6)
        for x in range(0, 30, 7):
            assert [int(v) for v in walk_counts_from(g, x, 6)] == [int(v) for v in P[x]]

    def test_hom_split_identity(self):
        g = hypercube_coloured(3).graph
        bip = bipartition(g)
        for k in (2, 3, 4):
            parts = hom_split(g, bip, k)
            if k % 2 == 0:
                assert parts["total"] == 2 * parts["XX"] == 2 * parts["YY"]
            else:
                assert parts["total"] == 2 * parts["XY"]


class TestDegenerate:
    def test_rainbow_c6(self):
        st6 = count_degenerate_exact(rainbow_cycle(6), 0, 3, 3)
        assert (st6.hom, st6.hom_star) == (4, 2)

    def test_k2(self):
        st2 = count_degenerate_exact(rainbow(complete(2)), 0, 1, 1)
        assert (st2.hom, st2.hom_star) == (1, 1)

    def test_hypercube_all_degenerate(self):
        cg = hypercube_coloured(3)
        for x, y in itertools.product(range(8), repeat=2):
            if bin(x ^ y).count("1") % 2 == 1:
                s = count_degenerate_exact(cg, x, y, 3)
                assert s.hom_star == s.hom

    @given(st.integers(3, 9), st.floats(0.3, 1), st.integers(0, 2 ** 20), st.integers(1, 4), st.data())
    def test_matches_brute_force(self, n, p, seed, k, data):
        cg = greedy_proper_colouring(random_graph(n, p, seed), seed)
        x = data.draw(st.integers(0, n - 1))
        y = data.draw(st.integers(0, n - 1))
        s = count_degenerate_exact(cg, x, y, k)
        assert s.hom == len(all_walks(cg.graph, x, y, k)) ** 2
        assert s.hom_star == brute_degenerate(cg, x, y, k)
        assert 0 <= s.hom_star <= s.hom

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            count_degenerate_exact(rainbow(complete(12)), 0, 1, 4, budget=1000)


class TestSampler:
    def test_k2(self):
        assert sample_uniform_walk(complete(2), 0, 1, 1, seed=0) == (0, 1)

    def test_c4_two_walks(self):
        s = WalkSampler(cycle(4), 0, 2, 2)
        import random
        rng = random.Random(0)
        c = Counter(s.sample(rng) for _ in range(10_000))
        assert set(c) == {(0, 1, 2), (0, 3, 2)}
        assert abs(c[(0, 1, 2)] / 10_000 - 0.5) <= 0.015

    def test_uniform_on_random_graph(self):
        g = random_graph(8, 0.6, 4)
        x, y = 0, 1
        walks = all_walks(g, x, y, 3)
        assert len(walks) > 1
        import random
        rng = random.Random(1)
        s = WalkSampler(g, x, y, 3)
        N = 100_000
        c = Counter(s.sample(rng) for _ in range(N))
        assert set(c) <= set(walks)
        p = 1 / len(walks)
        sigma = math.sqrt(N * p * (1 - p))
        assert all(abs(c[w] - N * p) <= 4 * sigma for w in walks)

    def test_no_walk(self):
        with pytest.raises(NoWalk):
            WalkSampler(cycle(4), 0, 1, 2)

    def test_big_counts(self):
        w = sample_uniform_walk(complete(30), 0, 1, 20, seed=3)
        assert len(w) == 21 and w[0] == 0 and w[-1] == 1
        g = complete(30)
        assert all(g.has_edge(a, b) for a, b in zip(w, w[1:]))


class TestEstimate:
    def test_rainbow_c6(self):
        st6 = estimate_degenerate(rainbow_cycle(6), 0, 3, 3, samples=4000, seed=0)
        assert st6.ci[0] <= 0.5 <= st6.ci[1]

    def test_hypercube(self):
        s = estimate_degenerate(hypercube_coloured(3), 0, 7, 3, samples=500, seed=0)
        assert s.estimate == 1.0

    def test_rainbow_k8(self):
        cg = rainbow(complete(8))
        exact = count_degenerate_exact(cg, 0, 1, 2)
        s = estimate_degenerate(cg, 0, 1, 2, samples=10_000, seed=1)
        assert s.ci[0] <= exact.hom_star / exact.hom <= s.ci[1]

    def test_coverage(self):
        hits = 0
        for i in range(50):
            cg = greedy_proper_colouring(random_graph(10, 0.5, i), i)
            x, y = 0, 1 + i % 9
            ex = count_degenerate_exact(cg, x, y, 3)
            if ex.hom == 0:
                hits += 1  # no walk: nothing to estimate, counts as covered
                continue
            est = estimate_degenerate(cg, x, y, 3, samples=400, seed=i)
            hits += est.ci[0] <= ex.hom_star / ex.hom <= est.ci[1]
        assert hits >= 45

    def test_wilson(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0 and 0 < hi < 0.05
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi


class TestGoodPairs:
    def test_hypercube_all_bad(self):
        cg = hypercube_coloured(3)
        rep = good_pairs(cg, bipartition(cg.graph), 2, 2)
        assert rep.verdicts and set(rep.verdicts.values()) == {BAD}
        assert rep.fraction_bad == 1

    def test_rainbow_k44_threshold_one(self):
        g = complete_bipartite(4, 4)
        rep = good_pairs(rainbow(g), bipartition(g), 2, 1)
        assert all(v == GOOD for v in rep.verdicts.values())

    def test_exact_threshold(self):
        # rainbow C_6 antipodal: hom* / hom = 1/2, so s = 1 is Good and s = 2 is Bad
        cg = rainbow_cycle(6)
        assert classify_pair(cg, 0, 3, 3, 1)[0] == GOOD
        assert classify_pair(cg, 0, 3, 3, 2)[0] == BAD
        assert classify_pair(cg, 0, 0, 3, 1)[0] == BAD

    def test_mc_unknown_is_never_good(self):
        cg = rainbow_cycle(6)
        verdict, st6 = classify_pair(cg, 0, 3, 3, 1, mode="mc", samples=50, seed=0)
        assert verdict in (GOOD, UNKNOWN)
        verdict, _ = classify_pair(cg, 0, 3, 3, 2, mode="mc", samples=50, seed=0)
        assert verdict != GOOD  # fraction 1/2 sits exactly on the 1/4 boundary side

    def test_random_dense_fixture(self):
        # G(64, 0.5), bipartite half, greedy colouring, k = 4, s = 3.  Exact counts
        # give hom*/hom around 0.76, far above 1/9, so every pair checked is Bad:
        # the recorded empirical fraction_bad at this scale is 1.
        g = bipartite_subgraph(random_graph(64, 0.5, 0), 0)
        cg = greedy_proper_colouring(g, 0)
        X = sorted(bipartition(g).X)
        verdicts = [classify_pair(cg, x, y, 4, 3, budget=10 ** 8)[0] for x, y in zip(X[:8], X[1:9])]
        assert verdicts == [BAD] * 8

    def test_mc_report(self):
        g = complete_bipartite(3, 3)
        rep = good_pairs(rainbow(g), bipartition(g), 2, 1, mode="mc", samples=200, seed=0)
        assert rep.mode == "mc" and len(rep.verdicts) == 6
        assert set(rep.counts()) == {GOOD, BAD, UNKNOWN}


class TestRelations:
    def test_tokens(self):
        cg = rainbow_cycle(6)
        rel = RainbowRelation(cg)
        assert rel.is_distinct((0, 1, 2, 3))
        assert not rel.is_distinct((0, 1, 0))
        assert rel.clean((0, 1, 2, 3), (0, 5, 4, 3))
        assert not rel.clean((0, 1, 2, 3), (0, 1, 2, 3))

    def test_rset(self):
        g = Graph(3, [(0, 1), (1, 2)])
        rel = RSetIntersection(g, [(0, 1), (2, 3), (1, 4)])
        assert not rel.is_distinct((0, 1, 2))  # r-sets of 0 and 2 share element 1
        assert rel.is_distinct((0, 1))

    def test_relation_t(self):
        cg = greedy_proper_colouring(random_graph(15, 0.5, 1), 1)
        assert relation_t(EdgeColourRelation(cg)) == 1
        assert relation_t(VertexEquality(cg.graph)) == 1


class TestJanzer:
    def test_rainbow_c6(self):
        rep = janzer_inequality_check(rainbow_cycle(6), 3, "colour")
        assert rep.margin >= 0 and rep.t == 1

    def test_unrelated(self):
        cg = rainbow_cycle(6)
        rel = EdgeColourRelation(cg)
        rel.etok = None  # nothing carries a token
        rel.vtok = np.zeros((6, 0), dtype=np.int64)
        rep = janzer_inequality_check(cg, 3, rel)
        assert rep.lhs == 0 and rep.rhs > 0

    @pytest.mark.parametrize("relation", ["colour", "vertex"])
    @pytest.mark.parametrize("seed", range(3))
    def test_random(self, relation, seed):
        cg = greedy_proper_colouring(random_graph(20, 0.4, seed), seed)
        assert janzer_inequality_check(cg, 3, relation, t=1).margin >= 0

    def test_small_k_rejected(self):
        with pytest.raises(ValueError):
            janzer_inequality_check(rainbow_cycle(6), 1)

    def test_violation_flagged(self):
        with pytest.raises(BoundViolated):
            janzer_inequality_check(hypercube_coloured(3), 2, "colour", t=1e-12)

    def test_rhs_zero_without_cycles(self):
        assert janzer_rhs(2, 1, 0, 3, 0) == 0


class TestRho:
    @pytest.mark.parametrize("k", [2, 4, 6])
    def test_k44(self, k):
        g = complete_bipartite(4, 4)
        assert rho_ratio(g, bipartition(g), k).ratio == 1

    def test_c8(self):
        rep = rho_ratio(cycle(8), bipartition(cycle(8)), 4)
        # hom_{x,y}(P_4) on C_8: C(4,2) = 6 at distance 0, C(4,1) = 4 at distance 2,
        # and 2 at distance 4 (once round each way); rho is the square
        assert (rep.rho_min, rep.rho_max) == (4, 36)
        assert rep.ratio_exact == 9

    def test_odd_k(self):
        with pytest.raises(ValueError):
            rho_ratio(cycle(8), bipartition(cycle(8)), 3)


class TestFractionBound:
    def test_s_one(self):
        cg = rainbow_cycle(6)
        rep = degenerate_fraction_bound_check(cg, 3, 1, relaxed=True)
        assert rep.margin == rep.hom - rep.hom_star >= 0

    def test_hypercube_precondition_essential(self):
        cg = hypercube_coloured(3)
        rep = degenerate_fraction_bound_check(cg, 3, 2, relaxed=True)
        assert rep.hom_star == rep.hom and rep.margin < 0 and not rep.precondition
        with pytest.raises(PreconditionViolated):
            degenerate_fraction_bound_check(cg, 3, 2)
