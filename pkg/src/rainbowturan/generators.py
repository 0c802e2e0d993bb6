"""Instance families: hypercube colourings, random graphs, blow-up cycles and
random graphs with every short blow-up cycle destroyed.

Labelling conventions
---------------------
* ``hypercube_coloured(k)``: vertex ``v`` is the integer with binary digits
  equal to its coordinates; edge ``v -- v ^ (1 << i)`` has colour ``i``.
* ``blowup_cycle(k, r)``: vertex ``i * r + a`` is copy ``a`` of cycle vertex ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, DimensionTooLarge
from .graph import ColouredGraph, Graph, norm_edge


def hypercube_coloured(k: int) -> ColouredGraph:
    if k < 1:
        raise ValueError("dimension must be at least 1")
    if k > 16:
        raise DimensionTooLarge(f"dimension {k} exceeds 16")
    edges = {}
    for v in range(1 << k):
        for i in range(k):
            w = v ^ (1 << i)
            if v < w:
                edges[(v, w)] = i
    return ColouredGraph(Graph(1 << k, edges), edges)


def random_graph(n: int, p: float, seed=None) -> Graph:
    """Erdos-Renyi G(n, p)."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def greedy_proper_colouring(g: Graph, seed=None) -> ColouredGraph:
    """Colour edges in a random order with the smallest colour free at both ends.

    Each edge sees at most 2(Δ-1) blocked colours, so at most 2Δ-1 are used.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(g.m)
    used: list[set[int]] = [set() for _ in range(g.n)]
    colours = {}
    for i in order:
        u, v = g.edges[i]
        blocked = used[u] | used[v]
        c = 0
        while c in blocked:
            c += 1
        colours[(u, v)] = c
        used[u].add(c)
        used[v].add(c)
    return ColouredGraph(g, colours, check=False)


def blowup_cycle(k: int, r: int) -> Graph:
    """The r-blow-up C_k[r]: kr vertices, k r^2 edges, 2r-regular."""
    if k < 3 or r < 1:
        raise ValueError("need k >= 3 and r >= 1")
    edges = []
    for i in range(k):
        j = (i + 1) % k
        for a in range(r):
            for b in range(r):
                edges.append((i * r + a, j * r + b))
    return Graph(k * r, edges)


# -- blow-up cycle search ----------------------------------------------------------

def rset_adjacency(g: Graph, r: int, budget: int | None = None) -> dict[tuple, list[tuple]]:
    """Map each r-set A to the sorted r-sets B with (A, B) spanning a K_{r,r}.

    Candidate A-sets are r-subsets of some neighbourhood (every vertex of B is a
    common neighbour of A); B ranges over r-subsets of the common neighbourhood.
    """
    nbr = [g.neighbour_set(v) for v in range(g.n)]
    candidates = set()
    for w in range(g.n):
        if len(g.adj[w]) >= r:
            candidates.update(combinations(g.adj[w], r))
    out: dict[tuple, list[tuple]] = {}
    work = 0
    for A in sorted(candidates):
        common = set(nbr[A[0]])
        for a in A[1:]:
            common &= nbr[a]
        if len(common) < r:
            continue
        Bs = list(combinations(sorted(common), r))
        work += len(Bs)
        if budget is not None and work > budget:
            raise BudgetExceeded(f"K_{{{r},{r}}} enumeration exceeded {budget}")
        out[A] = Bs
    return out


def find_blowup_cycles(g: Graph, r: int, kmax: int, kmin: int = 3, budget: int | None = 10**7):
    """All copies of C_j[r] for kmin <= j <= kmax, as cyclic tuples of r-sets.

    Each copy is reported once: it starts at its smallest r-set and its second
    r-set is smaller than its last.  Groups are pairwise disjoint and
    consecutive groups span complete bipartite graphs.
    """
    adj = rset_adjacency(g, r, budget)
    adjset = {A: set(Bs) for A, Bs in adj.items()}
    copies = []
    steps = 0

    for start in sorted(adj):
        path = [start]
        used = set(start)

        def extend():
            nonlocal steps
            last = path[-1]
            for B in adj.get(last, ()):
                if B <= start:
                    continue
                steps += 1
                if budget is not None and steps > budget:
                    raise BudgetExceeded(f"blow-up cycle search exceeded {budget} steps", partial=copies)
                if used.intersection(B):
                    continue
                path.append(B)
                used.update(B)
                if len(path) >= kmin and start in adjset.get(B, ()) and path[1] < path[-1]:
                    copies.append(tuple(path))
                if len(path) < kmax:
                    extend()
                path.pop()
                used.difference_update(B)

        extend()
    return copies


def blowup_cycle_edges(copy: tuple, g: Graph | None = None) -> list[tuple[int, int]]:
    """Edges of a C_j[r] copy given as a cyclic tuple of r-sets."""
    out = set()
    j = len(copy)
    for i in range(j):
        for a in copy[i]:
            for b in copy[(i + 1) % j]:
                out.add(norm_edge(a, b))
    return sorted(out)


@dataclass
class CrFreeResult:
    graph: Graph
    r: int
    kmax: int
    initial_edges: int
    removed_edges: list = field(default_factory=list)
    copies_found: int = 0
    scans: int = 0
    c: float = 0.2

    @property
    def edge_count(self) -> int:
        return self.graph.m

    @property
    def lower_bound(self) -> float:
        return self.c * self.graph.n ** (2 - 1 / self.r)

    @property
    def meets_bound(self) -> bool:
        return self.edge_count >= self.lower_bound

    def summary(self) -> dict:
        return {
            "n": self.graph.n,
            "r": self.r,
            "kmax": self.kmax,
            "initial_edges": self.initial_edges,
            "final_edges": self.edge_count,
            "copies_found": self.copies_found,
            "removed": len(self.removed_edges),
            "scans": self.scans,
            "lower_bound": self.lower_bound,
            "meets_bound": self.meets_bound,
        }


def crfree_construction(n: int, r: int, kmax: int, seed=None, c: float = 0.2,
                        budget: int | None = 10**7) -> CrFreeResult:
    """Sample G(n, n^{-1/r}) and delete one edge from every C_j[r], 3 <= j <= kmax.

    The deleted edge is the lowest-index edge of the copy.  Copies are rescanned
    until none remains, so the output is certified free of short blow-up cycles.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    g = random_graph(n, n ** (-1.0 / r), seed)
    result = CrFreeResult(graph=g, r=r, kmax=kmax, initial_edges=g.m, c=c)
    edges = set(g.edges)
    while True:
        current = Graph(n, sorted(edges))
        copies = find_blowup_cycles(current, r, kmax, budget=budget)
        result.scans += 1
        if not copies:
            break
        result.copies_found += len(copies)
        for copy in copies:
            es = blowup_cycle_edges(copy)
            if all(e in edges for e in es):
                edges.discard(es[0])
                result.removed_edges.append(es[0])
    result.graph = current
    return result
