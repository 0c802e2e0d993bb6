"""Walk counts, degenerate closed walks, uniform walk sampling and good pairs.

Degeneracy is expressed through *tokens*.  A relation assigns each vertex a
tuple of tokens and, optionally, each edge one token.  A closed walk is
degenerate when some token occurs at two different positions; for

* the rainbow relation, vertex ``v`` carries ``v`` and each edge its colour, so
  degenerate means "repeats a vertex or a colour";
* the vertex-equality relation, only vertices carry tokens;
* the colour relation, only edges carry tokens;
* the r-set relation, an auxiliary vertex carries the elements of its r-set, so
  two positions clash exactly when their r-sets intersect.

A closed walk hosted by ``(x, y)`` is ``P`` followed by the reverse of ``Q`` for
two ``x -> y`` walks.  It is clean iff ``P`` and ``Q`` are each token-distinct
and their interior tokens (inner vertices plus all edges) are disjoint, so
clean pairs are counted from the list of token-distinct walks alone and
``hom* = hom - clean``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.stats import binomtest

from .errors import (
    BoundViolated,
    BudgetExceeded,
    NoWalk,
    PreconditionViolated,
)
from .graph import Bipartition, ColouredGraph, Graph

DEFAULT_BUDGET = 10**7
_INT64_SAFE = 2**62


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, ColouredGraph) else g


# -- exact walk counts -----------------------------------------------------------

def walk_count_matrix(g: Graph | ColouredGraph, k: int) -> np.ndarray:
    """(A^k) by k multiplication steps; int64 when provably safe, else Python ints."""
    g = _as_graph(g)
    if k < 0:
        raise ValueError("k must be non-negative")
    A = g.adjacency().astype(np.int64)
    safe = g.max_degree ** (k + 1) < _INT64_SAFE if g.n else True
    P = np.eye(g.n, dtype=np.int64)
    if not safe:
        A = A.astype(object)
        P = P.astype(object)
    for _ in range(k):
        P = P @ A
    return P


def walk_counts_from(g: Graph | ColouredGraph, x: int, k: int) -> np.ndarray:
    """Row x of A^k, one sparse step at a time."""
    g = _as_graph(g)
    v = np.zeros(g.n, dtype=np.int64)
    v[x] = 1
    if g.n and g.max_degree ** (k + 1) < _INT64_SAFE:
        A = g.csr()
        for _ in range(k):
            v = A @ v
        return v
    v = v.astype(object)
    for _ in range(k):
        nxt = np.zeros(g.n, dtype=object)
        for u in np.flatnonzero(v):
            for w in g.adj[u]:
                nxt[w] += v[u]
        v = nxt
    return v


@dataclass
class WalkTable:
    """hom_{x,y}(P_k) for all pairs; hom_{x,y}(C_2k) is its entrywise square."""

    k: int
    P: np.ndarray

    @property
    def C(self) -> np.ndarray:
        Po = self.P.astype(object)
        return Po * Po

    def paths(self, x: int, y: int) -> int:
        return int(self.P[x, y])

    def cycles(self, x: int, y: int) -> int:
        p = int(self.P[x, y])
        return p * p

    @property
    def hom_paths(self) -> int:
        return int(sum(int(v) for v in self.P.ravel()))

    @property
    def hom_cycles(self) -> int:
        return int(sum(int(v) * int(v) for v in self.P.ravel()))

    def rows(self):
        n = self.P.shape[0]
        for x in range(n):
            for y in range(n):
                p = int(self.P[x, y])
                yield x, y, p, p * p


def count_paths(g: Graph | ColouredGraph, k: int) -> WalkTable:
    if k < 1:
        raise ValueError("k must be at least 1")
    return WalkTable(k, walk_count_matrix(g, k))


def hom_split(g: Graph, bip: Bipartition, k: int) -> dict[str, int]:
    """hom(C_2k) and its parts by the sides of the two hosts."""
    t = count_paths(g, k)
    out = {"XX": 0, "YY": 0, "XY": 0, "YX": 0}
    for x, y, _, c in t.rows():
        out[("X" if x in bip.X else "Y") + ("X" if y in bip.X else "Y")] += c
    out["total"] = sum(out.values())
    return out


# -- relations -------------------------------------------------------------------

class TokenRelation:
    """Vertex tokens (n x r int array) and optional edge tokens (n x n, -1 off edges)."""

    name = "custom"

    def __init__(self, graph: Graph, vtok: np.ndarray, etok: np.ndarray | None, t: int = 1):
        self.graph = graph
        self.vtok = np.asarray(vtok, dtype=np.int64).reshape(graph.n, -1)
        self.etok = etok
        self.t = t
        top = [-1]
        if self.vtok.size:
            top.append(int(self.vtok.max()))
        if etok is not None and etok.size:
            top.append(int(etok.max()))
        self.universe = max(top) + 1

    def walk_tokens(self, walk: Sequence[int]) -> list[int]:
        out = list(self.vtok[walk[0]])
        for a, b in zip(walk, walk[1:]):
            if self.etok is not None:
                out.append(int(self.etok[a, b]))
            out.extend(self.vtok[b])
        return [int(t) for t in out]

    def interior_tokens(self, walk: Sequence[int]) -> list[int]:
        toks = self.walk_tokens(walk)
        r = self.vtok.shape[1]
        return toks[r:len(toks) - r]

    def is_distinct(self, walk: Sequence[int]) -> bool:
        toks = self.walk_tokens(walk)
        return len(set(toks)) == len(toks)

    def clean(self, P: Sequence[int], Q: Sequence[int]) -> bool:
        """Is the closed walk P . reverse(Q) free of repeated tokens?"""
        if not (self.is_distinct(P) and self.is_distinct(Q)):
            return False
        return not set(self.interior_tokens(P)) & set(self.interior_tokens(Q))


class RainbowRelation(TokenRelation):
    name = "rainbow"

    def __init__(self, cg: ColouredGraph):
        n = cg.n
        cm = cg.colour_matrix()
        super().__init__(cg.graph, np.arange(n)[:, None], np.where(cm >= 0, cm + n, -1))


class VertexEquality(TokenRelation):
    name = "vertex"

    def __init__(self, g: Graph | ColouredGraph):
        g = _as_graph(g)
        super().__init__(g, np.arange(g.n)[:, None], None)


class EdgeColourRelation(TokenRelation):
    name = "colour"

    def __init__(self, cg: ColouredGraph):
        super().__init__(cg.graph, np.zeros((cg.n, 0), dtype=np.int64), cg.colour_matrix())


class RSetIntersection(TokenRelation):
    """u ~ w iff the r-sets attached to u and w intersect."""

    name = "rset"

    def __init__(self, g: Graph, rsets: Sequence[Sequence[int]], t: int | None = None):
        elems = sorted({int(a) for R in rsets for a in R})
        idx = {a: i for i, a in enumerate(elems)}
        r = len(rsets[0]) if len(rsets) else 0
        vt = np.array([[idx[int(a)] for a in R] for R in rsets], dtype=np.int64).reshape(g.n, r)
        super().__init__(g, vt, None, t if t is not None else 1)


def make_relation(g: Graph | ColouredGraph, kind: str) -> TokenRelation:
    if kind == "rainbow":
        return RainbowRelation(g)
    if kind == "vertex":
        return VertexEquality(g)
    if kind == "colour":
        return EdgeColourRelation(g)
    raise ValueError(f"unknown relation {kind!r}")


# -- enumeration of token-distinct walks ----------------------------------------------

def _reach_table(g: Graph, target: int, k: int) -> list[np.ndarray]:
    """reach[j][v]: some walk of length exactly j goes from v to target."""
    A = g.csr()
    cur = np.zeros(g.n, dtype=bool)
    cur[target] = True
    out = [cur]
    for _ in range(k):
        cur = (A @ cur.astype(np.int64)) > 0
        out.append(cur)
    return out


def distinct_walks(rel: TokenRelation, x: int, k: int, target: int | None = None,
                   budget: int | None = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """All token-distinct walks of length k from x (ending at target if given).

    Returns the vertex array (W x (k+1)) and the token array in walk order.
    """
    g = rel.graph
    A = g.csr()
    indptr, indices = A.indptr, A.indices
    vt, et = rel.vtok, rel.etok
    reach = _reach_table(g, target, k) if target is not None else None
    verts = np.array([[x]], dtype=np.int64)
    toks = vt[[x]]
    if reach is not None and not reach[k][x]:
        return np.zeros((0, k + 1), dtype=np.int64), np.zeros((0, toks.shape[1]), dtype=np.int64)
    visited = 1
    for step in range(1, k + 1):
        cur = verts[:, -1]
        deg = indptr[cur + 1] - indptr[cur]
        rep = np.repeat(np.arange(len(cur)), deg)
        offs = np.arange(rep.size) - np.repeat(np.cumsum(deg) - deg, deg)
        nxt = indices[np.repeat(indptr[cur], deg) + offs].astype(np.int64)
        if reach is not None:
            ok = reach[k - step][nxt]
            rep, nxt = rep[ok], nxt[ok]
        parts = []
        if et is not None:
            parts.append(et[verts[rep, -1], nxt][:, None])
        parts.append(vt[nxt])
        new = np.hstack(parts)
        old = toks[rep]
        clash = (old[:, :, None] == new[:, None, :]).any(axis=(1, 2)) if old.shape[1] and new.shape[1] else np.zeros(len(rep), bool)
        keep = ~clash
        verts = np.hstack([verts[rep[keep]], nxt[keep, None]])
        toks = np.hstack([old[keep], new[keep]])
        visited += len(verts)
        if budget is not None and visited > budget:
            raise BudgetExceeded(f"walk enumeration from {x} exceeded {budget} prefixes")
    return verts, toks


def _clean_counts(rel: TokenRelation, verts: np.ndarray, toks: np.ndarray, n: int,
                  budget: int | None) -> np.ndarray:
    """clean[y] = number of ordered pairs of distinct-token walks to y with disjoint interiors."""
    ends = verts[:, -1] if len(verts) else np.zeros(0, dtype=np.int64)
    cnt = np.bincount(ends, minlength=n).astype(np.int64)
    total_pairs = int((cnt * cnt).sum())
    if budget is not None and total_pairs > budget:
        raise BudgetExceeded(f"{total_pairs} walk pairs exceed budget {budget}")
    r = rel.vtok.shape[1]
    inner = toks[:, r:toks.shape[1] - r]
    if inner.shape[1] == 0 or len(verts) == 0:
        return cnt * cnt
    W, L = inner.shape
    U = max(rel.universe, 1)
    cols = (ends[:, None] * U + inner).ravel()
    rows = np.repeat(np.arange(W), L)
    B = sp.csr_matrix((np.ones(W * L, dtype=np.int32), (rows, cols)), shape=(W, n * U))
    O = (B @ B.T).tocsr()
    dirty = np.bincount(ends, weights=np.diff(O.indptr), minlength=n).astype(np.int64)
    return cnt * cnt - dirty


def degenerate_row(rel: TokenRelation, x: int, k: int, P_row=None,
                   budget: int | None = DEFAULT_BUDGET) -> list[int]:
    """hom*_{x,y}(C_2k) for every y, as Python ints."""
    g = rel.graph
    if P_row is None:
        P_row = walk_counts_from(g, x, k)
    verts, toks = distinct_walks(rel, x, k, budget=budget)
    clean = _clean_counts(rel, verts, toks, g.n, budget)
    return [int(P_row[y]) ** 2 - int(clean[y]) for y in range(g.n)]


def degenerate_table(rel: TokenRelation, k: int, sources=None,
                     budget: int | None = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """(hom*, hom) as object arrays over ``sources`` x all vertices."""
    g = rel.graph
    P = walk_count_matrix(g, k)
    sources = list(range(g.n)) if sources is None else list(sources)
    star = np.zeros((len(sources), g.n), dtype=object)
    hom = np.zeros((len(sources), g.n), dtype=object)
    for i, x in enumerate(sources):
        star[i] = degenerate_row(rel, x, k, P[x], budget)
        hom[i] = [int(v) ** 2 for v in P[x]]
    return star, hom


@dataclass
class DegenerateStats:
    mode: str                     # "exact" or "mc"
    x: int
    y: int
    k: int
    hom: int | None = None
    hom_star: int | None = None
    estimate: float | None = None
    ci: tuple[float, float] | None = None
    samples: int = 0

    @property
    def fraction(self) -> float | None:
        if self.mode == "exact":
            return None if not self.hom else self.hom_star / self.hom
        return self.estimate

    def as_dict(self) -> dict:
        return {"mode": self.mode, "x": self.x, "y": self.y, "k": self.k, "hom": self.hom,
                "hom_star": self.hom_star, "fraction": self.fraction,
                "ci": list(self.ci) if self.ci else None, "samples": self.samples}


def count_degenerate_exact(g: ColouredGraph | Graph, x: int, y: int, k: int,
                           budget: int | None = DEFAULT_BUDGET,
                           relation: TokenRelation | None = None) -> DegenerateStats:
    """Exact hom*_{x,y}(C_2k) by enumerating the token-distinct x -> y walks."""
    rel = relation if relation is not None else (
        RainbowRelation(g) if isinstance(g, ColouredGraph) else VertexEquality(g))
    G = rel.graph
    p = int(walk_counts_from(G, x, k)[y])
    hom = p * p
    if budget is not None and hom > budget:
        raise BudgetExceeded(f"hom_{{{x},{y}}}(C_{2 * k}) = {hom} exceeds budget {budget}")
    verts, toks = distinct_walks(rel, x, k, target=y, budget=budget)
    clean = int(_clean_counts(rel, verts, toks, G.n, budget)[y])
    return DegenerateStats("exact", x, y, k, hom=hom, hom_star=hom - clean)


# -- uniform sampling ---------------------------------------------------------------

class WalkSampler:
    """Exact uniform sampler on Hom_{x,y}(P_k).

    ``back[j][v]`` counts walks of length j from v to y; each step picks the next
    vertex with probability proportional to the remaining count.
    """

    def __init__(self, g: Graph | ColouredGraph, x: int, y: int, k: int):
        g = _as_graph(g)
        self.g, self.x, self.y, self.k = g, x, y, k
        A = g.adjacency().astype(np.int64)
        safe = g.max_degree ** (k + 1) < _INT64_SAFE if g.n else True
        vec = np.zeros(g.n, dtype=np.int64 if safe else object)
        vec[y] = 1
        if not safe:
            A = A.astype(object)
        back = [vec]
        for _ in range(k):
            vec = A @ vec
            back.append(vec)
        self.back = back
        self.total = int(back[k][x])
        self.exact_int64 = safe
        self._cache: dict = {}
        if self.total == 0:
            raise NoWalk(f"no walk of length {k} from {x} to {y}")

    def _step_table(self, rem: int, cur: int):
        key = (rem, cur)
        if key not in self._cache:
            nb = np.array(self.g.adj[cur], dtype=np.int64)
            w = self.back[rem - 1][nb]
            keep = np.array([int(v) > 0 for v in w], dtype=bool)
            nb, w = nb[keep], w[keep]
            if self.exact_int64:
                cum = np.cumsum(w.astype(np.int64))
            else:
                cum = np.array(list(_accumulate(w)), dtype=object)
            self._cache[key] = (nb, cum)
        return self._cache[key]

    def sample(self, rng: random.Random) -> tuple[int, ...]:
        walk = [self.x]
        cur = self.x
        for rem in range(self.k, 0, -1):
            nb, cum = self._step_table(rem, cur)
            r = rng.randrange(int(cum[-1]))
            i = int(np.searchsorted(cum, r, side="right")) if self.exact_int64 else _bisect_obj(cum, r)
            cur = int(nb[i])
            walk.append(cur)
        return tuple(walk)


def _accumulate(values):
    s = 0
    for v in values:
        s += int(v)
        yield s


def _bisect_obj(cum, r):
    lo, hi = 0, len(cum)
    while lo < hi:
        mid = (lo + hi) // 2
        if int(cum[mid]) <= r:
            lo = mid + 1
        else:
            hi = mid
    return lo


def python_rng(seed) -> random.Random:
    """A stdlib generator seeded from a numpy seed (needed for big-integer draws)."""
    if isinstance(seed, random.Random):
        return seed
    ss = np.random.default_rng(seed)
    return random.Random(int(ss.integers(0, 2**63 - 1)))


def sample_uniform_walk(g: Graph | ColouredGraph, x: int, y: int, k: int, seed=None) -> tuple[int, ...]:
    return WalkSampler(g, x, y, k).sample(python_rng(seed))


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def estimate_degenerate(g: ColouredGraph | Graph, x: int, y: int, k: int, samples: int = 2000,
                        seed=None, relation: TokenRelation | None = None,
                        sampler: WalkSampler | None = None) -> DegenerateStats:
    """Monte-Carlo estimate of hom*/hom from independent uniform pairs of walks."""
    rel = relation if relation is not None else (
        RainbowRelation(g) if isinstance(g, ColouredGraph) else VertexEquality(g))
    sampler = sampler or WalkSampler(rel.graph, x, y, k)
    rng = python_rng(seed)
    bad = 0
    for _ in range(samples):
        P = sampler.sample(rng)
        Q = sampler.sample(rng)
        if not rel.clean(P, Q):
            bad += 1
    lo, hi = wilson_interval(bad, samples)
    return DegenerateStats("mc", x, y, k, estimate=bad / samples, ci=(lo, hi), samples=samples,
                           hom=sampler.total ** 2)


# -- good pairs ----------------------------------------------------------------------

GOOD, BAD, UNKNOWN = "Good", "Bad", "Unknown"


@dataclass
class GoodPairReport:
    k: int
    s: int
    mode: str
    verdicts: dict = field(default_factory=dict)
    hom: dict = field(default_factory=dict)
    hom_star: dict = field(default_factory=dict)
    intervals: dict = field(default_factory=dict)

    @property
    def fraction_bad(self) -> Fraction:
        if not self.verdicts:
            return Fraction(0)
        return Fraction(sum(1 for v in self.verdicts.values() if v == BAD), len(self.verdicts))

    def good(self, x: int, y: int) -> bool:
        return self.verdicts.get((x, y)) == GOOD

    def counts(self) -> dict[str, int]:
        out = {GOOD: 0, BAD: 0, UNKNOWN: 0}
        for v in self.verdicts.values():
            out[v] += 1
        return out

    def as_dict(self) -> dict:
        return {"k": self.k, "s": self.s, "mode": self.mode, "counts": self.counts(),
                "fraction_bad": float(self.fraction_bad),
                "pairs": [{"x": x, "y": y, "verdict": v, "hom": self.hom.get((x, y)),
                           "hom_star": self.hom_star.get((x, y))}
                          for (x, y), v in sorted(self.verdicts.items())]}


def exact_verdict(hom: int, hom_star: int, s: int) -> str:
    """Good iff hom > 0 and hom* <= hom / s^2."""
    return GOOD if hom > 0 and hom_star * s * s <= hom else BAD


def mc_verdict(stats: DegenerateStats, s: int) -> str:
    threshold = 1.0 / (s * s)
    lo, hi = stats.ci
    if hi <= threshold:
        return GOOD
    if lo > threshold:
        return BAD
    return UNKNOWN


def classify_pair(g, x: int, y: int, k: int, s: int, mode: str = "exact", samples: int = 2000,
                  seed=None, relation: TokenRelation | None = None,
                  budget: int | None = DEFAULT_BUDGET) -> tuple[str, DegenerateStats | None]:
    rel = relation if relation is not None else (
        RainbowRelation(g) if isinstance(g, ColouredGraph) else VertexEquality(g))
    G = rel.graph
    if x == y:
        return BAD, None
    if _no_walk(G, x, y, k):
        return BAD, DegenerateStats(mode, x, y, k, hom=0, hom_star=0)
    if mode == "exact":
        st = count_degenerate_exact(G, x, y, k, budget=budget, relation=rel)
        return exact_verdict(st.hom, st.hom_star, s), st
    st = estimate_degenerate(G, x, y, k, samples=samples, seed=seed, relation=rel)
    return mc_verdict(st, s), st


def _no_walk(g: Graph, x: int, y: int, k: int) -> bool:
    return not _reach_table(g, y, k)[k][x]


def good_pairs(g: ColouredGraph | Graph, bip: Bipartition, k: int, s: int, mode: str = "exact",
               samples: int = 2000, seed=None, relation: TokenRelation | None = None,
               budget: int | None = DEFAULT_BUDGET) -> GoodPairReport:
    """Classify every ordered pair of distinct vertices of X at threshold 1/s^2."""
    rel = relation if relation is not None else (
        RainbowRelation(g) if isinstance(g, ColouredGraph) else VertexEquality(g))
    G = rel.graph
    X = sorted(bip.X)
    rep = GoodPairReport(k, s, mode)
    if mode == "exact":
        star, hom = degenerate_table(rel, k, sources=X, budget=budget)
        for i, x in enumerate(X):
            for y in X:
                if x == y:
                    continue
                h, hs = int(hom[i, y]), int(star[i, y])
                rep.hom[(x, y)], rep.hom_star[(x, y)] = h, hs
                rep.verdicts[(x, y)] = exact_verdict(h, hs, s)
        return rep
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(X) * len(X))
    P = walk_count_matrix(G, k)
    for i, x in enumerate(X):
        for j, y in enumerate(X):
            if x == y:
                continue
            if int(P[x, y]) == 0:
                rep.verdicts[(x, y)] = BAD
                rep.hom[(x, y)] = 0
                continue
            st = estimate_degenerate(G, x, y, k, samples=samples, seed=children[i * len(X) + j], relation=rel)
            rep.hom[(x, y)] = st.hom
            rep.intervals[(x, y)] = st.ci
            rep.verdicts[(x, y)] = mc_verdict(st, s)
    return rep


# -- inequality checks ---------------------------------------------------------------

def janzer_rhs(k: int, t: float, max_degree: int, n: int, hom_cycles: int) -> float:
    """32 k^{3/2} t^{1/2} Delta^{1/2} n^{1/2k} hom(C_2k)^{1 - 1/2k}."""
    if hom_cycles == 0:
        return 0.0
    log_hom = math.log(hom_cycles)
    return 32 * k ** 1.5 * math.sqrt(t) * math.sqrt(max_degree) * n ** (1 / (2 * k)) * math.exp(
        (1 - 1 / (2 * k)) * log_hom)


@dataclass
class JanzerReport:
    relation: str
    k: int
    t: float
    lhs: int
    rhs: float
    hom: int

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def as_dict(self) -> dict:
        return {"relation": self.relation, "k": self.k, "t": self.t, "lhs": self.lhs,
                "rhs": self.rhs, "hom": self.hom, "margin": self.margin}


def relation_t(rel: TokenRelation) -> int:
    """Smallest t valid for the relation, measured on the graph.

    Vertex form: max over (u, v) of #{w in N(v): u ~ w}.  Edge form: max over
    (uv, w) of #{z in N(w): uv ~ zw}.
    """
    g = rel.graph
    if rel.etok is None:
        tok = [set(int(a) for a in rel.vtok[v]) for v in range(g.n)]
        best = 0
        for u in range(g.n):
            for v in range(g.n):
                best = max(best, sum(1 for w in g.adj[v] if tok[u] & tok[w]))
        return best
    best = 0
    for a, b in g.edges:
        c = rel.etok[a, b]
        for w in range(g.n):
            best = max(best, sum(1 for z in g.adj[w] if rel.etok[z, w] == c))
    return best


def janzer_inequality_check(g: ColouredGraph | Graph, k: int, relation: str | TokenRelation = "colour",
                            t: float | None = None, budget: int | None = DEFAULT_BUDGET,
                            strict: bool = True) -> JanzerReport:
    """Count homomorphic 2k-cycles containing a related pair and compare with the bound."""
    if k < 2:
        raise ValueError("the counting bound needs k >= 2")
    rel = make_relation(g, relation) if isinstance(relation, str) else relation
    G = rel.graph
    if t is None:
        t = rel.t
    P = walk_count_matrix(G, k)
    lhs = 0
    for x in range(G.n):
        lhs += sum(degenerate_row(rel, x, k, P[x], budget))
    hom = sum(int(v) ** 2 for v in P.ravel())
    rep = JanzerReport(rel.name, k, t, lhs, janzer_rhs(k, t, G.max_degree, G.n, hom), hom)
    if strict and rep.margin < 0:
        raise BoundViolated(f"{rel.name} relation: {lhs} related cycles exceed bound {rep.rhs}")
    return rep


@dataclass
class RhoReport:
    k: int
    rho_min: int
    rho_max: int
    certified_bound: float | None = None

    @property
    def ratio(self) -> float:
        return math.inf if self.rho_min == 0 else self.rho_max / self.rho_min

    @property
    def ratio_exact(self) -> Fraction | None:
        return None if self.rho_min == 0 else Fraction(self.rho_max, self.rho_min)

    def as_dict(self) -> dict:
        return {"k": self.k, "rho_min": self.rho_min, "rho_max": self.rho_max,
                "ratio": self.ratio, "certified_bound": self.certified_bound}


def rho_ratio(g: Graph, bip: Bipartition, k: int, eta: float | None = None,
              mu: float | None = None, certified: bool = False) -> RhoReport:
    """Extremes of hom_{x,y}(C_2k) over x, y in X.

    When ``certified`` (an exact expander certificate) and k is at least
    2^9 log n / eta^2, the ratio is asserted to be at most 2^12 mu^4.
    """
    if k % 2:
        raise ValueError("k must be even")
    g = _as_graph(g)
    P = walk_count_matrix(g, k)
    X = sorted(bip.X)
    vals = [int(P[x, y]) ** 2 for x in X for y in X]
    rep = RhoReport(k, min(vals), max(vals))
    if certified and eta is not None and mu is not None:
        if k >= math.ceil(2**9 * math.log2(g.n) / eta**2):
            rep.certified_bound = 2**12 * mu**4
            if rep.ratio > rep.certified_bound:
                raise BoundViolated(f"rho ratio {rep.ratio} exceeds {rep.certified_bound}")
    return rep


@dataclass
class FractionBoundReport:
    k: int
    S: float
    hom: int
    hom_star: int
    precondition: bool
    required_d: float | None

    @property
    def margin(self) -> float:
        return self.hom / self.S - self.hom_star

    def as_dict(self) -> dict:
        return {"k": self.k, "S": self.S, "hom": self.hom, "hom_star": self.hom_star,
                "margin": self.margin, "precondition": self.precondition, "required_d": self.required_d}


def degenerate_fraction_bound_check(cg: ColouredGraph, k: int, S: float, d: float | None = None,
                                    mu: float | None = None, relaxed: bool = False,
                                    budget: int | None = DEFAULT_BUDGET) -> FractionBoundReport:
    """Aggregate hom* against hom / S.

    The bound is only promised when min degree >= d/2, max degree <= mu d and
    d >= 2^14 k^3 S^2 mu n^{1/k}; without ``relaxed`` a failed precondition raises.
    """
    g = cg.graph
    if d is None:
        d = 2 * g.min_degree
    if mu is None:
        mu = g.max_degree / d if d else math.inf
    need = 2**14 * k**3 * S**2 * mu * g.n ** (1 / k)
    pre = g.min_degree >= d / 2 and g.max_degree <= mu * d and d >= need
    if not pre and not relaxed:
        raise PreconditionViolated(f"need d >= {need:.3g} with degree bounds; got d={d}")
    star, hom = degenerate_table(RainbowRelation(cg), k, budget=budget)
    return FractionBoundReport(k, S, int(sum(hom.ravel())), int(sum(star.ravel())), pre, need)
