"""d-minimal subgraphs, (d, eta, eps)-expanders and almost-regular expanders.

A graph is d-minimal when its average degree is at least d but every proper
subgraph has average degree below d.  It is a (d, eta, eps)-expander when it is
d-minimal and every vertex set S with |S| <= (1 - eps) n spans average degree
at most (1 - eta) d.

Small graphs (n <= ``exact_max_n``) are checked over all vertex subsets.  For
larger graphs a spectral certificate is attempted: with c = (1 - lambda2)
delta^2 / 2m every |S| = s obeys

    2 e(S) <= min(Delta s - c s (n - s),  s (s - 1),  2m - delta (n - s) - c s (n - s))

because Phi(S) >= 1 - lambda2.  If that bound settles both conditions for every
s the evidence is ``ConductanceSufficient``; otherwise a heuristic search for a
violating set runs and a clean result is only ``HeuristicNoViolationFound``.
"""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegreeTooSmall,
    HeuristicInconclusive,
    PreconditionViolated,
    RetriesExhausted,
    ThresholdUnreachable,
    ViolationFound,
)
from .graph import Bipartition, Graph, average_degree, try_bipartition
from .subsets import mask_to_set, subset_tables

EXACT = "ExactSubsetCheck"
CONDUCTANCE = "ConductanceSufficient"
HEURISTIC = "HeuristicNoViolationFound"
TOL = 1e-9


def log2(n: float) -> float:
    return math.log2(n) if n > 1 else 0.0


@dataclass(frozen=True)
class ExpanderParams:
    d: Fraction
    eta: float
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "d", Fraction(self.d).limit_denominator(10**9))
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if not 0 < self.eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        if self.d < 0:
            raise ValueError("d must be non-negative")

    def as_dict(self) -> dict:
        return {"d": float(self.d), "eta": self.eta, "eps": self.eps}


@dataclass
class ExpanderCertificate:
    params: ExpanderParams
    evidence: str
    holds: bool
    details: dict = field(default_factory=dict)
    witness_violation: list[int] | None = None
    reason: str | None = None
    relaxed: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.evidence == EXACT and self.holds

    def as_dict(self) -> dict:
        return {"params": self.params.as_dict(), "evidence": self.evidence, "holds": self.holds,
                "details": self.details, "witness_violation": self.witness_violation,
                "reason": self.reason, "relaxed": self.relaxed}


def _size_cap(n: int, eps: float) -> int:
    return int(math.floor((1 - eps) * n + TOL))


# -- d-minimality ----------------------------------------------------------------------

def _peel_vertices(n: int, adj: list[set], alive: np.ndarray, e: int, d: Fraction) -> int:
    """Delete the lowest-index vertex v with 2(e - deg v) >= d (n - 1) until none is left."""
    deg = np.array([len(adj[v]) if alive[v] else 0 for v in range(len(adj))], dtype=np.int64)
    num, den = d.numerator, d.denominator
    while n > 1:
        # condition 2 den (e - deg v) >= num (n - 1)
        ok = alive & (2 * den * (e - deg) >= num * (n - 1))
        idx = np.flatnonzero(ok)
        if len(idx) == 0:
            break
        v = int(idx[0])
        for w in adj[v]:
            adj[w].discard(v)
            deg[w] -= 1
        e -= len(adj[v])
        adj[v] = set()
        alive[v] = False
        deg[v] = 0
        n -= 1
    return e


def _trim_edges(adj: list[set], alive: np.ndarray, e: int, n: int, d: Fraction) -> int:
    """Drop edges while 2(e - 1) >= d n, taking the edge of largest endpoint degree sum."""
    num, den = d.numerator, d.denominator
    while e > 0 and 2 * den * (e - 1) >= num * n:
        best = None
        for u in np.flatnonzero(alive):
            u = int(u)
            for w in adj[u]:
                if u < w:
                    key = (-(len(adj[u]) + len(adj[w])), u, w)
                    if best is None or key < best:
                        best = key
        _, u, w = best
        adj[u].discard(w)
        adj[w].discard(u)
        e -= 1
    return e


def _greedy_dense_subgraph(g: Graph, d: Fraction) -> list[int] | None:
    """Min-degree peeling; the first stage whose average degree reaches d."""
    if g.n == 0:
        return None
    deg = g.degrees.astype(np.int64).copy()
    alive = np.ones(g.n, dtype=bool)
    e, n = g.m, g.n
    heap = [(int(deg[v]), v) for v in range(g.n)]
    heapq.heapify(heap)
    while n > 0:
        if Fraction(2 * e, n) >= d and e > 0:
            return [v for v in range(g.n) if alive[v]]
        while heap:
            dv, v = heapq.heappop(heap)
            if alive[v] and dv == deg[v]:
                break
        alive[v] = False
        n -= 1
        e -= int(deg[v])
        for w in g.adj[v]:
            if alive[w]:
                deg[w] -= 1
                heapq.heappush(heap, (int(deg[w]), w))
    return None


def _exact_dense_violation(g: Graph, d: Fraction, exact_max_n: int) -> list[int] | None:
    """Densest proper nonempty S with 2 e(S) >= d |S| (lowest mask on ties)."""
    t = subset_tables(g, exact_max_n)
    inner = t.inner[1:-1].astype(np.int64)
    size = t.size[1:-1].astype(np.int64)
    ok = 2 * d.denominator * inner >= d.numerator * size
    if not ok.any():
        return None
    dens = np.where(ok, inner / np.maximum(size, 1), -1.0)
    return mask_to_set(int(np.argmax(dens)) + 1)


def extract_d_minimal(g: Graph, d, exact_max_n: int = 18) -> Graph:
    """A subgraph of average degree >= d from which no vertex or edge can be dropped.

    Vertices are peeled lowest index first while the rest keeps average degree
    at least d, surplus edges are trimmed, and the densest component is kept.
    For n <= exact_max_n full minimality over all subsets is enforced by
    recursing into any violating set.  If d(G) < d the search starts from the
    densest stage of a min-degree peel (or the exact densest set at small n).
    """
    d = Fraction(d).limit_denominator(10**9)
    if g.n == 0:
        raise ThresholdUnreachable("empty graph")
    if average_degree(g) < d:
        S = _greedy_dense_subgraph(g, d)
        if S is None and g.n <= exact_max_n:
            S = _exact_dense_violation(g, d, exact_max_n)
        if S is None:
            raise ThresholdUnreachable(f"no subgraph with average degree {d} found (d(G) = {average_degree(g)})")
        g = g.induced_subgraph(S)
    while True:
        adj = [set(a) for a in g.adj]
        alive = np.ones(g.n, dtype=bool)
        e = g.m
        while True:
            e = _peel_vertices(int(alive.sum()), adj, alive, e, d)
            e2 = _trim_edges(adj, alive, e, int(alive.sum()), d)
            if e2 == e:
                break
            e = e2
        keep = [v for v in range(g.n) if alive[v]]
        sub_edges = [(u, w) for u in keep for w in adj[u] if u < w]
        h = g.edge_subgraph(sub_edges).induced_subgraph(keep)
        comps = h.components()
        if len(comps) > 1:
            best = max(comps, key=lambda c: (Fraction(2 * h.induced_subgraph(c).m, len(c)), -c[0]))
            g = h.induced_subgraph(best)
            continue
        if h.n <= exact_max_n and h.n > 1:
            S = _exact_dense_violation(h, d, exact_max_n)
            if S is not None:
                g = h.induced_subgraph(S)
                continue
        return h


def is_d_minimal_exact(g: Graph, d, exact_max_n: int = 18) -> tuple[bool, list[int] | None]:
    """Exhaustive d-minimality; the witness is a violating vertex set (or None)."""
    d = Fraction(d).limit_denominator(10**9)
    num, den = d.numerator, d.denominator
    if 2 * den * g.m < num * g.n:
        return False, None
    if g.m and 2 * den * (g.m - 1) >= num * g.n:
        return False, list(range(g.n))
    if g.n <= 1:
        return True, None
    S = _exact_dense_violation(g, d, exact_max_n)
    return (S is None), S


def min_degree_of_minimal(g: Graph, d) -> bool:
    return g.min_degree >= Fraction(d) / 2


# -- verification ---------------------------------------------------------------------

def _exact_verify(g: Graph, p: ExpanderParams, exact_max_n: int) -> ExpanderCertificate:
    n = g.n
    t = subset_tables(g, exact_max_n)
    inner = t.inner.astype(np.int64)
    size = t.size.astype(np.int64)
    cap = _size_cap(n, p.eps)
    d = float(p.d)
    small = (size >= 1) & (size <= cap)
    bad = small & (2 * inner > (1 - p.eta) * d * size + TOL)
    checked = int(small.sum())
    details = {"subsets_checked": checked, "size_cap": cap}
    if bad.any():
        w = mask_to_set(int(np.flatnonzero(bad)[0]))
        return ExpanderCertificate(p, EXACT, False, details, w, "dense small set")
    ok, w = is_d_minimal_exact(g, p.d, exact_max_n)
    details["subsets_checked"] = (1 << n) - 2 + checked
    if not ok:
        return ExpanderCertificate(p, EXACT, False, details, w, "not d-minimal")
    return ExpanderCertificate(p, EXACT, True, details)


def spectral_bounds(g: Graph, lam2: float) -> np.ndarray:
    """Upper bound on 2 e(S) for each size s = 0..n (see module docstring)."""
    n, m2 = g.n, 2 * g.m
    s = np.arange(n + 1, dtype=float)
    delta, Delta = float(g.min_degree), float(g.max_degree)
    c = max(0.0, 1.0 - lam2) * delta * delta / m2 if m2 else 0.0
    b1 = Delta * s - c * s * (n - s)
    b2 = s * (s - 1)
    b3 = m2 - delta * (n - s) - c * s * (n - s)
    return np.minimum(np.minimum(b1, b2), b3)


def _orderings(g: Graph, vector: np.ndarray | None) -> list[np.ndarray]:
    out = []
    if vector is not None:
        score = vector / np.sqrt(g.degrees)
        asc = np.argsort(score, kind="stable")
        out += [asc, asc[::-1].copy()]
    out.append(_peel_order(g)[::-1].copy())
    return out


def _peel_order(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.int64).copy()
    alive = np.ones(g.n, dtype=bool)
    heap = [(int(deg[v]), v) for v in range(g.n)]
    heapq.heapify(heap)
    order = []
    while heap:
        dv, v = heapq.heappop(heap)
        if not alive[v] or dv != deg[v]:
            continue
        alive[v] = False
        order.append(v)
        for w in g.adj[v]:
            if alive[w]:
                deg[w] -= 1
                heapq.heappush(heap, (int(deg[w]), w))
    return np.array(order, dtype=np.int64)


def _prefix_inner(g: Graph, order: np.ndarray) -> np.ndarray:
    """e(first i+1 vertices of order) for every i."""
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    if g.m == 0:
        return np.zeros(g.n, dtype=np.int64)
    e = np.array(g.edges)
    last = np.maximum(pos[e[:, 0]], pos[e[:, 1]])
    return np.cumsum(np.bincount(last, minlength=g.n))


def heuristic_violation(g: Graph, p: ExpanderParams, vector: np.ndarray | None = None) -> list[int] | None:
    """First sweep or peel prefix of size <= (1 - eps) n that is too dense."""
    cap = _size_cap(g.n, p.eps)
    d = float(p.d)
    for order in _orderings(g, vector):
        inner = _prefix_inner(g, order)
        sizes = np.arange(1, g.n + 1)
        bad = (sizes <= cap) & (2 * inner > (1 - p.eta) * d * sizes + TOL)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            return sorted(int(v) for v in order[: i + 1])
    return None


def verify_expander(g: Graph, params: ExpanderParams, exact_max_n: int = 18,
                    warn: bool = True) -> ExpanderCertificate:
    """Certificate for the (d, eta, eps)-expander property with its evidence level."""
    from .spectral import spectrum

    if g.n == 0:
        return ExpanderCertificate(params, EXACT, False, reason="empty graph")
    if g.n <= exact_max_n:
        return _exact_verify(g, params, exact_max_n)
    d = params.d
    num, den = d.numerator, d.denominator
    details: dict = {"n": g.n, "min_degree": g.min_degree, "max_degree": g.max_degree}
    if 2 * den * g.m < num * g.n:
        return ExpanderCertificate(params, CONDUCTANCE, False, details, reason="average degree below d")
    if 2 * den * (g.m - 1) >= num * g.n:
        return ExpanderCertificate(params, CONDUCTANCE, False, details, list(range(g.n)),
                                   reason="an edge can be removed")
    if not min_degree_of_minimal(g, d):
        v = int(np.argmin(g.degrees))
        return ExpanderCertificate(params, CONDUCTANCE, False, details,
                                   [u for u in range(g.n) if u != v], reason="vertex of degree below d/2")
    vector = None
    if g.is_connected():
        summ = spectrum(g)
        lam2, vector = summ.lambda2, summ.vector2
        bound = spectral_bounds(g, lam2)
        s = np.arange(g.n + 1)
        cap = _size_cap(g.n, params.eps)
        dd = float(d)
        expand_ok = bool(np.all(bound[1:cap + 1] <= (1 - params.eta) * dd * s[1:cap + 1] - TOL))
        minimal_ok = bool(np.all(bound[1:g.n] < dd * s[1:g.n] - TOL))
        details.update(lambda2=lam2, spectral_expansion=expand_ok, spectral_minimality=minimal_ok)
        if expand_ok and minimal_ok:
            return ExpanderCertificate(params, CONDUCTANCE, True, details)
    else:
        details["connected"] = False
    w = heuristic_violation(g, params, vector)
    if w is not None:
        return ExpanderCertificate(params, HEURISTIC, False, details, w, "dense small set")
    if warn:
        warnings.warn(HeuristicInconclusive(
            f"no violating set found on n={g.n}, but the spectral certificate does not apply"))
    return ExpanderCertificate(params, HEURISTIC, True, details)


@dataclass
class EdgeExpansionReport:
    min_slack: float
    argmin: list[int]
    subsets_checked: int

    def as_dict(self) -> dict:
        return {"min_slack": self.min_slack, "argmin": self.argmin, "subsets_checked": self.subsets_checked}


def edge_expansion_check(g: Graph, params: ExpanderParams, exact_max_n: int = 18) -> EdgeExpansionReport:
    """min over 1 <= |S| <= (1-eps) n of e(S, S^c) - (eta d / 2) |S|."""
    t = subset_tables(g, exact_max_n)
    size = t.size.astype(np.int64)
    small = (size >= 1) & (size <= _size_cap(g.n, params.eps))
    slack = t.cut.astype(float) - params.eta * float(params.d) / 2 * size
    slack = np.where(small, slack, np.inf)
    i = int(np.argmin(slack))
    rep = EdgeExpansionReport(float(slack[i]), mask_to_set(i), int(small.sum()))
    if rep.min_slack < -TOL:
        raise ViolationFound(f"set {rep.argmin} has edge-expansion slack {rep.min_slack}")
    return rep


# -- extraction ---------------------------------------------------------------------

def find_violation(g: Graph, params: ExpanderParams, exact_max_n: int = 18) -> list[int] | None:
    """A set of size <= (1 - eps) n and average degree > (1 - eta) d, or None.

    Exact search returns the densest such set; above the threshold the sweep
    and peel prefixes are scanned.
    """
    from .spectral import spectrum

    if g.n <= exact_max_n:
        t = subset_tables(g, exact_max_n)
        inner = t.inner.astype(np.int64)
        size = t.size.astype(np.int64)
        ok = (size >= 1) & (size <= _size_cap(g.n, params.eps))
        ok &= 2 * inner > (1 - params.eta) * float(params.d) * size + TOL
        if not ok.any():
            return None
        dens = np.where(ok, inner / np.maximum(size, 1), -1.0)
        return mask_to_set(int(np.argmax(dens)))
    vector = spectrum(g).vector2 if g.is_connected() else None
    return heuristic_violation(g, params, vector)


@dataclass
class ExtractionTrace:
    levels: list[dict] = field(default_factory=list)


def extract_expander(g: Graph, eps: float = 0.5, exact_max_n: int = 18, eta: float | None = None,
                     trace: ExtractionTrace | None = None, warn: bool = True) -> tuple[Graph, ExpanderCertificate]:
    """Density-increment search for a (d', eta, eps)-expander with eta = eps / (2 log n).

    Each round takes a d-minimal subgraph at the current density and looks for
    a small dense set; if one is found the search restarts inside it.
    """
    if g.n == 0:
        raise ValueError("graph must be nonempty")
    n0 = g.n
    if eta is None:
        eta = eps / (2 * log2(n0)) if n0 > 2 else eps / 2
    eta = min(eta, 0.999)
    if g.m == 0:
        h = g.induced_subgraph([0])
        p = ExpanderParams(0, eta, eps)
        return h, ExpanderCertificate(p, EXACT, True, {"degenerate": True})
    d0 = average_degree(g)
    cur = g.without_isolated()
    while True:
        d = average_degree(cur)
        h = extract_d_minimal(cur, d, exact_max_n)
        p = ExpanderParams(average_degree(h), eta, eps)
        S = find_violation(h, p, exact_max_n)
        if trace is not None:
            trace.levels.append({"n": h.n, "d": float(p.d), "violation_size": None if S is None else len(S)})
        if S is None:
            break
        cur = h.induced_subgraph(S)
    cert = verify_expander(h, p, exact_max_n, warn=warn)
    cert.details["input_average_degree"] = float(d0)
    cert.details["half_density_met"] = bool(p.d >= d0 / 2)
    return h, cert


# -- regularization ----------------------------------------------------------------------

@dataclass
class RegularizeResult:
    graph: Graph
    d: int
    branch: str            # "truncated", "bucket" or "sampled"
    attempts: int
    t: int | None
    d0: float
    relaxed: bool

    @property
    def average_degree(self) -> Fraction:
        return average_degree(self.graph) if self.graph.n else Fraction(0)

    def as_dict(self) -> dict:
        return {"n": self.graph.n, "m": self.graph.m, "d": self.d, "branch": self.branch,
                "attempts": self.attempts, "t": self.t, "d0": self.d0, "relaxed": self.relaxed,
                "max_degree": self.graph.max_degree, "average_degree": float(self.average_degree)}


def regularize_bipartite(g: Graph, d: int, seed=None, relaxed: bool = False,
                         bip: Bipartition | None = None, max_attempts: int = 100) -> RegularizeResult:
    """Subgraph with maximum degree <= d and average degree >= d / (12 log n).

    The larger side A keeps exactly d random edges per vertex.  If that already
    bounds every degree by d the truncated graph is returned.  Otherwise B is
    split into dyadic degree classes and the class carrying most edges is kept;
    if its degrees are small enough it is returned, else A is subsampled with
    probability d / 4t and overloaded B vertices are dropped, retrying until the
    edge count reaches d0 (|A'| + |B'|).
    """
    d = int(d)
    n = g.n
    if bip is None:
        bip = try_bipartition(g)
        if bip is None:
            raise PreconditionViolated("graph is not bipartite")
    if d < 1:
        raise PreconditionViolated("degree target must be positive")
    if g.min_degree < d:
        raise PreconditionViolated(f"minimum degree {g.min_degree} is below d={d}")
    if not relaxed and d < 36 * log2(n):
        raise PreconditionViolated(f"d={d} below 36 log n = {36 * log2(n):.1f}; pass relaxed=True")
    rng = np.random.default_rng(seed)
    A, B = sorted(bip.X), sorted(bip.Y)
    d0 = d / (12 * log2(n)) if n > 1 else 0.0

    trunc = []
    for a in A:
        nb = np.array(g.adj[a])
        pick = nb if len(nb) == d else rng.choice(nb, size=d, replace=False)
        trunc.extend((a, int(b)) for b in pick)
    gp = g.edge_subgraph(trunc)
    degB = gp.degrees
    if gp.max_degree <= d:
        return RegularizeResult(gp.without_isolated(), d, "truncated", 0, None, d0, relaxed)

    mbuckets = max(1, math.ceil(log2(n)))
    bucket_of = {}
    for b in B:
        if degB[b] > 0:
            bucket_of[b] = int(degB[b]).bit_length()  # 2^{i-1} <= deg < 2^i
    weight: dict[int, int] = {}
    for b, i in bucket_of.items():
        weight[i] = weight.get(i, 0) + int(degB[b])
    i = max(sorted(weight), key=lambda j: weight[j])
    t = 1 << (i - 1)
    Bi = {b for b, j in bucket_of.items() if j == i}
    Gi = [(a, b) for a, b in gp.edges if (a in Bi) or (b in Bi)]
    if 2 * t <= d:
        h = gp.edge_subgraph(Gi)
        return RegularizeResult(h.without_isolated(), d, "bucket", 0, t, d0, relaxed)

    p = d / (4 * t)
    side_a = set(A)
    for attempt in range(1, max_attempts + 1):
        Ap = {a for a in A if rng.random() < p}
        es = [(u, v) for u, v in Gi if (u if u in side_a else v) in Ap]
        cnt: dict[int, int] = {}
        for u, v in es:
            b = v if u in side_a else u
            cnt[b] = cnt.get(b, 0) + 1
        Bp = {b for b in Bi if cnt.get(b, 0) <= d}
        keep = [(u, v) for u, v in es if (v if u in side_a else u) in Bp]
        if len(keep) >= d0 * (len(Ap) + len(Bp)) and keep:
            h = gp.edge_subgraph(keep).without_isolated()
            return RegularizeResult(h, d, "sampled", attempt, t, d0, relaxed)
    raise RetriesExhausted(f"no good subsample in {max_attempts} attempts (t={t}, p={p:.3f}, mbuckets={mbuckets})")


def min_degree_core(g: Graph, k: float) -> Graph:
    """Largest induced subgraph with minimum degree >= k (repeated deletion)."""
    deg = g.degrees.astype(np.int64).copy()
    alive = np.ones(g.n, dtype=bool)
    stack = [v for v in range(g.n) if deg[v] < k]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < k:
                    alive[w] = False
                    stack.append(w)
    return g.induced_subgraph(np.flatnonzero(alive))


@dataclass
class AlmostRegularResult:
    graph: Graph
    certificate: ExpanderCertificate
    mu: float
    iterations: int
    history: list[dict]
    relaxed: list[str]
    input_average_degree: float
    bounds: dict

    def as_dict(self) -> dict:
        return {"n": self.graph.n, "m": self.graph.m, "mu": self.mu, "iterations": self.iterations,
                "history": self.history, "relaxed": self.relaxed, "bounds": self.bounds,
                "input_average_degree": self.input_average_degree,
                "certificate": self.certificate.as_dict()}


def almost_regular_expander(g: Graph, eps: float = 0.5, seed=None, relaxed: bool = False,
                            exact_max_n: int = 18, max_iterations: int = 64,
                            target: str = "half") -> AlmostRegularResult:
    """Alternate regularization and expander extraction until 48 log n_l >= sqrt(48 log n_{l-1}).

    ``target`` picks the regularization degree inside the min-degree core:
    ``"half"`` uses ceil(d_i / 2), ``"core"`` uses the core's minimum degree.
    """
    if try_bipartition(g) is None:
        raise PreconditionViolated("graph is not bipartite")
    n = g.n
    dg = float(average_degree(g))
    need = 1e7 * log2(n) ** 3
    notes = []
    if dg < need:
        if not relaxed:
            raise DegreeTooSmall(f"average degree {dg:.1f} below 10^7 (log n)^3 = {need:.3g}")
        notes.append("average degree below 10^7 (log n)^3")
    ss = np.random.SeedSequence(seed)
    cur = g.without_isolated()
    history = []
    prev_n = cur.n
    h, cert = None, None
    for it in range(1, max_iterations + 1):
        di = float(average_degree(cur))
        core = min_degree_core(cur, di / 2)
        dt = math.ceil(di / 2) if target == "half" else core.min_degree
        if not relaxed and dt < 36 * log2(core.n):
            raise DegreeTooSmall(f"regularization target {dt} below 36 log n")
        reg = regularize_bipartite(core, dt, seed=ss.spawn(1)[0], relaxed=relaxed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HeuristicInconclusive)
            h, cert = extract_expander(reg.graph, eps, exact_max_n, warn=False)
        history.append({"iteration": it, "n_in": cur.n, "d_in": di, "core_n": core.n,
                        "target": dt, "regularized": reg.as_dict(), "n_out": h.n,
                        "d_out": float(average_degree(h)), "eta": cert.params.eta})
        stop = 48 * log2(h.n) >= math.sqrt(48 * log2(prev_n)) if prev_n > 1 else True
        if stop or h.n <= 2:
            break
        prev_n = h.n
        cur = h
    else:
        it = max_iterations
    if cert.evidence == HEURISTIC and cert.holds:
        warnings.warn(HeuristicInconclusive(f"expander on n={h.n} only heuristically verified"))
    dh = float(average_degree(h))
    mu = h.max_degree / dh if dh else math.inf
    nn = max(h.n, 2)
    bounds = {
        "d_prime_floor": dg / (2500 * log2(n) ** 2) if n > 1 else 0.0,
        "d_prime_ok": dh >= dg / (2500 * log2(n) ** 2) if n > 1 else True,
        "max_degree_cap": 2500 * log2(nn) ** 2 * dh,
        "max_degree_ok": h.max_degree <= 2500 * log2(nn) ** 2 * dh,
    }
    cert.relaxed = notes + cert.relaxed
    return AlmostRegularResult(h, cert, mu, it, history, notes, dg, bounds)
