"""r-blow-ups of subdivisions via an auxiliary graph on r-sets.

A copy (A, B) of K_{r,r} becomes an edge between the r-sets A and B.  Walks in
the auxiliary graph are degenerate when two of their r-sets meet, so the
subdivision machinery runs unchanged with the r-set intersection relation.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, PreconditionViolated
from .graph import Graph, norm_edge
from .params import PipelineParams, derive_seed
from .subdivision import (
    SubdivisionCertificate,
    VerifyResult,
    _certificate,
    prepare_host,
    subdivision_core,
)
from .walks import RSetIntersection

RSet = tuple


@dataclass
class KrrCollection:
    r: int
    copies: list                    # (A, B) with A < B, admission order
    cap: int | None = None
    enumerated: int = 0
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.copies)

    def codegrees(self) -> dict:
        """(A, u) -> number of copies (A, B) with u in B, both orientations."""
        cnt: dict = defaultdict(int)
        for A, B in self.copies:
            for u in B:
                cnt[(A, u)] += 1
            for u in A:
                cnt[(B, u)] += 1
        return cnt

    def max_codegree(self) -> int:
        return max(self.codegrees().values(), default=0)

    def lines(self) -> list[str]:
        return [" ".join(map(str, A)) + " | " + " ".join(map(str, B)) for A, B in self.copies]

    @classmethod
    def from_lines(cls, lines, cap=None) -> "KrrCollection":
        copies = []
        r = 0
        for line in lines:
            line = line.split("#")[0].strip()
            if not line:
                continue
            a, b = line.split("|")
            A, B = tuple(sorted(map(int, a.split()))), tuple(sorted(map(int, b.split())))
            r = len(A)
            copies.append((min(A, B), max(A, B)))
        return cls(r, copies, cap, len(copies))


def enumerate_krr(g: Graph, r: int, budget: int | None = 10 ** 7) -> list[tuple[RSet, RSet]]:
    """All K_{r,r} copies as (A, B) with A < B, in sorted order.

    A ranges over r-subsets of neighbourhoods, B over r-subsets of the common
    neighbourhood of A.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    nbr = [g.neighbour_set(v) for v in range(g.n)]
    cand = set()
    for w in range(g.n):
        if len(g.adj[w]) >= r:
            cand.update(combinations(g.adj[w], r))
    out = []
    work = 0
    for A in sorted(cand):
        common = set(nbr[A[0]])
        for a in A[1:]:
            common &= nbr[a]
        for B in combinations(sorted(common), r):
            work += 1
            if budget is not None and work > budget:
                raise BudgetExceeded(f"K_{{{r},{r}}} enumeration exceeded {budget}", partial=out)
            if A < B:
                out.append((A, B))
    return out


def build_krr_collection(g: Graph, r: int, cap: int | None = None, budget: int | None = 10 ** 7,
                         seed=None, allow_partial: bool = False) -> KrrCollection:
    """Greedy collection of K_{r,r} copies in which every (A, u) codegree stays <= cap.

    Copies are admitted in a seeded random order (sorted order without a seed).
    When the enumeration budget runs out, BudgetExceeded carries the partial
    collection unless ``allow_partial`` is set, in which case it is returned
    flagged as truncated.
    """
    truncated = False
    try:
        copies = enumerate_krr(g, r, budget)
    except BudgetExceeded as exc:
        copies, truncated = exc.partial, True
    if seed is not None:
        perm = np.random.default_rng(derive_seed(seed, "krr")).permutation(len(copies))
        copies = [copies[i] for i in perm]
    cnt: dict = defaultdict(int)
    kept = []
    for A, B in copies:
        if cap is not None:
            if any(cnt[(A, u)] >= cap for u in B) or any(cnt[(B, u)] >= cap for u in A):
                continue
        for u in B:
            cnt[(A, u)] += 1
        for u in A:
            cnt[(B, u)] += 1
        kept.append((A, B))
    col = KrrCollection(r, kept, cap, len(copies), truncated)
    if truncated and not allow_partial:
        raise BudgetExceeded(f"enumeration budget {budget} exhausted; partial collection attached", partial=col)
    return col


def check_collection(g: Graph, col: KrrCollection) -> int:
    """Independent re-check: every copy is a K_{r,r} in g; returns the max codegree."""
    for A, B in col.copies:
        if len(A) != col.r or len(B) != col.r or set(A) & set(B):
            raise PreconditionViolated(f"malformed copy {A} | {B}")
        for a in A:
            for b in B:
                if not g.has_edge(a, b):
                    raise PreconditionViolated(f"copy {A} | {B} misses edge ({a}, {b})")
    worst = 0
    for A, B in col.copies:
        for side, other in ((A, B), (B, A)):
            for u in other:
                c = sum(1 for A2, B2 in col.copies
                        if (A2 == side and u in B2) or (B2 == side and u in A2))
                worst = max(worst, c)
    if col.cap is not None and worst > col.cap:
        raise PreconditionViolated(f"codegree {worst} exceeds cap {col.cap}")
    return worst


@dataclass
class AuxiliaryGraph:
    rsets: list                     # id -> r-set
    graph: Graph
    index: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.rsets[0]) if self.rsets else 0


def auxiliary_graph(col: KrrCollection) -> AuxiliaryGraph:
    """Vertices are the r-sets that appear in the collection, edges its copies."""
    rsets = sorted({A for A, _ in col.copies} | {B for _, B in col.copies})
    index = {R: i for i, R in enumerate(rsets)}
    edges = sorted({norm_edge(index[A], index[B]) for A, B in col.copies})
    return AuxiliaryGraph(rsets, Graph(len(rsets), edges), index)


def intersection_counts(aux: AuxiliaryGraph) -> int:
    """max over (u, v) of #{w in N(v) : R_u and R_w intersect}."""
    holders: dict = defaultdict(list)
    for i, R in enumerate(aux.rsets):
        for a in R:
            holders[a].append(i)
    worst = 0
    for v in range(aux.graph.n):
        cnt: dict = defaultdict(int)
        for w in aux.graph.adj[v]:
            for u in {u for a in aux.rsets[w] for u in holders[a]}:
                cnt[u] += 1
        worst = max(worst, max(cnt.values(), default=0))
    return worst


def intersection_relation_check(aux: AuxiliaryGraph, t: int) -> int:
    """t minus the largest number of neighbours of a vertex whose r-sets meet a given r-set."""
    return t - intersection_counts(aux)


@dataclass
class BlowupCertificate:
    r: int
    base: SubdivisionCertificate    # over auxiliary vertex ids
    rsets: dict                     # auxiliary id -> r-set (only the ids used)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"r": self.r, "base": self.base.to_dict(),
                "rsets": {str(k): list(v) for k, v in sorted(self.rsets.items())},
                "params": self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "BlowupCertificate":
        return cls(int(d["r"]), SubdivisionCertificate.from_dict(d["base"]),
                   {int(k): tuple(v) for k, v in d["rsets"].items()}, d.get("params", {}))

    def expanded_edges(self) -> list[tuple[int, int]]:
        """Edges of g spanned by the blow-up, sorted."""
        out = set()
        for path in self.base.paths.values():
            for a, b in zip(path, path[1:]):
                for u in self.rsets[a]:
                    for v in self.rsets[b]:
                        out.add(norm_edge(u, v))
        return sorted(out)


def _s_formula(m: int, r: int, k: int) -> int:
    return math.comb(m, 2) * r * k


def find_blowup_subdivision(g: Graph, r: int, m: int, params: PipelineParams | None = None, seed=None,
                            cap: int | None = None, t: int | None = None,
                            budget: int | None = 10 ** 7) -> BlowupCertificate:
    """r-blow-up of a K_m-subdivision, found as a subdivision of the auxiliary graph."""
    params = params or PipelineParams()
    col = build_krr_collection(g, r, cap, budget, derive_seed(seed, "collection") if cap is not None else None)
    aux = auxiliary_graph(col)
    if aux.graph.m == 0:
        from .errors import NoCliqueOfGoodPairs
        raise NoCliqueOfGoodPairs(f"no K_{{{r},{r}}} copies")
    worst = intersection_counts(aux)
    t_used = worst if t is None else t
    if t_used - worst < 0 and not params.relaxed:
        raise PreconditionViolated(f"intersection count {worst} exceeds t = {t_used}")
    host = prepare_host(aux.graph, params, seed)
    H = host.graph
    rel = RSetIntersection(H, [aux.rsets[H.label(v)] for v in range(H.n)], t=t_used)
    core = subdivision_core(host, rel, m, params, seed)
    ar = host.expander
    n_walk = H.n
    d = float(ar.graph.m * 2 / max(ar.graph.n, 1))
    S_claim = (d / (2 ** 10 * params.k ** 3 * t_used * ar.mu * n_walk ** (1 / params.k))) ** 0.5 if t_used else None
    extra = {"collection_size": len(col), "collection_enumerated": col.enumerated, "cap": cap,
             "aux_n": aux.graph.n, "aux_m": aux.graph.m, "intersection_max": worst, "t": t_used,
             "s_formula": _s_formula(m, r, params.k), "S_claim": S_claim,
             "S_claim_vacuous": S_claim is None or S_claim <= 1,
             "connector_attempts": core.attempts}
    base = _certificate(aux.graph, host, core.branch, core.connectors, params, seed, core.oracle,
                        params.k, extra)
    used = set(base.branch) | {v for p in base.paths.values() for v in p}
    return BlowupCertificate(r, base, {v: tuple(aux.rsets[v]) for v in sorted(used)}, base.params)


def verify_blowup(g: Graph, cert: BlowupCertificate) -> VerifyResult:
    """Disjoint r-sets, full bicliques between consecutive r-sets, subdivision structure."""
    try:
        base = cert.base
        Z = list(base.branch)
        if len(set(Z)) != len(Z):
            return VerifyResult(False, "RepeatedBranch", str(Z))
        want = {norm_edge(a, b) for a, b in combinations(Z, 2)}
        if want != {norm_edge(*k) for k in base.paths}:
            return VerifyResult(False, "WrongPairs", str(sorted(base.paths)))
        seen: dict[int, object] = {z: "branch" for z in Z}
        for key, path in base.paths.items():
            if len(path) < 2 or {path[0], path[-1]} != set(key):
                return VerifyResult(False, "WrongEnds", f"{key}: {path}")
            if base.max_length is not None and len(path) - 1 > base.max_length:
                return VerifyResult(False, "TooLong", f"{key}: {len(path) - 1}")
            for v in path[1:-1]:
                if v in seen:
                    return VerifyResult(False, "VertexCollision", f"auxiliary vertex {v} on {seen[v]} and {key}")
                seen[v] = key
        owner: dict[int, int] = {}
        for v in seen:
            R = cert.rsets.get(v)
            if R is None or len(R) != cert.r or len(set(R)) != cert.r:
                return VerifyResult(False, "BadRSet", f"auxiliary vertex {v}: {R}")
            for a in R:
                if not 0 <= a < g.n:
                    return VerifyResult(False, "InvalidVertex", str(a))
                if a in owner:
                    return VerifyResult(False, "RSetOverlap", f"vertex {a} in r-sets of {owner[a]} and {v}")
                owner[a] = v
        for key, path in base.paths.items():
            for x, y in zip(path, path[1:]):
                for u in cert.rsets[x]:
                    for w in cert.rsets[y]:
                        if not g.has_edge(u, w):
                            return VerifyResult(False, "MissingBicliqueEdge", f"{key}: ({u}, {w})")
        return VerifyResult(True)
    except Exception as exc:
        return VerifyResult(False, "Malformed", repr(exc))
