"""Rainbow paths and rainbow K_m-subdivisions in almost-regular expanders."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    IterationCapExceeded,
    NoCliqueOfGoodPairs,
    NoGoodPair,
    PreconditionViolated,
    RoundsExhausted,
)
from .graph import Bipartition, ColouredGraph, Graph, bipartite_subgraph, bipartition, norm_edge
from .params import PipelineParams, derive_seed, formula_params
from .walks import (
    GOOD,
    DEFAULT_BUDGET,
    RainbowRelation,
    TokenRelation,
    VertexEquality,
    WalkSampler,
    classify_pair,
    python_rng,
)


# -- paths ---------------------------------------------------------------------------

def path_colours(cg: ColouredGraph, path: Sequence[int]) -> list[int]:
    return [cg.colour(a, b) for a, b in zip(path, path[1:])]


def is_rainbow_path(cg: ColouredGraph, path: Sequence[int]) -> bool:
    g = cg.graph
    if len(set(path)) != len(path):
        return False
    if any(not g.has_edge(a, b) for a, b in zip(path, path[1:])):
        return False
    cols = path_colours(cg, path)
    return len(set(cols)) == len(cols)


def shortcut_walk(walk: Sequence[int]) -> list[int]:
    """Remove closed detours: cut back to the first earlier copy of any repeated vertex."""
    out: list[int] = []
    where: dict[int, int] = {}
    for v in walk:
        if v in where:
            cut = where[v]
            for w in out[cut + 1:]:
                del where[w]
            out = out[: cut + 1]
        else:
            where[v] = len(out)
            out.append(v)
    return out


# -- theta sampler --------------------------------------------------------------------

def theta_sampler(g: Graph | ColouredGraph, x: int, y: int, k: int, s: int,
                  bad: Callable[[tuple, tuple], bool], seed=None, max_rounds: int = 200,
                  single_ok: Callable[[tuple], bool] | None = None,
                  sampler: WalkSampler | None = None) -> list[tuple[int, ...]]:
    """Sample s independent uniform x -> y walks until no ordered pair is bad.

    ``bad(P, Q)`` decides whether the closed walk P . reverse(Q) is in the bad
    family.  ``single_ok`` optionally filters individual walks.
    """
    sampler = sampler or WalkSampler(g, x, y, k)
    rng = python_rng(seed)
    checked = failed = 0
    for _ in range(max_rounds):
        walks = [sampler.sample(rng) for _ in range(s)]
        if single_ok is not None and not all(single_ok(w) for w in walks):
            failed += 1
            checked += 1
            continue
        ok = True
        for i in range(s):
            for j in range(s):
                if i != j:
                    checked += 1
                    if bad(walks[i], walks[j]):
                        failed += 1
                        ok = False
                        break
            if not ok:
                break
        if ok:
            return walks
    frac = failed / checked if checked else None
    raise RoundsExhausted(f"no acceptable {s}-sample for ({x}, {y}) in {max_rounds} rounds", bad_fraction=frac)


def disjoint_rainbow_paths(cg: ColouredGraph | None, x: int, y: int, k: int, s: int, seed=None,
                           max_rounds: int = 200, relation: TokenRelation | None = None,
                           sampler: WalkSampler | None = None) -> list[tuple[int, ...]]:
    """s rainbow x -> y paths of length k, pairwise colour-disjoint and internally disjoint.

    With another token relation the same holds for its tokens; ``cg`` may then be None.
    """
    rel = relation or RainbowRelation(cg)
    walks = theta_sampler(rel.graph, x, y, k, s, lambda P, Q: not rel.clean(P, Q), seed, max_rounds,
                          single_ok=rel.is_distinct, sampler=sampler)
    for i, P in enumerate(walks):
        assert rel.is_distinct(P)
        for Q in walks[i + 1:]:
            assert not set(rel.interior_tokens(P)) & set(rel.interior_tokens(Q))
    return walks


# -- reach sets ---------------------------------------------------------------------

@dataclass
class AvoidSet:
    vertices: frozenset = frozenset()
    colours: frozenset = frozenset()

    def __len__(self) -> int:
        return len(self.vertices) + len(self.colours)

    def union(self, vertices: Iterable[int] = (), colours: Iterable[int] = ()) -> "AvoidSet":
        return AvoidSet(self.vertices | frozenset(vertices), self.colours | frozenset(colours))


@dataclass
class ReachSet:
    source: int
    paths: dict = field(default_factory=dict)        # u -> vertex tuple from source to u
    colours: dict = field(default_factory=dict)      # u -> frozenset of path colours
    usage: dict = field(default_factory=dict)        # colour -> number of paths using it
    bad_colours: frozenset = frozenset()
    rounds: int = 1

    @property
    def U(self) -> set[int]:
        return set(self.paths)

    def add(self, u: int, path: tuple, cols: frozenset) -> None:
        self.paths[u] = path
        self.colours[u] = cols
        for c in cols:
            self.usage[c] = self.usage.get(c, 0) + 1


def rainbow_reach(cg: ColouredGraph, x: int, F: AvoidSet | None = None, ell: int = 2) -> ReachSet:
    """Layered growth of rainbow paths from x for ell + 1 rounds."""
    F = F or AvoidSet()
    g = cg.graph
    out = ReachSet(x)
    out.add(x, (x,), frozenset())
    frontier = [x]
    for _ in range(ell + 1):
        nxt = []
        for u in sorted(frontier):
            pu, cu = out.paths[u], out.colours[u]
            for w in g.adj[u]:
                if w in out.paths or w in F.vertices:
                    continue
                c = cg.colour(u, w)
                if c in F.colours or c in cu:
                    continue
                out.add(w, pu + (w,), cu | {c})
                nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    return out


def rainbow_reach_robust(cg: ColouredGraph, x: int, F: AvoidSet | None = None, ell: int = 2,
                         q: float = 2) -> ReachSet:
    """Reach set in which no colour is used by more than n/q of the stored paths.

    Paths are admitted in order of (length, vertex) while the cap allows;
    colours that hit the cap become bad and the remaining vertices are retried
    with rainbow paths avoiding the bad colours, until nothing new is admitted.
    """
    F = F or AvoidSet()
    n = cg.n
    cap = n / q
    limit = 2 * q * max(ell, 1)
    out = ReachSet(x)
    out.add(x, (x,), frozenset())
    bad: set[int] = set()
    rounds = 0
    while True:
        rounds += 1
        if rounds > limit + 1:
            raise IterationCapExceeded(f"robust reach did not settle in {limit} rounds")
        trial = rainbow_reach(cg, x, F.union(colours=bad), ell)
        added = 0
        for u in sorted(trial.paths, key=lambda v: (len(trial.paths[v]), v)):
            if u in out.paths:
                continue
            cols = trial.colours[u]
            if any(out.usage.get(c, 0) + 1 > cap for c in cols):
                continue
            out.add(u, trial.paths[u], cols)
            added += 1
        newly_bad = {c for c, k in out.usage.items() if k >= cap} - bad
        if len(bad | newly_bad) > limit:
            raise IterationCapExceeded(f"{len(bad | newly_bad)} saturated colours exceed 2 q ell = {limit}")
        if not newly_bad or not added:
            bad |= newly_bad
            break
        bad |= newly_bad
    out.bad_colours = frozenset(bad)
    out.rounds = rounds
    assert all(k <= cap for k in out.usage.values())
    return out


# -- good-pair oracle --------------------------------------------------------------------

class GoodPairOracle:
    """Lazy, cached good-pair verdicts (symmetric in the pair)."""

    def __init__(self, relation: TokenRelation, k: int, s: int, mode: str = "exact", samples: int = 2000,
                 seed=None, budget: int | None = DEFAULT_BUDGET):
        self.relation = relation
        self.k, self.s, self.mode = k, s, mode
        self.samples, self.seed = samples, seed
        self.budget = budget
        self.cache: dict = {}
        self.stats: dict = {}

    def verdict(self, x: int, y: int) -> str:
        key = (min(x, y), max(x, y))
        if key not in self.cache:
            v, st = classify_pair(self.relation.graph, key[0], key[1], self.k, self.s, self.mode,
                                  self.samples, derive_seed(self.seed, "pair", *key), self.relation, self.budget)
            self.cache[key] = v
            if st is not None:
                self.stats[key] = st
        return self.cache[key]

    def good(self, x: int, y: int) -> bool:
        return self.verdict(x, y) == GOOD


# -- certificates -------------------------------------------------------------------

@dataclass
class SubdivisionCertificate:
    branch: list[int]
    paths: dict                 # (a, b) -> list of vertices, a < b, in root coordinates
    colours: dict               # (a, b) -> list of colours along the path
    params: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    max_length: int | None = None

    def to_dict(self) -> dict:
        keys = sorted(self.paths)
        return {
            "branch_vertices": list(self.branch),
            "paths": [{"ends": list(k), "vertices": list(self.paths[k])} for k in keys],
            "colours": [{"ends": list(k), "colours": list(self.colours[k])} for k in keys if k in self.colours],
            "max_length": self.max_length,
            "params": self.params,
            "evidence": self.evidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubdivisionCertificate":
        paths = {tuple(p["ends"]): list(p["vertices"]) for p in d["paths"]}
        cols = {tuple(p["ends"]): list(p["colours"]) for p in d.get("colours", [])}
        return cls(list(d["branch_vertices"]), paths, cols, d.get("params", {}), d.get("evidence", {}),
                   d.get("max_length"))


@dataclass
class VerifyResult:
    ok: bool
    reason: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "reason": self.reason, "detail": self.detail}


def verify_subdivision(cg: ColouredGraph | Graph, cert: SubdivisionCertificate) -> VerifyResult:
    """Check a K_m-subdivision certificate against the host graph (rainbow when coloured)."""
    try:
        coloured = isinstance(cg, ColouredGraph)
        g = cg.graph if coloured else cg
        Z = list(cert.branch)
        if len(set(Z)) != len(Z):
            return VerifyResult(False, "RepeatedBranch", str(Z))
        if any(not 0 <= z < g.n for z in Z):
            return VerifyResult(False, "InvalidVertex", str(Z))
        want = {norm_edge(a, b) for a, b in combinations(Z, 2)}
        got = {norm_edge(*k) for k in cert.paths}
        if want != got:
            return VerifyResult(False, "WrongPairs", f"expected {sorted(want)}, got {sorted(got)}")
        all_cols: dict[int, tuple] = {}
        interiors: dict[int, tuple] = {}
        zset = set(Z)
        for key, path in cert.paths.items():
            a, b = key
            if not path or {path[0], path[-1]} != {a, b} or len(path) < 2:
                return VerifyResult(False, "WrongEnds", f"{key}: {path}")
            if len(set(path)) != len(path):
                return VerifyResult(False, "RepeatedVertex", f"{key}: {path}")
            if cert.max_length is not None and len(path) - 1 > cert.max_length:
                return VerifyResult(False, "TooLong", f"{key}: length {len(path) - 1} > {cert.max_length}")
            for u, v in zip(path, path[1:]):
                if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
                    return VerifyResult(False, "MissingEdge", f"{key}: ({u}, {v})")
            cols = path_colours(cg, path) if coloured else []
            if coloured and key in cert.colours and list(cert.colours[key]) != cols:
                return VerifyResult(False, "ColourMismatch", f"{key}: recorded {cert.colours[key]}, actual {cols}")
            for c in cols:
                if c in all_cols:
                    return VerifyResult(False, "ColourCollision", f"colour {c} on {all_cols[c]} and {key}")
                all_cols[c] = key
            for v in path[1:-1]:
                if v in zset:
                    return VerifyResult(False, "BranchInterior", f"{key} passes through branch vertex {v}")
                if v in interiors:
                    return VerifyResult(False, "VertexCollision", f"vertex {v} on {interiors[v]} and {key}")
                interiors[v] = key
        return VerifyResult(True)
    except Exception as exc:  # a malformed certificate is a failure, not a crash
        return VerifyResult(False, "Malformed", repr(exc))


# -- connecting pairs -------------------------------------------------------------------

@dataclass
class ConnectResult:
    path: list[int]
    via: tuple[int, int]
    pairs_tried: int
    reach_sizes: tuple[int, int]


def rainbow_connect(cg: ColouredGraph, x: int, y: int, M: AvoidSet | None, params: PipelineParams,
                    oracle: GoodPairOracle, bip: Bipartition, seed=None, max_pairs: int = 400) -> ConnectResult:
    """Rainbow x-y path of length <= 2(ell + 1) + k avoiding M.

    Splices P(u) . T(uv) . reverse(Q(v)) over reach paths from both ends and a
    connector T from a good pair (u, v) in X, then shortcuts repeated vertices.
    """
    M = M or AvoidSet()
    if x in M.vertices or y in M.vertices:
        raise NoGoodPair("an endpoint lies in the avoid set")
    if x == y:
        raise PreconditionViolated("endpoints must differ")
    g = cg.graph
    Rx = rainbow_reach_robust(cg, x, M.union(vertices=[y]), params.ell, params.q)
    Ry = rainbow_reach_robust(cg, y, M.union(vertices=[x]), params.ell, params.q)
    Ux = sorted((u for u in Rx.paths if u in bip.X), key=lambda u: (len(Rx.paths[u]), u))
    Uy = sorted((v for v in Ry.paths if v in bip.X), key=lambda v: (len(Ry.paths[v]), v))
    tried = 0
    sampler_failures = 0
    for u in Ux:
        for v in Uy:
            if u == v:
                continue
            if Rx.colours[u] & Ry.colours[v]:
                continue
            if tried >= max_pairs:
                break
            tried += 1
            if not oracle.good(u, v):
                continue
            banned_c = Rx.colours[u] | Ry.colours[v] | M.colours
            try:
                T_all = disjoint_rainbow_paths(cg, u, v, params.k, params.s,
                                               seed=derive_seed(seed, "connect", u, v),
                                               max_rounds=params.max_rounds, relation=oracle.relation)
            except RoundsExhausted:
                sampler_failures += 1
                continue
            for T in T_all:
                if set(path_colours(cg, T)) & banned_c:
                    continue
                if set(T[1:-1]) & M.vertices:
                    continue
                walk = list(Rx.paths[u]) + list(T[1:]) + list(reversed(Ry.paths[v]))[1:]
                path = shortcut_walk(walk)
                assert path[0] == x and path[-1] == y and is_rainbow_path(cg, path)
                return ConnectResult(path, (u, v), tried, (len(Rx.paths), len(Ry.paths)))
    if sampler_failures:
        raise RoundsExhausted(f"sampler failed on {sampler_failures} good pairs for ({x}, {y})")
    raise NoGoodPair(f"no usable pair for ({x}, {y}) after {tried} candidates "
                     f"(reach {len(Rx.paths)} / {len(Ry.paths)})")


# -- pipelines --------------------------------------------------------------------------

@dataclass
class PreparedHost:
    """The bipartite almost-regular expander on which searches run."""

    graph: Graph                   # expander; labels point into the input graph
    bip: Bipartition
    expander: object | None        # AlmostRegularResult, or None when the input is the host

    def evidence(self) -> dict:
        out = {"host_n": self.graph.n, "host_m": self.graph.m,
               "X_size": len(self.bip.X), "Y_size": len(self.bip.Y)}
        ar = self.expander
        if ar is not None:
            out.update({"mu": ar.mu, "iterations": ar.iterations, "relaxed": ar.relaxed,
                        "certificate": ar.certificate.as_dict()})
        return out


def prepare_host(g: Graph | ColouredGraph, params: PipelineParams, seed=None) -> PreparedHost:
    """Spanning bipartite subgraph with many edges, then an almost-regular expander inside it."""
    from .expander import almost_regular_expander

    g = g.graph if isinstance(g, ColouredGraph) else g
    gb = bipartite_subgraph(g, derive_seed(seed, "bipartite")).without_isolated()
    if gb.m == 0:
        raise NoCliqueOfGoodPairs("graph has no edges")
    ar = almost_regular_expander(gb, params.eps, derive_seed(seed, "expander"), relaxed=params.relaxed,
                                 exact_max_n=params.exact_max_n, target=params.target)
    return PreparedHost(ar.graph, bipartition(ar.graph), ar)


def params_record(params: PipelineParams, n: int, m: int, seed) -> dict:
    return {"used": params.as_dict(), "formula": formula_params(max(n, 2), params.eps, m).as_dict(), "seed": seed}


def find_good_clique(oracle: GoodPairOracle, X: Sequence[int], m: int, seed=None,
                     max_starts: int = 25) -> list[int]:
    """Greedy m-set of pairwise good vertices of X (candidates in seeded random order)."""
    order = [int(v) for v in np.random.default_rng(derive_seed(seed, "clique")).permutation(sorted(X))]
    for start in range(min(max_starts, len(order))):
        Z = [order[start]]
        if m == 1:
            return Z
        for v in order[start + 1:] + order[:start]:
            if all(oracle.good(v, z) for z in Z):
                Z.append(v)
                if len(Z) == m:
                    return Z
    raise NoCliqueOfGoodPairs(f"no {m} pairwise good vertices found from {min(max_starts, len(order))} starts")


@dataclass
class CoreResult:
    branch: list[int]
    connectors: dict            # (a, b) -> host path, a < b
    attempts: int
    oracle: GoodPairOracle


def subdivision_core(host: PreparedHost, rel: TokenRelation, m: int, params: PipelineParams,
                     seed=None) -> CoreResult:
    """Good clique Z in X, then pairwise token-disjoint connectors picked greedily from spares.

    A connector is admissible when its interior tokens miss the tokens of Z and
    of every connector picked before it.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    oracle = GoodPairOracle(rel, params.k, params.s, params.mode, params.samples,
                            derive_seed(seed, "oracle"), params.budget)
    Z = find_good_clique(oracle, sorted(host.bip.X), m, seed)
    pairs = list(combinations(sorted(Z), 2))
    base_used = {t for z in Z for t in rel.vtok[z].tolist()}
    for attempt in range(params.connector_restarts):
        used = set(base_used)
        chosen = {}
        for a, b in pairs:
            spares = disjoint_rainbow_paths(None, a, b, params.k, params.s,
                                            seed=derive_seed(seed, "spares", attempt, a, b),
                                            max_rounds=params.max_rounds, relation=rel)
            pick = next((T for T in spares if not set(rel.interior_tokens(T)) & used), None)
            if pick is None:
                break
            chosen[(a, b)] = list(pick)
            used |= set(rel.interior_tokens(pick))
        if len(chosen) == len(pairs):
            return CoreResult(sorted(Z), chosen, attempt + 1, oracle)
    raise RoundsExhausted(f"could not pick disjoint connectors in {params.connector_restarts} restarts")


def _certificate(g: Graph | ColouredGraph, host: PreparedHost, core_branch, chosen, params, seed,
                 oracle, max_length, extra=None) -> SubdivisionCertificate:
    H = host.graph
    coloured = isinstance(g, ColouredGraph)
    cH = g.lift(H) if coloured else None
    paths, cols = {}, {}
    for P in chosen.values():
        root = [H.label(v) for v in P]
        if root[0] > root[-1]:
            root, P = root[::-1], P[::-1]
        key = (root[0], root[-1])
        paths[key] = root
        if coloured:
            cols[key] = path_colours(cH, P)
    branch = {int(H.label(z)) for z in core_branch}
    pair_stats = {f"{H.label(a)}-{H.label(b)}": st.as_dict()
                  for (a, b), st in oracle.stats.items() if H.label(a) in branch and H.label(b) in branch}
    evidence = host.evidence()
    evidence.update({"relation": oracle.relation.name, "good_pairs_checked": len(oracle.cache),
                     "branch_pairs": pair_stats})
    evidence.update(extra or {})
    return SubdivisionCertificate(sorted(branch), paths, cols,
                                  params_record(params, g.n, len(core_branch), seed), evidence, max_length)


def find_subdivision(g: ColouredGraph | Graph, m: int, params: PipelineParams | None = None, seed=None,
                     host: PreparedHost | None = None) -> SubdivisionCertificate:
    """K_m-subdivision whose connectors are k-paths between good pairs.

    Coloured input gives a rainbow subdivision; a plain graph uses vertex
    equality as the only degeneracy.
    """
    params = params or PipelineParams()
    host = host or prepare_host(g, params, seed)
    if isinstance(g, ColouredGraph):
        rel: TokenRelation = RainbowRelation(g.lift(host.graph))
    else:
        rel = VertexEquality(host.graph)
    core = subdivision_core(host, rel, m, params, seed)
    return _certificate(g, host, core.branch, core.connectors, params, seed, core.oracle, params.k,
                        {"connector_attempts": core.attempts})


def find_rooted_subdivision(cg: ColouredGraph, Z: Sequence[int], params: PipelineParams | None = None,
                            seed=None, bip: Bipartition | None = None) -> SubdivisionCertificate:
    """Rainbow K_m-subdivision with branch vertices Z, built pair by pair.

    ``cg`` is taken to be the host expander itself.  Pair i+1 is joined by a
    rainbow path avoiding every vertex and colour already used (its own
    endpoints excepted) and the other branch vertices.
    """
    params = params or PipelineParams()
    Z = [int(z) for z in Z]
    if len(set(Z)) != len(Z) or len(Z) < 2:
        raise PreconditionViolated("Z must hold at least two distinct vertices")
    g = cg.graph
    host = PreparedHost(g, bip or bipartition(g), None)
    oracle = GoodPairOracle(RainbowRelation(cg), params.k, params.s, params.mode, params.samples,
                            derive_seed(seed, "oracle"), params.budget)
    used_v: set[int] = set()
    used_c: set[int] = set()
    chosen = {}
    sizes = []
    for i, (a, b) in enumerate(combinations(sorted(Z), 2)):
        M = AvoidSet(frozenset((used_v | set(Z)) - {a, b}), frozenset(used_c))
        sizes.append(len(M))
        try:
            res = rainbow_connect(cg, a, b, M, params, oracle, host.bip, seed=derive_seed(seed, "rooted", i))
        except (NoGoodPair, RoundsExhausted, IterationCapExceeded) as exc:
            exc.pair_index = i
            exc.args = (f"pair {i} ({a}, {b}): {exc.args[0] if exc.args else ''}",)
            raise
        chosen[(a, b)] = res.path
        used_v |= set(res.path)
        used_c |= set(path_colours(cg, res.path))
    return _certificate(cg, host, Z, chosen, params, seed, oracle, params.L,
                        {"avoid_set_sizes": sizes,
                         "avoid_set_bound": 2 * math.comb(len(Z), 2) * (params.L + 1),
                         "reach_note": "reach-set sizes are empirical"})
