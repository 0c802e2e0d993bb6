"""Graphs, proper edge-colourings, bipartitions and the edge-list file format.

Vertices are always ``0..n-1``.  A subgraph keeps a ``labels`` tuple that maps
its local vertex ids back to the ids of the root graph it was cut from, so
certificates can always be reported in the coordinates of the input file.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    DuplicateEdge,
    ImproperColouring,
    InvalidVertex,
    OddCycle,
    ParseError,
)

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph; immutable after construction."""

    __slots__ = ("n", "edges", "adj", "labels", "_cache")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels: Sequence[int] | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidVertex(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = norm_edge(u, v)
            if key in seen:
                raise DuplicateEdge(f"edge {key} listed twice")
            seen.add(key)
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(seen))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in nbrs)
        if labels is not None:
            labels = tuple(int(x) for x in labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per vertex")
        self.labels = labels
        self._cache: dict = {}

    # -- basic queries ---------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def degrees(self) -> np.ndarray:
        if "deg" not in self._cache:
            self._cache["deg"] = np.array([len(a) for a in self.adj], dtype=np.int64)
        return self._cache["deg"]

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr_sets()[u]

    def _nbr_sets(self) -> list[frozenset]:
        if "nset" not in self._cache:
            self._cache["nset"] = [frozenset(a) for a in self.adj]
        return self._cache["nset"]

    def neighbour_set(self, v: int) -> frozenset:
        return self._nbr_sets()[v]

    def label(self, v: int) -> int:
        return v if self.labels is None else self.labels[v]

    def root_labels(self) -> tuple[int, ...]:
        return tuple(range(self.n)) if self.labels is None else self.labels

    # -- matrix views ----------------------------------------------------
    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64)."""
        if "dense" not in self._cache:
            a = np.zeros((self.n, self.n))
            if self.edges:
                e = np.array(self.edges)
                a[e[:, 0], e[:, 1]] = 1.0
                a[e[:, 1], e[:, 0]] = 1.0
            self._cache["dense"] = a
        return self._cache["dense"]

    def csr(self) -> sp.csr_matrix:
        if "csr" not in self._cache:
            if self.edges:
                e = np.array(self.edges)
                rows = np.concatenate([e[:, 0], e[:, 1]])
                cols = np.concatenate([e[:, 1], e[:, 0]])
            else:
                rows = cols = np.zeros(0, dtype=np.int64)
            data = np.ones(len(rows), dtype=np.int64)
            self._cache["csr"] = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return self._cache["csr"]

    def neighbour_masks(self) -> list[int]:
        """Neighbourhoods as Python int bitmasks."""
        if "masks" not in self._cache:
            masks = []
            for a in self.adj:
                x = 0
                for w in a:
                    x |= 1 << w
                masks.append(x)
            self._cache["masks"] = masks
        return self._cache["masks"]

    # -- structure -------------------------------------------------------
    def components(self) -> list[list[int]]:
        if self.n == 0:
            return []
        k, lab = connected_components(self.csr(), directed=False)
        comps: list[list[int]] = [[] for _ in range(k)]
        for v, c in enumerate(lab):
            comps[c].append(v)
        comps.sort(key=lambda c: c[0])
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        vs = sorted(set(int(v) for v in vertices))
        for v in vs:
            if not 0 <= v < self.n:
                raise InvalidVertex(f"vertex {v} not in graph")
        index = {v: i for i, v in enumerate(vs)}
        es = [(index[u], index[w]) for u, w in self.edges if u in index and w in index]
        return Graph(len(vs), es, labels=[self.label(v) for v in vs])

    def edge_subgraph(self, edges: Iterable[Sequence[int]], drop_isolated: bool = False) -> "Graph":
        es = [norm_edge(int(u), int(v)) for u, v in edges]
        for u, v in es:
            if not self.has_edge(u, v):
                raise InvalidVertex(f"({u}, {v}) is not an edge")
        if not drop_isolated:
            return Graph(self.n, es, labels=self.labels)
        vs = sorted({u for e in es for u in e})
        index = {v: i for i, v in enumerate(vs)}
        return Graph(len(vs), [(index[u], index[v]) for u, v in es], labels=[self.label(v) for v in vs])

    def without_isolated(self) -> "Graph":
        return self.induced_subgraph(v for v in range(self.n) if self.adj[v])


class ColouredGraph:
    """A graph together with an edge colouring, checked to be proper."""

    __slots__ = ("graph", "colours", "_cache")

    def __init__(self, graph: Graph, colours: dict[Edge, int] | Sequence[int], check: bool = True):
        if not isinstance(colours, dict):
            colours = dict(zip(graph.edges, colours))
        col = {}
        for e in graph.edges:
            if e not in colours:
                raise ParseError(f"edge {e} has no colour")
            c = int(colours[e])
            if c < 0:
                raise ParseError(f"negative colour on edge {e}")
            col[e] = c
        if len(colours) != len(col):
            raise ParseError("colour given for a non-edge")
        self.graph = graph
        self.colours: dict[Edge, int] = col
        self._cache: dict = {}
        if check:
            check_proper(self)

    @property
    def n(self) -> int:
        return self.graph.n

    def __repr__(self) -> str:
        return f"ColouredGraph(n={self.n}, m={self.graph.m}, colours={self.num_colours})"

    def colour(self, u: int, v: int) -> int:
        return self.colours[norm_edge(u, v)]

    @property
    def num_colours(self) -> int:
        return len(set(self.colours.values()))

    @property
    def palette_size(self) -> int:
        """One more than the largest colour id."""
        return max(self.colours.values(), default=-1) + 1

    def colour_matrix(self) -> np.ndarray:
        """n x n int matrix of colours, -1 on non-edges."""
        if "cmat" not in self._cache:
            c = np.full((self.n, self.n), -1, dtype=np.int64)
            for (u, v), col in self.colours.items():
                c[u, v] = c[v, u] = col
            self._cache["cmat"] = c
        return self._cache["cmat"]

    def _root_colours(self) -> dict[Edge, int]:
        if "root" not in self._cache:
            lab = self.graph.label
            self._cache["root"] = {norm_edge(lab(u), lab(v)): c for (u, v), c in self.colours.items()}
        return self._cache["root"]

    def lift(self, sub: Graph) -> "ColouredGraph":
        """Colour ``sub`` (a subgraph cut from the same root graph) with our colours."""
        root = self._root_colours()
        lab = sub.label
        return ColouredGraph(sub, {e: root[norm_edge(lab(e[0]), lab(e[1]))] for e in sub.edges}, check=False)

    def induced_subgraph(self, vertices: Iterable[int]) -> "ColouredGraph":
        return self.lift(self.graph.induced_subgraph(vertices))


@dataclass(frozen=True)
class Bipartition:
    X: frozenset
    Y: frozenset

    def side(self, v: int) -> int:
        """0 for X, 1 for Y."""
        return 0 if v in self.X else 1


# -- validation ---------------------------------------------------------------

def check_proper(cg: ColouredGraph) -> None:
    """Raise ImproperColouring on the first pair of adjacent edges sharing a colour."""
    g = cg.graph
    for v in range(g.n):
        seen: dict[int, Edge] = {}
        for w in g.adj[v]:
            e = norm_edge(v, w)
            c = cg.colours[e]
            if c in seen:
                raise ImproperColouring(seen[c], e, c)
            seen[c] = e


def is_proper(cg: ColouredGraph) -> bool:
    try:
        check_proper(cg)
    except ImproperColouring:
        return False
    return True


def remap_palette(colours: dict[Edge, int]) -> dict[Edge, int]:
    """Canonicalise colour ids to 0..C-1, preserving their order."""
    rank = {c: i for i, c in enumerate(sorted(set(colours.values())))}
    return {e: rank[c] for e, c in colours.items()}


# -- measurements -----------------------------------------------------------------

def average_degree(g: Graph) -> Fraction:
    if g.n < 1:
        raise ValueError("average degree of the empty graph is undefined")
    return Fraction(2 * g.m, g.n)


def cut_and_density(g: Graph, S: Iterable[int]) -> tuple[int, int, Fraction]:
    """Edges inside S, edges leaving S, and the average degree of G[S]."""
    S = set(int(v) for v in S)
    for v in S:
        if not 0 <= v < g.n:
            raise InvalidVertex(f"vertex {v} not in graph")
    inside = cross = 0
    for u, v in g.edges:
        a, b = u in S, v in S
        if a and b:
            inside += 1
        elif a or b:
            cross += 1
    density = Fraction(2 * inside, len(S)) if S else Fraction(0)
    return inside, cross, density


def bipartition(g: Graph) -> Bipartition:
    """The two colour classes of a connected bipartite graph, larger first."""
    if g.n == 0 or not g.is_connected():
        raise Disconnected("bipartition needs a connected graph")
    side = [-1] * g.n
    parent = [-1] * g.n
    side[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if side[w] < 0:
                side[w] = 1 - side[u]
                parent[w] = u
                queue.append(w)
            elif side[w] == side[u]:
                raise OddCycle(_odd_cycle(parent, u, w))
    A = frozenset(v for v in range(g.n) if side[v] == 0)
    B = frozenset(v for v in range(g.n) if side[v] == 1)
    return Bipartition(A, B) if len(A) >= len(B) else Bipartition(B, A)


def _odd_cycle(parent: list[int], u: int, w: int) -> list[int]:
    def chain(x):
        out = [x]
        while parent[x] >= 0:
            x = parent[x]
            out.append(x)
        return out

    cu, cw = chain(u), chain(w)
    common = set(cu) & set(cw)
    top = next(x for x in cu if x in common)
    left = cu[: cu.index(top) + 1]
    right = cw[: cw.index(top)]
    return left + right[::-1]


def try_bipartition(g: Graph) -> Bipartition | None:
    """Two-colouring classes for a possibly disconnected graph, or None."""
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return None
    A = frozenset(v for v in range(g.n) if side[v] == 0)
    B = frozenset(v for v in range(g.n) if side[v] == 1)
    return Bipartition(A, B) if len(A) >= len(B) else Bipartition(B, A)


def bipartite_subgraph(g: Graph, seed: int | None = None) -> Graph:
    """Spanning bipartite subgraph keeping at least half of the edges.

    Starts from a random 2-colouring and flips vertices to the other side while
    that increases the number of crossing edges (local max-cut).  At a local
    optimum every vertex has at least half of its edges crossing.
    """
    if g.m == 0:
        return g
    rng = np.random.default_rng(seed)
    side = rng.integers(0, 2, size=g.n)
    A = g.csr()
    deg = g.degrees
    while True:
        ones = A @ side
        same = np.where(side == 1, ones, deg - ones)
        gain = 2 * same - deg
        movers = np.flatnonzero(gain > 0)
        if len(movers) == 0:
            break
        # flip an independent set of improving vertices at once; gains stay valid
        chosen = []
        blocked = set()
        for u in movers[np.argsort(-gain[movers], kind="stable")]:
            if u not in blocked:
                chosen.append(u)
                blocked.update(g.adj[u])
        side[chosen] = 1 - side[chosen]
    keep = [(u, v) for u, v in g.edges if side[u] != side[v]]
    return g.edge_subgraph(keep)


def rainbow_cycles(cg: ColouredGraph, max_length: int | None = None):
    """Yield every rainbow cycle once, as a vertex list starting at its minimum vertex.

    Depth-first search over simple paths with pairwise distinct colours; a
    cycle is reported with its second vertex smaller than its last so each
    cycle appears exactly once.
    """
    g = cg.graph
    cmat = cg.colour_matrix()
    limit = g.n if max_length is None else max_length

    for start in range(g.n):
        path = [start]
        used_v = {start}
        used_c: set[int] = set()

        def extend(u):
            for w in g.adj[u]:
                if w < start:
                    continue
                c = int(cmat[u, w])
                if c in used_c:
                    continue
                if w == start:
                    if len(path) >= 3 and path[1] < path[-1]:
                        yield list(path)
                    continue
                if w in used_v or len(path) >= limit:
                    continue
                path.append(w)
                used_v.add(w)
                used_c.add(c)
                yield from extend(w)
                path.pop()
                used_v.discard(w)
                used_c.discard(c)

        yield from extend(start)


# -- file formats --------------------------------------------------------------------

def _parse_lines(text: str, coloured: bool):
    n = None
    edges = []
    colours = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or n is not None:
                raise ParseError(f"line {lineno}: bad header {raw!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: bad vertex count {raw!r}") from None
            continue
        want = 3 if coloured else 2
        if len(parts) != want:
            raise ParseError(f"line {lineno}: expected {want} fields, got {raw!r}")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer field in {raw!r}") from None
        if min(vals) < 0:
            raise ParseError(f"line {lineno}: negative field in {raw!r}")
        u, v = vals[0], vals[1]
        if u == v:
            raise ParseError(f"line {lineno}: self-loop {raw!r}")
        e = norm_edge(u, v)
        if e in colours:
            raise DuplicateEdge(f"line {lineno}: edge {e} listed twice")
        edges.append(e)
        colours[e] = vals[2] if coloured else 0
    if n is None:
        n = max((max(e) for e in edges), default=-1) + 1
    return n, edges, colours


def parse_graph(text: str) -> Graph:
    n, edges, _ = _parse_lines(text, coloured=False)
    return Graph(n, edges)


def parse_coloured_graph(text: str) -> ColouredGraph:
    n, edges, colours = _parse_lines(text, coloured=True)
    return ColouredGraph(Graph(n, edges), remap_palette(colours))


def load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def load_coloured_graph(path) -> ColouredGraph:
    """Read a "u v c" edge list; the palette is remapped to 0..C-1."""
    return parse_coloured_graph(Path(path).read_text())


def load_any(path) -> Graph | ColouredGraph:
    """Coloured if the data lines carry three fields, plain otherwise."""
    text = Path(path).read_text()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line and not line.startswith("n "):
            return parse_coloured_graph(text) if len(line.split()) == 3 else parse_graph(text)
    return parse_graph(text)


def format_edge_list(g: Graph | ColouredGraph) -> str:
    if isinstance(g, ColouredGraph):
        lines = [f"n {g.n}"] + [f"{u} {v} {c}" for (u, v), c in sorted(g.colours.items())]
    else:
        lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def save_edge_list(g: Graph | ColouredGraph, path) -> None:
    Path(path).write_text(format_edge_list(g))


def to_jsonable(obj):
    """Recursively convert numpy scalars, Fractions and sets for json.dump."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
