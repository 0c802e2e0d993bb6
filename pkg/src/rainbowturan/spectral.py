"""Random-walk matrices, spectra, conductance and mixing bounds.

With ``D = diag(1/d(v))`` the walk matrix is ``M = DA`` and its symmetric
companion is ``N = D^{1/2} A D^{1/2}``; they share eigenvalues.  Conductance
uses the product normalisation

    Phi(S) = e(S, S^c) / (2m * pi(S) * pi(S^c)),   pi(S) = vol(S) / 2m,

which is at least twice the familiar ``e(S, S^c) / min(vol S, vol S^c)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import (
    BoundViolated,
    Disconnected,
    EigensolverFailure,
    IsolatedVertex,
    TooLarge,
)
from .graph import Bipartition, Graph, bipartition
from .subsets import mask_to_set, subset_tables

DENSE_LIMIT = 4096
EIGEN_TOL = 1e-9
MIXING_TOL = 1e-8


@dataclass
class WalkMatrices:
    M: np.ndarray
    N: np.ndarray
    degrees: np.ndarray


def walk_matrices(g: Graph) -> WalkMatrices:
    if g.n > DENSE_LIMIT:
        raise TooLarge(f"dense walk matrices capped at n={DENSE_LIMIT}")
    deg = g.degrees.astype(float)
    if g.n and deg.min() == 0:
        raise IsolatedVertex(f"vertex {int(np.argmin(deg))} is isolated")
    A = g.adjacency()
    M = A / deg[:, None]
    s = 1.0 / np.sqrt(deg)
    N = s[:, None] * A * s[None, :]
    return WalkMatrices(M, N, g.degrees.copy())


@dataclass
class ConductanceReport:
    exact: bool
    lower: float
    upper: float
    minimizer: list[int] | None = None
    subsets_checked: int = 0

    @property
    def value(self) -> float | None:
        return self.upper if self.exact else None


@dataclass
class SpectrumSummary:
    eigenvalues: np.ndarray
    lambda2: float
    approximate: bool = False
    conductance: ConductanceReport | None = None
    vector2: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = {
            "n": len(self.eigenvalues) if not self.approximate else None,
            "lambda1": float(self.eigenvalues[0]),
            "lambda2": float(self.lambda2),
            "lambda_min": float(self.eigenvalues[-1]),
            "approximate": self.approximate,
        }
        if not self.approximate:
            out["eigenvalues"] = [float(x) for x in self.eigenvalues]
        if self.conductance is not None:
            c = self.conductance
            out["conductance"] = {"exact": c.exact, "lower": c.lower, "upper": c.upper,
                                  "minimizer": c.minimizer}
        return out


def _require_connected(g: Graph) -> None:
    if g.n == 0 or not g.is_connected():
        raise Disconnected("operation needs a connected graph")
    if g.n == 1:
        raise IsolatedVertex("a single vertex has no walk")


def spectrum(g: Graph, with_conductance: bool = False, exact_max_n: int = 22) -> SpectrumSummary:
    """Eigenvalues of N in descending order.

    Above the dense cap only the top two eigenpairs are computed with a sparse
    Lanczos solver and the summary is flagged approximate.
    """
    _require_connected(g)
    if g.n <= DENSE_LIMIT:
        N = walk_matrices(g).N
        try:
            vals, vecs = np.linalg.eigh(N)
        except np.linalg.LinAlgError as exc:
            raise EigensolverFailure(str(exc)) from exc
        vals, vecs = vals[::-1], vecs[:, ::-1]
        out = SpectrumSummary(vals, float(vals[1]), vector2=vecs[:, 1])
    else:
        A = g.csr().astype(float)
        s = 1.0 / np.sqrt(g.degrees.astype(float))
        N = A.multiply(s[:, None]).multiply(s[None, :]).tocsr()
        try:
            vals, vecs = spla.eigsh(N, k=2, which="LA")
        except spla.ArpackError as exc:
            raise EigensolverFailure(str(exc)) from exc
        order = np.argsort(-vals)
        vals, vecs = vals[order], vecs[:, order]
        out = SpectrumSummary(vals, float(vals[1]), approximate=True, vector2=vecs[:, 1])
    if with_conductance:
        out.conductance = conductance(g, exact_max_n=exact_max_n, summary=out)
    return out


def phi_of(g: Graph, S) -> float:
    """Phi(S) for a nonempty proper subset S."""
    S = set(S)
    if not S or len(S) >= g.n:
        raise ValueError("S must be a nonempty proper subset")
    deg = g.degrees
    vol = int(sum(deg[v] for v in S))
    cut = sum(1 for u, v in g.edges if (u in S) != (v in S))
    two_m = 2 * g.m
    return cut * two_m / (vol * (two_m - vol))


def sweep_cuts(g: Graph, vector: np.ndarray) -> tuple[float, list[int]]:
    """Best Phi over prefixes of the vertices ordered by D^{-1/2}-scaled ``vector``."""
    deg = g.degrees
    score = vector / np.sqrt(deg)
    order = np.argsort(score, kind="stable")
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    two_m = 2 * g.m
    # cut of each prefix via edge events: an edge crosses prefix i iff its endpoints straddle i
    lo = np.minimum(pos[[u for u, _ in g.edges]], pos[[v for _, v in g.edges]]) if g.m else np.zeros(0, int)
    hi = np.maximum(pos[[u for u, _ in g.edges]], pos[[v for _, v in g.edges]]) if g.m else np.zeros(0, int)
    delta = np.zeros(g.n + 1, dtype=np.int64)
    np.add.at(delta, lo, 1)
    np.add.at(delta, hi, -1)
    cut = np.cumsum(delta)[: g.n - 1]
    vol = np.cumsum(deg[order])[: g.n - 1]
    phi = cut * two_m / (vol * (two_m - vol)).astype(float)
    i = int(np.argmin(phi))
    return float(phi[i]), sorted(int(v) for v in order[: i + 1])


def conductance(g: Graph, exact_max_n: int = 22, summary: SpectrumSummary | None = None) -> ConductanceReport:
    """Exact Phi_G by enumeration for small n, otherwise spectral bounds.

    The large-n lower bound ``Phi_G >= 1 - lambda2`` comes from the Rayleigh
    quotient of the test vector ``1_S - pi(S)``; the upper bound is the better
    of the best sweep cut and ``sqrt(8 (1 - lambda2))``.
    """
    _require_connected(g)
    if g.n <= exact_max_n:
        t = subset_tables(g, exact_max_n)
        half = 1 << (g.n - 1)  # complements contain the top vertex; Phi(S) = Phi(S^c)
        vol = t.volume[1:half].astype(np.int64)
        cut = t.cut[1:half].astype(np.int64)
        two_m = 2 * g.m
        phi = cut * two_m / (vol * (two_m - vol)).astype(float)
        i = int(np.argmin(phi))
        best = float(phi[i])
        return ConductanceReport(True, best, best, mask_to_set(i + 1), half - 1)
    if summary is None:
        summary = spectrum(g)
    lam2 = summary.lambda2
    sweep, S = sweep_cuts(g, summary.vector2)
    upper = min(sweep, math.sqrt(max(0.0, 8 * (1 - lam2))))
    return ConductanceReport(False, max(0.0, 1 - lam2), upper, S)


def check_eigen_conductance_bound(g: Graph, exact_max_n: int = 22) -> float:
    """Margin (1 - Phi_G^2/8) - lambda2; raises BoundViolated below -1e-9."""
    if g.n > exact_max_n:
        raise TooLarge("the check needs exact conductance")
    summ = spectrum(g, with_conductance=True, exact_max_n=exact_max_n)
    phi = summ.conductance.upper
    margin = (1 - phi * phi / 8) - summ.lambda2
    if margin < -EIGEN_TOL:
        raise BoundViolated(f"lambda2={summ.lambda2} exceeds 1 - Phi^2/8 with Phi={phi}")
    return margin


def check_expander_conductance(g: Graph, params, exact_max_n: int = 22) -> float:
    """Margin Phi_G - eta/3 for a certified expander."""
    rep = conductance(g, exact_max_n=exact_max_n)
    if not rep.exact:
        raise TooLarge("the check needs exact conductance")
    margin = rep.upper - float(params.eta) / 3
    if margin < 0:
        raise BoundViolated(f"Phi_G={rep.upper} below eta/3={float(params.eta) / 3}")
    return margin


def second_modulus(eigenvalues: np.ndarray) -> float:
    """max |lambda_i| over 2 <= i <= n-1; zero when there is no such index."""
    if len(eigenvalues) <= 2:
        return 0.0
    return float(np.max(np.abs(eigenvalues[1:-1])))


@dataclass
class MixingReport:
    k: int
    lambda2: float
    max_deviation: float
    max_excess: float        # max of deviation - bound; must stay <= tolerance
    parity_max: float        # largest entry that must vanish by parity
    worst_pair: tuple[int, int]
    deviations: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {"k": self.k, "lambda2": self.lambda2, "max_deviation": self.max_deviation,
                "max_excess": self.max_excess, "parity_max": self.parity_max,
                "worst_pair": list(self.worst_pair)}


def _mixing_setup(g: Graph, bip: Bipartition | None):
    _require_connected(g)
    if bip is None:
        bip = bipartition(g)
    wm = walk_matrices(g)
    vals = np.linalg.eigvalsh(wm.N)[::-1]
    lam = second_modulus(vals)
    inX = np.array([1 if v in bip.X else 0 for v in range(g.n)])
    deg = wm.degrees.astype(float)
    ratio = np.sqrt(deg[None, :] / deg[:, None])
    return wm, lam, inX, deg, ratio


def _mixing_report(k, Mk, lam, inX, deg, two_m, ratio, keep, strict):
    parity = (k + inX[:, None] + inX[None, :]) % 2
    stationary = np.broadcast_to(deg[None, :] / two_m, Mk.shape)
    expected = np.where(parity == 0, 2 * stationary, 0.0)
    dev = np.abs(Mk - expected)
    bound = ratio * lam ** k
    excess = dev - bound
    w = np.unravel_index(int(np.argmax(excess)), excess.shape)
    parity_max = float(np.max(np.abs(Mk[parity == 1]))) if np.any(parity == 1) else 0.0
    rep = MixingReport(k, lam, float(dev.max()), float(excess[w]), parity_max,
                       (int(w[0]), int(w[1])), dev if keep else None)
    if strict and (rep.max_excess > MIXING_TOL or parity_max > 1e-12):
        raise BoundViolated(f"mixing bound fails at k={k}: excess {rep.max_excess}, parity {parity_max}")
    return rep


def mixing_deviation(g: Graph, k: int, bip: Bipartition | None = None,
                     strict: bool = True, keep: bool = False) -> MixingReport:
    """Compare M^k with its bipartite limit entrywise.

    For a connected bipartite graph the limit of ``(M^k)_{v,u}`` is
    ``(d(u)/2m)(1 + (-1)^{k + [v in X] + [u in X]})`` and every entry lies
    within ``sqrt(d(u)/d(v)) * lambda^k`` of it, where lambda is the largest
    modulus among the non-extreme eigenvalues (this is lambda2 by symmetry).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    wm, lam, inX, deg, ratio = _mixing_setup(g, bip)
    Mk = np.linalg.matrix_power(wm.M, k)
    return _mixing_report(k, Mk, lam, inX, deg, 2.0 * g.m, ratio, keep, strict)


def mixing_profile(g: Graph, ks, bip: Bipartition | None = None, strict: bool = True) -> list[MixingReport]:
    """mixing_deviation for several k, sharing one eigensolve and incremental powers."""
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise ValueError("k values must be positive")
    wm, lam, inX, deg, ratio = _mixing_setup(g, bip)
    out = []
    Mk = np.eye(g.n)
    step = 0
    for k in ks:
        Mk = Mk @ np.linalg.matrix_power(wm.M, k - step)
        step = k
        out.append(_mixing_report(k, Mk, lam, inX, deg, 2.0 * g.m, ratio, False, strict))
    return out


def mixing_rate_check(g: Graph, params, k: int, bip: Bipartition | None = None) -> float:
    """Margin of the walk-count mixing bound on same-side pairs.

    For x, y in X the share of k-walks from x that end at y is within
    ``sqrt(n) (1 - eta^2/72)^k`` of ``d(y)/e(G)``.
    """
    from .walks import walk_count_matrix

    if k % 2:
        raise ValueError("k must be even")
    _require_connected(g)
    if bip is None:
        bip = bipartition(g)
    P = walk_count_matrix(g, k)
    deg = g.degrees
    eta = float(params.eta)
    bound = math.sqrt(g.n) * (1 - eta * eta / 72) ** k
    worst = 0.0
    X = sorted(bip.X)
    for x in X:
        row = P[x]
        total = sum(int(v) for v in row)
        for y in X:
            share = int(row[y]) / total
            worst = max(worst, abs(share - deg[y] / g.m))
    margin = bound - worst
    if margin < -MIXING_TOL:
        raise BoundViolated(f"walk-share deviation {worst} exceeds {bound}")
    return margin
