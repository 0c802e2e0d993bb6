"""Parameter sheets and seed derivation.

The exact formulas for (eta, ell, k, L, s, p, q) are astronomically conservative,
so searches run with desk defaults multiplied by a scale factor.  Both sets of
values travel together in every certificate.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction


def derive_seed(seed, *keys) -> int | None:
    """Keyed blake2b hash of (seed, *keys) as a 63-bit integer; None stays None."""
    if seed is None:
        return None
    h = hashlib.blake2b(digest_size=8, key=b"rainbowturan")
    h.update(repr((int(seed),) + tuple(str(k) for k in keys)).encode())
    return int.from_bytes(h.digest(), "big") >> 1


@dataclass(frozen=True)
class FormulaParams:
    n: int
    eps: float
    m: int
    eta: float
    ell: float
    k: int
    L: float
    s: int
    p: int
    q: float
    edge_threshold: float           # n (log n)^60 edges
    degree_threshold: float         # 10^7 (log n)^3 for the almost-regular step
    feasible: bool                  # edge_threshold <= C(n, 2)

    def as_dict(self) -> dict:
        return asdict(self)


def formula_params(n: int, eps: float = 0.5, m: int = 3) -> FormulaParams:
    if n < 2:
        raise ValueError("n must be at least 2")
    lg = math.log2(n)
    # exact rational arithmetic when log n is an integer, so ceilings are not off by one
    lgq = Fraction(int(lg)) if lg.is_integer() else Fraction(lg)
    etaq = Fraction(eps).limit_denominator(10 ** 6) / (2 * lgq)
    k = math.ceil(2 ** 9 * lgq / etaq ** 2)
    k += k % 2
    ell = 4 * lgq / etaq
    thr = n * lg ** 60
    return FormulaParams(n, eps, m, float(etaq), float(ell), k, float(2 ** 10 * lgq / etaq ** 2),
                       2 * math.comb(m, 2) * k, 8 * m, float(256 * ell), thr, 1e7 * lg ** 3,
                       thr <= n * (n - 1) / 2)


@dataclass(frozen=True)
class PipelineParams:
    """Values actually used by the searches.

    ``k`` walk length of connectors, ``s`` good-pair level and number of spare
    paths, ``ell`` reach radius minus one, ``q`` colour-usage divisor,
    ``L`` declared connector length bound for rooted searches.
    """

    k: int = 2
    s: int = 3
    ell: int = 2
    q: float = 2.0
    eps: float = 0.5
    mode: str = "exact"
    samples: int = 2000
    max_rounds: int = 200
    budget: int | None = 10 ** 7
    relaxed: bool = True
    exact_max_n: int = 18
    target: str = "core"
    connector_restarts: int = 20
    scale: float = 1.0

    def __post_init__(self):
        if self.k < 1 or self.s < 1 or self.ell < 0 or self.q <= 0:
            raise ValueError("k, s >= 1, ell >= 0 and q > 0 required")
        if self.mode not in ("exact", "mc"):
            raise ValueError("mode must be 'exact' or 'mc'")

    @property
    def L(self) -> int:
        return 2 * (self.ell + 1) + self.k

    def as_dict(self) -> dict:
        d = asdict(self)
        d["L"] = self.L
        return d

    def with_(self, **kw) -> "PipelineParams":
        return replace(self, **kw)


DESK = PipelineParams()


def desk_params(scale: float = 1.0, **overrides) -> PipelineParams:
    """Desk defaults with k, s, ell and q multiplied by ``scale`` (k kept even)."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    k = max(2, 2 * round(DESK.k * scale / 2))
    base = replace(DESK, k=k, s=max(1, round(DESK.s * scale)), ell=max(0, round(DESK.ell * scale)),
                   q=DESK.q * scale, scale=scale)
    return replace(base, **overrides)


def param_calculator(n: int, eps: float = 0.5, m: int = 3, r: int = 1, scale: float = 1.0) -> dict:
    """Formula values next to the scaled desk defaults."""
    formula = formula_params(n, eps, m)
    used = desk_params(scale)
    sheet = {"n": n, "eps": eps, "m": m, "r": r, "scale": scale,
             "formula": formula.as_dict(), "used": used.as_dict(),
             "notes": []}
    if not formula.feasible:
        sheet["notes"].append(f"n (log n)^60 = {formula.edge_threshold:.3e} edges exceeds C(n,2); infeasible at this n")
    if r > 1:
        lg = math.log2(n)
        sheet["formula"]["blowup_degree_threshold"] = n ** (1 - 1 / r) * lg ** (60 * r)
        sheet["formula"]["blowup_s"] = math.comb(m, 2) * r * formula.k
    return sheet
