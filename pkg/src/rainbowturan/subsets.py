"""Exhaustive per-subset tables for small graphs.

Subsets are bitmasks over ``0..n-1``.  Tables are filled one bit layer at a time:
the masks in ``[2^b, 2^(b+1))`` are the masks below ``2^b`` with vertex ``b``
added, so each layer is a single vectorised update.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .graph import Graph

HARD_LIMIT = 24


@dataclass
class SubsetTables:
    n: int
    inner: np.ndarray   # e(S)
    volume: np.ndarray  # sum of degrees over S
    size: np.ndarray    # |S|

    @property
    def cut(self) -> np.ndarray:
        return self.volume - 2 * self.inner


def subset_tables(g: Graph, max_n: int = 22) -> SubsetTables:
    n = g.n
    if n > min(max_n, HARD_LIMIT):
        raise TooLarge(f"exhaustive subset tables need n <= {min(max_n, HARD_LIMIT)}, got {n}")
    total = 1 << n
    inner = np.zeros(total, dtype=np.int32)
    volume = np.zeros(total, dtype=np.int32)
    size = np.zeros(total, dtype=np.int8)
    deg = g.degrees
    for b in range(n):
        lo = 1 << b
        lower = np.arange(lo, dtype=np.uint32)
        back = sum(1 << w for w in g.adj[b] if w < b)
        inner[lo:2 * lo] = inner[:lo] + np.bitwise_count(lower & np.uint32(back))
        volume[lo:2 * lo] = volume[:lo] + deg[b]
        size[lo:2 * lo] = size[:lo] + 1
    return SubsetTables(n, inner, volume, size)


def mask_to_set(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def set_to_mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m
