"""All-pairs length matrices paired with explicit paths, and their refresh.

:func:`recompute` takes a matrix describing some graph and a batch of new
edges and returns the matrix of the enlarged graph.  Only the heads W of the
new edges matter: every path decomposes into an old prefix ending in a new
edge, a walk among heads, and an old suffix.  The walk among heads is a
closure of a |W| x |W| matrix computed by repeated squaring, so the refresh
costs a handful of min-plus products of shape n x |W| x n.

The min-plus product is a parameter: the approximate product gives
``(1+eps)`` per product, the bounded product gives exact lengths up to a cap.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..algebra import INT_INF, minplus_approx, minplus_bounded
from .catpath import CatPath

Product = Callable[[np.ndarray, np.ndarray], tuple]


class DistPathMatrix:
    """``dist[x, y]`` (inf when absent) and ``paths[x][y]`` realising it exactly."""

    __slots__ = ("dist", "paths")

    def __init__(self, dist: np.ndarray, paths: list):
        self.dist = dist
        self.paths = paths

    @classmethod
    def identity(cls, n: int) -> "DistPathMatrix":
        dist = np.full((n, n), np.inf)
        np.fill_diagonal(dist, 0.0)
        paths = [[None] * n for _ in range(n)]
        for v in range(n):
            paths[v][v] = CatPath.empty(v)
        return cls(dist, paths)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def get(self, x: int, y: int):
        return self.dist[x, y], self.paths[x][y]


def products_needed(num_heads: int) -> int:
    """Min-plus products in one refresh with ``num_heads`` distinct heads."""
    return 3 + squarings(num_heads)


def squarings(num_heads: int) -> int:
    return math.ceil(math.log2(max(num_heads - 1, 1)))


def _improve(dist, paths, cand, wit, left, right, right_index=None):
    """Write ``cand`` into ``dist`` where strictly better, joining witness paths."""
    rows, cols = np.nonzero(cand < dist)
    for x, y in zip(rows.tolist(), cols.tolist()):
        k = int(wit[x, y])
        rk = k if right_index is None else right_index[k]
        path = left[x][k] + right[rk][y]
        dist[x, y] = path.weight
        paths[x][y] = path


def recompute(D: DistPathMatrix, new_edges, product: Product) -> DistPathMatrix:
    """Matrix of the graph described by ``D`` plus ``new_edges`` (u, v, w)."""
    new_edges = list(new_edges)
    if not new_edges:
        return D
    n = D.n
    heads = sorted({v for _, v, _ in new_edges})
    col = {w: j for j, w in enumerate(heads)}
    ell = len(heads)

    # edge matrix n x |W| and the one-edge paths it stands for
    edge_len = np.full((n, ell), np.inf)
    edge_paths = [[None] * ell for _ in range(n)]
    for u, v, w in new_edges:
        j = col[v]
        if w < edge_len[u, j]:
            edge_len[u, j] = w
            edge_paths[u][j] = CatPath.edge(u, v, w)

    # step[x, j]: x to head j, either an old path or ending in a new edge
    step = D.dist[:, heads].copy()
    step_paths = [[D.paths[x][h] for h in heads] for x in range(n)]
    cand, wit = product(D.dist, edge_len)
    _improve(step, step_paths, cand, wit, D.paths, edge_paths)

    # closure among heads
    clos = step[heads].copy()
    clos_paths = [list(step_paths[h]) for h in heads]
    for j, h in enumerate(heads):
        if clos[j, j] > 0:
            clos[j, j] = 0.0
            clos_paths[j][j] = CatPath.empty(h)
    for _ in range(squarings(ell)):
        cand, wit = product(clos, clos)
        new = clos.copy()
        new_paths = [list(r) for r in clos_paths]
        _improve(new, new_paths, cand, wit, clos_paths, clos_paths)
        clos, clos_paths = new, new_paths

    # x -> (walk among heads) -> y
    reach = np.full((n, ell), np.inf)
    reach_paths = [[None] * ell for _ in range(n)]
    cand, wit = product(step, clos)
    _improve(reach, reach_paths, cand, wit, step_paths, clos_paths)

    dist = D.dist.copy()
    paths = [list(r) for r in D.paths]
    cand, wit = product(reach, D.dist[heads])
    _improve(dist, paths, cand, wit, reach_paths, D.paths, right_index=heads)
    return DistPathMatrix(dist, paths)


# --------------------------------------------------------------------------
# product adapters


def approx_product(eps: float) -> Product:
    def product(A, B):
        return minplus_approx(A, B, eps)
    return product


def bounded_product(h: int) -> Product:
    """Exact min-plus product of integer-valued float matrices, capped at h."""
    def product(A, B):
        Ai = np.where(np.isfinite(A), A, INT_INF).astype(np.int64)
        Bi = np.where(np.isfinite(B), B, INT_INF).astype(np.int64)
        Di, W = minplus_bounded(Ai, Bi, h)
        return np.where(Di >= INT_INF, np.inf, Di.astype(float)), W
    return product
