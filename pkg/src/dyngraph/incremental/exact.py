"""Exact shortest paths in unweighted graphs under insertions.

At each phase start the structure holds exact distances (with paths) for
all pairs at distance at most ``h = ceil(n / F)`` and a hitting set B of the
stored paths of length exactly h.  Longer shortest paths can be cut into
pieces of at most h hops at vertices of B, so queries run Dijkstra on a
small auxiliary graph whose edges are stored paths and phase edges.
"""
from __future__ import annotations

import math

import numpy as np

from ..algebra import greedy_hitting_set
from ..errors import DuplicateEdge
from ..graph import DiGraph, InsertIncoming, PathWitness, apply_update
from .base import Rollbackable, dijkstra
from .catpath import CatPath
from .distmatrix import DistPathMatrix, bounded_product, recompute
from .reach import default_phase_len

PAIR_ALPHA = 0.81
TREE_ALPHA = 0.724


class IncrExact(Rollbackable):
    """Exact distances and shortest paths/trees; accepts single edges and incoming groups."""

    _ROLLBACK_REFS = ("matrix", "hitting", "phase_edges", "heads", "ends", "count", "phase")
    _ROLLBACK_LOGS = ("phase_edges", "heads")

    def __init__(self, g: DiGraph, alpha: float = PAIR_ALPHA, phase_len: int | None = None):
        if g.weighted and any(w != 1.0 for _, _, w in g.edges()):
            raise ValueError("exact structure needs an unweighted graph")
        self.n = g.n
        self.g = DiGraph.from_edges(g.n, [(u, v) for u, v, _ in g.edges()])
        self.F = default_phase_len(g.n, alpha) if phase_len is None else max(1, int(phase_len))
        self.h = max(1, math.ceil(g.n / self.F))
        self.phase = 0
        self.matrix = DistPathMatrix.identity(self.n)
        self._init_rollback()
        self._rebuild([(u, v, 1.0) for u, v, _ in self.g.edges()])

    def _rebuild(self, edges):
        self.matrix = recompute(self.matrix, edges, bounded_product(self.h))
        self.hitting = greedy_hitting_set(self.long_paths(), self.n)
        self.phase_edges: list[tuple[int, int]] = []
        self.heads: list[int] = []
        self.ends: frozenset = frozenset()
        self.count = 0

    def long_paths(self) -> list[list[int]]:
        """Stored paths of exactly h hops, without their first vertex."""
        rows, cols = np.nonzero(self.matrix.dist == self.h)
        return [self.matrix.paths[x][y].vertices()[1:] for x, y in zip(rows.tolist(), cols.tolist())]

    def rollover(self):
        self.phase += 1
        self._rebuild([(u, v, 1.0) for u, v in self.phase_edges])

    # ------------------------------------------------------------------

    def insert_incoming(self, v: int, tails):
        tails = [u if isinstance(u, int) else u[0] for u in tails]
        for u in tails:
            if self.g.has_edge(u, v):
                raise DuplicateEdge(f"edge {u}->{v} already present")
        if self.count >= self.F:
            self.rollover()
        apply_update(self.g, InsertIncoming(v, tuple((u, 1.0) for u in tails)))
        for u in tails:
            self._record_edge(u, v)
            self.phase_edges.append((u, v))
        if v not in self.heads:
            self.heads.append(v)
        self.ends = self.ends | set(tails) | {v}
        self.count += 1

    def insert(self, u: int, v: int, w: float = 1.0):
        self.insert_incoming(v, [u])

    # ------------------------------------------------------------------

    def _stored_edges(self, sources, targets, adj):
        dist, paths = self.matrix.dist, self.matrix.paths
        targets = list(targets)
        for a in sources:
            row = dist[a]
            for b in targets:
                if b != a and row[b] < math.inf:
                    adj.setdefault(a, []).append((b, float(row[b]), paths[a][b]))

    def _phase_edges(self, adj):
        for u, v in self.phase_edges:
            adj.setdefault(u, []).append((v, 1.0, CatPath.edge(u, v)))

    @staticmethod
    def _lift(via, s, t) -> CatPath:
        pieces = []
        x = t
        while x != s:
            x, piece = via[x]
            pieces.append(piece)
        path = CatPath.empty(s)
        for piece in reversed(pieces):
            path = path + piece
        return path

    def query(self, s: int, t: int):
        """``(length, CatPath)`` of a shortest s->t path, or None."""
        if s == t:
            return 0, CatPath.empty(s)
        verts = sorted({s, t} | self.ends | set(self.hitting))
        adj: dict = {}
        self._stored_edges(verts, verts, adj)
        self._phase_edges(adj)
        dist, via = dijkstra(adj, s)
        if t not in dist:
            return None
        path = self._lift(via, s, t)
        return int(path.weight), path

    def query_path(self, s: int, t: int) -> PathWitness | None:
        res = self.query(s, t)
        return None if res is None else res[1].witness()

    def query_tree(self, s: int):
        """Shortest-path out-tree of s as ``(edges, dist)``."""
        sources = sorted({s} | set(self.heads) | set(self.hitting))
        adj: dict = {}
        self._stored_edges(sources, range(self.n), adj)
        self._phase_edges(adj)
        dist, via = dijkstra(adj, s)
        expanded: dict = {}
        for y, (x, piece) in via.items():
            for a, b, _ in piece.edges():
                expanded.setdefault(a, set()).add(b)
        sub = {a: [(b, 1.0, None) for b in sorted(bs)] for a, bs in expanded.items()}
        tdist, tvia = dijkstra(sub, s)
        edges = sorted((x, y) for y, (x, _) in tvia.items())
        return edges, {v: int(d) for v, d in tdist.items()}


class IncrExactPair(IncrExact):
    def __init__(self, g: DiGraph, alpha: float = PAIR_ALPHA, phase_len: int | None = None):
        super().__init__(g, alpha=alpha, phase_len=phase_len)


class IncrExactTree(IncrExact):
    def __init__(self, g: DiGraph, alpha: float = TREE_ALPHA, phase_len: int | None = None):
        super().__init__(g, alpha=alpha, phase_len=phase_len)
