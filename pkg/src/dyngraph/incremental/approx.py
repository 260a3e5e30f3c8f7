"""(1+eps)-approximate shortest paths under edge insertions.

Updates come in phases of F insertions.  A matrix refreshed with
:func:`recompute` stretches lengths by at most ``1 + eps_level`` per refresh,
so matrices are kept in a hierarchy of levels ``b = b_top .. 1`` where level
b is derived from level b + 1 by one refresh and is redone only every 2^b
phases; the matrix used during phase j is one refresh away from level 1.
Every length therefore passes through at most ``b_top + 1`` refreshes.

Inside a phase, insertion e_i = (u_i, v_i) stores for every x the best
x -> u_i and v_i -> x paths known at that moment; a query takes the best of
the phase matrix and all ``to_tail[i][s] + e_i + from_head[i][t]``.
"""
from __future__ import annotations

import math

from ..errors import BadEpsilon, DuplicateEdge
from ..graph import DiGraph, PathWitness
from .base import Rollbackable
from .catpath import CatPath
from .distmatrix import DistPathMatrix, approx_product, products_needed, recompute
from .reach import DEFAULT_ALPHA, default_phase_len


def level_count(n: int, F: int) -> int:
    return max(1, math.ceil(math.log2(max(n / F, 1))))


def level_anchor(b: int, j: int) -> int:
    """Last phase covered by level b during phase j (0 = only the initial graph)."""
    top = j - 2 ** (b - 1)
    if top <= 0:
        return 0
    return top - top % (2 ** b)


class IncrApprox(Rollbackable):
    _ROLLBACK_REFS = ("levels", "current", "phase", "cur_edges", "to_tail", "from_head",
                      "phases", "refreshes")
    _ROLLBACK_LOGS = ("cur_edges", "to_tail", "from_head", "phases")

    def __init__(self, g: DiGraph, eps: float = 0.5, alpha: float = DEFAULT_ALPHA,
                 phase_len: int | None = None):
        if not (0 < eps <= 1) or math.isnan(eps):
            raise BadEpsilon(f"eps must lie in (0, 1], got {eps}")
        if not g.weighted:
            g = _as_weighted(g)
        self.n = g.n
        self.g = g.copy()
        self.eps = eps
        self.F = default_phase_len(g.n, alpha) if phase_len is None else max(1, int(phase_len))
        self.eps_level = eps / (4 * max(1, math.ceil(math.log2(max(g.n, 2)))))
        self.b_top = level_count(g.n, self.F)
        self.phases: list[list] = [[(u, v, w) for u, v, w in g.edges()]]
        self.levels: dict[int, tuple[int, DistPathMatrix, int]] = {}
        self.refreshes = 0
        self.phase = 1
        self._init_rollback()
        self._start_phase()

    # ------------------------------------------------------------------

    def _refresh(self, D: DistPathMatrix, edges) -> DistPathMatrix:
        edges = list(edges)
        if not edges:
            return D
        k = products_needed(len({v for _, v, _ in edges}))
        per_product = (1 + self.eps_level) ** (1 / k) - 1
        self.refreshes += 1
        return recompute(D, edges, approx_product(per_product))

    def _edges_of(self, first: int, last: int):
        for p in range(first, last + 1):
            yield from self.phases[p]

    def _start_phase(self):
        j = self.phase
        old = self.levels
        levels = {}
        redo_below = False
        for b in range(self.b_top, 0, -1):
            anchor = level_anchor(b, j)
            prev = old.get(b)
            if prev is not None and prev[0] == anchor and not redo_below:
                levels[b] = prev
                continue
            redo_below = True
            if b == self.b_top:
                D = self._refresh(DistPathMatrix.identity(self.n), self._edges_of(0, anchor))
                depth = 1
            else:
                up_anchor, up, up_depth = levels[b + 1]
                D = self._refresh(up, self._edges_of(up_anchor + 1, anchor))
                depth = up_depth + 1
            levels[b] = (anchor, D, depth)
        self.levels = levels
        anchor, D1, depth = levels[1]
        self.current = (self._refresh(D1, self._edges_of(anchor + 1, j - 1)), depth + 1)
        self.cur_edges: list = []
        self.to_tail: list = []
        self.from_head: list = []

    def stretch_bound(self) -> float:
        """Guaranteed stretch of the phase matrix: one factor per refresh on its chain."""
        return (1 + self.eps_level) ** self.current[1]

    # ------------------------------------------------------------------

    def _best(self, s: int, t: int):
        D = self.current[0]
        best = D.paths[s][t]
        for i, (u, v, w) in enumerate(self.cur_edges):
            first = self.to_tail[i].get(s)
            if first is None:
                continue
            second = self.from_head[i].get(t)
            if second is None:
                continue
            cand = first + CatPath.edge(u, v, w) + second
            if best is None or cand.weight < best.weight:
                best = cand
        return best

    def insert(self, u: int, v: int, w: float = 1.0):
        if self.g.has_edge(u, v):
            raise DuplicateEdge(f"edge {u}->{v} already present")
        if len(self.cur_edges) >= self.F:
            self.phases.append(self.cur_edges)
            self.phase += 1
            self._start_phase()
        self.g.add_edge(u, v, w)
        self._record_edge(u, v)
        w = self.g.weight(u, v)
        to_tail = {}
        from_head = {}
        for x in range(self.n):
            p = self._best(x, u)
            if p is not None:
                to_tail[x] = p
            q = self._best(v, x)
            if q is not None:
                from_head[x] = q
        self.cur_edges.append((u, v, w))
        self.to_tail.append(to_tail)
        self.from_head.append(from_head)

    def query(self, s: int, t: int):
        """``(length, CatPath)``, or ``None`` if t is unreachable from s."""
        p = self._best(s, t)
        return None if p is None else (p.weight, p)

    def query_path(self, s: int, t: int) -> PathWitness | None:
        res = self.query(s, t)
        return None if res is None else res[1].witness()


def _as_weighted(g: DiGraph) -> DiGraph:
    out = DiGraph(g.n, weighted=True, C=1.0)
    for u, v, w in g.edges():
        out.add_edge(u, v, w)
    return out
