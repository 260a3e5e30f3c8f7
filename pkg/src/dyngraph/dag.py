"""Fully dynamic structures for graphs that stay acyclic.

* :class:`TopOrder` keeps a topological order under insertions by
  rearranging only the window between the endpoints of a back edge.
* :class:`DagPathStruct` reports s->t paths by walking out-edges in
  topological order and descending into the first head that reaches t.
* :class:`LayeredDetector` answers "is there a u->v path whose last-but-one
  vertex lies in Y", on a three-layer copy of the graph.
* :class:`DagTreeStruct` reports single-source reachability trees using one
  detector per block of ``delta`` consecutive vertex ids.
"""
from __future__ import annotations

import heapq
import math
from collections import deque

from .counters import Counters
from .engine import ReachEngine
from .errors import CycleIntroduced, DuplicateEdge, InternalInconsistency, MissingEdge
from .graph import DeleteEdge, DiGraph, InsertEdge, InsertIncoming, PathWitness

DEFAULT_RHO = 0.529


def default_delta(n: int, rho: float = DEFAULT_RHO) -> int:
    if n <= 1:
        return 1
    return max(1, min(n, math.ceil(n ** ((1 + rho) / 2))))


def kahn_order(n: int, succ, vertices=None) -> list[int]:
    """Topological order with smallest-id tie-break; raises CycleIntroduced on a cycle."""
    verts = list(range(n)) if vertices is None else list(vertices)
    inside = set(verts)
    indeg = {v: 0 for v in verts}
    for v in verts:
        for w in succ(v):
            if w in inside:
                indeg[w] += 1
    heap = [v for v in verts if indeg[v] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        v = heapq.heappop(heap)
        out.append(v)
        for w in succ(v):
            if w in inside:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
    if len(out) != len(verts):
        raise CycleIntroduced("graph contains a cycle")
    return out


class TopOrder:
    """Array of vertices with its inverse permutation."""

    def __init__(self, order):
        self.A = list(order)
        self.pos = [0] * len(self.A)
        for i, v in enumerate(self.A):
            self.pos[v] = i

    def __getitem__(self, v):
        return self.pos[v]

    def is_valid_for(self, g: DiGraph) -> bool:
        return all(self.pos[u] < self.pos[v] for u, v, _ in g.edges())

    def make_room(self, u: int, v: int, reaches):
        """Reorder so that u precedes v, before edge uv is inserted.

        ``reaches(a, b)`` answers reachability in the graph *without* uv.
        Returns ``(S, Z, T)`` for the rewritten window, or ``None`` when the
        order already fits.  Raises :class:`CycleIntroduced` (leaving the
        order untouched) if uv would close a cycle.
        """
        if u == v:
            raise CycleIntroduced(f"self-loop {u}->{u}")
        lo, hi = self.pos[v], self.pos[u]
        if hi < lo:
            return None
        window = self.A[lo:hi + 1]
        after = [w for w in window if w == v or reaches(v, w)]
        before = [w for w in window if w == u or reaches(w, u)]
        if set(after) & set(before):
            raise CycleIntroduced(f"edge {u}->{v} closes a cycle")
        marked = set(after) | set(before)
        middle = [w for w in window if w not in marked]
        self.A[lo:hi + 1] = before + middle + after
        for i in range(lo, hi + 1):
            self.pos[self.A[i]] = i
        return before, middle, after


class DagPathStruct:
    """Topological order plus path reporting on a dynamic DAG."""

    def __init__(self, g: DiGraph, seed: int = 0, counters: Counters | None = None, **engine_kw):
        self.counters = counters if counters is not None else Counters()
        self.graph = g.copy()
        self.n = g.n
        self.order = TopOrder(kahn_order(g.n, lambda v: self.graph.out[v]))
        self.engine = ReachEngine.from_graph(self.graph, seed=seed, counters=self.counters, **engine_kw)
        self.last_split = None

    def reaches(self, a: int, b: int) -> bool:
        return self.engine.query_reach(a, b)

    def insert(self, u: int, v: int, w: float = 1.0):
        if self.graph.has_edge(u, v):
            raise DuplicateEdge(f"edge {u}->{v} already present")
        self.last_split = self.order.make_room(u, v, self.reaches)
        self.graph.add_edge(u, v, w)
        self.engine.insert(u, v)

    def delete(self, u: int, v: int):
        if not self.graph.has_edge(u, v):
            raise MissingEdge(f"edge {u}->{v} not present")
        self.graph.remove_edge(u, v)
        self.engine.delete(u, v)
        self.last_split = None

    def update(self, e):
        if isinstance(e, InsertEdge):
            self.insert(e.u, e.v, e.w)
        elif isinstance(e, DeleteEdge):
            self.delete(e.u, e.v)
        elif isinstance(e, InsertIncoming):
            for u, w in e.edges:
                self.insert(u, e.v, w)
        else:
            raise TypeError(f"unknown update event {e!r}")

    def toporder(self) -> list[int]:
        return list(self.order.A)

    def query_path(self, s: int, t: int) -> PathWitness | None:
        """A simple s->t path, or None when t is unreachable.

        Issues at most ``pos[t] - pos[s]`` engine queries when s reaches t and
        none when t precedes s: one reachability check, then only heads lying
        strictly between s and t in the order, each at most once (heads that
        fail sit before the chosen one, and the walk only moves forward).
        """
        if s == t:
            return PathWitness((s,), 0.0)
        if self.order.pos[t] < self.order.pos[s] or not self.reaches(s, t):
            return None
        pos = self.order.pos
        limit = pos[t]
        path = [s]
        cur = s
        while cur != t:
            heads = sorted((x for x in self.graph.out[cur] if pos[x] <= limit), key=pos.__getitem__)
            nxt = None
            for x in heads:
                if x == t or self.reaches(x, t):
                    nxt = x
                    break
            if nxt is None:
                raise InternalInconsistency(f"lost the path from {cur} to {t}")
            path.append(nxt)
            cur = nxt
        return PathWitness(tuple(path), float(len(path) - 1))


class LayeredDetector:
    """Detects u->v paths whose last-but-one vertex lies in a set Y.

    Works on three copies of the vertex set: ``x``, ``x'`` (= n + x) and
    ``x''`` (= 2n + x).  Each graph edge xy appears as xy and x'y'', and every
    member y of Y contributes yy'.  A path u -> v'' must cross exactly one
    yy' edge and then one y'v'' edge.
    """

    def __init__(self, g: DiGraph, members=(), seed: int = 0,
                 counters: Counters | None = None, **engine_kw):
        n = g.n
        self.n = n
        self.members: set[int] = set(members)
        layered = DiGraph(3 * n)
        for u, v, _ in g.edges():
            layered.add_edge(u, v)
            layered.add_edge(n + u, 2 * n + v)
        for y in self.members:
            layered.add_edge(y, n + y)
        self.counters = counters if counters is not None else Counters()
        self.engine = ReachEngine.from_graph(layered, seed=seed, counters=self.counters,
                                             query_counter="detector_queries", **engine_kw)

    def insert(self, u: int, v: int):
        self.engine.insert(u, v)
        self.engine.insert(self.n + u, 2 * self.n + v)

    def delete(self, u: int, v: int):
        self.engine.delete(u, v)
        self.engine.delete(self.n + u, 2 * self.n + v)

    def add_member(self, y: int):
        if y in self.members:
            return
        self.members.add(y)
        self.engine.insert(y, self.n + y)

    def query(self, u: int, v: int) -> bool:
        return self.engine.query_reach(u, 2 * self.n + v)

    def rebuild(self):
        self.engine.rebuild()


class DagTreeStruct(DagPathStruct):
    """Single-source reachability trees on a dynamic DAG.

    Detector j watches the id block ``[j*delta, (j+1)*delta - 1]``.  For a
    reachable t, the first detector that fires tells which block holds the
    smallest in-neighbour of t reachable from s; only that block is scanned.
    """

    def __init__(self, g: DiGraph, seed: int = 0, delta: int | None = None,
                 counters: Counters | None = None, **engine_kw):
        super().__init__(g, seed=seed, counters=counters, **engine_kw)
        n = g.n
        self.delta = default_delta(n) if delta is None else max(1, min(int(delta), max(n, 1)))
        q = math.ceil(n / self.delta) if n else 0
        self.detectors = [
            LayeredDetector(self.graph, range(j * self.delta, min((j + 1) * self.delta, n)),
                            seed=seed + 1 + j, counters=self.counters, **engine_kw)
            for j in range(q)
        ]

    def block(self, j: int) -> range:
        return range(j * self.delta, min((j + 1) * self.delta, self.n))

    def insert(self, u: int, v: int, w: float = 1.0):
        super().insert(u, v, w)
        for det in self.detectors:
            det.insert(u, v)

    def delete(self, u: int, v: int):
        super().delete(u, v)
        for det in self.detectors:
            det.delete(u, v)

    def rebuild(self):
        self.engine.rebuild()
        for det in self.detectors:
            det.rebuild()

    def _tree_once(self, s: int):
        reach = [self.reaches(s, t) for t in range(self.n)]
        edges = []
        for t in range(self.n):
            if t == s or not reach[t]:
                continue
            j = next((j for j, det in enumerate(self.detectors) if det.query(s, t)), None)
            if j is None:
                raise InternalInconsistency(f"no detector fires for reachable {t}")
            preds = self.graph.inn[t]
            tail = next((x for x in self.block(j) if x in preds and reach[x]), None)
            if tail is None:
                raise InternalInconsistency(f"detector {j} fired for {t} without a witness")
            edges.append((tail, t))
        return edges

    def query_tree(self, s: int) -> list[tuple[int, int]]:
        try:
            return self._tree_once(s)
        except InternalInconsistency:
            self.rebuild()
            return self._tree_once(s)


def bfs_tree(n: int, succ, s: int) -> list[tuple[int, int]]:
    """BFS out-tree edges from s, exploring neighbours in ascending id."""
    seen = [False] * n
    seen[s] = True
    dq = deque([s])
    edges = []
    while dq:
        x = dq.popleft()
        for y in sorted(succ(x)):
            if not seen[y]:
                seen[y] = True
                edges.append((x, y))
                dq.append(y)
    return edges
