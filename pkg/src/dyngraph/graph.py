"""Directed graphs, update events and brute-force oracles.

Everything else in the package is checked against the functions in this
module, so they are kept deliberately simple: BFS, Dijkstra and an
iterative Tarjan.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DuplicateEdge, MissingEdge, WeightOutOfRange

INF = math.inf


@dataclass(frozen=True)
class InsertEdge:
    u: int
    v: int
    w: float = 1.0


@dataclass(frozen=True)
class DeleteEdge:
    u: int
    v: int


@dataclass(frozen=True)
class InsertIncoming:
    """Insert edges (u, v) for every (u, w) in ``edges``; all share head v."""

    v: int
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), float(w)) for u, w in self.edges))


UpdateEvent = InsertEdge | DeleteEdge | InsertIncoming


@dataclass(frozen=True)
class PathWitness:
    vertices: tuple
    total_weight: float = 0.0

    @property
    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def __len__(self):
        return max(len(self.vertices) - 1, 0)


class DiGraph:
    """Mutable directed graph on the fixed vertex set ``range(n)``.

    Unweighted graphs store weight 1 on every edge so the shortest-path code
    can treat both cases the same way.
    """

    def __init__(self, n: int, weighted: bool = False, C: float = 1.0,
                 allow_self_loops: bool = False):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        self.weighted = weighted
        self.C = float(C) if weighted else 1.0
        self.allow_self_loops = allow_self_loops
        self.out: list[dict[int, float]] = [dict() for _ in range(n)]
        self.inn: list[dict[int, float]] = [dict() for _ in range(n)]
        self.m = 0

    @classmethod
    def from_edges(cls, n, edges, **kw) -> "DiGraph":
        g = cls(n, **kw)
        for e in edges:
            g.add_edge(*e)
        return g

    def copy(self) -> "DiGraph":
        g = DiGraph(self.n, self.weighted, self.C, self.allow_self_loops)
        g.out = [dict(d) for d in self.out]
        g.inn = [dict(d) for d in self.inn]
        g.m = self.m
        return g

    def _check_vertex(self, v):
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")

    def has_edge(self, u, v) -> bool:
        return v in self.out[u]

    def weight(self, u, v) -> float:
        return self.out[u].get(v, INF)

    def add_edge(self, u, v, w=1.0):
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v and not self.allow_self_loops:
            raise ValueError(f"self-loop {u}->{u} not allowed")
        if v in self.out[u]:
            raise DuplicateEdge(f"edge {u}->{v} already present")
        w = float(w) if self.weighted else 1.0
        if not (1.0 <= w <= self.C) or math.isnan(w):
            raise WeightOutOfRange(f"weight {w} outside [1, {self.C}]")
        self.out[u][v] = w
        self.inn[v][u] = w
        self.m += 1

    def remove_edge(self, u, v) -> float:
        self._check_vertex(u)
        self._check_vertex(v)
        if v not in self.out[u]:
            raise MissingEdge(f"edge {u}->{v} not present")
        w = self.out[u].pop(v)
        del self.inn[v][u]
        self.m -= 1
        return w

    def edges(self):
        for u in range(self.n):
            for v, w in self.out[u].items():
                yield u, v, w

    def edge_set(self) -> set:
        return {(u, v) for u, v, _ in self.edges()}

    def successors(self, u):
        return self.out[u].keys()

    def predecessors(self, v):
        return self.inn[v].keys()

    def reversed(self) -> "DiGraph":
        g = DiGraph(self.n, self.weighted, self.C, self.allow_self_loops)
        for u, v, w in self.edges():
            g.add_edge(v, u, w)
        return g

    def __eq__(self, other):
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.n == other.n and self.out == other.out and self.inn == other.inn

    def __repr__(self):
        return f"DiGraph(n={self.n}, m={self.m}, weighted={self.weighted})"


def apply_update(g: DiGraph, e) -> None:
    """Apply one update event to ``g`` in place."""
    if isinstance(e, InsertEdge):
        g.add_edge(e.u, e.v, e.w)
    elif isinstance(e, DeleteEdge):
        g.remove_edge(e.u, e.v)
    elif isinstance(e, InsertIncoming):
        tails = [u for u, _ in e.edges]
        if len(set(tails)) != len(tails):
            raise ValueError("InsertIncoming tails must be distinct")
        if len(tails) > g.n:
            raise ValueError("InsertIncoming lists more than n edges")
        for u, _ in e.edges:
            if g.has_edge(u, e.v):
                raise DuplicateEdge(f"edge {u}->{e.v} already present")
        for u, w in e.edges:
            g.add_edge(u, e.v, w)
    else:
        raise TypeError(f"unknown update event {e!r}")


def inverse_events(g: DiGraph, e) -> list:
    """Events undoing ``e``; must be computed *before* applying ``e``."""
    if isinstance(e, InsertEdge):
        return [DeleteEdge(e.u, e.v)]
    if isinstance(e, DeleteEdge):
        return [InsertEdge(e.u, e.v, g.weight(e.u, e.v))]
    if isinstance(e, InsertIncoming):
        return [DeleteEdge(u, e.v) for u, _ in e.edges]
    raise TypeError(f"unknown update event {e!r}")


# --------------------------------------------------------------------------
# oracles


def reachable_set(g: DiGraph, s: int) -> set:
    seen = {s}
    dq = deque([s])
    while dq:
        x = dq.popleft()
        for y in g.out[x]:
            if y not in seen:
                seen.add(y)
                dq.append(y)
    return seen


def oracle_reach(g: DiGraph, s: int, t: int) -> bool:
    if s == t:
        return True
    return t in reachable_set(g, s)


def tarjan(n: int, succ, vertices: Iterable[int] | None = None) -> list[list[int]]:
    """Strongly connected components of the graph given by ``succ(v)``.

    Only ``vertices`` (default: all of ``range(n)``) are explored, and
    ``succ`` is expected to stay inside that set.  Components come out in
    reverse topological order of the condensation, as in the recursive
    formulation; the implementation uses an explicit stack.
    """
    if vertices is None:
        vertices = range(n)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in vertices:
        if index[root] >= 0:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    x = stack.pop()
                    on_stack[x] = False
                    comp.append(x)
                    if x == v:
                        break
                comps.append(comp)
    return comps


def canonical_labels(n: int, comps: Iterable[Iterable[int]]) -> list[int]:
    """Label every vertex by the minimum id of its class."""
    lab = [-1] * n
    for c in comps:
        c = list(c)
        m = min(c)
        for v in c:
            lab[v] = m
    return lab


def oracle_scc(g: DiGraph) -> list[int]:
    """Canonical SCC labelling: ``lab[v]`` is the minimum member of v's class."""
    return canonical_labels(g.n, tarjan(g.n, lambda v: g.out[v]))


def oracle_dist(g: DiGraph, s: int) -> tuple[list[float], list[int]]:
    """Single-source distances and a shortest-path parent vector.

    BFS on unweighted graphs, Dijkstra otherwise; unreachable vertices get
    ``inf`` and parent -1.
    """
    n = g.n
    dist = [INF] * n
    parent = [-1] * n
    dist[s] = 0
    if not g.weighted:
        dq = deque([s])
        while dq:
            x = dq.popleft()
            for y in sorted(g.out[x]):
                if dist[y] == INF:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    dq.append(y)
        return dist, parent
    heap = [(0.0, s)]
    done = [False] * n
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in g.out[x].items():
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, parent


def path_from_parents(parent: Sequence[int], s: int, t: int) -> list[int] | None:
    if s == t:
        return [s]
    if parent[t] < 0:
        return None
    out = [t]
    while out[-1] != s:
        out.append(parent[out[-1]])
        if len(out) > len(parent) + 1:
            raise ValueError("parent vector contains a cycle")
    out.reverse()
    return out


def path_weight(g: DiGraph, vertices: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(vertices, vertices[1:]):
        total += g.weight(a, b)
    return total


def verify_path(g: DiGraph, w: PathWitness, s: int, t: int,
                require_simple: bool = False, rel_tol: float = 1e-9) -> bool:
    vs = list(w.vertices)
    if not vs or vs[0] != s or vs[-1] != t:
        return False
    total = 0.0
    for a, b in zip(vs, vs[1:]):
        if not g.has_edge(a, b):
            return False
        total += g.weight(a, b)
    if not math.isclose(total, w.total_weight, rel_tol=rel_tol, abs_tol=1e-12):
        return False
    if require_simple and len(set(vs)) != len(vs):
        return False
    return True


def verify_out_tree(g: DiGraph, edges, s: int, expected_vertex_set) -> bool:
    """True iff ``edges`` form an out-tree of ``g`` rooted at ``s`` spanning exactly the expected set."""
    expected = set(expected_vertex_set)
    if s not in expected:
        return False
    parent: dict[int, int] = {}
    for a, b in edges:
        if not g.has_edge(a, b):
            return False
        if b == s or b in parent:
            return False
        parent[b] = a
    verts = {s} | set(parent) | {a for a in parent.values()}
    if verts != expected or set(parent) != expected - {s}:
        return False
    # every vertex must climb to s without repeating
    for v in parent:
        seen = set()
        x = v
        while x != s:
            if x in seen or x not in parent:
                return False
            seen.add(x)
            x = parent[x]
    return True
