"""Shared pieces of the incremental structures: rollback and graph searches."""
from __future__ import annotations

import heapq
import math
from collections import deque

from ..errors import NoMark


class Rollbackable:
    """Mark/rollback for structures that only grow between rebuilds.

    Subclasses list in ``_ROLLBACK_REFS`` the attributes they *reassign*
    (replaced wholesale at rebuilds, never mutated in place) and in
    ``_ROLLBACK_LOGS`` the lists they only append to.  Edges added to the
    current graph ``self.g`` must be recorded in ``self._inserted``.
    Marking is O(#attributes); rollback costs O(work undone).
    """

    _ROLLBACK_REFS: tuple = ()
    _ROLLBACK_LOGS: tuple = ()

    def _init_rollback(self):
        self._marks: list = []
        self._inserted: list[tuple[int, int]] = []

    def _record_edge(self, u: int, v: int):
        self._inserted.append((u, v))

    def rollback_mark(self):
        refs = {a: getattr(self, a) for a in self._ROLLBACK_REFS}
        lengths = {a: len(getattr(self, a)) for a in self._ROLLBACK_LOGS}
        self._marks.append((refs, lengths, len(self._inserted)))

    def rollback(self):
        if not self._marks:
            raise NoMark("rollback without a mark")
        refs, lengths, inserted = self._marks.pop()
        for a, val in refs.items():
            setattr(self, a, val)
        for a, k in lengths.items():
            del getattr(self, a)[k:]
        while len(self._inserted) > inserted:
            u, v = self._inserted.pop()
            self.g.remove_edge(u, v)


def bfs_parents(adj, s: int) -> dict[int, int]:
    """BFS from s over ``adj[x]`` (explored in ascending order); child -> parent in BFS order."""
    parent = {}
    seen = {s}
    dq = deque([s])
    while dq:
        x = dq.popleft()
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                parent[y] = x
                dq.append(y)
    return parent


def dijkstra(adj, s: int):
    """Dijkstra over ``adj[x] = [(y, weight, payload), ...]``.

    Returns ``(dist, via)`` where ``via[y] = (x, payload)`` is the edge used to
    settle y.  Ties keep the first relaxation; the heap breaks equal keys
    by vertex id, so the result is deterministic.
    """
    dist = {s: 0.0}
    via = {}
    heap = [(0.0, s)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, w, payload in adj.get(x, ()):
            nd = d + w
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                via[y] = (x, payload)
                heapq.heappush(heap, (nd, y))
    return dist, via
