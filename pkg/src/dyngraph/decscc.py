"""Decremental strongly connected components with nesting topological labels.

Each component owns a contiguous label interval whose length is its size,
and the intervals are ordered topologically along the condensation.  When a
deletion splits a component, the children's intervals partition the parent
interval, so a label interval only ever shrinks to a sub-interval.

The condensation keeps, for every pair of components (X, Y), the set of
original edges from X to Y; the representative of the pair is the smallest
such edge as a (tail, head) tuple.

Splits are detected by re-running Tarjan on the affected component only.
"""
from __future__ import annotations

import heapq
from collections import deque

from .errors import MissingEdge, NotStronglyConnected, UnknownComponent
from .graph import DiGraph, PathWitness, path_weight, tarjan


def order_components(comps: list[list[int]], comp_index: dict[int, int], succ) -> list[int]:
    """Topological order of ``comps`` (indices), ties broken by smallest member."""
    k = len(comps)
    keys = [min(c) for c in comps]
    indeg = [0] * k
    adj: list[set[int]] = [set() for _ in range(k)]
    for i, c in enumerate(comps):
        for x in c:
            for y in succ(x):
                j = comp_index.get(y)
                if j is not None and j != i and j not in adj[i]:
                    adj[i].add(j)
                    indeg[j] += 1
    heap = [(keys[i], i) for i in range(k) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(i)
        for j in adj[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (keys[j], j))
    assert len(out) == k, "condensation must be acyclic"
    return out


class DecScc:
    """SCCs of a graph under edge deletions, with labels and a condensation."""

    def __init__(self, g: DiGraph):
        self.g = g.copy()
        self.n = g.n
        self.comp_of = [0] * self.n
        self.members: dict[int, list[int]] = {}
        self.label: dict[int, int] = {}
        self.cond: dict[tuple[int, int], set] = {}
        self.cond_out: dict[int, set[int]] = {}
        self.cond_in: dict[int, set[int]] = {}
        self.version = 0
        self._next_id = 0
        self.split_log: list = []

        comps = tarjan(self.n, lambda v: self.g.out[v])
        index = {}
        for i, c in enumerate(comps):
            for v in c:
                index[v] = i
        start = 0
        for i in order_components(comps, index, lambda v: self.g.out[v]):
            cid = self._new_id()
            self.members[cid] = sorted(comps[i])
            self.label[cid] = start
            start += len(comps[i])
            self.cond_out[cid] = set()
            self.cond_in[cid] = set()
            for v in comps[i]:
                self.comp_of[v] = cid
        for u, v, _ in self.g.edges():
            self._add_cond(u, v)

    def _new_id(self) -> int:
        cid = self._next_id
        self._next_id += 1
        return cid

    # ------------------------------------------------------------------
    # condensation bookkeeping

    def _add_cond(self, u, v):
        X, Y = self.comp_of[u], self.comp_of[v]
        if X == Y:
            return
        bucket = self.cond.get((X, Y))
        if bucket is None:
            bucket = self.cond[(X, Y)] = set()
            self.cond_out[X].add(Y)
            self.cond_in[Y].add(X)
        bucket.add((u, v))

    def _drop_cond(self, X, Y, e):
        bucket = self.cond[(X, Y)]
        bucket.discard(e)
        if not bucket:
            del self.cond[(X, Y)]
            self.cond_out[X].discard(Y)
            self.cond_in[Y].discard(X)

    # ------------------------------------------------------------------
    # queries on the partition

    def comp(self, v: int) -> int:
        return self.comp_of[v]

    def components(self):
        return self.members.keys()

    def size(self, cid: int) -> int:
        return len(self.members[cid])

    def interval(self, cid: int) -> tuple[int, int]:
        start = self.label[cid]
        return start, start + len(self.members[cid]) - 1

    def rep(self, X: int, Y: int) -> tuple[int, int] | None:
        bucket = self.cond.get((X, Y))
        return min(bucket) if bucket else None

    def successors(self, X: int):
        return self.cond_out[X]

    def canonical_labels(self) -> list[int]:
        return [self.members[self.comp_of[v]][0] for v in range(self.n)]

    # ------------------------------------------------------------------
    # deletion

    def delete(self, u: int, v: int) -> list:
        """Delete edge uv; returns ``[(parent_id, [child ids in label order])]`` on a split."""
        if not self.g.has_edge(u, v):
            raise MissingEdge(f"edge {u}->{v} not present")
        self.g.remove_edge(u, v)
        X, Y = self.comp_of[u], self.comp_of[v]
        if X != Y:
            self._drop_cond(X, Y, (u, v))
            return []
        S = self.members[X]
        inside = set(S)
        out = self.g.out
        parts = tarjan(self.n, lambda x: [y for y in out[x] if y in inside], S)
        if len(parts) == 1:
            return []
        return [self._split(X, parts)]

    def _split(self, X: int, parts: list[list[int]]):
        parent_start, parent_end = self.interval(X)
        parent_size = len(self.members[X])
        parts = [sorted(p) for p in parts]
        keep = max(range(len(parts)), key=lambda i: (len(parts[i]), -parts[i][0]))
        index = {v: i for i, p in enumerate(parts) for v in p}
        order = order_components(parts, index, lambda x: self.g.out[x])

        ids = [0] * len(parts)
        moved: set[int] = set()
        start = parent_start
        for i in order:
            cid = X if i == keep else self._new_id()
            ids[i] = cid
            self.members[cid] = parts[i]
            self.label[cid] = start
            start += len(parts[i])
            if i != keep:
                self.cond_out[cid] = set()
                self.cond_in[cid] = set()
                assert len(parts[i]) * 2 <= parent_size, "moved child must be at most half the parent"
                moved.update(parts[i])
        assert start == parent_end + 1, "children must tile the parent interval"

        # re-hang every edge touching a vertex that left X
        for w in moved:
            self.comp_of[w] = ids[index[w]]
        for w in moved:
            for y in self.g.out[w]:
                oy = X if y in index else self.comp_of[y]
                if oy != X:
                    self._drop_cond(X, oy, (w, y))
                self._add_cond(w, y)
            for y in self.g.inn[w]:
                if y in moved:
                    continue
                oy = X if y in index else self.comp_of[y]
                if oy != X:
                    self._drop_cond(oy, X, (y, w))
                self._add_cond(y, w)
        self.version += 1
        children = [ids[i] for i in order]
        self.split_log.append((X, children))
        return X, children

    # ------------------------------------------------------------------
    # reporting

    def path_in_scc(self, u: int, v: int) -> PathWitness:
        """Shortest-hop u->v path inside their common component (ascending-id BFS)."""
        X = self.comp_of[u]
        if self.comp_of[v] != X:
            raise NotStronglyConnected(f"{u} and {v} are in different components")
        if u == v:
            return PathWitness((u,), 0.0)
        parent = {u: u}
        dq = deque([u])
        while dq:
            x = dq.popleft()
            for y in sorted(self.g.out[x]):
                if y not in parent and self.comp_of[y] == X:
                    parent[y] = x
                    if y == v:
                        dq.clear()
                        break
                    dq.append(y)
        vs = [v]
        while vs[-1] != u:
            vs.append(parent[vs[-1]])
        vs.reverse()
        return PathWitness(tuple(vs), path_weight(self.g, vs))

    def _bfs_edges(self, root, X, adj, flip):
        seen = {root}
        dq = deque([root])
        edges = []
        while dq:
            x = dq.popleft()
            for y in sorted(adj[x]):
                if y not in seen and self.comp_of[y] == X:
                    seen.add(y)
                    edges.append((y, x) if flip else (x, y))
                    dq.append(y)
        return edges

    def scc_subgraph(self, cid: int) -> list[tuple[int, int]]:
        """Out-tree plus in-tree at the smallest member: a sparse strongly connected subgraph."""
        if cid not in self.members:
            raise UnknownComponent(f"no component {cid}")
        root = self.members[cid][0]
        edges = set(self._bfs_edges(root, cid, self.g.out, False))
        edges.update(self._bfs_edges(root, cid, self.g.inn, True))
        return sorted(edges)

    # ------------------------------------------------------------------

    def check_invariants(self) -> None:
        covered = []
        for cid, mem in self.members.items():
            assert mem, "empty component"
            assert all(self.comp_of[v] == cid for v in mem)
            covered.append(self.interval(cid))
        covered.sort()
        nxt = 0
        for a, b in covered:
            assert a == nxt, "label intervals must tile [0, n)"
            nxt = b + 1
        assert nxt == self.n
        expected: dict = {}
        for u, v, _ in self.g.edges():
            X, Y = self.comp_of[u], self.comp_of[v]
            if X != Y:
                expected.setdefault((X, Y), set()).add((u, v))
                assert self.label[X] < self.label[Y], "condensation edge against label order"
        assert expected == self.cond, "condensation out of sync with the graph"
        for (X, Y) in self.cond:
            assert Y in self.cond_out[X] and X in self.cond_in[Y]
        assert sum(len(s) for s in self.cond_out.values()) == len(self.cond)
