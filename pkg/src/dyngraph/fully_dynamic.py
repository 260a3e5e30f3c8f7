"""Phase-based fully dynamic SCC, path and tree structures for general digraphs.

A phase spans at most ``F`` insertions.  Edges present at the start of the
phase form the graph ``g_minus``, which only loses edges until the next
phase; it is handled by a decremental SCC structure and by reach engines.
Edges inserted during the phase (``E_plus``) are few, so queries treat
them separately through the reachability rows of their heads.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .counters import Counters
from .dag import LayeredDetector
from .decscc import DecScc
from .engine import ReachEngine
from .errors import DuplicateEdge, InternalInconsistency, MissingEdge
from .graph import (DeleteEdge, DiGraph, InsertEdge, InsertIncoming, PathWitness,
                    canonical_labels, path_weight, tarjan)

SPECIAL_EXPONENT = 0.765
SEED_STRIDE = 7919


def default_phase_len(n: int) -> int:
    return max(1, math.ceil(math.sqrt(n)))


def default_special_delta(n: int) -> int:
    if n <= 1:
        return 1
    return max(1, min(n, math.ceil(n ** SPECIAL_EXPONENT)))


class _PhaseBase:
    """Shared phase bookkeeping: the current graph and the inserted-edge list."""

    def __init__(self, g: DiGraph, seed: int, phase_len: int | None, counters: Counters | None):
        self.counters = counters if counters is not None else Counters()
        self.n = g.n
        self.g = g.copy()
        self.seed = seed
        self.F = default_phase_len(g.n) if phase_len is None else max(1, int(phase_len))
        self.phase = 0
        self.phase_inserts = 0
        self.E_plus: list[tuple[int, int]] = []

    def _phase_seed(self, k: int) -> int:
        return self.seed + SEED_STRIDE * self.phase + k

    def heads(self) -> list[int]:
        seen = []
        for _, v in self.E_plus:
            if v not in seen:
                seen.append(v)
        return seen

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

    def insert(self, u: int, v: int, w: float = 1.0):
        if self.g.has_edge(u, v):
            raise DuplicateEdge(f"edge {u}->{v} already present")
        if self.phase_inserts >= self.F:
            self.rollover()
        self.g.add_edge(u, v, w)
        self.phase_inserts += 1
        new_head = all(h != v for _, h in self.E_plus)
        self.E_plus.append((u, v))
        self._on_insert(u, v, new_head)

    def delete(self, u: int, v: int):
        if not self.g.has_edge(u, v):
            raise MissingEdge(f"edge {u}->{v} not present")
        self.g.remove_edge(u, v)
        if (u, v) in self.E_plus:
            self.E_plus.remove((u, v))
            self._on_inserted_delete(u, v, all(h != v for _, h in self.E_plus))
        else:
            self._on_base_delete(u, v)

    def rollover(self):
        self.phase += 1
        self.phase_inserts = 0
        self.E_plus = []
        self._start_phase()


# --------------------------------------------------------------------------
# strongly connected components


class FdScc(_PhaseBase):
    """Fully dynamic SCCs.

    Forward and backward engines run over the whole current graph and track
    the heads of inserted edges as rows.  The SCCs of the graph equal those
    of a small certificate graph: a cycle through every decremental
    component plus, for every head y, edges y->w for all w reachable from y
    and w->y for all w reaching y.
    """

    def __init__(self, g: DiGraph, seed: int = 0, phase_len: int | None = None,
                 counters: Counters | None = None, **engine_kw):
        super().__init__(g, seed, phase_len, counters)
        self.fwd = ReachEngine.from_graph(self.g, seed=seed, counters=self.counters, **engine_kw)
        self.bwd = ReachEngine.from_graph(self.g.reversed(), seed=seed + 1,
                                          counters=self.counters, **engine_kw)
        self._start_phase()

    def _start_phase(self):
        self.dec = DecScc(self.g)
        self.fwd.rows_reset()
        self.bwd.rows_reset()

    def _on_insert(self, u, v, new_head):
        self.fwd.insert(u, v)
        self.bwd.insert(v, u)
        if new_head:
            self.fwd.row_add(v)
            self.bwd.row_add(v)

    def _on_inserted_delete(self, u, v, head_gone):
        self.fwd.delete(u, v)
        self.bwd.delete(v, u)
        if head_gone:
            self.fwd.rows_reset()
            self.bwd.rows_reset()
            for h in self.heads():
                self.fwd.row_add(h)
                self.bwd.row_add(h)

    def _on_base_delete(self, u, v):
        self.fwd.delete(u, v)
        self.bwd.delete(v, u)
        self.dec.delete(u, v)

    def certificate(self) -> list[list[int]]:
        """Adjacency lists of the certificate graph."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for mem in self.dec.members.values():
            if len(mem) > 1:
                for a, b in zip(mem, mem[1:] + mem[:1]):
                    adj[a].append(b)
        heads = self.fwd.R
        if heads:
            out_rows = self.fwd.rows_read()
            in_rows = self.bwd.rows_read()
            ks, ws = np.nonzero(out_rows)
            for k, w in zip(ks.tolist(), ws.tolist()):
                if w != heads[k]:
                    adj[heads[k]].append(w)
            ks, ws = np.nonzero(in_rows)
            for k, w in zip(ks.tolist(), ws.tolist()):
                if w != heads[k]:
                    adj[w].append(heads[k])
        return adj

    def components(self) -> list[int]:
        """Canonical labels: every vertex mapped to the smallest member of its SCC."""
        adj = self.certificate()
        return canonical_labels(self.n, tarjan(self.n, adj.__getitem__))


# --------------------------------------------------------------------------
# path reporting


@dataclass
class PartitionResult:
    """Vertices reachable from s, split by the inserted edge first used to reach them.

    ``sets[0]`` is what s reaches in ``g_minus``; ``sets[i]`` (i > 0) is
    entered through inserted edge ``entry[i]`` whose tail lies in
    ``sets[parent[i]]``.
    """

    sets: list[list[int]]
    parent: list[int]
    entry: list[tuple[int, int] | None]
    assign: list[int]

    def chain(self, i: int) -> list[int]:
        out = [i]
        while out[-1] != 0:
            out.append(self.parent[out[-1]])
        out.reverse()
        return out

    def reachable(self) -> set:
        return {v for s in self.sets for v in s}


class FdPath(_PhaseBase):
    """Fully dynamic s->t path reporting.

    ``D`` and ``Q`` are reach engines over ``g_minus``; ``D`` tracks the
    heads of inserted edges as rows.  Both are rebuilt at every rollover.
    """

    def __init__(self, g: DiGraph, seed: int = 0, phase_len: int | None = None,
                 counters: Counters | None = None, **engine_kw):
        super().__init__(g, seed, phase_len, counters)
        self._engine_kw = engine_kw
        self._start_phase()

    def _start_phase(self):
        self.g_minus = self.g.copy()
        self.dec = DecScc(self.g_minus)
        self.D = ReachEngine.from_graph(self.g_minus, seed=self._phase_seed(0),
                                        counters=self.counters, **self._engine_kw)
        self.Q = ReachEngine.from_graph(self.g_minus, seed=self._phase_seed(1),
                                        counters=self.counters, **self._engine_kw)

    def _on_insert(self, u, v, new_head):
        if new_head:
            self.D.row_add(v)

    def _on_inserted_delete(self, u, v, head_gone):
        if head_gone:
            self.D.rows_reset()
            for h in self.heads():
                self.D.row_add(h)

    def _on_base_delete(self, u, v):
        self.g_minus.remove_edge(u, v)
        self.D.delete(u, v)
        self.Q.delete(u, v)
        return self.dec.delete(u, v)

    def rebuild_engines(self):
        self.D.rebuild()
        self.Q.rebuild()

    # ------------------------------------------------------------------

    def partition(self, s: int) -> PartitionResult:
        n = self.n
        assign = [-1] * n
        first = [x for x in range(n) if self.Q.query_reach(s, x)]
        for x in first:
            assign[x] = 0
        sets = [first]
        parent = [-1]
        entry: list = [None]
        while True:
            edge = next(((u, v) for u, v in self.E_plus if assign[u] >= 0 and assign[v] < 0), None)
            if edge is None:
                break
            u, v = edge
            i = len(sets)
            row = self.D.reach_row(v)
            block = [x for x in np.flatnonzero(row).tolist() if assign[x] < 0]
            for x in block:
                assign[x] = i
            sets.append(block)
            parent.append(assign[u])
            entry.append(edge)
        return PartitionResult(sets, parent, entry, assign)

    def _leg(self, p: int, q: int) -> list[int]:
        """Simple p->q path inside g_minus; q must be reachable from p there."""
        dec = self.dec
        cur = dec.comp(p)
        target = dec.comp(q)
        limit = dec.label[target]
        hops = []
        while cur != target:
            nxt = None
            for Y in sorted(dec.successors(cur), key=dec.label.__getitem__):
                if dec.label[Y] > limit:
                    break
                a, b = dec.rep(cur, Y)
                if Y == target or self.Q.query_reach(b, q):
                    nxt = Y
                    hops.append((a, b))
                    break
            if nxt is None:
                raise InternalInconsistency(f"condensation walk stuck towards {q}")
            cur = nxt
        verts = []
        x = p
        for a, b in hops:
            verts.extend(dec.path_in_scc(x, a).vertices)
            x = b
        verts.extend(dec.path_in_scc(x, q).vertices)
        return verts

    def _path_once(self, s: int, t: int) -> PathWitness | None:
        part = self.partition(s)
        if part.assign[t] < 0:
            return None
        chain = part.chain(part.assign[t])
        verts: list[int] = []
        start = s
        for k, idx in enumerate(chain):
            if k + 1 < len(chain):
                u, v = part.entry[chain[k + 1]]
                verts.extend(self._leg(start, u))
                start = v
            else:
                verts.extend(self._leg(start, t))
        return PathWitness(tuple(verts), path_weight(self.g, verts))

    def query_path(self, s: int, t: int) -> PathWitness | None:
        if s == t:
            return PathWitness((s,), 0.0)
        try:
            return self._path_once(s, t)
        except InternalInconsistency:
            self.rebuild_engines()
            return self._path_once(s, t)


# --------------------------------------------------------------------------
# tree reporting


class SpecialTracker:
    """Detectors for the label blocks ``[j*delta, (j+1)*delta - 1]``.

    A component is *special* when its label interval crosses a block
    boundary.  Members of every non-special component are added to the
    detector of its block; since intervals only shrink within a phase,
    a vertex joins at most one detector per phase.
    """

    def __init__(self, dec: DecScc, g_minus: DiGraph, delta: int, seed: int,
                 counters: Counters, **engine_kw):
        self.dec = dec
        self.n = g_minus.n
        self.delta = delta
        q = math.ceil(self.n / delta) if self.n else 0
        blocks: list[list[int]] = [[] for _ in range(q)]
        self.block_of = [-1] * self.n
        for cid in dec.components():
            j = self.fits(cid)
            if j is not None:
                for y in dec.members[cid]:
                    blocks[j].append(y)
                    self.block_of[y] = j
        self.detectors = [LayeredDetector(g_minus, blocks[j], seed=seed + j, counters=counters,
                                          **engine_kw) for j in range(q)]

    def fits(self, cid: int) -> int | None:
        a, b = self.dec.interval(cid)
        j = a // self.delta
        return j if b // self.delta == j else None

    def is_special(self, cid: int) -> bool:
        return self.fits(cid) is None

    def special_components(self) -> list[int]:
        return [c for c in self.dec.components() if self.is_special(c)]

    def on_delete(self, u: int, v: int, splits):
        for det in self.detectors:
            det.delete(u, v)
        for _, children in splits:
            for cid in children:
                j = self.fits(cid)
                if j is None:
                    continue
                for y in self.dec.members[cid]:
                    if self.block_of[y] < 0:
                        self.block_of[y] = j
                        self.detectors[j].add_member(y)
                    assert self.block_of[y] == j, "vertex moved between detectors within a phase"

    def check(self) -> None:
        specials = self.special_components()
        assert len(specials) <= 2 * self.n / self.delta, "too many special components"
        for cid in self.dec.components():
            j = self.fits(cid)
            for y in self.dec.members[cid]:
                assert self.block_of[y] == (-1 if j is None else j)

    def rebuild(self):
        for det in self.detectors:
            det.rebuild()


class FdTree(FdPath):
    """Fully dynamic single-source reachability trees."""

    def __init__(self, g: DiGraph, seed: int = 0, phase_len: int | None = None,
                 delta: int | None = None, counters: Counters | None = None, **engine_kw):
        n = g.n
        self.delta = default_special_delta(n) if delta is None else max(1, min(int(delta), max(n, 1)))
        super().__init__(g, seed=seed, phase_len=phase_len, counters=counters, **engine_kw)

    def _start_phase(self):
        super()._start_phase()
        self.tracker = SpecialTracker(self.dec, self.g_minus, self.delta, self._phase_seed(2),
                                      self.counters, **self._engine_kw)

    def _on_base_delete(self, u, v):
        splits = super()._on_base_delete(u, v)
        self.tracker.on_delete(u, v, splits)
        return splits

    def rebuild_engines(self):
        super().rebuild_engines()
        self.tracker.rebuild()

    def _subgraph_edges(self, part: PartitionResult, s: int) -> list[tuple[int, int]]:
        dec = self.dec
        tracker = self.tracker
        edges: set = set()
        for i, block in enumerate(part.sets):
            if not block:
                continue
            r = part.entry[i][1] if i else s
            inside = part.assign
            comps = sorted({dec.comp(x) for x in block})
            for cid in comps:
                edges.update(dec.scc_subgraph(cid))
            special = [c for c in comps if tracker.is_special(c)]
            for Z in special:
                for X in dec.cond_in[Z]:
                    if inside[dec.members[X][0]] == i:
                        edges.add(dec.rep(X, Z))
                for X in dec.cond_out[Z]:
                    if inside[dec.members[X][0]] == i:
                        edges.add(dec.rep(Z, X))
            for t in block:
                if t == r:
                    continue
                j = next((j for j, det in enumerate(tracker.detectors) if det.query(r, t)), None)
                if j is None:
                    continue
                preds = self.g_minus.inn[t]
                for x in tracker.detectors[j].members:
                    if x in preds and inside[x] == i:
                        edges.add((x, t))
        for e in part.entry[1:]:
            edges.add(e)
        return sorted(edges)

    def _tree_once(self, s: int):
        part = self.partition(s)
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self._subgraph_edges(part, s):
            adj[a].append(b)
        seen = {s}
        dq = deque([s])
        tree = []
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    tree.append((x, y))
                    dq.append(y)
        if seen != part.reachable():
            raise InternalInconsistency("tree misses part of the reachable set")
        return tree

    def query_tree(self, s: int) -> list[tuple[int, int]]:
        try:
            return self._tree_once(s)
        except InternalInconsistency:
            self.rebuild_engines()
            return self._tree_once(s)
