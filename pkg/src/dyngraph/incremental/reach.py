"""Incremental reachability: out-trees for every source, and s->t paths.

Both structures work in phases of F updates.  At the start of a phase they
hold an out-tree of every vertex in the phase-start graph G0; queries combine
those trees with the few edges inserted since.  At the end of a phase all
n trees are refreshed at once by :func:`trees_recompute`, which only needs
boolean matrix products over the heads of the new edges.
"""
from __future__ import annotations

import math

import numpy as np

from ..algebra import bool_product_witness
from ..errors import DuplicateEdge
from ..graph import DiGraph, InsertIncoming, PathWitness, apply_update, tarjan
from .base import Rollbackable, bfs_parents
from .catpath import CatPath

DEFAULT_ALPHA = 0.529

Trees = list  # trees[s]: dict child -> parent, in BFS discovery order


def default_phase_len(n: int, alpha: float) -> int:
    return max(1, math.ceil(max(n, 1) ** alpha))


def bfs_trees(g: DiGraph) -> Trees:
    return [bfs_parents(g.out, s) for s in range(g.n)]


def tree_edges(tree: dict) -> list[tuple[int, int]]:
    return [(p, c) for c, p in tree.items()]


def _closure(step: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure by repeated boolean squaring."""
    k = step.shape[0]
    clos = step | np.eye(k, dtype=bool)
    for _ in range(max(1, math.ceil(math.log2(max(k, 2))))):
        nxt, _ = bool_product_witness(clos, clos)
        if (nxt == clos).all():
            break
        clos = nxt
    return clos


def trees_recompute(g: DiGraph, old_trees: Trees, new_edges) -> Trees:
    """Out-trees of every vertex of ``g``, given trees of ``g`` minus ``new_edges``.

    Works on strongly connected components of ``g``.  For each component C
    with representative v_C (its smallest vertex), the algorithm finds one
    edge entering every other component reachable from C, using

    * which heads of new edges v_C can reach (boolean closure over the heads),
    * for each head w, edges entering components in the old tree of w or new
      edges leaving the old reach of w,
    * one boolean product with witnesses to pick, per (C, X), a head w that
      supplies an entering edge of X.

    The tree of s is then a BFS over the per-component in/out trees plus the
    entering edges chosen for the component of s.
    """
    n = g.n
    new_edges = [(u, v) for u, v in new_edges]
    if not new_edges:
        return old_trees
    comps = tarjan(n, lambda v: g.out[v])
    comps = sorted((sorted(c) for c in comps), key=lambda c: c[0])
    comp_of = [0] * n
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    reps = [c[0] for c in comps]
    k = len(comps)

    # per-component BFS trees from the representative, both directions
    local = [[] for _ in range(n)]
    for i, c in enumerate(comps):
        if len(c) == 1:
            continue
        inside_out = {x: [y for y in g.out[x] if comp_of[y] == i] for x in c}
        inside_in = {x: [y for y in g.inn[x] if comp_of[y] == i] for x in c}
        for child, par in bfs_parents(inside_out, c[0]).items():
            local[par].append(child)
        for child, par in bfs_parents(inside_in, c[0]).items():
            local[child].append(par)

    # old reachability from the old trees
    old_reach = np.zeros((n, n), dtype=bool)
    for s in range(n):
        old_reach[s, s] = True
        keys = list(old_trees[s].keys())
        if keys:
            old_reach[s, keys] = True

    heads = sorted({v for _, v in new_edges})
    head_index = {w: j for j, w in enumerate(heads)}
    new_to_head = np.zeros((n, len(heads)), dtype=bool)
    for u, v in new_edges:
        new_to_head[u, head_index[v]] = True
    via_new, _ = bool_product_witness(old_reach, new_to_head)
    step = old_reach[:, heads] | via_new
    reach_heads, _ = bool_product_witness(step[reps], _closure(step[heads]))

    def entering(src: int) -> dict[int, tuple[int, int]]:
        """Edges entering other components found from src's old tree and new edges."""
        best: dict[int, tuple[int, int]] = {}
        for child, par in old_trees[src].items():
            X = comp_of[child]
            if comp_of[par] != X and (X not in best or (par, child) < best[X]):
                best[X] = (par, child)
        for u, v in new_edges:
            X = comp_of[v]
            if old_reach[src, u] and comp_of[u] != X and (X not in best or (u, v) < best[X]):
                best[X] = (u, v)
        return best

    head_supply = [entering(w) for w in heads]
    supplies = np.zeros((len(heads), k), dtype=bool)
    for j, best in enumerate(head_supply):
        if best:
            supplies[j, list(best)] = True
    comp_reach, witness = bool_product_witness(reach_heads, supplies)

    chosen: list[dict[int, tuple[int, int]]] = []
    for c in range(k):
        pick = entering(reps[c])
        for X in np.flatnonzero(comp_reach[c]).tolist():
            if X != c and X not in pick:
                pick[X] = head_supply[int(witness[c, X])][X]
        pick.pop(c, None)
        chosen.append(pick)

    trees = []
    for s in range(n):
        extra = chosen[comp_of[s]]
        adj = [list(local[x]) for x in range(n)]
        for a, b in extra.values():
            adj[a].append(b)
        trees.append(bfs_parents(adj, s))
    return trees


class IncrTree(Rollbackable):
    """Reachability trees under insertions of incoming-edge groups."""

    _ROLLBACK_REFS = ("trees", "g0", "phase_edges", "heads", "count", "phase")
    _ROLLBACK_LOGS = ("phase_edges", "heads")

    def __init__(self, g: DiGraph, alpha: float = DEFAULT_ALPHA, phase_len: int | None = None):
        self.n = g.n
        self.g = g.copy()
        self.F = default_phase_len(g.n, alpha) if phase_len is None else max(1, int(phase_len))
        self.g0 = g.copy()
        self.trees = bfs_trees(self.g0)
        self.phase = 0
        self._reset_phase()
        self._init_rollback()

    def _reset_phase(self):
        self.phase_edges: list[tuple[int, int]] = []
        self.heads: list[int] = []
        self.count = 0

    def rollover(self):
        self.trees = trees_recompute(self.g, self.trees, self.phase_edges)
        self.g0 = self.g.copy()
        self.phase += 1
        self._reset_phase()

    def insert_incoming(self, v: int, edges):
        event = InsertIncoming(v, tuple((u, 1.0) if isinstance(u, int) else u for u in edges))
        for u, _ in event.edges:
            if self.g.has_edge(u, v):
                raise DuplicateEdge(f"edge {u}->{v} already present")
        if self.count >= self.F:
            self.rollover()
        apply_update(self.g, event)
        for u, _ in event.edges:
            self._record_edge(u, v)
            self.phase_edges.append((u, v))
        if v not in self.heads:
            self.heads.append(v)
        self.count += 1

    def insert(self, u: int, v: int, w: float = 1.0):
        self.insert_incoming(v, [(u, w)])

    def query_tree(self, s: int) -> list[tuple[int, int]]:
        adj = [[] for _ in range(self.n)]
        for root in [s] + self.heads:
            for c, p in self.trees[root].items():
                adj[p].append(c)
        for u, v in self.phase_edges:
            adj[u].append(v)
        return tree_edges(bfs_parents(adj, s))


def base_paths(g0: DiGraph, trees: Trees) -> list[dict[int, CatPath]]:
    """Tree paths from every root to every vertex of its tree."""
    out = []
    for s, tree in enumerate(trees):
        paths = {s: CatPath.empty(s)}
        for c, p in tree.items():
            paths[c] = paths[p] + CatPath.edge(p, c, g0.weight(p, c))
        out.append(paths)
    return out


class IncrPath(Rollbackable):
    """s->t paths under single-edge insertions.

    With phase edges e_1..e_k = (u_i, v_i), the table ``to_tail[i]`` maps u to
    a stored u->u_i path and ``from_head[i]`` maps v to a stored v_i->v path;
    both are filled when e_i arrives, using only e_1..e_{i-1}.  A query takes
    the tree path if t was reachable at phase start and otherwise the first
    i for which both halves are stored.
    """

    _ROLLBACK_REFS = ("trees", "g0", "base", "edges", "to_tail", "from_head", "phase")
    _ROLLBACK_LOGS = ("edges", "to_tail", "from_head")

    def __init__(self, g: DiGraph, alpha: float = DEFAULT_ALPHA, phase_len: int | None = None):
        self.n = g.n
        self.g = g.copy()
        self.F = default_phase_len(g.n, alpha) if phase_len is None else max(1, int(phase_len))
        self.g0 = g.copy()
        self.trees = bfs_trees(self.g0)
        self.base = base_paths(self.g0, self.trees)
        self.phase = 0
        self._reset_phase()
        self._init_rollback()

    def _reset_phase(self):
        self.edges: list[tuple[int, int, float]] = []
        self.to_tail: list[dict[int, CatPath]] = []
        self.from_head: list[dict[int, CatPath]] = []

    def rollover(self):
        self.trees = trees_recompute(self.g, self.trees, [(u, v) for u, v, _ in self.edges])
        self.g0 = self.g.copy()
        self.base = base_paths(self.g0, self.trees)
        self.phase += 1
        self._reset_phase()

    def _lookup(self, s: int, t: int):
        """(path, i) with i = 0 for a phase-start path, or (None, None)."""
        p = self.base[s].get(t)
        if p is not None:
            return p, 0
        for i, (u, v, w) in enumerate(self.edges):
            first = self.to_tail[i].get(s)
            if first is None:
                continue
            second = self.from_head[i].get(t)
            if second is None:
                continue
            return first + CatPath.edge(u, v, w) + second, i + 1
        return None, None

    def insert(self, u: int, v: int, w: float = 1.0):
        if self.g.has_edge(u, v):
            raise DuplicateEdge(f"edge {u}->{v} already present")
        if len(self.edges) >= self.F:
            self.rollover()
        self.g.add_edge(u, v, w)
        self._record_edge(u, v)
        w = self.g.weight(u, v)
        to_tail = {}
        from_head = {}
        for x in range(self.n):
            p, _ = self._lookup(x, u)
            if p is not None:
                to_tail[x] = p
            q, _ = self._lookup(v, x)
            if q is not None:
                from_head[x] = q
        self.edges.append((u, v, w))
        self.to_tail.append(to_tail)
        self.from_head.append(from_head)

    def query(self, s: int, t: int):
        """``(CatPath, i)`` or ``(None, None)``; i is the phase edge index used (0 = none)."""
        if s == t:
            return CatPath.empty(s), 0
        return self._lookup(s, t)

    def query_path(self, s: int, t: int) -> PathWitness | None:
        p, _ = self.query(s, t)
        return None if p is None else p.witness()
