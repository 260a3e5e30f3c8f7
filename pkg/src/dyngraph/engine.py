"""Randomized dynamic reachability over a prime field.

Every edge uv gets a random nonzero field value x_uv and the engine keeps
the explicit inverse of ``I - X``.  Entry (u, v) of that inverse is the sum,
over all u->v walks, of the product of the edge values, so it is a nonzero
polynomial exactly when v is reachable from u; evaluated at random points it
vanishes only with probability about n/p.

Updates are rank-1 changes of ``I - X`` and are absorbed with
Sherman-Morrison in O(n^2) field operations; queries are O(1) lookups.
"""
from __future__ import annotations

import numpy as np

from .algebra import DEFAULT_FIELD, Field, invert, rank1_update
from .counters import Counters
from .errors import (DuplicateEdge, DuplicateRow, MissingEdge, NoMark,
                     RandomnessExhausted, Singular)
from .graph import DeleteEdge, DiGraph, InsertEdge, InsertIncoming

MAX_ATTEMPTS = 3


class ReachEngine:
    """Reachability oracle with O(n^2) updates and O(1) queries.

    ``R`` is an ordered set of tracked source rows whose full reachability
    rows can be read with :meth:`rows_read`.
    """

    def __init__(self, n: int, seed: int = 0, field: Field = DEFAULT_FIELD,
                 counters: Counters | None = None, query_counter: str = "engine_queries"):
        self.n = n
        self.field = field
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.counters = counters if counters is not None else Counters()
        self._query_counter = query_counter
        self.edge_values: dict[tuple[int, int], int] = {}
        self.R: list[int] = []
        self._in_R: set[int] = set()
        self.rebuild_count = 0
        self.Ninv = np.eye(n, dtype=np.uint64)
        self._log: list = []
        self._marks: list[int] = []

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_graph(cls, g: DiGraph, seed: int = 0, **kw) -> "ReachEngine":
        eng = cls(g.n, seed=seed, **kw)
        for u, v, _ in g.edges():
            eng.edge_values[(u, v)] = 0
        eng._rebuild()
        return eng

    def _draw(self) -> int:
        return int(self.rng.integers(1, self.field.p))

    def _system_matrix(self):
        M = np.eye(self.n, dtype=np.uint64)
        p = self.field.p
        for (u, v), x in self.edge_values.items():
            M[u, v] = (int(M[u, v]) - x) % p
        return M

    def _rebuild(self):
        """Fresh random values for every edge, then a full inversion."""
        if self._marks:
            self._log.append(("snapshot", self.Ninv, dict(self.edge_values)))
        for attempt in range(MAX_ATTEMPTS):
            for e in self.edge_values:
                self.edge_values[e] = self._draw()
            self.counters.rebuilds += 1
            self.rebuild_count += 1
            try:
                self.Ninv = invert(self._system_matrix(), self.field)
                return
            except Singular:
                continue
        raise RandomnessExhausted(f"{MAX_ATTEMPTS} singular rebuilds in a row")

    def rebuild(self):
        self._rebuild()

    # ------------------------------------------------------------------
    # updates

    def has_edge(self, u, v) -> bool:
        return (u, v) in self.edge_values

    def _rank1(self, i, j, delta):
        self.counters.rank1_updates += 1
        new = rank1_update(self.Ninv, i, j, delta, self.field)
        if self._marks:
            self._log.append(("rank1", i, j, delta))
        self.Ninv = new

    def insert(self, u: int, v: int):
        if (u, v) in self.edge_values:
            raise DuplicateEdge(f"edge {u}->{v} already present")
        x = self._draw()
        if self._marks:
            self._log.append(("edge", (u, v), None))
        self.edge_values[(u, v)] = x
        try:
            self._rank1(u, v, self.field.p - x)
        except Singular:
            self._rebuild()

    def delete(self, u: int, v: int):
        if (u, v) not in self.edge_values:
            raise MissingEdge(f"edge {u}->{v} not present")
        x = self.edge_values.pop((u, v))
        if self._marks:
            self._log.append(("edge", (u, v), x))
        try:
            self._rank1(u, v, x)
        except Singular:
            self._rebuild()

    def update(self, e):
        if isinstance(e, InsertEdge):
            self.insert(e.u, e.v)
        elif isinstance(e, DeleteEdge):
            self.delete(e.u, e.v)
        elif isinstance(e, InsertIncoming):
            for u, _ in e.edges:
                self.insert(u, e.v)
        else:
            raise TypeError(f"unknown update event {e!r}")

    # ------------------------------------------------------------------
    # queries

    def query_reach(self, u: int, v: int) -> bool:
        setattr(self.counters, self._query_counter,
                getattr(self.counters, self._query_counter) + 1)
        return u == v or self.Ninv[u, v] != 0

    def reach_row(self, u: int) -> np.ndarray:
        """Boolean row of vertices reachable from u (u itself included)."""
        row = self.Ninv[u] != 0
        row[u] = True
        return row

    def reach_col(self, v: int) -> np.ndarray:
        """Boolean column of vertices that reach v (v itself included)."""
        col = self.Ninv[:, v] != 0
        col[v] = True
        return col

    def row_add(self, r: int):
        if r in self._in_R:
            raise DuplicateRow(f"row {r} already tracked")
        if self._marks:
            self._log.append(("R", list(self.R)))
        self.R.append(r)
        self._in_R.add(r)

    def rows_reset(self):
        if self._marks:
            self._log.append(("R", list(self.R)))
        self.R = []
        self._in_R = set()

    def rows_read(self) -> np.ndarray:
        if not self.R:
            return np.zeros((0, self.n), dtype=bool)
        block = self.Ninv[self.R] != 0
        block[np.arange(len(self.R)), self.R] = True
        return block

    def check_inverse(self) -> bool:
        prod = self.field.matmul(self._system_matrix(), self.Ninv)
        return bool((prod == np.eye(self.n, dtype=np.uint64)).all())

    # ------------------------------------------------------------------
    # rollback

    def rollback_mark(self):
        self._marks.append((len(self._log), self.rng.bit_generator.state))

    def rollback(self):
        if not self._marks:
            raise NoMark("rollback without a mark")
        depth, rng_state = self._marks.pop()
        while len(self._log) > depth:
            entry = self._log.pop()
            kind = entry[0]
            if kind == "rank1":
                _, i, j, delta = entry
                self.Ninv = rank1_update(self.Ninv, i, j, (-delta) % self.field.p, self.field)
            elif kind == "edge":
                _, e, old = entry
                if old is None:
                    del self.edge_values[e]
                else:
                    self.edge_values[e] = old
            elif kind == "snapshot":
                _, Ninv, values = entry
                self.Ninv = Ninv
                self.edge_values = values
            else:
                self.R = entry[1]
                self._in_R = set(self.R)
        self.rng.bit_generator.state = rng_state
