"""Offline fully dynamic graphs from an incremental structure with rollback.

Version i of a timeline is the graph after its first i updates.  Each edge
lives on an interval of versions; the intervals are spread over a segment
tree on versions, so that every interval is the union of O(log T) nodes.
A depth-first walk of the tree inserts a node's edges on entry and rolls
them back on exit, reaching every leaf (version) with exactly the edges alive
there.  Only insertions ever reach the incremental structure.
"""
from __future__ import annotations

from typing import Callable

from ..graph import DeleteEdge, DiGraph, InsertEdge
from .exact import IncrExactPair


def presence_intervals(initial_edges, timeline):
    """``(u, v, w, first, last)`` for every maximal lifetime of an edge."""
    alive: dict[tuple[int, int], tuple[float, int]] = {}
    for e in initial_edges:
        u, v = e[0], e[1]
        w = e[2] if len(e) > 2 else 1.0
        alive[(u, v)] = (w, 0)
    out = []
    for i, ev in enumerate(timeline, start=1):
        if isinstance(ev, InsertEdge):
            if (ev.u, ev.v) in alive:
                raise ValueError(f"edge {ev.u}->{ev.v} inserted twice")
            alive[(ev.u, ev.v)] = (ev.w, i)
        elif isinstance(ev, DeleteEdge):
            if (ev.u, ev.v) not in alive:
                raise ValueError(f"edge {ev.u}->{ev.v} deleted while absent")
            w, start = alive.pop((ev.u, ev.v))
            out.append((ev.u, ev.v, w, start, i - 1))
        else:
            raise TypeError(f"offline timelines take single-edge events, got {ev!r}")
    last = len(timeline)
    for (u, v), (w, start) in alive.items():
        out.append((u, v, w, start, last))
    return out


def _place(node_edges, node, lo, hi, a, b, edge):
    if b < lo or hi < a:
        return
    if a <= lo and hi <= b:
        node_edges.setdefault(node, []).append(edge)
        return
    mid = (lo + hi) // 2
    _place(node_edges, 2 * node, lo, mid, a, b, edge)
    _place(node_edges, 2 * node + 1, mid + 1, hi, a, b, edge)


def dist_answer(struct, query):
    s, t = query
    res = struct.query(s, t)
    return None if res is None else res[0]


def offline_run(n: int, initial_edges, timeline, queries: dict,
                factory: Callable = IncrExactPair, answer: Callable = dist_answer,
                weighted: bool = False, C: float = 1.0) -> dict:
    """Answer ``queries[version]`` (a list) for every version of the timeline."""
    last = len(timeline)
    node_edges: dict[int, list] = {}
    for u, v, w, a, b in presence_intervals(initial_edges, timeline):
        if a <= b:
            _place(node_edges, 1, 0, last, a, b, (u, v, w))
    struct = factory(DiGraph(n, weighted=weighted, C=C))
    answers: dict[int, list] = {}

    def visit(node, lo, hi):
        struct.rollback_mark()
        for u, v, w in node_edges.get(node, ()):
            struct.insert(u, v, w)
        if lo == hi:
            answers[lo] = [answer(struct, q) for q in queries.get(lo, ())]
        else:
            mid = (lo + hi) // 2
            visit(2 * node, lo, mid)
            visit(2 * node + 1, mid + 1, hi)
        struct.rollback()

    visit(1, 0, last)
    return answers
