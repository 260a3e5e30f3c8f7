import math
import random

import numpy as np

from dyngraph.graph import DiGraph


def random_graph(rng: random.Random, n: int, p: float, weighted: bool = False, C: float = 8.0):
    g = DiGraph(n, weighted=weighted, C=C)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                g.add_edge(u, v, round(rng.uniform(1, C), 3) if weighted else 1.0)
    return g


def closure(g: DiGraph) -> np.ndarray:
    """Boolean transitive closure by Floyd-Warshall."""
    R = np.eye(g.n, dtype=bool)
    for u, v, _ in g.edges():
        R[u, v] = True
    for k in range(g.n):
        R |= R[:, [k]] & R[[k], :]
    return R


def floyd_warshall(g: DiGraph) -> np.ndarray:
    D = np.full((g.n, g.n), math.inf)
    np.fill_diagonal(D, 0.0)
    for u, v, w in g.edges():
        D[u, v] = min(D[u, v], w)
    for k in range(g.n):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    return D


def random_updates(rng: random.Random, n: int, steps: int, p_delete: float = 0.45):
    """Yield ('insert'|'delete', u, v) for a random fully dynamic sequence."""
    present = set()
    for _ in range(steps):
        if present and rng.random() < p_delete:
            u, v = rng.choice(sorted(present))
            present.discard((u, v))
            yield "delete", u, v
        else:
            cand = [(u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in present]
            if not cand:
                continue
            u, v = rng.choice(cand)
            present.add((u, v))
            yield "insert", u, v


def random_acyclic_updates(rng: random.Random, n: int, steps: int, p_delete: float = 0.3):
    """Updates consistent with a hidden random ranking, so the graph stays acyclic."""
    rank = list(range(n))
    rng.shuffle(rank)
    present = set()
    for _ in range(steps):
        if present and rng.random() < p_delete:
            u, v = rng.choice(sorted(present))
            present.discard((u, v))
            yield "delete", u, v
        else:
            cand = [(u, v) for u in range(n) for v in range(n)
                    if rank[u] < rank[v] and (u, v) not in present]
            if not cand:
                continue
            u, v = rng.choice(cand)
            present.add((u, v))
            yield "insert", u, v


def apply(g: DiGraph, op: str, u: int, v: int, w: float = 1.0):
    if op == "insert":
        g.add_edge(u, v, w)
    else:
        g.remove_edge(u, v)
