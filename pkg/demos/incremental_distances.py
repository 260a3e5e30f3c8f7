"""Incremental distances: approximate, exact, and the offline driver.

Inserts random weighted edges into a 10-vertex graph, then compares the
(1+eps) answers and the exact hop distances against Dijkstra/BFS.  Finally
runs a small insert/delete timeline offline.

    python demos/incremental_distances.py
"""
import random

from dyngraph import (DeleteEdge, DiGraph, IncrApprox, IncrExactPair, InsertEdge, offline_run,
                      oracle_dist)

rng = random.Random(3)
n, eps = 10, 0.25
weighted = DiGraph(n, weighted=True, C=8)
plain = DiGraph(n)
approx = IncrApprox(DiGraph(n, weighted=True, C=8), eps=eps, phase_len=3)
exact = IncrExactPair(DiGraph(n), phase_len=3)

for _ in range(30):
    u, v = rng.sample(range(n), 2)
    if plain.has_edge(u, v):
        continue
    w = round(rng.uniform(1, 8), 2)
    weighted.add_edge(u, v, w)
    plain.add_edge(u, v)
    approx.insert(u, v, w)
    exact.insert(u, v)

print(f"eps={eps}, guaranteed stretch of the current matrix {approx.stretch_bound():.4f}")
print(" s  t   true     approx   ratio | hops exact")
for s, t in [(0, 9), (3, 7), (5, 1), (8, 2)]:
    true = oracle_dist(weighted, s)[0][t]
    res = approx.query(s, t)
    hops = exact.query(s, t)
    if res is None:
        print(f"{s:2d} {t:2d}   unreachable")
        continue
    print(f"{s:2d} {t:2d} {true:7.2f} {res[0]:8.2f} {res[0] / true:7.4f} | {hops[0]:4d} "
          f"{oracle_dist(plain, s)[0][t]:5.0f}")

timeline = [InsertEdge(0, 1), InsertEdge(1, 2), DeleteEdge(0, 1), InsertEdge(0, 2)]
answers = offline_run(3, [], timeline, {k: [(0, 2)] for k in range(5)})
print("\noffline dist(0, 2) per version:",
      ["inf" if a[0] is None else a[0] for a in (answers[k] for k in range(5))])
