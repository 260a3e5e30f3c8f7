"""Fully dynamic strongly connected components, step by step.

Builds two triangles, links them into one component, then cuts the link
and prints the partition and the reach-engine counters after each update.

    python demos/scc_walkthrough.py
"""
from dyngraph import Counters, DiGraph, FdScc, oracle_scc

counters = Counters()
scc = FdScc(DiGraph(6), seed=7, phase_len=3, counters=counters)
g = DiGraph(6)

steps = [
    ("insert", 0, 1), ("insert", 1, 2), ("insert", 2, 0),   # first triangle
    ("insert", 3, 4), ("insert", 4, 5), ("insert", 5, 3),   # second triangle
    ("insert", 2, 3), ("insert", 5, 0),                     # bridge both ways
    ("delete", 5, 0),                                       # and cut one side
    ("delete", 1, 2),
]

print(f"{'update':<14} {'labels':<22} rank1  |E+|")
for op, u, v in steps:
    before = counters.rank1_updates
    getattr(g, "add_edge" if op == "insert" else "remove_edge")(u, v)
    getattr(scc, op)(u, v)
    labels = scc.components()
    assert labels == oracle_scc(g)
    print(f"{op} {u}->{v:<6} {str(labels):<22} {counters.rank1_updates - before:>5}  {len(scc.E_plus)}")

print("\nlabels map each vertex to the smallest vertex of its component")
