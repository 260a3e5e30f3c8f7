"""Topological order upkeep and path/tree reporting on a DAG.

An edge that contradicts the current order forces a local rearrangement of
the window between its endpoints; everything outside that window stays put.

    python demos/dag_orders.py
"""
from dyngraph import Counters, DagTreeStruct, DiGraph, CycleIntroduced

c = Counters()
dag = DagTreeStruct(DiGraph(6), seed=1, delta=2, counters=c)
print("start      ", dag.toporder())

for u, v in [(4, 1), (5, 0), (1, 3), (3, 0), (2, 5)]:
    dag.insert(u, v)
    split = dag.last_split
    note = "order kept" if split is None else f"S={split[0]} Z={split[1]} T={split[2]}"
    print(f"insert {u}->{v}", dag.toporder(), note)

try:
    dag.insert(0, 4)
except CycleIntroduced as exc:
    print("insert 0->4 rejected:", exc)

before = c.engine_queries
w = dag.query_path(4, 0)
print("\npath 4->0  ", list(w.vertices), f"({c.engine_queries - before} engine queries)")
print("tree from 4", dag.query_tree(4))
