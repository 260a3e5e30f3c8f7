"""Dynamic directed-graph reachability, strong connectivity and shortest paths.

The fully dynamic and DAG structures are randomized (algebraic, over a prime
field) and answer with explicit witnesses; the incremental structures are
deterministic and phase based.
"""
from .counters import Counters
from .dag import DagPathStruct, DagTreeStruct, TopOrder
from .decscc import DecScc
from .engine import ReachEngine
from .errors import *  # noqa: F401,F403
from .fully_dynamic import FdPath, FdScc, FdTree
from .graph import (DeleteEdge, DiGraph, InsertEdge, InsertIncoming, PathWitness, oracle_dist,
                    oracle_reach, oracle_scc, verify_out_tree, verify_path)
from .incremental.approx import IncrApprox
from .incremental.catpath import CatPath
from .incremental.exact import IncrExactPair, IncrExactTree
from .incremental.offline import offline_run
from .incremental.reach import IncrPath, IncrTree

__version__ = "0.1.0"
