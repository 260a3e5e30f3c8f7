import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import floyd_warshall, random_graph
from dyngraph.errors import BadEpsilon, DuplicateEdge, EndpointMismatch, NoMark
from dyngraph.graph import (DeleteEdge, DiGraph, InsertEdge, oracle_dist, reachable_set,
                            verify_out_tree, verify_path)
from dyngraph.incremental.approx import IncrApprox, level_anchor
from dyngraph.incremental.catpath import CatPath, concat
from dyngraph.incremental.distmatrix import (DistPathMatrix, approx_product, bounded_product,
                                             products_needed, recompute)
from dyngraph.incremental.exact import IncrExact, IncrExactPair, IncrExactTree
from dyngraph.incremental.offline import offline_run, presence_intervals
from dyngraph.incremental.reach import IncrPath, IncrTree, bfs_trees, trees_recompute


def bfs_dist(g, s):
    return oracle_dist(g, s)[0]


def fresh_edges(rng, g, k):
    cand = [(u, v) for u in range(g.n) for v in range(g.n) if u != v and not g.has_edge(u, v)]
    rng.shuffle(cand)
    return cand[:k]


# ---------------------------------------------------------------- CatPath


def test_catpath_identity_and_iteration():
    p = CatPath.edge(0, 1, 2.0) + CatPath.edge(1, 2, 3.0)
    assert CatPath.empty(0) + p is p and p + CatPath.empty(2) is p
    q = CatPath.edge(2, 3)
    assert list((p + q).edges()) == list(p.edges()) + list(q.edges())
    assert (p + q).vertices() == [0, 1, 2, 3] and (p + q).weight == 6.0
    with pytest.raises(EndpointMismatch):
        p + CatPath.edge(5, 6)


def test_catpath_random_concats():
    rng = random.Random(1)
    pieces = [CatPath.edge(i, i + 1, rng.uniform(1, 4)) for i in range(60)]
    for _ in range(10_000):
        a = rng.randrange(60)
        b = rng.randrange(a, 61)
        cut = rng.randrange(a, b + 1)
        left = concat(CatPath.empty(a), *pieces[a:cut])
        right = concat(CatPath.empty(cut), *pieces[cut:b])
        p = left + right
        es = list(p.edges())
        assert p.hops == len(es) == b - a
        assert math.isclose(p.weight, sum(w for _, _, w in es))
        assert p.vertices() == list(range(a, b + 1))


@given(st.lists(st.integers(0, 20), min_size=1, max_size=12))
@settings(max_examples=100, deadline=None)
def test_catpath_associative(cuts):
    pieces = [CatPath.edge(i, i + 1) for i in range(len(cuts))]
    left = pieces[0]
    for p in pieces[1:]:
        left = left + p
    right = pieces[-1]
    for p in reversed(pieces[:-1]):
        right = p + right
    assert left == right


# ---------------------------------------------------------------- trees_recompute


def test_recompute_without_edges():
    g = random_graph(random.Random(2), 8, 0.2)
    trees = bfs_trees(g)
    out = trees_recompute(g, trees, [])
    assert [set(t) for t in out] == [set(t) for t in trees]


def test_recompute_joins_two_cycles():
    g = DiGraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    trees = bfs_trees(g)
    g.add_edge(1, 2)
    out = trees_recompute(g, trees, [(1, 2)])
    for s in (0, 1):
        assert verify_out_tree(g, [(p, c) for c, p in out[s].items()], s, {0, 1, 2, 3})


def test_recompute_random():
    rng = random.Random(3)
    for _ in range(30):
        g = random_graph(rng, 14, 0.15)
        trees = bfs_trees(g)
        new = []
        for _ in range(rng.randint(1, 3)):
            v = rng.randrange(14)
            for u in rng.sample(range(14), rng.randint(1, 3)):
                if u != v and not g.has_edge(u, v):
                    g.add_edge(u, v)
                    new.append((u, v))
        out = trees_recompute(g, trees, new)
        for s in range(14):
            assert verify_out_tree(g, [(p, c) for c, p in out[s].items()], s, reachable_set(g, s))


# ---------------------------------------------------------------- IncrTree


def test_tree_no_updates_and_new_reach():
    g = DiGraph.from_edges(4, [(0, 1)])
    t = IncrTree(g, phase_len=2)
    assert sorted(t.query_tree(0)) == [(0, 1)]
    t.insert_incoming(2, [1, 3])
    assert sorted(t.query_tree(0)) == [(0, 1), (1, 2)]
    with pytest.raises(DuplicateEdge):
        t.insert(1, 2)


def test_tree_random_incoming_groups():
    rng = random.Random(4)
    for _ in range(5):
        g = DiGraph(15)
        t = IncrTree(g, phase_len=4)
        for _ in range(80):
            v = rng.randrange(15)
            tails = [u for u in rng.sample(range(15), rng.randint(1, 3)) if u != v and not g.has_edge(u, v)]
            if not tails:
                continue
            for u in tails:
                g.add_edge(u, v)
            t.insert_incoming(v, tails)
            for s in range(15):
                assert verify_out_tree(g, t.query_tree(s), s, reachable_set(g, s))


# ---------------------------------------------------------------- IncrPath


def l_values(g0: DiGraph, phase_edges):
    """l[u][v]: least i with v reachable from u using G0 plus e_1..e_i (inf if never)."""
    n = g0.n
    l = [[math.inf] * n for _ in range(n)]
    g = g0.copy()
    for i in range(len(phase_edges) + 1):
        if i:
            g.add_edge(*phase_edges[i - 1])
        for u in range(n):
            for v in reachable_set(g, u):
                if l[u][v] == math.inf:
                    l[u][v] = i
    return l


def test_path_tree_path_and_chain():
    g = DiGraph.from_edges(3, [(0, 1), (1, 2)])
    p, i = IncrPath(g).query(0, 2)
    assert p.vertices() == [0, 1, 2] and i == 0
    s = IncrPath(DiGraph(3), phase_len=5)
    s.insert(0, 1)
    s.insert(1, 2)
    p, i = s.query(0, 2)
    assert p.vertices() == [0, 1, 2] and i == 2
    assert s.query(2, 0) == (None, None)


def test_path_tables_and_minimal_index():
    rng = random.Random(5)
    for _ in range(6):
        g = DiGraph(15)
        s = IncrPath(g, phase_len=4)
        for _ in range(60):
            (u, v), = fresh_edges(rng, g, 1)
            g.add_edge(u, v)
            s.insert(u, v)
            phase = [(a, b) for a, b, _ in s.edges]
            l = l_values(s.g0, phase)
            for i, (ui, vi, _) in enumerate(s.edges, start=1):
                for x in range(15):
                    assert (x in s.to_tail[i - 1]) == (l[x][ui] < i)
                    assert (x in s.from_head[i - 1]) == (l[vi][x] < i)
            for a in range(15):
                for b in range(15):
                    p, i = s.query(a, b)
                    if a == b:
                        continue
                    assert (p is None) == (l[a][b] == math.inf)
                    if p is not None:
                        assert i == l[a][b]
                        assert verify_path(g, p.witness(), a, b, require_simple=True)


# ---------------------------------------------------------------- distance matrices


def exact_product(A, B):
    from dyngraph.algebra import minplus_exact
    return minplus_exact(A, B)


def test_recompute_no_edges_and_exact_double():
    g = random_graph(random.Random(6), 8, 0.3, weighted=True, C=8)
    D = recompute(DistPathMatrix.identity(8), [(u, v, w) for u, v, w in g.edges()], exact_product)
    assert recompute(D, [], approx_product(0.1)) is D
    assert np.allclose(D.dist, floyd_warshall(g))


def test_recompute_sandwich():
    rng = random.Random(7)
    for _ in range(10):
        g = random_graph(rng, 10, 0.3, weighted=True, C=8)
        eps = 0.1
        D = recompute(DistPathMatrix.identity(10), [(u, v, w) for u, v, w in g.edges()],
                      exact_product)
        new = []
        for v in rng.sample(range(10), 3):
            for u in rng.sample(range(10), 2):
                if u != v and not g.has_edge(u, v):
                    w = round(rng.uniform(1, 8), 3)
                    g.add_edge(u, v, w)
                    new.append((u, v, w))
        heads = len({v for _, v, _ in new})
        D2 = recompute(D, new, approx_product(eps))
        true = floyd_warshall(g)
        bound = (1 + eps) ** products_needed(heads)
        fin = np.isfinite(true)
        assert (np.isfinite(D2.dist) == fin).all()
        assert (true[fin] <= D2.dist[fin] * (1 + 1e-9)).all()
        assert (D2.dist[fin] <= bound * true[fin] * (1 + 1e-9)).all()
        for x, y in zip(*np.nonzero(fin)):
            p = D2.paths[x][y]
            assert math.isclose(p.weight, D2.dist[x, y])
            assert verify_path(g, p.witness(), x, y)


def test_shortcut_edge():
    g = DiGraph.from_edges(4, [(0, 1, 4.0), (1, 2, 4.0), (2, 3, 4.0)], weighted=True, C=8)
    D = recompute(DistPathMatrix.identity(4), [(u, v, w) for u, v, w in g.edges()],
                  approx_product(0.1))
    D2 = recompute(D, [(0, 3, 1.5)], approx_product(0.1))
    assert D2.dist[0, 3] == 1.5


# ---------------------------------------------------------------- approximate


def test_approx_unweighted_eps1():
    rng = random.Random(8)
    g = DiGraph(10)
    s = IncrApprox(g, eps=1.0, phase_len=3)
    for u, v in fresh_edges(rng, g, 40):
        g.add_edge(u, v)
        s.insert(u, v)
        for a in range(10):
            d = bfs_dist(g, a)
            for b in range(10):
                res = s.query(a, b)
                assert (res is None) == (d[b] == math.inf)
                if res is not None:
                    assert d[b] <= res[0] <= 2 * d[b]


def test_approx_weighted_run_and_levels():
    rng = random.Random(9)
    n, eps, F = 12, 0.25, 3
    g = DiGraph(n, weighted=True, C=4)
    s = IncrApprox(g, eps=eps, phase_len=F)
    for step in range(130):
        (u, v), = fresh_edges(rng, g, 1)
        w = round(rng.uniform(1, 4), 3)
        g.add_edge(u, v, w)
        s.insert(u, v, w)
        for b, (anchor, _, _) in s.levels.items():
            want = max((l for l in range(s.phase - 2 ** (b - 1) + 1) if l % 2 ** b == 0), default=0)
            assert anchor == want == level_anchor(b, s.phase)
        a, t = rng.randrange(n), rng.randrange(n)
        d = oracle_dist(g, a)[0][t]
        res = s.query(a, t)
        assert (res is None) == (d == math.inf)
        if res is not None:
            length, path = res
            assert d * (1 - 1e-9) <= length <= (1 + eps) * d * (1 + 1e-9)
            assert verify_path(g, path.witness(), a, t)
            assert math.isclose(path.weight, length)
    assert s.stretch_bound() <= 1 + eps


def test_approx_bad_eps():
    with pytest.raises(BadEpsilon):
        IncrApprox(DiGraph(3), eps=0.0)


# ---------------------------------------------------------------- exact


def test_exact_large_h_is_apsp():
    rng = random.Random(10)
    g = random_graph(rng, 8, 0.3)
    s = IncrExactPair(g, phase_len=1)
    assert s.h == 8
    D = floyd_warshall(g)
    assert np.array_equal(s.matrix.dist, D)
    assert s.hitting == [] or s.long_paths()


def test_exact_path_graph_of_length_h():
    # n = 9, F = 3 gives h = 3; the only 3-hop path is 0-1-2-3
    g = DiGraph.from_edges(9, [(0, 1), (1, 2), (2, 3)])
    s = IncrExact(g, phase_len=3)
    assert s.h == 3
    assert s.long_paths() == [[1, 2, 3]]
    assert s.hitting and set(s.hitting) <= {1, 2, 3}


def check_exact_state(s: IncrExact, g0: DiGraph):
    h = s.h
    for x in range(g0.n):
        d = bfs_dist(g0, x)
        for y in range(g0.n):
            want = d[y] if d[y] <= h else math.inf
            assert s.matrix.dist[x, y] == want
    paths = s.long_paths()
    assert all(set(p) & set(s.hitting) for p in paths)
    if paths:
        k = min(len(set(p)) for p in paths)
        assert len(s.hitting) <= (g0.n / k) * (1 + math.log(max(1, len(paths))))


def test_exact_rebuild_random():
    rng = random.Random(11)
    for _ in range(10):
        g = random_graph(rng, 12, 0.25)
        s = IncrExactPair(g, phase_len=3)
        check_exact_state(s, g)


def test_exact_hitting_set_on_path():
    n, F = 9, 3
    g = DiGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    s = IncrExactPair(g, phase_len=F)
    assert s.h == 3 and s.hitting
    check_exact_state(s, g)


def crafted_chain(h):
    """Chain of 3h vertices built by insertions: distances far above h."""
    n = 3 * h
    return n, [(i, i + 1) for i in range(n - 1)]


@pytest.mark.parametrize("cls", [IncrExactPair, IncrExactTree])
def test_exact_long_chain(cls):
    h = 4
    n, edges = crafted_chain(h)
    F = math.ceil(n / h)
    g = DiGraph(n)
    s = cls(g, phase_len=F)
    assert s.h == h
    for u, v in edges:
        g.add_edge(u, v)
        s.insert(u, v)
    for a in range(n):
        d = bfs_dist(g, a)
        if cls is IncrExactTree:
            edges_t, dist = s.query_tree(a)
            assert verify_out_tree(g, edges_t, a, reachable_set(g, a))
            assert all(dist[v] == d[v] for v in dist)
        else:
            for b in range(n):
                res = s.query(a, b)
                assert (res is None) == (d[b] == math.inf)
                if res is not None:
                    assert res[0] == d[b] and verify_path(g, res[1].witness(), a, b)


def test_exact_pair_random_inserts():
    rng = random.Random(12)
    for _ in range(3):
        g = DiGraph(16)
        s = IncrExactPair(g, phase_len=4)
        for u, v in fresh_edges(rng, g, 100):
            g.add_edge(u, v)
            s.insert(u, v)
            a = rng.randrange(16)
            d = bfs_dist(g, a)
            for b in range(16):
                res = s.query(a, b)
                assert (res is None) == (d[b] == math.inf)
                if res is not None:
                    assert res[0] == d[b] and verify_path(g, res[1].witness(), a, b)


def test_exact_tree_random_groups():
    rng = random.Random(13)
    for _ in range(3):
        g = DiGraph(16)
        s = IncrExactTree(g, phase_len=4)
        for _ in range(60):
            v = rng.randrange(16)
            tails = [u for u in rng.sample(range(16), 3) if u != v and not g.has_edge(u, v)]
            if not tails:
                continue
            for u in tails:
                g.add_edge(u, v)
            s.insert_incoming(v, tails)
            a = rng.randrange(16)
            edges, dist = s.query_tree(a)
            d = bfs_dist(g, a)
            assert verify_out_tree(g, edges, a, reachable_set(g, a))
            assert all(dist[x] == d[x] for x in range(16) if d[x] < math.inf)


def test_exact_rejects_weighted():
    g = DiGraph(3, weighted=True, C=4)
    g.add_edge(0, 1, 2.0)
    with pytest.raises(ValueError):
        IncrExactPair(g)


def test_hitting_with_heads_covers_length_h_pairs():
    # Every pair at current distance exactly h has a shortest path through
    # B or a phase head (other than its start).
    rng = random.Random(14)
    for _ in range(10):
        g = random_graph(rng, 14, 0.12)
        s = IncrExactPair(g, phase_len=4)
        for u, v in fresh_edges(rng, g, 3):
            g.add_edge(u, v)
            s.insert(u, v)
        marks = set(s.hitting) | set(s.heads)
        dist = [bfs_dist(g, x) for x in range(14)]
        for x in range(14):
            for y in range(14):
                if dist[x][y] == s.h:
                    assert any(z != x and dist[x][z] + dist[z][y] == s.h for z in marks)


# ---------------------------------------------------------------- determinism and rollback


def freeze(x):
    if isinstance(x, np.ndarray):
        return ("nd", x.shape, x.tobytes())
    if isinstance(x, CatPath):
        return ("cp", tuple(x.vertices()), x.weight)
    if isinstance(x, DiGraph):
        return ("g", tuple(sorted(x.edges())))
    if isinstance(x, dict):
        return tuple(sorted(((repr(k), freeze(v)) for k, v in x.items()), key=lambda kv: kv[0]))
    if isinstance(x, (list, tuple)):
        return tuple(freeze(v) for v in x)
    if isinstance(x, (set, frozenset)):
        return tuple(sorted(map(repr, x)))
    if hasattr(x, "__slots__") and not hasattr(x, "__dict__"):
        return tuple(freeze(getattr(x, a)) for a in x.__slots__)
    if hasattr(x, "__dict__"):
        return tuple((k, freeze(v)) for k, v in sorted(vars(x).items()) if k not in ("_marks", "_inserted"))
    return x


def make(cls, n):
    if cls is IncrApprox:
        return IncrApprox(DiGraph(n, weighted=True, C=4), eps=0.5, phase_len=3)
    return cls(DiGraph(n), phase_len=3)


@pytest.mark.parametrize("cls", [IncrTree, IncrPath, IncrApprox, IncrExactPair, IncrExactTree])
def test_rollback_deep_equal(cls):
    rng = random.Random(15)
    s = make(cls, 9)
    g = DiGraph(9)
    for u, v in fresh_edges(rng, g, 7):
        g.add_edge(u, v)
        s.insert(u, v)
    for _ in range(5):
        before = freeze(s)
        s.rollback_mark()
        for u, v in fresh_edges(rng, s.g, rng.randint(1, 8)):
            s.insert(u, v)
        s.rollback()
        assert freeze(s) == before
    with pytest.raises(NoMark):
        s.rollback()


@pytest.mark.parametrize("cls", [IncrTree, IncrPath, IncrApprox, IncrExactPair, IncrExactTree])
def test_deterministic(cls):
    states = []
    for _ in range(2):
        rng = random.Random(16)
        s = make(cls, 10)
        for u, v in fresh_edges(rng, DiGraph(10), 25):
            s.insert(u, v)
        states.append(freeze(s))
    assert states[0] == states[1]


# ---------------------------------------------------------------- offline


def test_offline_all_inserts_match_incremental():
    rng = random.Random(17)
    n = 8
    edges = fresh_edges(rng, DiGraph(n), 20)
    timeline = [InsertEdge(u, v) for u, v in edges]
    queries = {i: [(a, b) for a in range(n) for b in range(n)] for i in range(len(timeline) + 1)}
    got = offline_run(n, [], timeline, queries)
    plain = IncrExactPair(DiGraph(n))
    for i in range(len(timeline) + 1):
        if i:
            plain.insert(timeline[i - 1].u, timeline[i - 1].v)
        want = [None if (r := plain.query(a, b)) is None else r[0] for a, b in queries[i]]
        assert got[i] == want


def test_offline_insert_delete_reinsert():
    timeline = [InsertEdge(0, 1), DeleteEdge(0, 1), InsertEdge(0, 1)]
    got = offline_run(2, [], timeline, {i: [(0, 1)] for i in range(4)})
    assert [got[i][0] for i in range(4)] == [None, 1, None, 1]
    assert presence_intervals([], timeline) == [(0, 1, 1.0, 1, 1), (0, 1, 1.0, 3, 3)]


def test_offline_random_timelines():
    rng = random.Random(18)
    for _ in range(20):
        n = 12
        g = DiGraph(n)
        initial = fresh_edges(rng, g, 6)
        for u, v in initial:
            g.add_edge(u, v)
        timeline = []
        versions = [g.copy()]
        for _ in range(60):
            present = sorted(g.edge_set())
            if present and rng.random() < 0.4:
                u, v = rng.choice(present)
                g.remove_edge(u, v)
                timeline.append(DeleteEdge(u, v))
            else:
                (u, v), = fresh_edges(rng, g, 1)
                g.add_edge(u, v)
                timeline.append(InsertEdge(u, v))
            versions.append(g.copy())
        queries = {i: [(rng.randrange(n), rng.randrange(n)) for _ in range(4)] for i in range(61)}
        got = offline_run(n, initial, timeline, queries)
        for i, gi in enumerate(versions):
            for (a, b), ans in zip(queries[i], got[i]):
                d = bfs_dist(gi, a)[b]
                assert (ans is None) == (d == math.inf)
                if ans is not None:
                    assert ans == d
