"""Script runner, differential fuzzer and benchmark driver behind the CLI.

A script is a text file (commands separated by newlines or ``;``)::

    init 5 weighted 8
    insert 0 1 2.5
    insert-into 3 0 1.0 1 2.0
    delete 0 1
    path 0 3
    dist 0 3
    tree 0
    scc
    toporder

Each query prints exactly one line.  With ``check=True`` every answer is
compared with the brute-force oracles and the first disagreement raises
:class:`CheckFailure`.
"""
from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import dataclass, field

from .counters import FIELDS, Counters
from .dag import DagPathStruct, DagTreeStruct
from .errors import CheckFailure, EngineMismatch, ParseError
from .fully_dynamic import FdPath, FdScc, FdTree
from .graph import (DeleteEdge, DiGraph, InsertEdge, PathWitness, apply_update, oracle_dist,
                    oracle_reach, oracle_scc, path_weight, reachable_set, verify_out_tree, verify_path)
from .incremental.approx import IncrApprox
from .incremental.exact import IncrExactPair, IncrExactTree
from .incremental.offline import offline_run
from .incremental.reach import IncrPath, IncrTree


UPDATE_OPS = ("insert", "insert-into", "delete")
QUERY_OPS = ("path", "tree", "scc", "toporder", "dist")


@dataclass
class Command:
    op: str
    args: tuple
    line: int


@dataclass
class Script:
    n: int
    weighted: bool
    C: float
    commands: list


def _int(tok: str, line: int, n: int | None = None) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise ParseError(line, f"expected an integer, got {tok!r}") from None
    if n is not None and not 0 <= val < n:
        raise ParseError(line, f"vertex {val} out of range [0, {n})")
    return val


def _weight(tok: str, line: int, script_C: float) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(line, f"expected a weight, got {tok!r}") from None
    if not (1.0 <= w <= script_C):
        raise ParseError(line, f"weight {w} outside [1, {script_C:g}]")
    return w


def parse_script(text: str) -> Script:
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        for part in raw.split(";"):
            toks = part.split()
            if toks:
                pieces.append((lineno, toks))
    if not pieces or pieces[0][1][0] != "init":
        raise ParseError(pieces[0][0] if pieces else 1, "script must start with 'init n'")
    line, toks = pieces[0]
    if len(toks) not in (2, 4) or (len(toks) == 4 and toks[2] != "weighted"):
        raise ParseError(line, "expected 'init n' or 'init n weighted C'")
    n = _int(toks[1], line)
    if n < 1:
        raise ParseError(line, "n must be positive")
    weighted = len(toks) == 4
    C = 1.0
    if weighted:
        try:
            C = float(toks[3])
        except ValueError:
            raise ParseError(line, f"bad weight cap {toks[3]!r}") from None
        if not C >= 1.0:
            raise ParseError(line, "weight cap must be at least 1")

    commands = []
    for line, toks in pieces[1:]:
        op, rest = toks[0], toks[1:]
        if op == "insert":
            if len(rest) not in (2, 3) or (len(rest) == 3 and not weighted):
                raise ParseError(line, "expected 'insert u v' (or 'insert u v w' when weighted)")
            u, v = _int(rest[0], line, n), _int(rest[1], line, n)
            w = _weight(rest[2], line, C) if len(rest) == 3 else 1.0
            commands.append(Command(op, (u, v, w), line))
        elif op == "insert-into":
            if not rest:
                raise ParseError(line, "expected 'insert-into v u1 [w1] ...'")
            v = _int(rest[0], line, n)
            tails = []
            toks_left = rest[1:]
            i = 0
            while i < len(toks_left):
                u = _int(toks_left[i], line, n)
                w = 1.0
                if weighted and i + 1 < len(toks_left) and "." in toks_left[i + 1]:
                    w = _weight(toks_left[i + 1], line, C)
                    i += 1
                tails.append((u, w))
                i += 1
            if not tails:
                raise ParseError(line, "insert-into needs at least one tail")
            commands.append(Command(op, (v, tuple(tails)), line))
        elif op == "delete":
            if len(rest) != 2:
                raise ParseError(line, "expected 'delete u v'")
            commands.append(Command(op, (_int(rest[0], line, n), _int(rest[1], line, n)), line))
        elif op in ("path", "dist"):
            if len(rest) != 2:
                raise ParseError(line, f"expected '{op} s t'")
            commands.append(Command(op, (_int(rest[0], line, n), _int(rest[1], line, n)), line))
        elif op == "tree":
            if len(rest) != 1:
                raise ParseError(line, "expected 'tree s'")
            commands.append(Command(op, (_int(rest[0], line, n),), line))
        elif op in ("scc", "toporder"):
            if rest:
                raise ParseError(line, f"'{op}' takes no arguments")
            commands.append(Command(op, (), line))
        else:
            raise ParseError(line, f"unknown command {op!r}")
    return Script(n, weighted, C, commands)


# --------------------------------------------------------------------------
# engines


@dataclass
class Options:
    engine: str = "fd-scc"
    seed: int = 0
    epsilon: float = 0.5
    phase_len: int | None = None
    delta: int | None = None
    alpha: float | None = None
    check: bool = False


@dataclass(frozen=True)
class EngineInfo:
    ops: frozenset
    randomized: bool
    insert_only: bool = False
    acyclic: bool = False
    simple_paths: bool = False
    exact: bool = False
    approx: bool = False


_I, _II, _D = "insert", "insert-into", "delete"
ENGINES = {
    "dag-path": EngineInfo(frozenset({_I, _II, _D, "path", "toporder"}), True,
                           acyclic=True, simple_paths=True),
    "dag-tree": EngineInfo(frozenset({_I, _II, _D, "path", "tree", "toporder"}), True,
                           acyclic=True, simple_paths=True),
    "fd-scc": EngineInfo(frozenset({_I, _II, _D, "scc"}), True),
    "fd-path": EngineInfo(frozenset({_I, _II, _D, "path"}), True, simple_paths=True),
    "fd-tree": EngineInfo(frozenset({_I, _II, _D, "tree"}), True),
    "inc-tree": EngineInfo(frozenset({_I, _II, "tree"}), False, insert_only=True),
    "inc-path": EngineInfo(frozenset({_I, _II, "path"}), False, insert_only=True, simple_paths=True),
    "inc-approx": EngineInfo(frozenset({_I, _II, "path", "dist"}), False, insert_only=True,
                             approx=True),
    "inc-exact-pair": EngineInfo(frozenset({_I, _II, "path", "dist"}), False, insert_only=True,
                                 exact=True),
    "inc-exact-tree": EngineInfo(frozenset({_I, _II, "tree", "dist"}), False, insert_only=True,
                                 exact=True),
    "offline": EngineInfo(frozenset({_I, _II, _D, "path", "dist"}), False, exact=True),
}


def _phase_kw(opts: Options) -> dict:
    kw = {}
    if opts.phase_len is not None:
        kw["phase_len"] = opts.phase_len
    if opts.alpha is not None:
        kw["alpha"] = opts.alpha
    return kw


def build_engine(name: str, g: DiGraph, opts: Options, counters: Counters):
    fd_kw = {} if opts.phase_len is None else {"phase_len": opts.phase_len}
    if name == "dag-path":
        return DagPathStruct(g, seed=opts.seed, counters=counters)
    if name == "dag-tree":
        return DagTreeStruct(g, seed=opts.seed, delta=opts.delta, counters=counters)
    if name == "fd-scc":
        return FdScc(g, seed=opts.seed, counters=counters, **fd_kw)
    if name == "fd-path":
        return FdPath(g, seed=opts.seed, counters=counters, **fd_kw)
    if name == "fd-tree":
        return FdTree(g, seed=opts.seed, delta=opts.delta, counters=counters, **fd_kw)
    if name == "inc-tree":
        return IncrTree(g, **_phase_kw(opts))
    if name == "inc-path":
        return IncrPath(g, **_phase_kw(opts))
    if name == "inc-approx":
        return IncrApprox(g, eps=opts.epsilon, **_phase_kw(opts))
    if name == "inc-exact-pair":
        return IncrExactPair(g, **_phase_kw(opts))
    if name == "inc-exact-tree":
        return IncrExactTree(g, **_phase_kw(opts))
    raise EngineMismatch(f"unknown engine {name!r}")


# --------------------------------------------------------------------------
# formatting


def fmt_number(d: float) -> str:
    return format(float(d), ".12g")


def fmt_path(s, t, vertices) -> str:
    if vertices is None:
        return f"PATH {s} {t}: UNREACHABLE"
    return f"PATH {s} {t}: " + " ".join(map(str, vertices))


def fmt_tree(s, edges) -> str:
    body = "".join(f"({p} {c})" for p, c in sorted(edges, key=lambda e: (e[1], e[0])))
    return f"TREE {s}: {body}".rstrip()


def fmt_dist(s, t, d) -> str:
    return f"DIST {s} {t}: " + ("INF" if d is None or d == math.inf else fmt_number(d))


# --------------------------------------------------------------------------
# running


@dataclass
class RunReport:
    lines: list = field(default_factory=list)
    counter_rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    queries: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def totals(self) -> list[dict]:
        """Running totals of the per-command counter deltas."""
        acc = dict.fromkeys(FIELDS, 0)
        out = []
        for row in self.counter_rows:
            for f in FIELDS:
                acc[f] += row[f]
            out.append({"step": row["step"], "op": row["op"], **acc})
        return out


class _Checker:
    def __init__(self, script: Script, info: EngineInfo, eps: float, report: RunReport):
        self.g = DiGraph(script.n, weighted=script.weighted, C=script.C)
        self.info = info
        self.eps = eps
        self.report = report

    def fail(self, cmd: Command, msg: str):
        self.report.failures.append(f"line {cmd.line}: {cmd.op} {' '.join(map(str, cmd.args))}: {msg}")
        raise CheckFailure(self.report.failures[-1])

    def path(self, cmd, witness: PathWitness | None, length=None):
        s, t = cmd.args
        reach = oracle_reach(self.g, s, t)
        if witness is None:
            if reach:
                self.fail(cmd, "reported UNREACHABLE for a reachable pair")
            return
        if not reach:
            self.fail(cmd, "reported a path for an unreachable pair")
        if not verify_path(self.g, witness, s, t, require_simple=self.info.simple_paths):
            self.fail(cmd, f"invalid path {witness.vertices}")
        if length is not None:
            if not math.isclose(path_weight(self.g, witness.vertices), length, rel_tol=1e-9):
                self.fail(cmd, f"length {length} is not the weight of the reported path")
            self.dist(cmd, length)

    def dist(self, cmd, length):
        s, t = cmd.args
        true = oracle_dist(self.g, s)[0][t]
        if length is None:
            if true != math.inf:
                self.fail(cmd, "reported INF for a reachable pair")
            return
        if self.info.exact and length != true:
            self.fail(cmd, f"length {length} != {true}")
        if self.info.approx and not (true * (1 - 1e-9) <= length <= (1 + self.eps) * true * (1 + 1e-9)):
            self.fail(cmd, f"length {length} outside [{true}, (1+eps)*{true}]")

    def tree(self, cmd, edges, dist=None):
        s = cmd.args[0]
        if not verify_out_tree(self.g, edges, s, reachable_set(self.g, s)):
            self.fail(cmd, "invalid out-tree")
        if dist is not None:
            true = oracle_dist(self.g, s)[0]
            if any(true[v] != d for v, d in dist.items()):
                self.fail(cmd, "tree distances differ from BFS")

    def special(self, cmd, eng):
        count = len(eng.tracker.special_components())
        if count > 2 * self.g.n / eng.delta:
            self.fail(cmd, f"{count} special components exceed 2n/delta")

    def scc(self, cmd, labels):
        if labels != oracle_scc(self.g):
            self.fail(cmd, "partition differs from Tarjan")

    def toporder(self, cmd, order):
        pos = {v: i for i, v in enumerate(order)}
        if sorted(order) != list(range(self.g.n)) or any(pos[u] >= pos[v] for u, v, _ in self.g.edges()):
            self.fail(cmd, "not a topological order")


def _updates_as_events(cmd: Command):
    if cmd.op == "insert":
        u, v, w = cmd.args
        return [InsertEdge(u, v, w)]
    if cmd.op == "insert-into":
        v, tails = cmd.args
        return [InsertEdge(u, v, w) for u, w in tails]
    return [DeleteEdge(*cmd.args)]


def _validate(script: Script, info: EngineInfo, name: str):
    for cmd in script.commands:
        if cmd.op not in info.ops:
            raise EngineMismatch(f"line {cmd.line}: engine {name} does not support '{cmd.op}'")


def run(script: Script | str, opts: Options | None = None) -> RunReport:
    """Execute a script; raises ParseError, EngineMismatch, CheckFailure or GraphError."""
    opts = opts or Options()
    if isinstance(script, str):
        script = parse_script(script)
    if opts.engine not in ENGINES:
        raise EngineMismatch(f"unknown engine {opts.engine!r}")
    info = ENGINES[opts.engine]
    _validate(script, info, opts.engine)
    report = RunReport()
    if not info.randomized:
        report.notes.append(f"engine {opts.engine} is deterministic; --seed is ignored")
    if opts.engine == "offline":
        return _run_offline(script, opts, info, report)

    counters = Counters()
    checker = _Checker(script, info, opts.epsilon, report) if opts.check else None
    before = counters.snapshot()
    t0 = time.perf_counter_ns()
    eng = build_engine(opts.engine, DiGraph(script.n, weighted=script.weighted, C=script.C),
                       opts, counters)
    report.counter_rows.append({"step": 0, "op": "init", "wall_ns": time.perf_counter_ns() - t0,
                                **counters.since(before)})
    for step, cmd in enumerate(script.commands, start=1):
        before = counters.snapshot()
        t0 = time.perf_counter_ns()
        line = _execute(eng, opts.engine, cmd, checker)
        elapsed = time.perf_counter_ns() - t0
        if line is not None:
            report.lines.append(line)
            report.queries += 1
        report.counter_rows.append({"step": step, "op": cmd.op, "wall_ns": elapsed,
                                    **counters.since(before)})
    return report


def _execute(eng, name: str, cmd: Command, checker: _Checker | None):
    op = cmd.op
    if op in UPDATE_OPS:
        if op == "insert-into" and name in ("inc-tree", "inc-exact-tree"):
            v, tails = cmd.args
            if name == "inc-tree":
                eng.insert_incoming(v, list(tails))
            else:
                eng.insert_incoming(v, [u for u, _ in tails])
        elif op == "delete":
            eng.delete(*cmd.args)
        else:
            for ev in _updates_as_events(cmd):
                eng.insert(ev.u, ev.v, ev.w)
        if checker is not None:
            for ev in _updates_as_events(cmd):
                apply_update(checker.g, ev)
            if name == "fd-tree":
                checker.special(cmd, eng)
        return None
    if op == "path":
        s, t = cmd.args
        length = None
        if name in ("inc-approx", "inc-exact-pair"):
            res = eng.query(s, t)
            witness = None if res is None else res[1].witness()
            length = None if res is None else res[0]
        else:
            witness = eng.query_path(s, t)
        if checker is not None:
            checker.path(cmd, witness, length)
        return fmt_path(s, t, None if witness is None else witness.vertices)
    if op == "dist":
        s, t = cmd.args
        if name == "inc-exact-tree":
            _, dist = eng.query_tree(s)
            d = dist.get(t)
        else:
            res = eng.query(s, t)
            d = None if res is None else res[0]
        if checker is not None:
            checker.dist(cmd, d)
        return fmt_dist(s, t, d)
    if op == "tree":
        s = cmd.args[0]
        dist = None
        if name == "inc-exact-tree":
            edges, dist = eng.query_tree(s)
        else:
            edges = eng.query_tree(s)
        if checker is not None:
            checker.tree(cmd, edges, dist)
        return fmt_tree(s, edges)
    if op == "scc":
        labels = eng.components()
        if checker is not None:
            checker.scc(cmd, labels)
        return "SCC: " + " ".join(map(str, labels))
    if op == "toporder":
        order = eng.toporder()
        if checker is not None:
            checker.toporder(cmd, order)
        return "TOPORDER: " + " ".join(map(str, order))
    raise EngineMismatch(f"unsupported command {op!r}")


def _run_offline(script: Script, opts: Options, info: EngineInfo, report: RunReport) -> RunReport:
    timeline = []
    tagged: dict[int, list] = {}
    order = []
    oracle = DiGraph(script.n, weighted=script.weighted, C=script.C)
    for cmd in script.commands:
        if cmd.op in UPDATE_OPS:
            for ev in _updates_as_events(cmd):
                apply_update(oracle, ev)
                timeline.append(ev)
        else:
            version = len(timeline)
            tagged.setdefault(version, []).append(cmd)
            order.append((version, len(tagged[version]) - 1))

    kw = _phase_kw(opts)

    def factory(g):
        return IncrExactPair(g, **kw)

    def answer(struct, cmd):
        s, t = cmd.args
        res = struct.query(s, t)
        if res is None:
            return None
        return res[0], res[1].witness()

    results = offline_run(script.n, [], timeline, tagged, factory=factory, answer=answer)
    if opts.check:
        # replay versions with a fresh oracle
        replay = DiGraph(script.n, weighted=script.weighted, C=script.C)
        checker = _Checker(script, info, opts.epsilon, report)
        checker.g = replay
        applied = 0
        for version, idx in order:
            while applied < version:
                apply_update(replay, timeline[applied])
                applied += 1
            cmd = tagged[version][idx]
            res = results[version][idx]
            if cmd.op == "path":
                checker.path(cmd, None if res is None else res[1], None if res is None else res[0])
            else:
                checker.dist(cmd, None if res is None else res[0])
    for version, idx in order:
        cmd = tagged[version][idx]
        res = results[version][idx]
        s, t = cmd.args
        if cmd.op == "path":
            report.lines.append(fmt_path(s, t, None if res is None else res[1].vertices))
        else:
            report.lines.append(fmt_dist(s, t, None if res is None else res[0]))
        report.queries += 1
    return report


def write_counters(rows, fh, extra: dict | None = None):
    cols = list(extra or {}) + ["step", "op", "wall_ns", *FIELDS]
    writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**(extra or {}), **row})


# --------------------------------------------------------------------------
# script generation, fuzzing and benchmarks


def default_mix(engine: str) -> str:
    info = ENGINES[engine]
    if info.acyclic:
        return "acyclic"
    if info.insert_only:
        return "insert-only"
    return "mixed"


def generate_script(engine: str, n: int, steps: int, seed: int, mix: str | None = None,
                    weight_cap: float = 8.0, query_ops=None, queries_per_step: int = 1) -> str:
    """Random valid script for ``engine``: each update is followed by queries.

    ``query_ops`` restricts the query kinds drawn (default: all the engine
    supports).
    """
    info = ENGINES[engine]
    mix = mix or default_mix(engine)
    if mix == "mixed" and info.insert_only:
        raise EngineMismatch(f"engine {engine} cannot process deletions")
    if mix != "acyclic" and info.acyclic:
        raise EngineMismatch(f"engine {engine} needs an acyclic update mix")
    rng = random.Random(seed)
    weighted = engine == "inc-approx"
    lines = [f"init {n}" + (f" weighted {weight_cap:g}" if weighted else "")]
    present: set = set()
    rank = list(range(n))
    rng.shuffle(rank)
    queries = sorted(info.ops & set(QUERY_OPS if query_ops is None else query_ops))
    grouped = engine in ("inc-tree", "inc-exact-tree")

    def allowed(u, v):
        return u != v and (u, v) not in present and (mix != "acyclic" or rank[u] < rank[v])

    for _ in range(steps):
        absent = [(u, v) for u in range(n) for v in range(n) if allowed(u, v)]
        delete = mix != "insert-only" and present and (not absent or rng.random() < 0.4)
        if delete:
            u, v = rng.choice(sorted(present))
            present.discard((u, v))
            lines.append(f"delete {u} {v}")
        elif absent:
            if grouped:
                v = rng.choice(sorted({b for _, b in absent}))
                tails = [u for u, b in absent if b == v and rng.random() < 0.5] or \
                    [next(u for u, b in absent if b == v)]
                for u in tails:
                    present.add((u, v))
                lines.append(f"insert-into {v} " + " ".join(map(str, tails)))
            else:
                u, v = rng.choice(absent)
                present.add((u, v))
                if weighted:
                    lines.append(f"insert {u} {v} {rng.uniform(1, weight_cap):.3f}")
                else:
                    lines.append(f"insert {u} {v}")
        for _ in range(queries_per_step if queries else 0):
            op = rng.choice(queries)
            s, t = rng.randrange(n), rng.randrange(n)
            lines.append({"path": f"path {s} {t}", "dist": f"dist {s} {t}", "tree": f"tree {s}",
                          "scc": "scc", "toporder": "toporder"}[op])
    return "\n".join(lines) + "\n"


@dataclass
class FuzzReport:
    runs: int = 0
    queries: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def fuzz(n: int, steps: int, engines, seeds, mix: str | None = None, opts: Options | None = None,
         query_ops=None, queries_per_step: int = 1) -> FuzzReport:
    """Generate, run with checking, and aggregate; reproducible from the seeds."""
    base = opts or Options()
    out = FuzzReport()
    for engine in engines:
        for seed in seeds:
            text = generate_script(engine, n, steps, seed, mix, query_ops=query_ops,
                                   queries_per_step=queries_per_step)
            o = Options(engine=engine, seed=seed, epsilon=base.epsilon, phase_len=base.phase_len,
                        delta=base.delta, alpha=base.alpha, check=True)
            out.runs += 1
            try:
                rep = run(text, o)
                out.queries += rep.queries
            except CheckFailure as exc:
                out.failures.append(f"{engine} seed={seed}: {exc}")
    return out


# Path/tree reporting engines, n=10, 100 updates with 5 path/tree queries after
# each, 24 seeds apiece: 9 * 24 * 500 = 108,000 checked queries.
STANDARD_ENGINES = ("dag-path", "dag-tree", "fd-path", "fd-tree", "inc-tree", "inc-path",
                    "inc-approx", "inc-exact-pair", "inc-exact-tree")
STANDARD_SUITE = dict(n=10, steps=100, seeds=range(24), query_ops=("path", "tree"),
                      queries_per_step=5)


def standard_suite(opts: Options | None = None) -> FuzzReport:
    """The fixed fuzz suite: every path/tree answer checked against the oracles."""
    cfg = STANDARD_SUITE
    return fuzz(cfg["n"], cfg["steps"], STANDARD_ENGINES, cfg["seeds"], opts=opts,
                query_ops=cfg["query_ops"], queries_per_step=cfg["queries_per_step"])


def bench(sizes, engine: str = "fd-scc", steps: int = 50, seed: int = 0,
          opts: Options | None = None) -> str:
    """CSV of per-command wall time and counters for each size."""
    base = opts or Options()
    buf = io.StringIO()
    cols = ["n", "step", "op", "wall_ns", *FIELDS]
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for n in sizes:
        text = generate_script(engine, n, steps, seed)
        o = Options(engine=engine, seed=seed, epsilon=base.epsilon, phase_len=base.phase_len,
                    delta=base.delta, alpha=base.alpha)
        rep = run(text, o)
        for row in rep.counter_rows:
            writer.writerow({"n": n, **row})
    return buf.getvalue()
