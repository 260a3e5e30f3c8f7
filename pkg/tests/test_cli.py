import csv
import io

import pytest

from dyngraph import cli, harness
from dyngraph.dag import DagPathStruct
from dyngraph.errors import CheckFailure, EngineMismatch, ParseError
from dyngraph.fully_dynamic import FdScc
from dyngraph.graph import DiGraph


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def script_file(tmp_path, text, name="s.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_dag_path_example(tmp_path, capsys):
    path = script_file(tmp_path, "init 3; insert 0 1; insert 1 2; path 0 2\n")
    code, out, _ = run_cli(["run", path, "--engine", "dag-path"], capsys)
    assert code == 0 and out == "PATH 0 2: 0 1 2\n"


def test_fd_scc_two_cycle(tmp_path, capsys):
    path = script_file(tmp_path, "init 2\ninsert 0 1\ninsert 1 0\nscc\n")
    code, out, _ = run_cli(["run", path, "--engine", "fd-scc", "--check"], capsys)
    assert code == 0 and out == "SCC: 0 0\n"


def test_output_formats():
    rep = harness.run("init 4\ninsert 0 1\ninsert 0 2\ntree 0\ntree 3\ntoporder\npath 2 0\n",
                      harness.Options(engine="dag-tree", check=True))
    assert rep.lines == ["TREE 0: (0 1)(0 2)", "TREE 3:", "TOPORDER: 0 1 2 3",
                         "PATH 2 0: UNREACHABLE"]
    rep = harness.run("init 3 weighted 8\ninsert 0 1 2.5\ninsert 1 2 1.25\ndist 0 2\ndist 2 0\n",
                      harness.Options(engine="inc-approx", check=True))
    assert rep.lines == ["DIST 0 2: 3.75", "DIST 2 0: INF"]


def test_weighted_insert_into():
    script = harness.parse_script("init 4 weighted 8\ninsert-into 3 0 1.5 1 2 2.0\n")
    assert script.commands[0].args == (3, ((0, 1.5), (1, 1.0), (2, 2.0)))


@pytest.mark.parametrize("text, line", [
    ("insert 0 1\n", 1),
    ("init 3\ninsert 0 5\n", 2),
    ("init 3\n\nfrobnicate\n", 3),
    ("init 3\ninsert 0 1 2.0\n", 2),
    ("init 3 weighted 4\ninsert 0 1 9.0\n", 2),
    ("init 3\npath 0\n", 2),
    ("init 3\nscc 1\n", 2),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        harness.parse_script(text)
    assert exc.value.line == line


def test_parse_error_exit_code(tmp_path, capsys):
    code, _, err = run_cli(["run", script_file(tmp_path, "init 2\nbogus\n")], capsys)
    assert code == cli.EXIT_PARSE and "line 2" in err


def test_engine_mismatch_before_running(tmp_path, capsys):
    with pytest.raises(EngineMismatch):
        harness.run("init 3\ninsert 0 1\ndelete 0 1\n", harness.Options(engine="inc-path"))
    code, _, _ = run_cli(["run", script_file(tmp_path, "init 3\nscc\n"), "--engine", "dag-path"], capsys)
    assert code == cli.EXIT_MISMATCH
    with pytest.raises(EngineMismatch):
        harness.generate_script("inc-path", 6, 10, seed=0, mix="mixed")


def test_check_failure_is_nonzero(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(FdScc, "components", lambda self: list(range(self.n)))
    path = script_file(tmp_path, "init 2\ninsert 0 1\ninsert 1 0\nscc\n")
    code, _, err = run_cli(["run", path, "--engine", "fd-scc", "--check"], capsys)
    assert code == cli.EXIT_CHECK and "partition" in err
    with pytest.raises(CheckFailure):
        harness.run(open(path).read(), harness.Options(engine="fd-scc", check=True))


def test_graph_error_exit(tmp_path, capsys):
    code, _, err = run_cli(["run", script_file(tmp_path, "init 2\ndelete 0 1\n")], capsys)
    assert code == cli.EXIT_GRAPH and "MissingEdge" in err


def test_seed_note_for_deterministic_engines(tmp_path, capsys):
    code, _, err = run_cli(["run", script_file(tmp_path, "init 2\ninsert 0 1\npath 0 1\n"),
                            "--engine", "inc-path", "--seed", "5"], capsys)
    assert code == 0 and "ignored" in err


def test_counters_csv(tmp_path, capsys):
    text = harness.generate_script("dag-path", 10, 40, seed=3)
    path = script_file(tmp_path, text)
    out_csv = tmp_path / "c.csv"
    code, _, _ = run_cli(["run", path, "--engine", "dag-path", "--counters", str(out_csv)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert list(rows[0]) == ["step", "op", "wall_ns", "engine_queries", "rank1_updates",
                             "rebuilds", "detector_queries"]
    assert len(rows) == 1 + len(harness.parse_script(text).commands)
    # replay the script next to the CSV rows to know the order at each path query
    rep = harness.run(text, harness.Options(engine="dag-path"))
    script = harness.parse_script(text)
    s = DagPathStruct(DiGraph(script.n))
    for cmd, row in zip(script.commands, rep.counter_rows[1:]):
        if cmd.op in ("insert", "delete"):
            getattr(s, cmd.op)(*cmd.args[:2])
        elif cmd.op == "path":
            a, b = cmd.args
            assert row["engine_queries"] <= max(0, s.order.pos[b] - s.order.pos[a] + 1)
    totals = rep.totals()
    for f in ("engine_queries", "rank1_updates"):
        vals = [t[f] for t in totals]
        assert vals == sorted(vals)


def test_byte_stable_output(tmp_path, capsys):
    text = harness.generate_script("fd-path", 9, 60, seed=1)
    path = script_file(tmp_path, text)
    outs = [run_cli(["run", path, "--engine", "fd-path", "--seed", "4"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]


def test_fuzz_reproducible_and_clean():
    a = harness.fuzz(8, 40, ["fd-scc", "inc-path", "dag-tree"], range(3))
    b = harness.fuzz(8, 40, ["fd-scc", "inc-path", "dag-tree"], range(3))
    assert a == b and a.ok and a.runs == 9
    assert harness.generate_script("fd-tree", 8, 30, 5) == harness.generate_script("fd-tree", 8, 30, 5)


def test_fuzz_cli(capsys):
    code, out, _ = run_cli(["fuzz", "--n", "7", "--steps", "25", "--runs", "2"], capsys)
    assert code == 0 and out.startswith(f"runs={2 * len(harness.ENGINES)} ") and "failures=0" in out


def test_every_engine_generated_script_checks(tmp_path, capsys):
    for engine in harness.ENGINES:
        path = script_file(tmp_path, harness.generate_script(engine, 8, 40, seed=2), engine)
        code, out, err = run_cli(["run", path, "--engine", engine, "--check"], capsys)
        assert code == 0, err


def test_bench_format(capsys):
    text = harness.bench([64, 128, 256], engine="fd-scc", steps=4)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert {r["n"] for r in rows} == {"64", "128", "256"}
    assert list(rows[0]) == ["n", "step", "op", "wall_ns", "engine_queries", "rank1_updates",
                             "rebuilds", "detector_queries"]
    for r in rows:
        if r["op"] in ("insert", "delete"):
            assert int(r["rank1_updates"]) <= 2 * (0 + 2)
    code, out, _ = run_cli(["bench", "--sizes", "8", "--steps", "3"], capsys)
    assert code == 0 and out.startswith("n,step,op,")


def test_offline_engine_matches_inc_exact():
    text = ("init 5\ninsert 0 1\ninsert 1 2\ndist 0 2\ndelete 1 2\ndist 0 2\n"
            "insert 0 2\npath 0 2\ndist 2 0\n")
    rep = harness.run(text, harness.Options(engine="offline", check=True))
    assert rep.lines == ["DIST 0 2: 2", "DIST 0 2: INF", "PATH 0 2: 0 2", "DIST 2 0: INF"]
