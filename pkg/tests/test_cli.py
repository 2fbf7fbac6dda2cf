import json
import re
import subprocess
import sys

import pytest

from spreadlayout.cli import run
from spreadlayout.graph import Graph, parse_graph, validate_path_decomposition
from spreadlayout.oracle import random_graph


def _write(tmp_path, G, name="g.txt"):
    p = tmp_path / name
    p.write_text(G.to_edge_list())
    return str(p)


def _run(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _json(capsys, argv, expect=0):
    code, out, err = _run(capsys, argv)
    assert code == expect, err
    return json.loads(out)


def _strip_timing(text):
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    for r in rows:
        r.pop("timing_ms", None)
    return rows


def test_cutwidth_star(tmp_path, capsys):
    rep = _json(capsys, ["cutwidth", _write(tmp_path, random_graph(5, "star")), "--seed", "1"])
    assert sorted(rep["ordering"]) == [1, 2, 3, 4, 5]
    assert rep["costs"]["cutwidth"] >= 2
    assert rep["schema"] == 1 and rep["audit"]["ok"] and rep["guarantee"]["mla_ok"]


def test_cutwidth_edgeless(tmp_path, capsys):
    rep = _json(capsys, ["cutwidth", _write(tmp_path, Graph.from_edges(4, []))])
    assert rep["costs"]["cutwidth"] == 0 and rep["costs"]["mla"] == 0


def test_mla_reports_same_ordering(tmp_path, capsys):
    path = _write(tmp_path, random_graph(12, "gnm", m=18, seed=2))
    a = _json(capsys, ["cutwidth", path])
    b = _json(capsys, ["mla", path])
    assert a["ordering"] == b["ordering"] and a["costs"] == b["costs"] and b["command"] == "mla"


def test_report_costs_recompute(tmp_path, capsys):
    from spreadlayout.graph import Ordering, cutwidth_cost, mla_cost

    G = random_graph(14, "gnm", m=21, seed=5)
    rep = _json(capsys, ["cutwidth", _write(tmp_path, G)])
    pi = Ordering.from_sequence(rep["sequence"])
    assert rep["costs"] == {"cutwidth": cutwidth_cost(G, pi), "mla": mla_cost(G, pi)}


@pytest.mark.parametrize("G", [random_graph(10, "star"), random_graph(6, "path")], ids=["star10", "P6"])
def test_pathwidth_validates(tmp_path, capsys, G):
    from spreadlayout.graph import PathDecomposition

    rep = _json(capsys, ["pathwidth", _write(tmp_path, G), "--validate"])
    assert rep["validation"]["ok"]
    assert validate_path_decomposition(G, PathDecomposition(tuple(frozenset(b) for b in rep["bags"])))
    assert rep["costs"]["pathwidth"] >= 1 and rep["costs"]["pathwidth"] <= rep["costs"]["vs"]


@pytest.mark.parametrize("G,obj,val", [
    (random_graph(4, "complete"), "cw", 4),
    (random_graph(4, "complete"), "vs", 3),
    (random_graph(5, "star"), "vs", 1),
    (random_graph(3, "complete"), "mla", 4),
])
def test_exact(tmp_path, capsys, G, obj, val):
    rep = _json(capsys, ["exact", _write(tmp_path, G), "--objective", obj])
    assert rep["value"] == val and rep["recomputed"] == val


@pytest.mark.parametrize("G,which,val", [
    (Graph.from_edges(2, [(0, 1)]), "mla-lp", 0.75),
    (Graph.from_edges(2, [(0, 1)]), "lpcw", 0.5),
    (Graph.from_edges(5, []), "vs-lp", 0.0),
    (Graph.from_edges(2, [(0, 1)]), "cstar", 0.375),
])
def test_lowerbound(tmp_path, capsys, G, which, val):
    rep = _json(capsys, ["lowerbound", _write(tmp_path, G), "--which", which])
    assert rep["value"] == pytest.approx(val, abs=1e-9)


def test_lowerbound_simplex_backend(tmp_path, capsys):
    path = _write(tmp_path, random_graph(6, "gnm", m=8, seed=0))
    a = _json(capsys, ["lowerbound", path])
    b = _json(capsys, ["lowerbound", path, "--backend", "simplex"])
    assert a["value"] == pytest.approx(b["value"], abs=1e-6)


def test_bench(capsys):
    code, out, _ = _run(capsys, ["bench", "--sizes", "8:10", "--seeds", "2", "--objective", "cw"])
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    body, summary = rows[:-1], rows[-1]
    assert len(body) == 6 and summary["summary"] and summary["errors"] == 0
    for r in body:
        assert r["audit"] == "pass" and r["ratio_vs_exact"] >= 1 and r["within_bound"]
        assert r["value"] <= r["bound_factor"] * r["exact"]
    code, out, _ = _run(capsys, ["bench", "--sizes", "8", "--seeds", "1", "--objective", "vs", "--pretty"])
    assert code == 0 and "summary" in out


def test_gen(tmp_path, capsys):
    code, out, _ = _run(capsys, ["gen", "--family", "gnm", "--n", "10", "--m", "15", "--seed", "7"])
    assert code == 0
    G = parse_graph(out)
    assert G.n == 10 and G.m == 15
    dest = tmp_path / "grid.txt"
    assert run(["gen", "--family", "grid", "--n", "9", "-o", str(dest)]) == 0
    assert parse_graph(dest.read_text()).m == 12


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7\n")
    assert _run(capsys, ["cutwidth", str(tmp_path / "missing.txt")])[0] == 3
    code, _, err = _run(capsys, ["cutwidth", str(bad)])
    assert code == 4 and "line" in err
    big = _write(tmp_path, random_graph(20, "path"))
    code, _, err = _run(capsys, ["exact", big, "--exact-cap", "10"])
    assert code == 6 and "error" in err
    assert _run(capsys, ["cutwidth", big, "--gamma", "1.5"])[0] == 2
    assert _run(capsys, ["gen", "--family", "gnm", "--n", "4", "--m", "99"])[0] == 2
    with pytest.raises(SystemExit) as exc:
        run(["nosuchcommand"])
    assert exc.value.code == 2


def test_stdin_and_subprocess(tmp_path):
    text = random_graph(8, "gnm", m=12, seed=1).to_edge_list()
    proc = subprocess.run([sys.executable, "-m", "spreadlayout.cli", "cutwidth", "-"], input=text,
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["input"]["n"] == 8


def test_trace_file(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    path = _write(tmp_path, random_graph(20, "gnm", m=30, seed=3))
    _json(capsys, ["cutwidth", path, "--trace", str(trace)])
    lines = [json.loads(line) for line in trace.read_text().splitlines()]
    assert lines and all("terminals" in r and "radii" in r for r in lines)


def test_audit_toggle(tmp_path, capsys):
    path = _write(tmp_path, random_graph(10, "gnm", m=15, seed=4))
    assert _json(capsys, ["cutwidth", path, "--no-audit"])["audit"] == {"enabled": False, "ok": None}
    assert _json(capsys, ["pathwidth", path, "--audit"])["audit"]["enabled"]


COMMANDS = [
    ["cutwidth", "{g}", "--seed", "3"],
    ["mla", "{g}", "--seed", "3"],
    ["pathwidth", "{g}", "--seed", "3"],
    ["exact", "{g}", "--objective", "vs"],
    ["lowerbound", "{g}", "--which", "lpcw"],
    ["bench", "--sizes", "8", "--seeds", "2"],
    ["gen", "--n", "12", "--m", "20", "--seed", "3"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=[c[0] for c in COMMANDS])
def test_byte_identical_reruns(tmp_path, capsys, argv):
    g = _write(tmp_path, random_graph(11, "gnm", m=17, seed=9))
    argv = [a.format(g=g) for a in argv]
    _, a, _ = _run(capsys, argv)
    _, b, _ = _run(capsys, argv)
    if argv[0] == "gen":
        assert a == b
    else:
        assert _strip_timing(a) == _strip_timing(b)
        timing = re.compile(r'"timing_ms": [0-9.e+-]+')
        assert timing.sub("", a) == timing.sub("", b)
