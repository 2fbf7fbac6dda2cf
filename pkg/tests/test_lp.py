import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadlayout.graph import Graph
from spreadlayout.lp import (
    PAIR_MIN,
    LinearProgram,
    LPIterationLimit,
    check_metric,
    dump_solution,
    lp_solve,
    restrict_metric,
    separate_spreading,
    separate_triangle,
    solve_mla_lp,
    solve_vs_lp,
    spreading_rhs,
)
from spreadlayout.oracle import mla_lp_enumerated, random_graph, vs_lp_enumerated

from .conftest import graphs

BACKENDS = ["highs", "simplex"]


# ---------- generic programs


@pytest.mark.parametrize("backend", BACKENDS)
def test_single_lower_bound(backend):
    p = LinearProgram(1, [1.0])
    p.add_row([0], [1.0], ">=", 0.75)
    res = lp_solve(p, backend)
    assert res.optimal and res.x[0] == pytest.approx(0.75, abs=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_sum_constraint(backend):
    p = LinearProgram(2, [1.0, 1.0])
    p.add_row([0, 1], [1.0, 1.0], ">=", 1.0)
    res = lp_solve(p, backend)
    assert res.optimal and res.objective == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_infeasible(backend):
    p = LinearProgram(1, [1.0])
    p.add_row([0], [1.0], "<=", -1.0)
    assert lp_solve(p, backend).status == "infeasible"


@pytest.mark.parametrize("backend", BACKENDS)
def test_unbounded(backend):
    p = LinearProgram(2, [-1.0, 0.0])
    p.add_row([0, 1], [1.0, -1.0], "<=", 1.0)
    assert lp_solve(p, backend).status == "unbounded"


@pytest.mark.parametrize("backend", BACKENDS)
def test_equality_and_bounds(backend):
    # min -x - 2y, x + y = 3, 0 <= x <= 2, 1 <= y <= 2.5, free z with z >= x - 5
    p = LinearProgram(3, [-1.0, -2.0, 1.0], lower=[0, 1, -np.inf], upper=[2, 2.5, np.inf])
    p.add_row([0, 1], [1, 1], "=", 3.0)
    p.add_row([2, 0], [1, -1], ">=", -5.0)
    res = lp_solve(p, backend)
    assert res.optimal
    np.testing.assert_allclose(res.x, [0.5, 2.5, -4.5], atol=1e-8)


def test_rejects_bad_rows():
    p = LinearProgram(2)
    with pytest.raises(ValueError):
        p.add_row([2], [1.0], ">=", 0)
    with pytest.raises(ValueError):
        p.add_row([0], [np.inf], ">=", 0)
    with pytest.raises(ValueError):
        p.add_row([0], [1.0], ">", 0)
    with pytest.raises(ValueError):
        lp_solve(p, "cplex")


@settings(max_examples=40)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 10_000))
def test_backends_agree(nv, nr, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 4, size=(nr, nv)).astype(float)
    A[:, 0] += 1  # every row can be satisfied through x_0
    c = rng.integers(1, 5, size=nv).astype(float)
    b = rng.integers(0, 6, size=nr).astype(float)
    p = LinearProgram(nv, c)
    for row, rhs in zip(A, b):
        p.add_row(range(nv), row, ">=", rhs)
    a, s = lp_solve(p, "highs"), lp_solve(p, "simplex")
    assert a.optimal and s.optimal
    assert s.objective == pytest.approx(a.objective, abs=1e-6)
    assert (A @ s.x >= b - 1e-7).all() and (s.x >= -1e-9).all()


# ---------- separation


def test_spreading_zero_metric():
    v = [c for c in separate_spreading(np.zeros((3, 3))) if c.center == 0]
    assert [len(c.members) for c in v] == [2, 3]
    assert v[0].rhs == 0.75 and v[1].rhs == 2.0


def test_spreading_line_metric_feasible():
    d = np.abs(np.subtract.outer(np.arange(5), np.arange(5))).astype(float)
    assert separate_spreading(d) == []
    assert not [c for c in separate_spreading(d) if c.center == 2]


def test_spreading_prefix_sets_are_nearest():
    d = np.array([[0, 1, 5, 2], [1, 0, 1, 1], [5, 1, 0, 1], [2, 1, 1, 0]], float) * 0.5
    v = [c for c in separate_spreading(d) if c.center == 0]
    assert v[0].others == (1,) and v[1].others == (1, 3)


def test_triangle_examples():
    d = np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], float)
    v = separate_triangle(d)
    assert len(v) == 1 and (v[0].u, v[0].v, v[0].w) == (0, 1, 2) and v[0].excess == pytest.approx(1.0)
    line = np.abs(np.subtract.outer(np.arange(6), np.arange(6))).astype(float)
    assert separate_triangle(line) == []
    mask = np.array([0, 1, 1, 0, 1, 0], bool)
    assert separate_triangle((mask[:, None] != mask[None, :]).astype(float)) == []


def test_triangle_cap():
    rng = np.random.default_rng(0)
    d = rng.random((12, 12))
    d = d + d.T
    np.fill_diagonal(d, 0)
    full = separate_triangle(d, cap=None)
    capped = separate_triangle(d, cap=7)
    assert len(capped) == 7 and capped == full[:7]
    assert all(a.excess >= b.excess for a, b in zip(full, full[1:]))


# ---------- spreading LPs


def test_mla_lp_single_edge():
    sol = solve_mla_lp(Graph.from_edges(2, [(0, 1)]))
    assert sol.objective == pytest.approx(0.75, abs=1e-9)
    assert sol.d[0, 1] == pytest.approx(0.75, abs=1e-9)


def test_mla_lp_path3(P3):
    sol = solve_mla_lp(P3)
    assert sol.objective == pytest.approx(2.0, abs=1e-6)
    assert mla_lp_enumerated(P3)[0] == pytest.approx(2.0, abs=1e-6)


def test_mla_lp_edgeless():
    sol = solve_mla_lp(Graph.from_edges(5, []))
    assert sol.objective == 0.0 and sol.rounds == 0
    assert check_metric(sol.d).feasible()


def test_vs_lp_small_cases(star5):
    sol = solve_vs_lp(Graph.from_edges(2, [(0, 1)]))
    assert sol.objective == pytest.approx(0.75, abs=1e-9)
    assert sol.x.sum() == pytest.approx(0.75, abs=1e-9)
    sol = solve_vs_lp(Graph.from_edges(4, []))
    assert sol.objective == 0.0 and (sol.x == 0).all()
    K13 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert solve_vs_lp(K13).objective / 4 <= 1 + 1e-6


@pytest.mark.parametrize("formulation", ["paths", "pairs"])
@pytest.mark.parametrize("seed", range(6))
def test_lazy_lp_matches_enumerated(formulation, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    G = random_graph(n, "gnm", m=int(rng.integers(1, n * (n - 1) // 2 + 1)), seed=seed)
    ref, _ = mla_lp_enumerated(G)
    sol = solve_mla_lp(G, formulation=formulation)
    assert sol.objective == pytest.approx(ref, abs=1e-6)
    vs = solve_vs_lp(G, formulation=formulation)
    assert vs.objective == pytest.approx(vs_lp_enumerated(G), abs=1e-6)


def test_simplex_backend_matches_highs():
    G = random_graph(6, "gnm", m=8, seed=3)
    for f in ("paths", "pairs"):
        a = solve_mla_lp(G, backend="simplex", formulation=f)
        b = solve_mla_lp(G, formulation=f)
        assert a.objective == pytest.approx(b.objective, abs=1e-6)


def _assert_feasible_metric(d):
    rep = check_metric(d)
    assert rep.feasible(), rep
    assert separate_spreading(d, 1e-6) == []
    assert separate_triangle(d, 1e-6) == []


@pytest.mark.parametrize("seed", range(4))
def test_solutions_satisfy_invariants(seed):
    G = random_graph(20, "gnm", m=32, seed=seed)
    sol = solve_mla_lp(G)
    _assert_feasible_metric(sol.d)
    eu, ev, ew = G.edge_arrays
    assert sol.objective == pytest.approx(float(ew @ sol.d[eu, ev]))
    vs = solve_vs_lp(G)
    _assert_feasible_metric(vs.d)
    assert (vs.x[eu] + vs.x[ev] >= vs.d[eu, ev] - 1e-12).all()
    assert vs.objective == pytest.approx(vs.x.sum())


def test_disconnected_graph():
    G = Graph.from_edges(7, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 3)])
    sol = solve_mla_lp(G)
    _assert_feasible_metric(sol.d)
    assert sol.objective == pytest.approx(mla_lp_enumerated(G)[0], abs=1e-6)


def test_prefix_dominance_by_sampling():
    rng = np.random.default_rng(7)
    for seed in range(10):
        G = random_graph(8, "gnm", m=12, seed=seed)
        d = np.asarray(solve_mla_lp(G).d)
        for _ in range(50):
            u = int(rng.integers(8))
            k = int(rng.integers(1, 8))
            others = rng.choice([v for v in range(8) if v != u], size=k, replace=False)
            prefix = np.sort(np.delete(d[u], u))[:k].sum()
            assert d[u, others].sum() >= prefix - 1e-12


@given(graphs(min_n=2, max_n=7, weighted=True))
@settings(max_examples=25)
def test_weight_scaling_doubles_objective(G):
    H = Graph.from_edges(G.n, [(u, v, 2 * w) for u, v, w in G.edges])
    assert solve_mla_lp(H).objective == pytest.approx(2 * solve_mla_lp(G).objective, rel=1e-7, abs=1e-7)


def test_round_cap():
    G = random_graph(16, "gnm", m=30, seed=0)
    with pytest.raises(LPIterationLimit):
        solve_mla_lp(G, max_rounds=1)


def test_restriction_stays_spreading():
    G = random_graph(14, "gnm", m=22, seed=2)
    d = solve_mla_lp(G).d
    sub = restrict_metric(d, [1, 4, 5, 8, 9, 13])
    assert check_metric(sub).feasible()


def test_dump_format(tmp_path):
    G = Graph.from_edges(3, [(0, 1), (1, 2)])
    sol = solve_vs_lp(G)
    path = tmp_path / "lp.txt"
    dump_solution(path, sol)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# objective")
    assert [ln.split()[0] for ln in lines[1:]] == ["d"] * 3 + ["x"] * 3
    assert float(lines[1].split()[3]) == sol.d[0, 1]


def test_spreading_rhs_values():
    assert spreading_rhs(2).item() == PAIR_MIN
    assert spreading_rhs([3, 5]).tolist() == [2.0, 6.0]
