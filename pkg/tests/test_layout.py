import math

import numpy as np
import pytest

from spreadlayout.decompose import compute_scales
from spreadlayout.graph import (
    Graph,
    Ordering,
    cut_weight,
    cutwidth_cost,
    mla_cost,
    validate_path_decomposition,
    vs_cost,
)
from spreadlayout.layout import (
    SolveConfig,
    approximation_factor,
    child_rng,
    cutwidth_order,
    mla_guarantee_check,
    partition_and_arrange,
    partition_and_arrange_vertex,
    pathwidth_decomposition,
    pathwidth_order,
    solve_cutwidth,
    solve_pathwidth,
)
from spreadlayout.lp import solve_mla_lp, solve_vs_lp
from spreadlayout.oracle import random_graph


def _graph(seed, lo=8, hi=40):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(lo, hi + 1))
    return random_graph(n, "gnm", m=int(round(1.6 * n)), seed=seed)


def _check_pieces(G, op, vertex=False):
    n = G.n
    allv = np.concatenate(op.pieces)
    assert sorted(allv.tolist()) == list(range(n))
    keys = [(p.j, p.i) for p in op.provenance]
    assert keys == sorted(keys)
    for S, p in zip(op.pieces, op.provenance):
        if p.kind == "net":
            assert len(S) <= n / 2
        else:
            assert vertex and S.tolist() == [p.vertex]
    if vertex:
        # within a round, singletons come first and in ascending id
        for key in set(keys):
            kinds = [p.kind for p, k in zip(op.provenance, keys) if k == key]
            assert kinds == sorted(kinds)  # "cut" < "net"
            ws = [p.vertex for p, k in zip(op.provenance, keys) if k == key and p.kind == "cut"]
            assert ws == sorted(ws)


@pytest.mark.parametrize("seed", range(6))
def test_partition_and_arrange_invariants(seed):
    G = _graph(seed)
    sol = solve_mla_lp(G)
    p = compute_scales(G.n)
    op = partition_and_arrange(G, sol, p, np.random.default_rng(seed))
    _check_pieces(G, op)
    assert op.audit.ok
    # recompute each piece's cut inside the vertex set live at the start of its round
    alive = np.ones(G.n, bool)
    total, start, cur = 0.0, None, None
    for S, q, c in zip(op.pieces, op.provenance, op.piece_cuts):
        if (q.j, q.i) != cur:
            cur, start = (q.j, q.i), alive.copy()
        H, labels = G.induced_subgraph(np.nonzero(start)[0])
        index = {int(v): k for k, v in enumerate(labels)}
        assert cut_weight(H, [index[int(v)] for v in S]) == pytest.approx(c)
        total += c
        budget = p.beta * math.log2(G.n / len(S)) * sol.objective / G.n
        assert total <= budget + 1e-6
        alive[S] = False


@pytest.mark.parametrize("seed", range(6))
def test_partition_and_arrange_vertex_invariants(seed):
    G = _graph(seed)
    sol = solve_vs_lp(G)
    p = compute_scales(G.n)
    op = partition_and_arrange_vertex(G, sol, p, np.random.default_rng(seed))
    _check_pieces(G, op, vertex=True)
    assert op.audit.ok
    cut_by_class = {}
    for q in op.provenance:
        if q.kind == "cut":
            cut_by_class[q.j] = cut_by_class.get(q.j, 0) + 1
    for S, q in zip(op.pieces, op.provenance):
        if q.kind == "net":
            lhs = sum(c for j, c in cut_by_class.items() if j <= q.j)
            assert lhs <= p.beta * math.log2(G.n / len(S)) * sol.objective / G.n + 1e-6
    # no edge joins two different net pieces of the same round
    for r in op.rounds:
        members = {}
        for S, q in zip(op.pieces, op.provenance):
            if q.kind == "net" and (q.j, q.i) == (r.j, r.i):
                for v in S:
                    members[int(v)] = q.vertex
        for u, v, _ in G.edges:
            if u in members and v in members:
                assert members[u] == members[v]


def test_triangle_splits():
    G = random_graph(3, "complete")
    op = partition_and_arrange(G, solve_mla_lp(G), compute_scales(3), np.random.default_rng(0))
    assert len(op.pieces) >= 2


def test_base_cases():
    assert cutwidth_order(Graph.from_edges(2, [(0, 1)])) == Ordering.identity(2)
    assert pathwidth_order(Graph.from_edges(2, [])) == Ordering.identity(2)
    assert cutwidth_order(Graph.from_edges(1, [])) == Ordering.identity(1)
    assert cutwidth_order(Graph.from_edges(0, [])) == Ordering(())


def test_edgeless():
    G = Graph.from_edges(6, [])
    assert cutwidth_cost(G, cutwidth_order(G)) == 0
    assert vs_cost(G, pathwidth_order(G)) == 0


@pytest.mark.parametrize("seed", range(4))
def test_drivers_are_deterministic(seed):
    G = _graph(seed, 10, 30)
    cfg = SolveConfig(seed=seed)
    a, b = solve_cutwidth(G, cfg), solve_cutwidth(G, cfg)
    assert a.ordering == b.ordering and a.retries == b.retries
    assert solve_pathwidth(G, cfg).ordering == solve_pathwidth(G, cfg).ordering


@pytest.mark.parametrize("seed", range(4))
def test_recursion_levels(seed):
    G = _graph(seed, 20, 48)
    res = solve_cutwidth(G, SolveConfig(seed=seed))
    assert res.audit_ok
    sizes = {lv.path: lv.n for lv in res.levels}
    for path, n in sizes.items():
        if path:
            assert n <= sizes[path[:-1]] / 2
    depth = max(len(p) for p in sizes)
    assert depth <= math.log2(G.n) + 1
    res = solve_pathwidth(G, SolveConfig(seed=seed))
    assert res.audit_ok


def test_child_rng_streams_differ():
    a = child_rng(0, ()).random(3)
    b = child_rng(0, (0,)).random(3)
    c = child_rng(0, (0,)).random(3)
    assert not np.allclose(a, b) and np.array_equal(b, c)


def test_star_guarantees():
    star = random_graph(12, "star")
    pi = pathwidth_order(star)
    assert vs_cost(star, pi) <= approximation_factor(12) * 1
    pd = pathwidth_decomposition(star)
    assert validate_path_decomposition(star, pd)
    assert pd.width <= vs_cost(star, pi)


def test_path_decomposition_p5():
    P5 = random_graph(5, "path")
    assert validate_path_decomposition(P5, pathwidth_decomposition(P5))


def test_mla_guarantee_examples(P3):
    K2 = Graph.from_edges(2, [(0, 1)])
    chk = mla_guarantee_check(K2, Ordering.identity(2), 0.75)
    assert chk.ok and chk.cost == 1.0 and chk.bound == pytest.approx(approximation_factor(2) * 0.75)
    assert approximation_factor(2) == 8.0**5 * 4 and approximation_factor(1) == 1.0
    assert solve_cutwidth(K2).root_objective == pytest.approx(0.75)
    assert solve_pathwidth(K2).root_objective == pytest.approx(0.75)
    chk = mla_guarantee_check(P3, Ordering.identity(3), 2.0)
    p = compute_scales(3)
    assert chk.ok and chk.cost == 2.0
    assert chk.bound == pytest.approx(p.beta * math.log2(3) * 2.0)
    G = _graph(3)
    res = solve_cutwidth(G)
    assert mla_guarantee_check(G, res.ordering, res.root_objective).ok


def test_gamma_override_and_config():
    G = _graph(1, 16, 16)
    res = solve_cutwidth(G, SolveConfig(gamma_override=3.0))
    assert res.root_params.gamma == 3.0
    with pytest.raises(ValueError):
        SolveConfig(gamma_override=1.0)
    with pytest.raises(ValueError):
        SolveConfig(retry_cap=0)


def test_reuse_metric_flag():
    G = _graph(2, 24, 24)
    res = solve_cutwidth(G, SolveConfig(reuse_metric=True))
    assert sorted(res.ordering.sequence) == list(range(G.n))
    assert res.audit_ok
    assert all(lv.lp_rounds == 0 for lv in res.levels if lv.path)  # inherited metrics skip the LP
    with pytest.raises(ValueError):
        solve_pathwidth(G, SolveConfig(reuse_metric=True))


def test_disconnected_input():
    G = Graph.from_edges(12, [(0, 1), (1, 2), (2, 0), (5, 6), (6, 7), (7, 8), (10, 11)])
    for solve in (solve_cutwidth, solve_pathwidth):
        res = solve(G)
        assert sorted(res.ordering.sequence) == list(range(12)) and res.audit_ok


def test_trace_records():
    G = _graph(0, 20, 20)
    rec = []
    solve_cutwidth(G, trace=rec.append)
    assert rec and {"path", "j", "i", "terminals", "radii", "piece_sizes", "cut_weight", "retries"} <= set(rec[0])
    assert all(len(r["terminals"]) == len(r["radii"]) == len(r["piece_sizes"]) for r in rec)


def test_weighted_graph_costs():
    G = Graph.from_edges(6, [(0, 1, 3.0), (1, 2, 0.5), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 4.0), (5, 0, 1.5)])
    res = solve_cutwidth(G)
    assert res.audit_ok
    assert mla_cost(G, res.ordering) <= approximation_factor(6) * res.root_objective
