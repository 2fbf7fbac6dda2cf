"""Exact solvers, enumerated LPs and graph generators for small instances.

The subset DPs run over bitmasks ``S`` (the set of the first ``|S|``
vertices of an ordering), one popcount layer at a time with numpy.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, Ordering
from .lp import LinearProgram, LPError, PAIR_MIN, lp_solve, solve_mla_lp, spreading_deficits, spreading_rhs

EXACT_CAP = 22
LPCW_CAP = 30
ENUM_LP_CAP = 10


class ScaleCapError(ValueError):
    """Instance too large for an exhaustive method."""


@dataclass(frozen=True)
class ExactResult:
    value: float
    ordering: Ordering


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise ScaleCapError(
            f"{what} is exhaustive and capped at n <= {cap} (got n = {n}); "
            "use the approximation commands for larger graphs"
        )


def _layers(n: int) -> list[np.ndarray]:
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        pop += (masks >> v) & 1
    order = np.argsort(pop, kind="stable")
    bounds = np.searchsorted(pop[order], np.arange(n + 2))
    return [order[bounds[k]:bounds[k + 1]] for k in range(n + 1)]


def subset_cuts(G: Graph) -> np.ndarray:
    """``cut[S]`` for every bitmask ``S``."""
    n = G.n
    masks = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n)
    for u, v, w in G.edges:
        cut += w * (((masks >> u) ^ (masks >> v)) & 1)
    return cut


def subset_boundaries(G: Graph) -> np.ndarray:
    """``|{u in S : u has a neighbour outside S}|`` for every bitmask ``S``."""
    n = G.n
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for u in range(n):
        nb = 0
        for v in G.neighbors(u):
            nb |= 1 << v
        if nb:
            out += ((masks >> u) & 1) & ((masks & nb) != nb)
    return out


def _subset_dp(n: int, local: np.ndarray, combine: str) -> tuple[np.ndarray, np.ndarray]:
    """``f[S] = combine(local[S], min_v f[S - v])`` with ``f[0] = 0``; also returns the argmin vertex."""
    f = np.zeros(1 << n)
    last = -np.ones(1 << n, dtype=np.int64)
    layers = _layers(n)
    for k in range(1, n + 1):
        M = layers[k]
        best = np.full(len(M), np.inf)
        arg = np.full(len(M), -1, dtype=np.int64)
        for v in range(n):
            has = ((M >> v) & 1).astype(bool)
            cand = f[M[has] ^ (1 << v)]
            better = cand < best[has]
            idx = np.nonzero(has)[0][better]
            best[idx] = cand[better]
            arg[idx] = v
        f[M] = np.maximum(local[M], best) if combine == "max" else local[M] + best
        last[M] = arg
    return f, last


def _backtrack(n: int, last: np.ndarray) -> Ordering:
    seq = []
    S = (1 << n) - 1
    while S:
        v = int(last[S])
        seq.append(v)
        S ^= 1 << v
    return Ordering.from_sequence(seq[::-1])


def _exact(G: Graph, local: np.ndarray, combine: str) -> ExactResult:
    n = G.n
    if n == 0:
        return ExactResult(0.0, Ordering(()))
    f, last = _subset_dp(n, local, combine)
    return ExactResult(float(f[-1]), _backtrack(n, last))


def exact_cutwidth(G: Graph, cap: int = EXACT_CAP) -> ExactResult:
    _check_cap(G.n, cap, "exact cutwidth")
    return _exact(G, subset_cuts(G), "max")


def exact_vs(G: Graph, cap: int = EXACT_CAP) -> ExactResult:
    _check_cap(G.n, cap, "exact vertex separation")
    res = _exact(G, subset_boundaries(G).astype(float), "max")
    return ExactResult(int(round(res.value)), res.ordering)


def exact_mla(G: Graph, cap: int = EXACT_CAP) -> ExactResult:
    _check_cap(G.n, cap, "exact linear arrangement")
    return _exact(G, subset_cuts(G), "sum")


def brute_force(G: Graph, cost) -> float:
    """Minimum of ``cost(G, pi)`` over all ``n!`` orderings."""
    return min(cost(G, Ordering.from_sequence(p)) for p in itertools.permutations(range(G.n)))


# ---------------------------------------------------------------------------
# fully enumerated spreading LPs (independent of the lazy solver)


def _pair_index(n: int) -> np.ndarray:
    idx = -np.ones((n, n), dtype=np.int64)
    iu, iv = np.triu_indices(n, 1)
    idx[iu, iv] = np.arange(len(iu))
    idx[iv, iu] = np.arange(len(iu))
    return idx


def _enumerated_program(G: Graph, with_x: bool) -> tuple[LinearProgram, np.ndarray]:
    n = G.n
    _check_cap(n, ENUM_LP_CAP, "enumerated spreading LP")
    P = _pair_index(n)
    npairs = n * (n - 1) // 2
    nv = npairs + (n if with_x else 0)
    c = np.zeros(nv)
    if with_x:
        c[npairs:] = 1.0
    else:
        for u, v, w in G.edges:
            c[P[u, v]] += w
    lower = np.r_[np.full(npairs, PAIR_MIN), np.zeros(nv - npairs)]
    p = LinearProgram(nv, c, lower)
    for u, v, w in itertools.permutations(range(n), 3):
        if u < w:
            p.add_row([P[u, v], P[v, w], P[u, w]], [1, 1, -1], ">=", 0.0)
    for u in range(n):
        others = [v for v in range(n) if v != u]
        for k in range(1, n):
            for T in itertools.combinations(others, k):
                p.add_row([P[u, v] for v in T], [1.0] * k, ">=", spreading_rhs(k + 1).item())
    if with_x:
        for u, v, _ in G.edges:
            p.add_row([npairs + u, npairs + v, P[u, v]], [1, 1, -1], ">=", 0.0)
    return p, P


def mla_lp_enumerated(G: Graph, backend: str = "highs") -> tuple[float, np.ndarray]:
    """Spreading LP with every triangle and every spreading set written out; ``(L*, d)``."""
    if G.m == 0:
        return 0.0, None
    p, P = _enumerated_program(G, False)
    res = lp_solve(p, backend)
    if not res.optimal:
        raise LPError(f"enumerated LP returned {res.status}")
    d = res.x[P]
    np.fill_diagonal(d, 0.0)
    return res.objective, d


def vs_lp_enumerated(G: Graph, backend: str = "highs") -> float:
    if G.m == 0:
        return 0.0
    p, _ = _enumerated_program(G, True)
    res = lp_solve(p, backend)
    if not res.optimal:
        raise LPError(f"enumerated LP returned {res.status}")
    return res.objective


# ---------------------------------------------------------------------------
# flow-metric relaxation


@dataclass(frozen=True)
class FlowMetricSolution:
    """One semimetric per vertex: ``d[x, y, z] = d_x(y, z)``; ``C`` is the LP optimum."""

    d: np.ndarray
    C: float

    @property
    def n(self) -> int:
        return self.d.shape[0]


def lpcw_lower_bound(G: Graph, cap: int = LPCW_CAP, backend: str = "highs") -> FlowMetricSolution:
    """Solve the flow-metric cutwidth relaxation with all constraints enumerated.

    Variables ``d_x(y, z)`` for every ``x`` and pair ``y < z`` plus ``C``;
    per-``x`` triangle inequalities, ``d_x(y,z) + d_y(x,z) + d_z(x,y) >= 1``
    on triples, ``d_x(x,y) + d_y(x,y) >= 1`` on pairs and
    ``sum_E w d_x <= C`` for every ``x``.
    """
    n = G.n
    _check_cap(n, cap, "the flow-metric relaxation")
    if n <= 1:
        return FlowMetricSolution(np.zeros((n, n, n)), 0.0)
    P = _pair_index(n)
    npairs = n * (n - 1) // 2
    nC = n * npairs
    nv = nC + 1
    c = np.zeros(nv)
    c[nC] = 1.0
    p = LinearProgram(nv, c)
    rows, cols, vals, senses, rhs = [], [], [], [], []
    r = 0
    if n >= 3:
        tri = np.array(list(itertools.combinations(range(n), 3)))
        a, b, e = tri[:, 0], tri[:, 1], tri[:, 2]
        # each unordered triple gives three inequalities (one per middle vertex)
        for (s, m, t) in ((a, b, e), (a, e, b), (b, a, e)):
            k = len(s)
            lhs = [P[s, m], P[m, t], P[s, t]]
            for x in range(n):
                base = x * npairs
                cols.append(np.column_stack([base + lhs[0], base + lhs[1], base + lhs[2]]).ravel())
                vals.append(np.tile([1.0, 1.0, -1.0], k))
                rows.append(np.repeat(np.arange(r, r + k), 3))
                r += k
                senses.extend([">="] * k)
                rhs.extend([0.0] * k)
        k = len(a)
        cols.append(np.column_stack([a * npairs + P[b, e], b * npairs + P[a, e], e * npairs + P[a, b]]).ravel())
        vals.append(np.ones(3 * k))
        rows.append(np.repeat(np.arange(r, r + k), 3))
        r += k
        senses.extend([">="] * k)
        rhs.extend([1.0] * k)
    iu, iv = np.triu_indices(n, 1)
    k = len(iu)
    cols.append(np.column_stack([iu * npairs + P[iu, iv], iv * npairs + P[iu, iv]]).ravel())
    vals.append(np.ones(2 * k))
    rows.append(np.repeat(np.arange(r, r + k), 2))
    r += k
    senses.extend([">="] * k)
    rhs.extend([1.0] * k)
    eu, ev, ew = G.edge_arrays
    for x in range(n):
        cols.append(np.r_[x * npairs + P[eu, ev], nC])
        vals.append(np.r_[ew, -1.0])
        rows.append(np.full(len(eu) + 1, r))
        r += 1
        senses.append("<=")
        rhs.append(0.0)
    p.add_rows_coo(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), senses, rhs)
    res = lp_solve(p, backend)
    if not res.optimal:
        raise LPError(f"flow-metric LP returned {res.status}")
    flat = res.x[:nC].reshape(n, npairs)
    d = np.zeros((n, n, n))
    d[:, iu, iv] = flat
    d[:, iv, iu] = flat
    d.setflags(write=False)
    return FlowMetricSolution(d, float(res.x[nC]))


def induced_metric(sol: FlowMetricSolution, S: Iterable[int]) -> np.ndarray:
    """``d_S(y, z) = sum_{x in S} d_x(y, z)`` on all vertex pairs."""
    S = np.asarray(sorted(set(int(v) for v in S)), dtype=np.int64)
    return sol.d[S].sum(axis=0)


def spreading_scale(d: np.ndarray) -> float:
    """Largest ``c`` such that ``d / c`` passes the prefix spreading check.

    Equals the minimum over centres ``u`` and sizes ``k`` of
    (sum of the ``k - 1`` smallest ``d(u, .)``) / ((k^2 - 1) / 4).
    """
    d = np.asarray(d, float)
    n = d.shape[0]
    if n < 2:
        return math.inf
    rhs = spreading_rhs(np.arange(2, n + 1))
    sums = rhs[None, :] - spreading_deficits(d)
    return float((sums / rhs[None, :]).min())


def triple_pair_sum(sol: FlowMetricSolution, W: Sequence[int]) -> tuple[float, int]:
    """Sum over triples and pairs of ``W`` of their three- and two-term expressions.

    Returns ``(total, count)``; feasibility makes every term at least 1, so
    ``total >= count``.
    """
    W = sorted(set(int(v) for v in W))
    d = sol.d
    total = 0.0
    count = 0
    for x, y, z in itertools.combinations(W, 3):
        total += d[x, y, z] + d[y, x, z] + d[z, x, y]
        count += 1
    for x, y in itertools.combinations(W, 2):
        total += d[x, x, y] + d[y, x, y]
        count += 1
    return total, count


def cstar_estimate(G: Graph, max_subsets: int = 256, seed: int = 0, backend: str = "highs") -> tuple[float, tuple[int, ...]]:
    """Largest ``L*(G[S]) / |S|`` over subsets ``S`` with ``|S| >= 2``.

    Enumerates all subsets when there are at most ``max_subsets`` of them,
    otherwise samples ``max_subsets`` uniformly (always including ``V``).
    """
    n = G.n
    if n < 2:
        return 0.0, tuple(range(n))
    total = (1 << n) - n - 1
    if total <= max_subsets:
        cand = [S for k in range(2, n + 1) for S in itertools.combinations(range(n), k)]
    else:
        rng = np.random.default_rng(seed)
        cand = {tuple(range(n))}
        while len(cand) < max_subsets:
            k = int(rng.integers(2, n + 1))
            cand.add(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
        cand = sorted(cand)
    best, arg = 0.0, tuple(range(n))
    for S in cand:
        sub, _ = G.induced_subgraph(S)
        if sub.m == 0:
            continue
        val = solve_mla_lp(sub, backend=backend).objective / len(S)
        if val > best + 1e-12:
            best, arg = val, tuple(S)
    return best, arg


# ---------------------------------------------------------------------------
# generators

FAMILIES = ("gnm", "gnp", "grid", "star", "path", "complete")


def random_graph(n: int, family: str = "gnm", m: int | None = None, p: float | None = None, seed: int = 0) -> Graph:
    """Unit-weight graph from one of :data:`FAMILIES`; deterministic per seed.

    ``grid`` lays ``n`` vertices row-major on ``floor(sqrt(n))`` rows.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    if family == "gnm":
        pairs = n * (n - 1) // 2
        if m is None or not 0 <= m <= pairs:
            raise ValueError(f"gnm needs 0 <= m <= {pairs}, got {m}")
        iu, iv = np.triu_indices(n, 1)
        pick = np.sort(rng.choice(pairs, size=m, replace=False))
        return Graph.from_edges(n, zip(iu[pick].tolist(), iv[pick].tolist()))
    if family == "gnp":
        if p is None or not 0 <= p <= 1:
            raise ValueError("gnp needs 0 <= p <= 1")
        iu, iv = np.triu_indices(n, 1)
        keep = rng.random(len(iu)) < p
        return Graph.from_edges(n, zip(iu[keep].tolist(), iv[keep].tolist()))
    if family == "grid":
        rows = max(1, math.isqrt(n))
        cols = math.ceil(n / rows) if n else 0
        edges = []
        for v in range(n):
            c = v % cols
            if c + 1 < cols and v + 1 < n:
                edges.append((v, v + 1))
            if v + cols < n:
                edges.append((v, v + cols))
        return Graph.from_edges(n, edges)
    if family == "star":
        return Graph.from_edges(n, [(0, v) for v in range(1, n)])
    if family == "path":
        return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)])
    if family == "complete":
        return Graph.from_edges(n, itertools.combinations(range(n), 2))
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
