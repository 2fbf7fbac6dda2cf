"""Linear programs and the spreading-metric relaxations.

Two layers live here:

* a small generic LP interface (:class:`LinearProgram`, :func:`lp_solve`) with
  a HiGHS backend and a self-contained dense simplex backend, plus
  incremental sessions used by constraint generation;
* the MLA spreading-metric LP (:func:`solve_mla_lp`) and the vertex
  separation LP (:func:`solve_vs_lp`), both solved lazily.

Spreading constraints ask, for every centre ``u`` and set ``S`` containing
``u``, that ``sum_{v in S} d(u, v) >= (|S|^2 - 1) / 4``. For fixed ``u`` and
``|S|`` the tightest set is ``u`` plus its ``|S| - 1`` nearest vertices, so
separation sorts each row of ``d`` and checks prefix sums.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import Graph
from .simplex import SimplexError, solve_standard

log = logging.getLogger(__name__)

FEAS_EPS = 1e-6
PAIR_MIN = 0.75
TRIANGLE_CAP = 5000
MAX_ROUNDS = 200

_INF = float("inf")


class LPError(RuntimeError):
    """Numerical failure or unexpected solver status."""


class LPIterationLimit(LPError):
    """Constraint generation did not converge within the round cap."""


# ---------------------------------------------------------------------------
# generic programs


@dataclass
class LinearProgram:
    """``min c @ x`` subject to sparse rows ``a @ x (<=|>=|=) b`` and bounds.

    Rows are stored as COO triplets; ``lower`` defaults to 0 and ``upper`` to
    +inf.
    """

    n_vars: int
    objective: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    _rows: list = field(default_factory=list, repr=False)
    _cols: list = field(default_factory=list, repr=False)
    _vals: list = field(default_factory=list, repr=False)
    senses: list = field(default_factory=list)
    rhs: list = field(default_factory=list)

    def __post_init__(self):
        c = np.zeros(self.n_vars) if self.objective is None else np.asarray(self.objective, float)
        if c.shape != (self.n_vars,):
            raise ValueError("objective length differs from variable count")
        self.objective = c
        self.lower = np.zeros(self.n_vars) if self.lower is None else np.asarray(self.lower, float)
        self.upper = np.full(self.n_vars, _INF) if self.upper is None else np.asarray(self.upper, float)

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def add_row(self, cols: Sequence[int], vals: Sequence[float], sense: str, rhs: float) -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {sense!r}")
        cols = [int(c) for c in cols]
        if any(not 0 <= c < self.n_vars for c in cols):
            raise ValueError("row references a variable outside the program")
        vals = [float(v) for v in vals]
        if not all(np.isfinite(vals)) or not np.isfinite(rhs):
            raise ValueError("coefficients must be finite")
        r = len(self.rhs)
        self._rows.extend([r] * len(cols))
        self._cols.extend(cols)
        self._vals.extend(vals)
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        return r

    def add_rows_coo(self, rows, cols, vals, senses, rhs) -> None:
        """Bulk append; ``rows`` are local indices ``0..len(rhs)-1``."""
        base = len(self.rhs)
        cols = np.asarray(cols, dtype=np.int64)
        if len(cols) and (cols.min() < 0 or cols.max() >= self.n_vars):
            raise ValueError("row references a variable outside the program")
        self._rows.extend((np.asarray(rows, dtype=np.int64) + base).tolist())
        self._cols.extend(cols.tolist())
        self._vals.extend(np.asarray(vals, float).tolist())
        self.senses.extend(senses)
        self.rhs.extend(float(b) for b in rhs)

    def matrix(self) -> csr_matrix:
        return coo_matrix(
            (self._vals, (self._rows, self._cols)), shape=(self.n_rows, self.n_vars)
        ).tocsr()


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _solve_highs(p: LinearProgram) -> LPResult:
    A = p.matrix()
    senses = np.array(p.senses, dtype=object)
    b = np.array(p.rhs, float)
    le = senses == "<="
    ge = senses == ">="
    eq = senses == "="
    A_ub = b_ub = A_eq = b_eq = None
    if le.any() or ge.any():
        A_ub = A[le | ge].multiply(np.where(ge[le | ge], -1.0, 1.0)[:, None]).tocsr()
        b_ub = np.where(ge[le | ge], -b[le | ge], b[le | ge])
    if eq.any():
        A_eq, b_eq = A[eq], b[eq]
    bounds = np.column_stack([p.lower, p.upper])
    bounds = [(None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi) for lo, hi in bounds]
    res = linprog(p.objective, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 0:
        return LPResult("optimal", np.asarray(res.x), float(res.fun))
    if res.status == 2:
        return LPResult("infeasible")
    if res.status == 3:
        return LPResult("unbounded")
    raise LPError(f"HiGHS failed: {res.message}")


def _solve_simplex(p: LinearProgram) -> LPResult:
    """Reduce to ``y >= 0`` standard form and run the tableau simplex."""
    n = p.n_vars
    # x = offset + M @ y
    cols_map: list[list[tuple[int, float]]] = []
    offset = np.zeros(n)
    ny = 0
    extra_rows: list[tuple[dict, str, float]] = []
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols_map.append([(ny, 1.0)])
            if np.isfinite(hi):
                extra_rows.append(({ny: 1.0}, "<=", hi - lo))
            ny += 1
        elif np.isfinite(hi):
            offset[j] = hi
            cols_map.append([(ny, -1.0)])
            ny += 1
        else:
            cols_map.append([(ny, 1.0), (ny + 1, -1.0)])
            ny += 2
    M = np.zeros((n, ny))
    for j, entries in enumerate(cols_map):
        for k, s in entries:
            M[j, k] = s
    A = p.matrix().toarray() if p.n_rows else np.zeros((0, n))
    b = np.array(p.rhs, float) - A @ offset
    Ay = A @ M
    senses = list(p.senses)
    for coeffs, s, r in extra_rows:
        row = np.zeros(ny)
        for k, v in coeffs.items():
            row[k] = v
        Ay = np.vstack([Ay, row])
        b = np.append(b, r)
        senses.append(s)
    cy = p.objective @ M
    try:
        status, y, _ = solve_standard(Ay, b, senses, cy)
    except SimplexError as exc:
        raise LPError(str(exc)) from exc
    if status != "optimal":
        return LPResult(status)
    x = offset + M @ y
    return LPResult("optimal", x, float(p.objective @ x))


_BACKENDS = {"highs": _solve_highs, "simplex": _solve_simplex}


def lp_solve(p: LinearProgram, backend: str = "highs") -> LPResult:
    """Solve ``p``; infeasible and unbounded programs are reported via ``status``."""
    try:
        fn = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown LP backend {backend!r}; choose from {sorted(_BACKENDS)}") from None
    return fn(p)


# ---------------------------------------------------------------------------
# incremental sessions for constraint generation


class HighsSession:
    """Warm-started HiGHS model that grows by columns and ranged rows."""

    def __init__(self):
        import highspy

        self._hs = highspy
        self.h = highspy.Highs()
        self.h.setOptionValue("output_flag", False)
        # dual simplex re-optimises cheaply after rows are appended
        self.h.setOptionValue("simplex_strategy", 1)
        self.n_cols = 0
        self.n_rows = 0

    def add_columns(self, cost, lower, upper=None) -> np.ndarray:
        cost = np.asarray(cost, float)
        k = len(cost)
        upper = np.full(k, self._hs.kHighsInf) if upper is None else np.where(np.isfinite(upper), upper, self._hs.kHighsInf)
        self.h.addVars(k, np.asarray(lower, float), np.asarray(upper, float))
        idx = np.arange(self.n_cols, self.n_cols + k, dtype=np.int32)
        self.h.changeColsCost(k, idx, cost)
        self.n_cols += k
        return idx

    def add_rows(self, lower, upper, starts, index, value) -> None:
        k = len(lower)
        if not k:
            return
        inf = self._hs.kHighsInf
        lo = np.where(np.isfinite(lower), lower, -inf).astype(float)
        hi = np.where(np.isfinite(upper), upper, inf).astype(float)
        self.h.addRows(k, lo, hi, len(index), np.asarray(starts, np.int32),
                       np.asarray(index, np.int32), np.asarray(value, float))
        self.n_rows += k

    def solve(self) -> np.ndarray:
        self.h.run()
        status = self.h.getModelStatus()
        if status != self._hs.HighsModelStatus.kOptimal:
            raise LPError(f"HiGHS returned {self.h.modelStatusToString(status)}")
        return np.array(self.h.getSolution().col_value)


class ReplaySession:
    """Session that rebuilds a :class:`LinearProgram` and calls :func:`lp_solve` each round."""

    def __init__(self, backend: str):
        self.backend = backend
        self.cost: list[float] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.rows: list[tuple[np.ndarray, np.ndarray, float, float]] = []

    @property
    def n_cols(self) -> int:
        return len(self.cost)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_columns(self, cost, lower, upper=None) -> np.ndarray:
        k = len(cost)
        idx = np.arange(self.n_cols, self.n_cols + k)
        self.cost.extend(np.asarray(cost, float))
        self.lower.extend(np.asarray(lower, float))
        self.upper.extend([_INF] * k if upper is None else list(upper))
        return idx

    def add_rows(self, lower, upper, starts, index, value) -> None:
        ends = list(starts[1:]) + [len(index)]
        for lo, hi, a, b in zip(lower, upper, starts, ends):
            self.rows.append((np.asarray(index[a:b]), np.asarray(value[a:b], float), lo, hi))

    def solve(self) -> np.ndarray:
        p = LinearProgram(self.n_cols, np.array(self.cost), np.array(self.lower), np.array(self.upper))
        for idx, val, lo, hi in self.rows:
            if np.isfinite(lo) and np.isfinite(hi) and lo == hi:
                p.add_row(idx, val, "=", lo)
                continue
            if np.isfinite(lo):
                p.add_row(idx, val, ">=", lo)
            if np.isfinite(hi):
                p.add_row(idx, val, "<=", hi)
        res = lp_solve(p, self.backend)
        if not res.optimal:
            raise LPError(f"{self.backend} backend returned {res.status}")
        return res.x


def make_session(backend: str = "highs"):
    if backend == "highs":
        return HighsSession()
    if backend in ("simplex", "linprog"):
        return ReplaySession("simplex" if backend == "simplex" else "highs")
    raise ValueError(f"unknown LP backend {backend!r}")


# ---------------------------------------------------------------------------
# separation oracles


def spreading_rhs(k) -> np.ndarray:
    """Right-hand side ``(k^2 - 1) / 4`` for a set of size ``k``."""
    k = np.asarray(k, float)
    return (k * k - 1.0) / 4.0


@dataclass(frozen=True)
class SpreadingViolation:
    center: int
    others: tuple[int, ...]
    lhs: float
    rhs: float

    @property
    def members(self) -> tuple[int, ...]:
        return (self.center,) + self.others

    @property
    def deficit(self) -> float:
        return self.rhs - self.lhs


def _sorted_rows(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = d.shape[0]
    dd = d.copy()
    np.fill_diagonal(dd, -np.inf)  # centre sorts first
    order = np.argsort(dd, axis=1, kind="stable")[:, 1:]
    vals = np.take_along_axis(d, order, axis=1)
    return order.reshape(n, n - 1), vals.reshape(n, n - 1)


def spreading_deficits(d: np.ndarray) -> np.ndarray:
    """``out[u, k-2] = (k^2-1)/4 - (sum of the k-1 smallest d(u, .))`` for k = 2..n."""
    n = d.shape[0]
    if n < 2:
        return np.zeros((n, 0))
    _, vals = _sorted_rows(d)
    return spreading_rhs(np.arange(2, n + 1))[None, :] - np.cumsum(vals, axis=1)


def separate_spreading(d: np.ndarray, eps: float = FEAS_EPS) -> list[SpreadingViolation]:
    """Every violated (centre, nearest-prefix) spreading constraint, by centre then size."""
    d = np.asarray(d, float)
    n = d.shape[0]
    if n < 2:
        return []
    order, vals = _sorted_rows(d)
    sums = np.cumsum(vals, axis=1)
    rhs = spreading_rhs(np.arange(2, n + 1))
    out = []
    for u, k in zip(*np.nonzero(sums < rhs[None, :] - eps)):
        out.append(SpreadingViolation(int(u), tuple(int(v) for v in order[u, : k + 1]), float(sums[u, k]), float(rhs[k])))
    return out


@dataclass(frozen=True)
class TriangleViolation:
    u: int
    v: int
    w: int
    excess: float  # d(u, w) - d(u, v) - d(v, w)


def triangle_excess(d: np.ndarray) -> np.ndarray:
    """``T[u, v, w] = d(u, w) - d(u, v) - d(v, w)``."""
    return d[:, None, :] - d[:, :, None] - d[None, :, :]


def separate_triangle(d: np.ndarray, eps: float = FEAS_EPS, cap: int | None = TRIANGLE_CAP) -> list[TriangleViolation]:
    """Triples with ``d(u,v) + d(v,w) < d(u,w) - eps``, most violated first, ``u < w``."""
    d = np.asarray(d, float)
    n = d.shape[0]
    if n < 3:
        return []
    T = triangle_excess(d)
    u, v, w = np.nonzero(T > eps)
    keep = (u < w) & (v != u) & (v != w)
    u, v, w = u[keep], v[keep], w[keep]
    ex = T[u, v, w]
    order = np.lexsort((w, v, u, -ex))
    if cap is not None:
        order = order[:cap]
    return [TriangleViolation(int(u[i]), int(v[i]), int(w[i]), float(ex[i])) for i in order]


# ---------------------------------------------------------------------------
# solutions


@dataclass(frozen=True)
class MetricSolution:
    """Spreading metric ``d`` with objective ``sum_E w * d``."""

    d: np.ndarray
    objective: float
    rounds: int = 0
    n_rows: int = 0

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class VSLPSolution:
    """Spreading metric ``d`` plus interval lengths ``x``; objective ``sum x``."""

    d: np.ndarray
    x: np.ndarray
    objective: float
    rounds: int = 0
    n_rows: int = 0

    @property
    def n(self) -> int:
        return self.d.shape[0]


def far_distance(n: int) -> float:
    """Distance assigned between different connected components.

    Any set containing a vertex this far away already meets its spreading
    bound, and truncating a metric at a constant keeps it a metric.
    """
    return max(PAIR_MIN, spreading_rhs(n).item())


def metric_closure(G: Graph, lengths: np.ndarray, return_predecessors: bool = False):
    """Shortest-path metric of ``G`` under edge ``lengths``; components are ``far_distance`` apart."""
    n = G.n
    eu, ev, _ = G.edge_arrays
    W = csr_matrix((np.r_[lengths, lengths], (np.r_[eu, ev], np.r_[ev, eu])), shape=(n, n))
    if return_predecessors:
        D, pred = shortest_path(W, directed=False, return_predecessors=True)
    else:
        D, pred = shortest_path(W, directed=False), None
    far = far_distance(n)
    D = np.where(np.isfinite(D), np.minimum(D, far), far)
    np.fill_diagonal(D, 0.0)
    return (D, pred) if return_predecessors else D


def _trivial_metric(n: int) -> np.ndarray:
    d = np.full((n, n), far_distance(n))
    np.fill_diagonal(d, 0.0)
    return d


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class _PathCutLoop:
    """Constraint generation over edge lengths plus lazily created pair distances.

    Columns: one length ``l_e >= 3/4`` per edge, optionally one ``x_u`` per
    vertex, and a distance ``d_p`` for every pair that has appeared in a
    spreading cut. Each ``d_p`` is bounded above by the length of the
    current shortest path between its endpoints, so the shortest-path
    closure of ``l`` dominates ``d`` and inherits every spreading row.
    """

    def __init__(self, G: Graph, with_x: bool, backend: str, max_rounds: int, eps: float):
        self.G = G
        self.with_x = with_x
        self.eps = eps
        self.max_rounds = max_rounds
        self.s = make_session(backend)
        n, m = G.n, G.m
        eu, ev, ew = G.edge_arrays
        self.edge_col = self.s.add_columns(np.zeros(m) if with_x else ew, np.full(m, PAIR_MIN))
        self.edge_of = -np.ones((n, n), dtype=np.int64)
        self.edge_of[eu, ev] = self.edge_col
        self.edge_of[ev, eu] = self.edge_col
        self.pair_col = -np.ones((n, n), dtype=np.int64)
        if with_x:
            self.x_col = self.s.add_columns(np.ones(n), np.zeros(n))
            starts = np.arange(0, 3 * m, 3)
            index = np.column_stack([self.x_col[eu], self.x_col[ev], self.edge_col]).ravel()
            value = np.tile([1.0, 1.0, -1.0], m)
            self.s.add_rows(np.zeros(m), np.full(m, _INF), starts, index, value)

    def _path_row(self, pred, u, v, buf):
        lo, hi, starts, index, value = buf
        starts.append(len(index))
        index.append(self.pair_col[u, v])
        value.append(1.0)
        y = v
        while y != u:
            q = pred[u, y]
            index.append(self.edge_of[q, y])
            value.append(-1.0)
            y = q
        lo.append(-_INF)
        hi.append(0.0)

    def run(self):
        G, n = self.G, self.G.n
        rounds = 0
        while True:
            rounds += 1
            if rounds > self.max_rounds:
                raise LPIterationLimit(f"spreading LP did not converge in {self.max_rounds} rounds")
            sol = self.s.solve()
            lengths = np.maximum(sol[self.edge_col], PAIR_MIN)
            D, pred = metric_closure(G, lengths, return_predecessors=True)
            buf = ([], [], [], [], [])
            pu, pv = np.nonzero(np.triu(self.pair_col >= 0, 1))
            if len(pu):
                over = sol[self.pair_col[pu, pv]] > D[pu, pv] + 1e-9
                for u, v in zip(pu[over], pv[over]):
                    self._path_row(pred, u, v, buf)
            deficits = spreading_deficits(D)
            worst = deficits.argmax(axis=1)
            centers = np.nonzero(deficits[np.arange(n), worst] > self.eps)[0]
            log.debug("round %d: %d spreading cuts, %d path cuts", rounds, len(centers), len(buf[0]))
            if len(centers) == 0:
                return sol, D, rounds
            order, _ = _sorted_rows(D)
            cuts = []
            new_pairs = []
            for u in centers:
                S = order[u, : worst[u] + 1]
                for v in S:
                    if self.pair_col[u, v] < 0:
                        self.pair_col[u, v] = self.pair_col[v, u] = -2
                        new_pairs.append((u, int(v)))
                cuts.append((u, S, spreading_rhs(len(S) + 1).item()))
            if new_pairs:
                idx = self.s.add_columns(np.zeros(len(new_pairs)), np.full(len(new_pairs), PAIR_MIN))
                for (u, v), c in zip(new_pairs, idx):
                    self.pair_col[u, v] = self.pair_col[v, u] = c
                    self._path_row(pred, u, v, buf)
            lo, hi, starts, index, value = buf
            for u, S, rhs in cuts:
                starts.append(len(index))
                index.extend(self.pair_col[u, S])
                value.extend([1.0] * len(S))
                lo.append(rhs)
                hi.append(_INF)
            self.s.add_rows(np.array(lo), np.array(hi), starts, index, value)


class _PairCutLoop:
    """One distance variable per unordered pair; lazy spreading and triangle rows."""

    def __init__(self, G: Graph, with_x: bool, backend: str, max_rounds: int, eps: float):
        n = G.n
        self.G, self.with_x, self.eps, self.max_rounds = G, with_x, eps, max_rounds
        self.s = make_session(backend)
        iu, iv = np.triu_indices(n, 1)
        self.iu, self.iv = iu, iv
        self.col = np.zeros((n, n), dtype=np.int64)
        cost = np.zeros(len(iu))
        eu, ev, ew = G.edge_arrays
        pair_index = np.zeros((n, n), dtype=np.int64)
        pair_index[iu, iv] = np.arange(len(iu))
        pair_index[iv, iu] = np.arange(len(iu))
        if not with_x:
            np.add.at(cost, pair_index[eu, ev], ew)
        idx = self.s.add_columns(cost, np.full(len(iu), PAIR_MIN))
        self.col = idx[pair_index]
        if with_x:
            self.x_col = self.s.add_columns(np.ones(n), np.zeros(n))
            m = G.m
            starts = np.arange(0, 3 * m, 3)
            index = np.column_stack([self.x_col[eu], self.x_col[ev], self.col[eu, ev]]).ravel()
            self.s.add_rows(np.zeros(m), np.full(m, _INF), starts, index, np.tile([1.0, 1.0, -1.0], m))

    def run(self):
        n = self.G.n
        rounds = 0
        while True:
            rounds += 1
            if rounds > self.max_rounds:
                raise LPIterationLimit(f"spreading LP did not converge in {self.max_rounds} rounds")
            sol = self.s.solve()
            D = np.zeros((n, n))
            D[self.iu, self.iv] = np.maximum(sol[self.col[self.iu, self.iv]], PAIR_MIN)
            D = D + D.T
            spread = separate_spreading(D, self.eps)
            tri = separate_triangle(D, self.eps, TRIANGLE_CAP)
            if not spread and not tri:
                return sol, D, rounds
            lo, hi, starts, index, value = [], [], [], [], []
            for c in spread:
                starts.append(len(index))
                index.extend(self.col[c.center, list(c.others)])
                value.extend([1.0] * len(c.others))
                lo.append(c.rhs)
                hi.append(_INF)
            for t in tri:
                starts.append(len(index))
                index.extend([self.col[t.u, t.v], self.col[t.v, t.w], self.col[t.u, t.w]])
                value.extend([1.0, 1.0, -1.0])
                lo.append(0.0)
                hi.append(_INF)
            self.s.add_rows(np.array(lo), np.array(hi), starts, index, value)


_FORMULATIONS = {"paths": _PathCutLoop, "pairs": _PairCutLoop}


def _run_loop(G, with_x, backend, formulation, max_rounds, eps):
    try:
        cls = _FORMULATIONS[formulation]
    except KeyError:
        raise ValueError(f"unknown formulation {formulation!r}; choose from {sorted(_FORMULATIONS)}") from None
    loop = cls(G, with_x, backend, max_rounds, eps)
    sol, D, rounds = loop.run()
    return loop, sol, D, rounds


def solve_mla_lp(
    G: Graph,
    backend: str = "highs",
    formulation: str = "paths",
    max_rounds: int = MAX_ROUNDS,
    eps: float = FEAS_EPS,
) -> MetricSolution:
    """Optimal spreading metric for the linear-arrangement relaxation of ``G``.

    ``formulation="paths"`` (default) optimises edge lengths and returns
    their shortest-path closure; ``"pairs"`` keeps one variable per pair
    with lazy triangle rows and is practical only for small graphs.
    """
    n = G.n
    if n <= 1 or G.m == 0:
        return MetricSolution(_freeze(_trivial_metric(n)), 0.0)
    loop, _, D, rounds = _run_loop(G, False, backend, formulation, max_rounds, eps)
    eu, ev, ew = G.edge_arrays
    return MetricSolution(_freeze(D), float(ew @ D[eu, ev]), rounds, loop.s.n_rows)


def solve_vs_lp(
    G: Graph,
    backend: str = "highs",
    formulation: str = "paths",
    max_rounds: int = MAX_ROUNDS,
    eps: float = FEAS_EPS,
) -> VSLPSolution:
    """Optimal solution of the vertex-separation relaxation: ``min sum x_u``
    subject to ``x_u + x_v >= d(u, v)`` on edges and ``d`` spreading."""
    n = G.n
    if n <= 1 or G.m == 0:
        return VSLPSolution(_freeze(_trivial_metric(n)), _freeze(np.zeros(n)), 0.0)
    loop, sol, D, rounds = _run_loop(G, True, backend, formulation, max_rounds, eps)
    x = np.maximum(sol[loop.x_col], 0.0)
    # absorb solver feasibility slack so x_u + x_v >= d(u, v) holds exactly
    for u, v, _ in G.edges:
        gap = D[u, v] - x[u] - x[v]
        if gap > 0:
            x[u] += gap / 2 + 1e-12
            x[v] += gap / 2 + 1e-12
    return VSLPSolution(_freeze(D), _freeze(x), float(x.sum()), rounds, loop.s.n_rows)


def restrict_metric(d: np.ndarray, vertices: Sequence[int]) -> np.ndarray:
    """Sub-table of ``d`` on ``vertices`` (a spreading metric restricts to one)."""
    idx = np.asarray(vertices, dtype=np.int64)
    return _freeze(np.asarray(d)[np.ix_(idx, idx)])


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class MetricReport:
    asymmetry: float
    diagonal: float
    min_pair: float
    triangle_excess: float
    spreading_deficit: float

    def feasible(self, eps: float = FEAS_EPS) -> bool:
        return (
            self.asymmetry <= eps
            and self.diagonal <= eps
            and self.min_pair >= PAIR_MIN - eps
            and self.triangle_excess <= eps
            and self.spreading_deficit <= eps
        )


def check_metric(d: np.ndarray) -> MetricReport:
    """Worst violation of each spreading-metric axiom."""
    d = np.asarray(d, float)
    n = d.shape[0]
    off = d[~np.eye(n, dtype=bool)]
    tri = float(triangle_excess(d).max()) if n >= 3 else 0.0
    spread = float(spreading_deficits(d).max()) if n >= 2 else 0.0
    return MetricReport(
        asymmetry=float(np.abs(d - d.T).max()) if n else 0.0,
        diagonal=float(np.abs(np.diag(d)).max()) if n else 0.0,
        min_pair=float(off.min()) if off.size else _INF,
        triangle_excess=max(tri, 0.0),
        spreading_deficit=max(spread, -_INF),
    )


def dump_solution(path, sol: MetricSolution | VSLPSolution) -> None:
    """Write one variable per line: ``d u v value`` for ``u < v``, then ``x u value``.

    The format is for debugging and may change.
    """
    n = sol.n
    with open(path, "w") as fh:
        fh.write(f"# objective {float(sol.objective)!r}\n")
        for u in range(n):
            for v in range(u + 1, n):
                fh.write(f"d {u} {v} {float(sol.d[u, v])!r}\n")
        if isinstance(sol, VSLPSolution):
            for u in range(n):
                fh.write(f"x {u} {float(sol.x[u])!r}\n")
