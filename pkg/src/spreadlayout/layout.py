"""Partition-and-arrange and the recursive ordering drivers.

One level of :func:`solve_cutwidth` solves the MLA spreading LP on the
current subgraph, splits it into ordered pieces with
:func:`partition_and_arrange` and recurses into every piece with more than
one vertex. :func:`solve_pathwidth` does the same with the vertex
separation LP and :func:`partition_and_arrange_vertex`, whose cut vertices
become singleton pieces placed ahead of each round's net pieces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import lp as lpmod
from .decompose import (
    RETRY_CAP,
    ScaleParams,
    build_nets,
    compute_scales,
    metric_decomposition,
    metric_vertex_decomposition,
    vertex_scales,
)
from .graph import (
    Graph,
    Ordering,
    PathDecomposition,
    mla_cost,
    path_decomposition_from_ordering,
    validate_path_decomposition,
)

AUDIT_TOL = 1e-6


@dataclass(frozen=True)
class SolveConfig:
    seed: int = 0
    gamma_override: float | None = None
    max_lp_rounds: int = lpmod.MAX_ROUNDS
    retry_cap: int = RETRY_CAP
    audit: bool = True
    reuse_metric: bool = False
    lp_backend: str = "highs"
    formulation: str = "paths"

    def __post_init__(self):
        if self.gamma_override is not None and self.gamma_override < 2:
            raise ValueError("gamma override must be at least 2")
        if self.max_lp_rounds < 1 or self.retry_cap < 1:
            raise ValueError("round and retry limits must be positive")


@dataclass(frozen=True)
class Provenance:
    kind: str  # "net" for S_v, "cut" for a singleton {w} with w in D
    j: int
    i: int
    vertex: int


@dataclass(frozen=True)
class RoundRecord:
    """One (j, i) round of the phase-3 loop."""

    j: int
    i: int
    terminals: tuple[int, ...]
    radii: tuple[float, ...]
    piece_sizes: tuple[int, ...]
    cut_weight: float
    cut_vertices: tuple[int, ...]
    bound: float
    retries: int

    def to_json(self) -> dict:
        return {
            "j": self.j, "i": self.i, "terminals": list(self.terminals),
            "radii": list(self.radii), "piece_sizes": list(self.piece_sizes),
            "cut_weight": self.cut_weight, "cut_vertices": list(self.cut_vertices),
            "bound": self.bound, "retries": self.retries,
        }


@dataclass(frozen=True)
class Audit:
    """Cumulative-cut budget check over net pieces; ``worst`` is the largest lhs/rhs."""

    ok: bool
    checked: int
    worst: float
    message: str = ""


@dataclass(frozen=True)
class OrderedPieces:
    pieces: tuple[np.ndarray, ...]
    provenance: tuple[Provenance, ...]
    piece_cuts: tuple[float, ...]  # cut weight inside the round's live set; 0 for singletons
    rounds: tuple[RoundRecord, ...]
    params: ScaleParams
    audit: Audit | None

    @property
    def retries(self) -> int:
        return sum(r.retries for r in self.rounds)


def _rank(pieces) -> np.ndarray:
    return np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)


def _check_partition(n: int, pieces) -> None:
    allv = _rank(pieces)
    if len(allv) != n or len(np.unique(allv)) != n:
        raise AssertionError("pieces do not partition the vertex set")


def _check_net_sizes(pieces, prov, scales, params) -> None:
    for S, p in zip(pieces, prov):
        if p.kind != "net":
            continue
        cap = params.sizes[scales.size_class[p.vertex] - 2]
        if len(S) > cap + 1e-9 or len(S) > params.n / 2:
            raise AssertionError(f"net piece of {p.vertex} has {len(S)} vertices, cap {cap}")


def partition_and_arrange(
    G: Graph,
    sol: lpmod.MetricSolution,
    params: ScaleParams,
    rng: np.random.Generator,
    audit: bool = True,
    retry_cap: int = RETRY_CAP,
) -> OrderedPieces:
    """Ordered partition of ``G`` into net pieces, each of at most ``n/2`` vertices."""
    n = G.n
    d = np.asarray(sol.d)
    scales = vertex_scales(d, params)
    nets = build_nets(scales, params)
    active = np.ones(n, dtype=bool)
    pieces, prov, cuts, rounds = [], [], [], []
    for j in params.scales:
        for i in params.scales:
            terms = nets.by_class[(i, j)]
            if not terms:
                continue
            res = metric_decomposition(G, terms, d, 2 * params.Delta[i], rng, np.nonzero(active)[0], retry_cap)
            for v, S, c in zip(res.terminals, res.pieces, res.piece_cuts):
                if len(S):
                    pieces.append(S)
                    prov.append(Provenance("net", j, i, v))
                    cuts.append(float(c))
                    active[S] = False
            rounds.append(RoundRecord(
                j, i, res.terminals, tuple(map(float, res.radii)), tuple(len(S) for S in res.pieces),
                res.cut_edge_weight, (), res.bound, res.retries,
            ))
    _check_partition(n, pieces)
    _check_net_sizes(pieces, prov, scales, params)
    report = None
    if audit:
        cum = np.cumsum(cuts)
        rhs = [params.beta * math.log2(n / len(S)) * sol.objective / n for S in pieces]
        report = _budget_audit(cum, np.array(rhs), "cumulative edge cut")
    return OrderedPieces(tuple(pieces), tuple(prov), tuple(cuts), tuple(rounds), params, report)


def partition_and_arrange_vertex(
    G: Graph,
    sol: lpmod.VSLPSolution,
    params: ScaleParams,
    rng: np.random.Generator,
    audit: bool = True,
    retry_cap: int = RETRY_CAP,
) -> OrderedPieces:
    """Vertex-cut variant: each round emits its cut vertices as singletons
    (ascending id) followed by its net pieces."""
    n = G.n
    d = np.asarray(sol.d)
    scales = vertex_scales(d, params)
    nets = build_nets(scales, params)
    active = np.ones(n, dtype=bool)
    pieces, prov, rounds = [], [], []
    D_by_class = {j: 0 for j in params.scales}
    for j in params.scales:
        for i in params.scales:
            terms = nets.by_class[(i, j)]
            if not terms:
                continue
            res = metric_vertex_decomposition(
                G, terms, d, sol.x, 2 * params.Delta[i], rng, np.nonzero(active)[0], retry_cap
            )
            for w in res.D:
                pieces.append(np.array([w]))
                prov.append(Provenance("cut", j, i, int(w)))
            active[res.D] = False
            D_by_class[j] += len(res.D)
            for v, S in zip(res.terminals, res.pieces):
                if len(S):
                    pieces.append(S)
                    prov.append(Provenance("net", j, i, v))
                    active[S] = False
            rounds.append(RoundRecord(
                j, i, res.terminals, tuple(map(float, res.radii)), tuple(len(S) for S in res.pieces),
                0.0, tuple(int(w) for w in res.D), res.bound, res.retries,
            ))
    _check_partition(n, pieces)
    _check_net_sizes(pieces, prov, scales, params)
    report = None
    if audit:
        cumD = {}
        run = 0
        for j in params.scales:
            run += D_by_class[j]
            cumD[j] = run
        lhs, rhs = [], []
        for S, p in zip(pieces, prov):
            if p.kind == "net":
                lhs.append(cumD[p.j])
                rhs.append(params.beta * math.log2(n / len(S)) * sol.objective / n)
        report = _budget_audit(np.array(lhs, float), np.array(rhs, float), "cumulative cut-vertex count")
    cuts = tuple(0.0 for _ in pieces)
    return OrderedPieces(tuple(pieces), tuple(prov), cuts, tuple(rounds), params, report)


def _budget_audit(lhs: np.ndarray, rhs: np.ndarray, what: str) -> Audit:
    if len(lhs) == 0:
        return Audit(True, 0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > AUDIT_TOL, np.inf, 0.0))
    bad = np.nonzero(lhs > rhs + AUDIT_TOL)[0]
    if len(bad):
        k = int(bad[0])
        return Audit(False, len(lhs), float(ratio.max()), f"{what} {lhs[k]:.6g} exceeds budget {rhs[k]:.6g} at piece {k}")
    return Audit(True, len(lhs), float(ratio.max()))


# ---------------------------------------------------------------------------
# recursive drivers


@dataclass(frozen=True)
class LevelRecord:
    """Summary of one recursion node; ``path`` lists piece indices from the root
    and ``vertices`` its vertex set as ascending root ids."""

    path: tuple[int, ...]
    vertices: tuple[int, ...]
    n: int
    objective: float
    gamma: float
    ell: int
    beta: float
    n_pieces: int
    lp_rounds: int
    retries: int
    audit: Audit | None
    rounds: tuple[RoundRecord, ...] = ()
    pieces: OrderedPieces | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class LayoutResult:
    ordering: Ordering
    root_objective: float
    root_params: ScaleParams | None
    levels: tuple[LevelRecord, ...]

    @property
    def audit_ok(self) -> bool:
        return all(lv.audit is None or lv.audit.ok for lv in self.levels)

    @property
    def retries(self) -> int:
        return sum(lv.retries for lv in self.levels)

    @property
    def max_audit_ratio(self) -> float:
        return max((lv.audit.worst for lv in self.levels if lv.audit), default=0.0)


def child_rng(seed: int, path: tuple[int, ...]) -> np.random.Generator:
    """Independent stream for the recursion node at ``path``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=path))


def _solve_recursive(G: Graph, cfg: SolveConfig, vertex: bool, trace: Callable | None) -> LayoutResult:
    levels: list[LevelRecord] = []
    root: dict = {}

    if vertex and cfg.reuse_metric:
        raise ValueError("metric reuse is only available for the cutwidth driver")

    def lp_solve(H: Graph, inherited):
        if inherited is not None:
            eu, ev, ew = H.edge_arrays
            return lpmod.MetricSolution(inherited, float(ew @ inherited[eu, ev]))
        kw = dict(backend=cfg.lp_backend, formulation=cfg.formulation, max_rounds=cfg.max_lp_rounds)
        return lpmod.solve_vs_lp(H, **kw) if vertex else lpmod.solve_mla_lp(H, **kw)

    def rec(H: Graph, labels: np.ndarray, path: tuple[int, ...], inherited) -> list[int]:
        n = H.n
        if n <= 2:
            return [int(v) for v in labels]
        sol = lp_solve(H, inherited)
        params = compute_scales(n, cfg.gamma_override)
        rng = child_rng(cfg.seed, path)
        arrange = partition_and_arrange_vertex if vertex else partition_and_arrange
        op = arrange(H, sol, params, rng, audit=cfg.audit, retry_cap=cfg.retry_cap)
        if not path:
            root["objective"], root["params"] = sol.objective, params
        levels.append(LevelRecord(
            path, tuple(int(v) for v in labels), n, sol.objective, params.gamma, params.ell, params.beta,
            len(op.pieces), sol.rounds, op.retries, op.audit, op.rounds, op,
        ))
        if trace is not None:
            for r in op.rounds:
                trace({"path": list(path), **r.to_json()})
        out: list[int] = []
        for k, S in enumerate(op.pieces):
            if len(S) == 1:
                out.append(int(labels[S[0]]))
                continue
            sub, sub_labels = H.induced_subgraph(S)
            # a spreading metric restricted to a subset is still one
            child = lpmod.restrict_metric(sol.d, sub_labels) if cfg.reuse_metric else None
            out.extend(rec(sub, labels[sub_labels], path + (k,), child))
        return out

    if G.n == 2:
        # the base case skips the LP; solve it anyway so the root reports L* / P*
        root["objective"], root["params"] = lp_solve(G, None).objective, compute_scales(2, cfg.gamma_override)
    seq = rec(G, np.arange(G.n), (), None)
    ordering = Ordering.from_sequence(seq)
    return LayoutResult(ordering, root.get("objective", 0.0), root.get("params"), tuple(levels))


def solve_cutwidth(G: Graph, cfg: SolveConfig = SolveConfig(), trace: Callable | None = None) -> LayoutResult:
    """Recursive ordering for cutwidth; the same ordering serves linear arrangement."""
    return _solve_recursive(G, cfg, vertex=False, trace=trace)


def solve_pathwidth(G: Graph, cfg: SolveConfig = SolveConfig(), trace: Callable | None = None) -> LayoutResult:
    """Recursive ordering for vertex separation."""
    return _solve_recursive(G, cfg, vertex=True, trace=trace)


def cutwidth_order(G: Graph, cfg: SolveConfig = SolveConfig()) -> Ordering:
    return solve_cutwidth(G, cfg).ordering


def pathwidth_order(G: Graph, cfg: SolveConfig = SolveConfig()) -> Ordering:
    return solve_pathwidth(G, cfg).ordering


def pathwidth_decomposition(G: Graph, cfg: SolveConfig = SolveConfig()) -> PathDecomposition:
    pd = path_decomposition_from_ordering(G, pathwidth_order(G, cfg))
    check = validate_path_decomposition(G, pd)
    if not check:
        raise AssertionError(check.message)
    return pd


def approximation_factor(n: int, gamma: float | None = None) -> float:
    """``beta(n) * log2(n)``; 1 for ``n <= 1``, where every cost is 0."""
    if n <= 1:
        return 1.0
    return compute_scales(n, gamma).beta * math.log2(n)


@dataclass(frozen=True)
class GuaranteeCheck:
    ok: bool
    cost: float
    bound: float
    ratio: float


def mla_guarantee_check(G: Graph, pi: Ordering, Lstar: float, gamma: float | None = None) -> GuaranteeCheck:
    """Check ``mla_cost(G, pi) <= beta(n) log2(n) L*``."""
    cost = mla_cost(G, pi)
    ratio = cost / Lstar if Lstar > 0 else (0.0 if cost == 0 else math.inf)
    bound = approximation_factor(G.n, gamma) * Lstar
    return GuaranteeCheck(cost <= bound + AUDIT_TOL, cost, bound, ratio)


def jsonl_trace(fh) -> Callable[[dict], None]:
    """Trace sink writing one JSON object per round to ``fh``."""

    def emit(record: dict) -> None:
        fh.write(json.dumps(record, sort_keys=True) + "\n")

    return emit
