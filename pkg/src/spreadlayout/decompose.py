"""Multi-scale ball machinery and randomized exponential ball cutting.

Given a spreading metric ``d`` on ``n`` vertices:

* :func:`compute_scales` fixes the scale ratio ``gamma``, the number of
  scales ``ell``, the radii ``Delta_i = n / 8^i`` and the size thresholds
  ``n_k = n / 2^(gamma^(k-1))``;
* :func:`vertex_scales` assigns each vertex a radius scale and size class;
* :func:`build_nets` greedily packs disjoint balls per radius scale;
* :func:`metric_decomposition` and :func:`metric_vertex_decomposition`
  carve pieces around terminals with truncated-exponential radii and
  retry until the cut (edge weight or vertex count) meets its bound.

All logarithms over scales are base 2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import Graph

log = logging.getLogger(__name__)

BALL_TOL = 1e-9
SAMPLE_CAP = 10_000
RETRY_CAP = 64


class DecompositionError(RuntimeError):
    """A randomized cutting step exhausted its retry budget."""


def ball(d: np.ndarray, center: int, r: float, within: Sequence[int] | np.ndarray | None = None) -> np.ndarray:
    """Sorted ids ``y`` (restricted to ``within`` if given) with ``d(center, y) <= r``."""
    row = np.asarray(d)[center]
    if within is None:
        return np.nonzero(row <= r + BALL_TOL)[0]
    within = np.asarray(within, dtype=np.int64)
    return np.sort(within[row[within] <= r + BALL_TOL])


# ---------------------------------------------------------------------------
# scales


@dataclass(frozen=True)
class ScaleParams:
    """Scale parameters for an instance of size ``n``.

    ``Delta[i] = n / 8^i`` and ``sizes[k]`` are indexed naturally:
    ``Delta[1..ell+1]`` and ``sizes[0..ell+1]`` (``Delta[0] = n`` is unused).
    """

    n: int
    gamma: float
    ell: int
    Delta: np.ndarray
    sizes: np.ndarray
    beta: float

    @property
    def scales(self) -> range:
        """Radius scales and size classes used by the decomposition, ``2..ell+1``."""
        return range(2, self.ell + 2)


def default_gamma(n: int) -> float:
    ll = math.log2(math.log2(n)) if n > 2 else 0.0
    return max(2.0, 2.0 ** math.sqrt(max(0.0, ll)))


def compute_scales(n: int, gamma: float | None = None) -> ScaleParams:
    if n < 2:
        raise ValueError(f"scale machinery needs n >= 2, got {n}")
    if gamma is None:
        gamma = default_gamma(n)
    elif gamma < 2:
        raise ValueError("gamma must be at least 2")
    gamma = float(gamma)
    # the tiny offset keeps exact powers from rounding up a whole scale
    ell = math.ceil(math.log(math.log2(n)) / math.log(gamma) - 1e-12) + 1
    ell = max(ell, 1)
    i = np.arange(ell + 2)
    Delta = n / 8.0 ** i
    k = np.arange(1, ell + 2)
    sizes = np.r_[n / 2.0, n / 2.0 ** (gamma ** (k - 1.0))]
    beta = 8.0 ** (ell + 4) * gamma**2
    for a in (Delta, sizes):
        a.setflags(write=False)
    return ScaleParams(n, gamma, ell, Delta, sizes, beta)


@dataclass(frozen=True)
class VertexScales:
    """Per-vertex radius scale ``i_v``, size class ``j_v`` and ball ``B_v = B(v, Delta[i_v])``.

    ``ball_sizes[v, i] = |B(v, Delta[i])|`` for ``i = 1..ell+1`` (column 0 unused).
    """

    radius_scale: np.ndarray
    size_class: np.ndarray
    balls: tuple[np.ndarray, ...]
    ball_sizes: np.ndarray
    groups: dict[int, np.ndarray]
    fallbacks: int = 0


def _ball_size_table(d: np.ndarray, radii: np.ndarray) -> np.ndarray:
    rows = np.sort(d, axis=1)
    return np.stack([np.searchsorted(r, radii + BALL_TOL, side="right") for r in rows])


def vertex_scales(d: np.ndarray, params: ScaleParams) -> VertexScales:
    d = np.asarray(d, float)
    n, ell, gamma = params.n, params.ell, params.gamma
    if d.shape != (n, n):
        raise ValueError("distance table does not match the scale parameters")
    sizes = _ball_size_table(d, params.Delta)
    sizes[:, 0] = n
    if (sizes[:, 1] > n / 2).any():
        v = int(np.argmax(sizes[:, 1]))
        raise ValueError(f"ball of radius n/8 around {v} holds {sizes[v, 1]} > n/2 vertices; metric is not spreading")
    lg = np.log2(n / sizes)
    iv = np.zeros(n, dtype=np.int64)
    fallbacks = 0
    for v in range(n):
        for i in range(2, ell + 2):
            if lg[v, i] <= gamma * lg[v, i - 1]:
                iv[v] = i
                break
        else:
            log.warning("no radius scale satisfies the growth test for vertex %d; using %d", v, ell + 1)
            iv[v] = ell + 1
            fallbacks += 1
    bsize = sizes[np.arange(n), iv]
    thr = params.sizes
    jv = np.zeros(n, dtype=np.int64)
    for v in range(n):
        for j in range(1, ell + 2):
            if thr[j] < bsize[v] <= thr[j - 1]:
                jv[v] = j
                break
    if (jv < 2).any() or (iv < 2).any():
        raise AssertionError("radius scale or size class outside [2, ell+1]")
    # |B(v, Delta[i_v - 1])| <= n_{j_v - 2}
    prev = sizes[np.arange(n), iv - 1]
    bad = np.nonzero(prev > thr[jv - 2] + 1e-9)[0]
    if len(bad) and not fallbacks:
        raise AssertionError(f"ball-growth bound fails at vertex {int(bad[0])}")
    balls = tuple(ball(d, v, params.Delta[iv[v]]) for v in range(n))
    groups = {i: np.nonzero(iv == i)[0] for i in params.scales}
    for a in (iv, jv, sizes):
        a.setflags(write=False)
    return VertexScales(iv, jv, balls, sizes, groups, fallbacks)


@dataclass(frozen=True)
class Nets:
    """Greedy ball packings: ``by_scale[i]`` in insertion order, ``by_class[(i, j)]`` its size-class split."""

    by_scale: dict[int, tuple[int, ...]]
    by_class: dict[tuple[int, int], tuple[int, ...]]

    @property
    def centers(self) -> tuple[int, ...]:
        return tuple(v for i in sorted(self.by_scale) for v in self.by_scale[i])


def build_nets(scales: VertexScales, params: ScaleParams) -> Nets:
    """Maximal disjoint packing of ``{B_v : v in C_i}`` per scale, scanning ids in ascending order.

    A single ascending pass suffices: a vertex skipped because its ball met
    the packing stays blocked as the packing only grows.
    """
    n = params.n
    by_scale = {}
    by_class = {}
    for i in params.scales:
        taken = np.zeros(n, dtype=bool)
        net = []
        for v in scales.groups[i]:
            B = scales.balls[v]
            if not taken[B].any():
                taken[B] = True
                net.append(int(v))
        by_scale[i] = tuple(net)
        for j in params.scales:
            by_class[(i, j)] = tuple(v for v in net if scales.size_class[v] == j)
    return Nets(by_scale, by_class)


# ---------------------------------------------------------------------------
# randomized cutting


def sample_truncated_exponentials(T: int, lam: float, rng: np.random.Generator, cap: int = SAMPLE_CAP):
    """Draw ``T`` i.i.d. ``Exp(lam)`` values, redrawing the whole batch until all are ``<= 1``.

    Returns ``(rho, batches)``.
    """
    if T < 1:
        raise ValueError("need at least one terminal")
    for batch in range(1, cap + 1):
        rho = rng.exponential(1.0 / lam, size=T)
        if (rho <= 1.0).all():
            return rho, batch
    raise DecompositionError(f"no admissible radius batch in {cap} draws")


def truncated_exponential_mean(lam: float) -> float:
    """``E[rho | rho <= 1]`` for ``rho ~ Exp(lam)``."""
    return 1.0 / lam - math.exp(-lam) / (1.0 - math.exp(-lam))


@dataclass(frozen=True)
class CutResult:
    """Pieces ``S_t`` (sorted ids, possibly empty) in terminal order.

    ``piece_cuts[t] = w(delta(S_t))`` inside the input subgraph and
    ``cut_edge_weight`` is their sum, compared against ``bound``.
    """

    terminals: tuple[int, ...]
    pieces: tuple[np.ndarray, ...]
    piece_cuts: np.ndarray
    cut_edge_weight: float
    radii: np.ndarray
    R: float
    volume: float
    bound: float
    retries: int
    batches: int


@dataclass(frozen=True)
class VertexCutResult:
    """Cut vertices ``D`` (with per-terminal parts) and pieces ``S_t``."""

    terminals: tuple[int, ...]
    D: np.ndarray
    D_parts: tuple[np.ndarray, ...]
    pieces: tuple[np.ndarray, ...]
    radii: np.ndarray
    R: float
    x_total: float
    bound: float
    retries: int
    batches: int


def _active(G: Graph, active) -> np.ndarray:
    if active is None:
        return np.arange(G.n)
    return np.sort(np.asarray(active, dtype=np.int64))


def _carve(d, terminals, act, radii, x=None):
    """One pass of ball carving; with ``x`` also collects cut vertices."""
    n = d.shape[0]
    free = np.zeros(n, dtype=bool)
    free[act] = True  # not yet inside an earlier ball
    in_D = np.zeros(n, dtype=bool)
    pieces, D_parts = [], []
    for v, r in zip(terminals, radii):
        row = d[v]
        if x is not None:
            hit = free & (r >= row - x - BALL_TOL) & (r <= row + x + BALL_TOL)
            D_parts.append(np.nonzero(hit)[0])
            in_D |= hit
        B = free & (row <= r + BALL_TOL)
        pieces.append(np.nonzero(B & ~in_D)[0])
        free &= ~B
    return pieces, D_parts, in_D


def _piece_cuts(G: Graph, act_mask, pieces) -> np.ndarray:
    lab = -np.ones(G.n, dtype=np.int64)
    for t, S in enumerate(pieces):
        lab[S] = t
    eu, ev, ew = G.edge_arrays
    inside = act_mask[eu] & act_mask[ev]
    lu, lv, w = lab[eu[inside]], lab[ev[inside]], ew[inside]
    cross = lu != lv
    out = np.zeros(len(pieces))
    np.add.at(out, lu[cross & (lu >= 0)], w[cross & (lu >= 0)])
    np.add.at(out, lv[cross & (lv >= 0)], w[cross & (lv >= 0)])
    return out


def _check_containment(d, terminals, pieces, act, R, covered):
    for v, S in zip(terminals, pieces):
        if len(S) and (d[v, S] > 2 * R + BALL_TOL).any():
            raise AssertionError(f"piece of terminal {v} leaves B(v, 2R)")
    need = np.zeros(d.shape[0], dtype=bool)
    for v in terminals:
        need[ball(d, v, R, act)] = True
    if (need & ~covered).any():
        raise AssertionError("a vertex within R of a terminal was left uncovered")


def metric_decomposition(
    G: Graph,
    terminals: Sequence[int],
    d: np.ndarray,
    R: float,
    rng: np.random.Generator,
    active=None,
    retry_cap: int = RETRY_CAP,
) -> CutResult:
    """Exponential ball carving of ``G[active]`` around ``terminals``.

    ``d`` is indexed by the ids of ``G``; terminals need not be active.
    Runs are redrawn until ``sum_t w(delta(S_t)) <= 8 ln(2T) / R * sum_E w d``
    over the edges of ``G[active]``.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    terminals = tuple(int(v) for v in terminals)
    T = len(terminals)
    d = np.asarray(d, float)
    act = _active(G, active)
    mask = np.zeros(G.n, dtype=bool)
    mask[act] = True
    eu, ev, ew = G.edge_arrays
    inside = mask[eu] & mask[ev]
    volume = float(ew[inside] @ d[eu[inside], ev[inside]])
    lam = math.log(2 * T)
    bound = 8 * lam / R * volume
    batches = 0
    for attempt in range(retry_cap):
        radii, b = sample_truncated_exponentials(T, lam, rng)
        batches += b
        pieces, _, _ = _carve(d, terminals, act, R * (1 + radii))
        cuts = _piece_cuts(G, mask, pieces)
        total = float(cuts.sum())
        if total <= bound + 1e-9 * max(1.0, bound):
            covered = np.zeros(G.n, dtype=bool)
            for S in pieces:
                covered[S] = True
            _check_containment(d, terminals, pieces, act, R, covered)
            return CutResult(terminals, tuple(pieces), cuts, total, radii, R, volume, bound, attempt, batches)
    raise DecompositionError(f"edge cut bound not met in {retry_cap} attempts")


def metric_vertex_decomposition(
    G: Graph,
    terminals: Sequence[int],
    d: np.ndarray,
    x: np.ndarray,
    R: float,
    rng: np.random.Generator,
    active=None,
    retry_cap: int = RETRY_CAP,
) -> VertexCutResult:
    """Vertex-cut variant: a vertex whose interval ``[d - x_u, d + x_u]`` around a
    terminal contains the sampled radius is cut into ``D``.

    Runs are redrawn until ``|D| <= 8 ln(2T) / R * sum_{active} x``.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    terminals = tuple(int(v) for v in terminals)
    T = len(terminals)
    d = np.asarray(d, float)
    x = np.asarray(x, float)
    act = _active(G, active)
    mask = np.zeros(G.n, dtype=bool)
    mask[act] = True
    x_total = float(x[act].sum())
    lam = math.log(2 * T)
    bound = 8 * lam / R * x_total
    batches = 0
    for attempt in range(retry_cap):
        radii, b = sample_truncated_exponentials(T, lam, rng)
        batches += b
        pieces, D_parts, in_D = _carve(d, terminals, act, R * (1 + radii), x)
        size = int(in_D.sum())
        if size <= bound + 1e-9:
            covered = in_D.copy()
            for S in pieces:
                covered[S] = True
            _check_containment(d, terminals, pieces, act, R, covered)
            _check_no_bridges(G, mask, pieces, in_D)
            return VertexCutResult(
                terminals, np.nonzero(in_D)[0], tuple(D_parts), tuple(pieces),
                radii, R, x_total, bound, attempt, batches,
            )
    raise DecompositionError(f"vertex cut bound not met in {retry_cap} attempts")


def _check_no_bridges(G: Graph, mask, pieces, in_D):
    """Every active neighbour of a piece vertex lies in the same piece or in ``D``."""
    lab = -np.ones(G.n, dtype=np.int64)
    for t, S in enumerate(pieces):
        lab[S] = t
    eu, ev, _ = G.edge_arrays
    inside = mask[eu] & mask[ev]
    for a, b in ((eu[inside], ev[inside]), (ev[inside], eu[inside])):
        bad = (lab[a] >= 0) & (lab[b] != lab[a]) & ~in_D[b]
        if bad.any():
            k = int(np.argmax(bad))
            raise AssertionError(f"edge ({int(a[k])}, {int(b[k])}) leaves a piece without passing D")
