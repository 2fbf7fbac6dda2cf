"""Weighted undirected graphs, vertex orderings and the three layout objectives.

Vertices are the integers ``0..n-1``. Positions are stored 0-based; reports
convert to 1-based with :meth:`Ordering.positions_1based`.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphParseError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Simple weighted graph.

    ``edges`` holds ``(u, v, w)`` with ``u < v``, sorted, one entry per
    unordered pair. Build through :meth:`from_edges`, which merges parallel
    edges by summing their weights.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    _eu: np.ndarray = field(repr=False, compare=False)
    _ev: np.ndarray = field(repr=False, compare=False)
    _ew: np.ndarray = field(repr=False, compare=False)
    _adj: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        merged: dict[tuple[int, int], float] = {}
        for e in edges:
            if len(e) == 2:
                u, v, w = int(e[0]), int(e[1]), 1.0
            else:
                u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0.0) + w
        items = tuple(sorted((u, v, w) for (u, v), w in merged.items()))
        eu = np.array([e[0] for e in items], dtype=np.int64)
        ev = np.array([e[1] for e in items], dtype=np.int64)
        ew = np.array([e[2] for e in items], dtype=float)
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v, _ in items:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adj = tuple(tuple(sorted(a)) for a in nbrs)
        for arr in (eu, ev, ew):
            arr.setflags(write=False)
        return cls(n, items, eu, ev, ew, adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Read-only ``(u, v, w)`` arrays, one entry per edge."""
        return self._eu, self._ev, self._ew

    @property
    def total_weight(self) -> float:
        return float(self._ew.sum())

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def weighted_degree(self, v: int) -> float:
        mask = (self._eu == v) | (self._ev == v)
        return float(self._ew[mask].sum())

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", np.ndarray]:
        """Return ``(G[S], labels)`` where ``labels[k]`` is the original id of new vertex ``k``.

        New ids follow ascending original ids.
        """
        labels = np.array(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        index = -np.ones(self.n, dtype=np.int64)
        index[labels] = np.arange(len(labels))
        keep = (index[self._eu] >= 0) & (index[self._ev] >= 0)
        sub = [
            (int(index[u]), int(index[v]), float(w))
            for u, v, w in zip(self._eu[keep], self._ev[keep], self._ew[keep])
        ]
        return Graph.from_edges(len(labels), sub), labels

    def relabeled(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v], w) for u, v, w in self.edges])

    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v} {w!r}" for u, v, w in self.edges]
        return "\n".join(lines) + "\n"


def parse_graph(text) -> Graph:
    """Parse the edge-list format.

    First non-comment line is ``n m``; then ``m`` lines ``u v [w]`` with
    ``w`` defaulting to 1.0. ``#`` starts a comment. Accepts ``str``,
    ``bytes`` or a text/binary stream.
    """
    if hasattr(text, "read"):
        text = text.read()
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, float]] = []
    merged: dict[tuple[int, int], float] = {}
    lineno = 0
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 2:
                raise GraphParseError(lineno, "expected header 'n m'")
            try:
                n, m = int(tok[0]), int(tok[1])
            except ValueError:
                raise GraphParseError(lineno, "header values must be integers") from None
            if n < 0 or m < 0:
                raise GraphParseError(lineno, "header values must be non-negative")
            header = (n, m)
            continue
        n = header[0]
        if len(tok) not in (2, 3):
            raise GraphParseError(lineno, "expected 'u v [w]'")
        try:
            u, v = int(tok[0]), int(tok[1])
            w = float(tok[2]) if len(tok) == 3 else 1.0
        except ValueError:
            raise GraphParseError(lineno, "could not parse edge fields") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(lineno, f"vertex id out of range [0, {n})")
        if u == v:
            raise GraphParseError(lineno, f"self-loop at vertex {u}")
        if not (w > 0 and np.isfinite(w)):
            raise GraphParseError(lineno, f"non-positive weight {w}")
        edges.append((u, v, w))
        key = (min(u, v), max(u, v))
        merged[key] = merged.get(key, 0.0) + w
    if header is None:
        raise GraphParseError(lineno, "missing header line")
    if len(edges) != header[1]:
        raise GraphParseError(lineno, f"header announces {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], [(u, v, w) for (u, v), w in merged.items()])


@dataclass(frozen=True)
class Ordering:
    """A vertex permutation; ``pi[v]`` is the 0-based position of ``v``."""

    pi: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.pi) != list(range(len(self.pi))):
            raise ValueError("ordering is not a permutation of 0..n-1")

    @classmethod
    def from_sequence(cls, seq: Sequence[int]) -> "Ordering":
        """Build from the vertices listed left to right."""
        if sorted(int(v) for v in seq) != list(range(len(seq))):
            raise ValueError("sequence is not a permutation of 0..n-1")
        pi = [0] * len(seq)
        for pos, v in enumerate(seq):
            pi[int(v)] = pos
        return cls(tuple(pi))

    @classmethod
    def identity(cls, n: int) -> "Ordering":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.pi)

    @property
    def sequence(self) -> list[int]:
        seq = [0] * len(self.pi)
        for v, pos in enumerate(self.pi):
            seq[pos] = v
        return seq

    def positions_1based(self) -> list[int]:
        return [p + 1 for p in self.pi]


def cut_weight(G: Graph, S: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``S``."""
    mask = np.zeros(G.n, dtype=bool)
    mask[list(S)] = True
    eu, ev, ew = G.edge_arrays
    return float(ew[mask[eu] != mask[ev]].sum())


def boundary_vertices(G: Graph, S: Iterable[int]) -> set[int]:
    """Vertices of ``S`` with at least one neighbour outside ``S``."""
    S = set(S)
    return {u for u in S if any(v not in S for v in G.neighbors(u))}


def _positions(G: Graph, pi: Ordering) -> np.ndarray:
    if pi.n != G.n:
        raise ValueError(f"ordering has {pi.n} entries for a graph on {G.n} vertices")
    return np.asarray(pi.pi, dtype=np.int64)


def prefix_cuts(G: Graph, pi: Ordering) -> np.ndarray:
    """``out[i]`` = weight of the cut between positions ``<= i`` and ``> i``, for i in 0..n-1."""
    pos = _positions(G, pi)
    out = np.zeros(G.n + 1)
    if G.m:
        eu, ev, ew = G.edge_arrays
        a = np.minimum(pos[eu], pos[ev])
        b = np.maximum(pos[eu], pos[ev])
        np.add.at(out, a, ew)
        np.add.at(out, b, -ew)
    return np.cumsum(out)[: G.n]


def cutwidth_cost(G: Graph, pi: Ordering) -> float:
    if G.n <= 1:
        return 0.0
    return float(prefix_cuts(G, pi).max())


def mla_cost(G: Graph, pi: Ordering) -> float:
    """Weighted total edge stretch."""
    pos = _positions(G, pi)
    eu, ev, ew = G.edge_arrays
    return float(np.sum(ew * np.abs(pos[eu] - pos[ev])))


def mla_cost_by_cuts(G: Graph, pi: Ordering) -> float:
    """Same quantity as :func:`mla_cost`, summed over prefix cuts."""
    return float(prefix_cuts(G, pi).sum()) if G.n else 0.0


def _last_neighbor_position(G: Graph, pos: np.ndarray) -> np.ndarray:
    last = pos.copy()
    if G.m:
        eu, ev, _ = G.edge_arrays
        np.maximum.at(last, eu, pos[ev])
        np.maximum.at(last, ev, pos[eu])
    return last


def vs_profile(G: Graph, pi: Ordering) -> np.ndarray:
    """``out[i]`` = number of vertices at positions ``<= i`` with a neighbour at a position ``> i``."""
    pos = _positions(G, pi)
    last = _last_neighbor_position(G, pos)
    out = np.zeros(G.n + 1, dtype=np.int64)
    active = last > pos
    np.add.at(out, pos[active], 1)
    np.add.at(out, last[active], -1)
    return np.cumsum(out)[: G.n]


def vs_cost(G: Graph, pi: Ordering) -> int:
    """Vertex separation number of the ordering; edge weights are ignored."""
    if G.n == 0:
        return 0
    return int(vs_profile(G, pi).max())


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset, ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def path_decomposition_from_ordering(G: Graph, pi: Ordering) -> PathDecomposition:
    """Bag ``i`` holds the vertex at position ``i`` plus every earlier vertex
    with a neighbour at position ``>= i``; width is at most ``vs_cost(G, pi)``."""
    pos = _positions(G, pi)
    last = _last_neighbor_position(G, pos)
    seq = pi.sequence
    bags = []
    open_: set[int] = set()
    for i, v in enumerate(seq):
        open_ = {u for u in open_ if last[u] >= i}
        bags.append(frozenset(open_ | {v}))
        open_.add(v)
    return PathDecomposition(tuple(bags))


@dataclass(frozen=True)
class DecompositionCheck:
    ok: bool
    condition: int | None = None
    message: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_path_decomposition(G: Graph, pd: PathDecomposition) -> DecompositionCheck:
    """Check vertex cover, edge cover and bag contiguity, reporting the first violation."""
    covered = set().union(*pd.bags) if pd.bags else set()
    for v in range(G.n):
        if v not in covered:
            return DecompositionCheck(False, 1, f"vertex {v} is in no bag", (v,))
    extra = covered - set(range(G.n))
    if extra:
        v = min(extra)
        return DecompositionCheck(False, 1, f"bag contains unknown vertex {v}", (v,))
    for u, v, _ in G.edges:
        if not any(u in b and v in b for b in pd.bags):
            return DecompositionCheck(False, 2, f"edge ({u}, {v}) is in no bag", (u, v))
    for v in range(G.n):
        idx = [i for i, b in enumerate(pd.bags) if v in b]
        for a, b in zip(idx, idx[1:]):
            if b != a + 1:
                return DecompositionCheck(
                    False, 3, f"vertex {v} is in bags {a} and {b} but not {a + 1}", (v, a, a + 1, b)
                )
    return DecompositionCheck(True)
