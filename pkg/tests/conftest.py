import os

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spreadlayout.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def from_nx(H) -> Graph:
    H = nx.convert_node_labels_to_integers(H)
    return Graph.from_edges(H.number_of_nodes(), H.edges())


def connected_atlas(max_n=7):
    """All connected graphs on 1..max_n vertices up to isomorphism."""
    return [from_nx(H) for H in nx.graph_atlas_g()[1:] if H.number_of_nodes() <= max_n and nx.is_connected(H)]


@st.composite
def graphs(draw, min_n=1, max_n=9, weighted=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    if weighted:
        ws = draw(st.lists(st.integers(1, 5), min_size=len(chosen), max_size=len(chosen)))
        return Graph.from_edges(n, [(u, v, float(w)) for (u, v), w in zip(chosen, ws)])
    return Graph.from_edges(n, chosen)


@st.composite
def graph_and_order(draw, **kw):
    G = draw(graphs(**kw))
    perm = draw(st.permutations(range(G.n)))
    from spreadlayout.graph import Ordering

    return G, Ordering.from_sequence(perm)


@pytest.fixture
def K4():
    return Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def P3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def star5():
    return Graph.from_edges(5, [(0, v) for v in range(1, 5)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the terminal summary prints them all."""

    def record(num: int, failures: list, detail: str = ""):
        ok = not failures
        _CRITERIA[num] = (ok, detail if ok else f"{len(failures)} failures, first: {failures[0]}")
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {_CRITERIA[num][1]}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        ok, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
