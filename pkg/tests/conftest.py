import networkx as nx
import numpy as np
import pytest

from egospectral import _backend
from egospectral.graph import Graph, parse_edge_list


def graph_from_nx(G, weights=None):
    """Graph on nodes 0..n-1 of ``G``; ``weights`` maps edge index to weight."""
    n = G.number_of_nodes()
    edges = [(u, v, 1.0 if weights is None else weights[k]) for k, (u, v) in enumerate(G.edges())]
    return Graph.from_edges(n, edges)


def random_weighted_graph(rng, n, p=0.3, low=0.1, high=2.0, signed=False, connected=True):
    """Seeded G(n, p) with uniform weights; ``signed`` draws from [-high, -low] U [low, high]."""
    for attempt in range(100):
        G = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if not connected or nx.is_connected(G):
            break
    w = rng.uniform(low, high, size=G.number_of_edges())
    if signed:
        w *= rng.choice([-1.0, 1.0], size=len(w))
    return graph_from_nx(G, w)


@pytest.fixture
def k3():
    return parse_edge_list("0 1\n1 2\n0 2\n")


@pytest.fixture
def p3():
    return parse_edge_list("0 1\n1 2\n")


@pytest.fixture
def p5():
    return parse_edge_list("0 1\n1 2\n2 3\n3 4\n")


@pytest.fixture
def c4():
    return parse_edge_list("0 1\n1 2\n2 3\n3 0\n")


@pytest.fixture
def star():
    return parse_edge_list("0 1\n0 2\n0 3\n")


@pytest.fixture
def heavy_edge():
    return parse_edge_list("0 1 3.0\n")


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)
