# tests/helpers.py
# Shared hypothesis strategies and independent oracles for the test-suite.

import networkx as nx
import numpy as np
from hypothesis import strategies as st

from forest import RootedForest


@st.composite
def parent_lists(draw, min_size=1, max_size=24):
    """Insertion-ordered parent lists: node i hangs from an earlier node or starts a tree."""
    size = draw(st.integers(min_size, max_size))
    parents = [None]
    for i in range(1, size):
        parents.append(draw(st.one_of(st.none(), st.integers(0, i - 1))))
    return parents


@st.composite
def forests(draw, min_size=1, max_size=24):
    return RootedForest.from_parents(draw(parent_lists(min_size, max_size)))


def adjacency_matrix(forest: RootedForest) -> np.ndarray:
    index = {v: i for i, v in enumerate(forest.nodes)}
    matrix = np.zeros((forest.n, forest.n), dtype=np.int64)
    for v, p in forest.parent.items():
        if p is not None:
            matrix[index[v], index[p]] = matrix[index[p], index[v]] = 1
    return matrix


def ancestor_matrix(forest: RootedForest) -> np.ndarray:
    """Reflexive-transitive closure of the child -> parent relation, by matrix powers."""
    index = {v: i for i, v in enumerate(forest.nodes)}
    step = np.eye(forest.n, dtype=np.int64)
    for v, p in forest.parent.items():
        if p is not None:
            step[index[p], index[v]] = 1
    closure = step.copy()
    for _ in range(forest.n):
        closure = np.minimum(closure @ step, 1)
    return closure


def as_graph(forest: RootedForest) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(forest.nodes)
    graph.add_edges_from((v, p) for v, p in forest.parent.items() if p is not None)
    return graph


def as_digraph(forest: RootedForest) -> nx.DiGraph:
    """Parent -> child edges."""
    graph = nx.DiGraph()
    graph.add_nodes_from(forest.nodes)
    graph.add_edges_from((p, v) for v, p in forest.parent.items() if p is not None)
    return graph


def brute_sibling(digraph: nx.DiGraph, u, v) -> bool:
    if u == v:
        return True
    parents_u, parents_v = set(digraph.predecessors(u)), set(digraph.predecessors(v))
    return bool(parents_u) and parents_u == parents_v


def brute_routing(graph: nx.Graph, digraph: nx.DiGraph, u, v):
    """Port at u of the first edge on the u-v path: 0 up, children from 1 by id."""
    if u == v:
        return None
    step = nx.shortest_path(graph, u, v)[1]
    if digraph.has_edge(step, u):
        return 0
    return sorted(digraph.successors(u)).index(step) + 1
