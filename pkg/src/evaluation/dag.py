"""Directed-graph helpers over binary adjacency matrices (u -> v at [u, v])."""

import logging

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)


def to_digraph(binary: np.ndarray) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(binary.shape[0]))
    rows, cols = np.nonzero(binary)
    graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return graph


def is_acyclic(binary: np.ndarray) -> bool:
    """True when the support has no directed cycle (self-loops count)."""
    return nx.is_directed_acyclic_graph(to_digraph(np.asarray(binary)))


def break_cycles(binary: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Drop the weakest edge of each remaining cycle until the graph is a DAG."""
    result = np.asarray(binary, dtype=np.float64).copy()
    graph = to_digraph(result)
    removed = 0
    while True:
        try:
            cycle = nx.find_cycle(graph)
        except nx.NetworkXNoCycle:
            break
        u, v = min(cycle, key=lambda edge: abs(weights[edge[0], edge[1]]))[:2]
        graph.remove_edge(u, v)
        result[u, v] = 0.0
        removed += 1
    if removed:
        logger.info("Removed %d edge(s) to make the thresholded graph acyclic", removed)
    return result
