"""Shared test utilities: tiny deterministic graph builders."""

import numpy as np

from spectraledge import graph


def edges_to_graph(n, edges):
    i = np.array([e[0] for e in edges], dtype=np.int64)
    j = np.array([e[1] for e in edges], dtype=np.int64)
    return graph._pairs_to_graph(n, np.minimum(i, j), np.maximum(i, j))


def path_graph(n):
    return edges_to_graph(n, [(i, i + 1) for i in range(n - 1)])


def random_tree(rng, n, max_degree=20):
    """Random labelled tree grown by parent attachment with a degree cap."""
    edges = []
    deg = np.zeros(n, dtype=int)
    for v in range(1, n):
        while True:
            p = int(rng.integers(0, v))
            if deg[p] < max_degree - 1:
                break
        edges.append((p, v))
        deg[p] += 1
        deg[v] += 1
    return edges_to_graph(n, edges)
