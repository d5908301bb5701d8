"""Numeric inner loops, compiled with numba when available.

Every kernel has a numba version working on CSR adjacency and a NumPy
version working on the dense boolean adjacency matrix.  The dispatch names
(``backdegree``, ``elimination_width``, ``component_labels``) pick the numba
path unless numba is missing or ``DEPTW_PURE_NUMPY=1`` is set in the
environment.  Both paths return identical results.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DEPTW_PURE_NUMPY", "") not in ("1", "true", "yes")


# -- numpy path ----------------------------------------------------------------


def backdegree_numpy(adj, in_d, d):
    """Vertices of D - {d} reachable from d through vertices outside D."""
    outside = ~in_d
    seen = np.zeros(adj.shape[0], dtype=np.bool_)
    seen[d] = True
    frontier = seen.copy()
    hits = np.zeros_like(seen)
    while frontier.any():
        nb = adj[frontier].any(axis=0) & ~seen
        seen |= nb
        hits |= nb & in_d
        frontier = nb & outside
    return int(hits.sum())


def elimination_width_numpy(adj, order):
    """Width of eliminating vertices in ``order``; fill edges added as we go."""
    h = adj.copy()
    alive = np.ones(h.shape[0], dtype=np.bool_)
    width = 0
    for v in order:
        alive[v] = False
        nb = h[v] & alive
        k = int(nb.sum())
        if k > width:
            width = k
        if k > 1:
            idx = np.flatnonzero(nb)
            h[np.ix_(idx, idx)] = True
    return width


def component_labels_numpy(adj, blocked):
    """Component label per vertex of G - blocked, -1 on blocked vertices.

    Labels are numbered in order of each component's smallest index.
    """
    n = adj.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    free = ~blocked
    label = 0
    for s in range(n):
        if not free[s] or labels[s] >= 0:
            continue
        comp = np.zeros(n, dtype=np.bool_)
        comp[s] = True
        frontier = comp.copy()
        while frontier.any():
            nb = adj[frontier].any(axis=0) & free & ~comp
            comp |= nb
            frontier = nb
        labels[comp] = label
        label += 1
    return labels


# -- numba path ----------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _backdegree_nb(indptr, indices, in_d, d):
        n = in_d.shape[0]
        seen = np.zeros(n, dtype=np.bool_)
        stack = np.empty(n, dtype=np.int64)
        seen[d] = True
        stack[0] = d
        top = 1
        count = 0
        while top > 0:
            top -= 1
            u = stack[top]
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if seen[w]:
                    continue
                seen[w] = True
                if in_d[w]:
                    count += 1
                else:
                    stack[top] = w
                    top += 1
        return count

    @njit(cache=True)
    def _elimination_width_nb(adj, order):
        n = adj.shape[0]
        h = adj.copy()
        alive = np.ones(n, dtype=np.bool_)
        nb = np.empty(n, dtype=np.int64)
        width = 0
        for t in range(order.shape[0]):
            v = order[t]
            alive[v] = False
            k = 0
            for w in range(n):
                if h[v, w] and alive[w]:
                    nb[k] = w
                    k += 1
            if k > width:
                width = k
            for a in range(k):
                for b in range(a + 1, k):
                    h[nb[a], nb[b]] = True
                    h[nb[b], nb[a]] = True
        return width

    @njit(cache=True)
    def _component_labels_nb(indptr, indices, blocked):
        n = blocked.shape[0]
        labels = np.full(n, -1, dtype=np.int64)
        stack = np.empty(n, dtype=np.int64)
        label = 0
        for s in range(n):
            if blocked[s] or labels[s] >= 0:
                continue
            labels[s] = label
            stack[0] = s
            top = 1
            while top > 0:
                top -= 1
                u = stack[top]
                for k in range(indptr[u], indptr[u + 1]):
                    w = indices[k]
                    if blocked[w] or labels[w] >= 0:
                        continue
                    labels[w] = label
                    stack[top] = w
                    top += 1
            label += 1
        return labels


def backdegree_numba(indptr, indices, in_d, d):
    return int(_backdegree_nb(indptr, indices, in_d, np.int64(d)))


def elimination_width_numba(adj, order):
    return int(_elimination_width_nb(adj, np.asarray(order, dtype=np.int64)))


def component_labels_numba(indptr, indices, blocked):
    return _component_labels_nb(indptr, indices, blocked)


# -- dispatch --------------------------------------------------------------------


def backdegree(graph, in_d, d):
    """``graph`` is a PrimalGraph; ``in_d`` a bool array over vertex indices."""
    if USE_NUMBA:
        indptr, indices = graph.csr
        return backdegree_numba(indptr, indices, in_d, d)
    return backdegree_numpy(graph.adj_matrix, in_d, d)


def elimination_width(graph, order_idx):
    if len(order_idx) == 0:
        return 0
    if USE_NUMBA:
        return elimination_width_numba(graph.adj_matrix, order_idx)
    return elimination_width_numpy(graph.adj_matrix, order_idx)


def component_labels(graph, blocked):
    if USE_NUMBA:
        indptr, indices = graph.csr
        return component_labels_numba(indptr, indices, blocked)
    return component_labels_numpy(graph.adj_matrix, blocked)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
