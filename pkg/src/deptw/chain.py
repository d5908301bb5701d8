"""Exact dependency treewidth by search over downward-closed sets.

Vertices are added in a linear extension of the poset; the elimination
ordering is the reverse of the addition order.  A downward-closed set is
encoded by how many elements it takes from the front of each chain of a
minimum chain partition, so there are at most prod(|W_j| + 1) states.

When vertex ``d`` joins the set ``D``, every vertex outside ``D`` has
already been eliminated, so ``d``'s elimination-time degree is the number of
``D``-vertices it reaches through eliminated vertices (its back-degree).
That quantity depends on ``(D, d)`` only, which is what makes the search
memoizable on ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GraphError
from .poset import DependencyPoset, chain_partition
from .qbf import PrimalGraph


def backdegree(g: PrimalGraph, d_set, d) -> int:
    """Vertices of ``D - {d}`` adjacent to ``d`` or joined to it by a path
    whose inner vertices all lie outside ``D``."""
    d_set = set(d_set)
    if d not in d_set:
        raise GraphError(f"{d} is not in the given set")
    ix = g.index
    in_d = np.zeros(len(g.vertices), dtype=np.bool_)
    for v in d_set:
        in_d[ix[v]] = True
    return _kernels.backdegree(g, in_d, ix[d])


@dataclass
class ChainSearch:
    ordering: tuple | None
    states_visited: int
    state_bound: int


def _search(g: PrimalGraph, p: DependencyPoset, omega: int, chains, memo: bool) -> ChainSearch:
    ix = g.index
    n = len(g.vertices)
    chains_ix = [[ix[v] for v in ch] for ch in chains]
    k = len(chains_ix)
    chain_of = {}
    for j, ch in enumerate(chains_ix):
        for pos, v in enumerate(ch):
            chain_of[v] = (j, pos)
    # need[v][j]: how many elements of chain j lie strictly below v
    need = np.zeros((n, k), dtype=np.int64)
    for v in g.vertices:
        for u in p.below(v):
            j, pos = chain_of[ix[u]]
            need[ix[v], j] = max(need[ix[v], j], pos + 1)
    lengths = np.array([len(ch) for ch in chains_ix], dtype=np.int64)
    bound = int(np.prod(lengths + 1)) if k else 1

    in_d = np.zeros(n, dtype=np.bool_)
    counts = [0] * k
    path = []
    failed = set()
    visited = set()

    def successors():
        cand = []
        for j in range(k):
            if counts[j] >= lengths[j]:
                continue
            v = chains_ix[j][counts[j]]
            if all(counts[i] >= need[v, i] for i in range(k)):
                cand.append((g.vertices[v], j, v))
        cand.sort()
        return cand

    visited.add(tuple(counts))
    stack = [iter(successors())]
    while stack:
        if len(path) == n:
            return ChainSearch(tuple(g.vertices[v] for v in reversed(path)), len(visited), bound)
        step = next(stack[-1], None)
        if step is None:
            stack.pop()
            failed.add(tuple(counts))
            if path:
                v = path.pop()
                in_d[v] = False
                counts[chain_of[v][0]] -= 1
            continue
        _, j, v = step
        in_d[v] = True
        counts[j] += 1
        key = tuple(counts)
        if (memo and key in failed) or _kernels.backdegree(g, in_d, v) > omega:
            in_d[v] = False
            counts[j] -= 1
            continue
        visited.add(key)
        path.append(v)
        stack.append(iter(successors()))
    return ChainSearch(None, len(visited), bound)


def find_ordering_of_width(g: PrimalGraph, p: DependencyPoset, omega: int, memo: bool = True, chains=None):
    """Compatible ordering of width <= omega, or None.

    ``memo=False`` turns off the failed-state table (exhaustive search, for
    cross-checking only).
    """
    res = search_ordering(g, p, omega, memo=memo, chains=chains)
    return res.ordering


def search_ordering(g: PrimalGraph, p: DependencyPoset, omega: int, memo: bool = True, chains=None) -> ChainSearch:
    if omega < 0:
        raise ValueError("omega must be non-negative")
    if chains is None:
        chains = chain_partition(p).chains
    return _search(g, p, omega, chains, memo)


def min_width_via_chains(g: PrimalGraph, p: DependencyPoset, max_width: int | None = None):
    """``(width, ordering)``; ``(None, None)`` if the width exceeds the cap."""
    chains = chain_partition(p).chains
    top = max(len(g.vertices) - 1, 0) if max_width is None else max_width
    for omega in range(0, top + 1):
        order = find_ordering_of_width(g, p, omega, chains=chains)
        if order is not None:
            return omega, order
    return None, None
