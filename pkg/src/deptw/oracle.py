"""Brute-force reference implementations.

These are deliberately naive and refuse inputs above a hard size cap, so a
test can never hang on them.
"""

from __future__ import annotations

from .errors import BoundExceeded
from .poset import DependencyPoset, enumerate_linear_extensions, reverse_poset
from .qbf import QbfInstance, PrimalGraph

TRUTH_BOUND = 20
WIDTH_BOUND = 9


def brute_force_truth(inst: QbfInstance, bound: int = TRUTH_BOUND) -> bool:
    """Evaluate the closed formula by expanding every quantifier."""
    if len(inst.variables) > bound:
        raise BoundExceeded(f"{len(inst.variables)} variables exceed the oracle bound {bound}")
    prefix = list(inst.prefix)
    clauses = inst.clauses

    def value(i, assign):
        if i == len(prefix):
            return all(any(assign[abs(l)] == (l > 0) for l in c) for c in clauses)
        v, q = prefix[i]
        results = []
        for b in (False, True):
            assign[v] = b
            results.append(value(i + 1, assign))
        del assign[v]
        return any(results) if q == "e" else all(results)

    return value(0, {})


def _width_of(g: PrimalGraph, order) -> int:
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    width = 0
    for v in order:
        nb = adj.pop(v)
        width = max(width, len(nb))
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
    return width


def brute_force_min_width(g: PrimalGraph, p: DependencyPoset, bound: int = WIDTH_BOUND) -> int:
    """Minimum width over every compatible elimination ordering."""
    if len(g.vertices) > bound:
        raise BoundExceeded(f"{len(g.vertices)} vertices exceed the oracle bound {bound}")
    if set(g.vertices) != set(p.elements):
        raise ValueError("graph and poset have different element sets")
    best = None
    for order in enumerate_linear_extensions(reverse_poset(p), bound=bound):
        w = _width_of(g, order)
        if best is None or w < best:
            best = w
    return best if best is not None else 0
