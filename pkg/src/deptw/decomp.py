"""Elimination orderings, fill-in graphs and dependency tree decompositions.

An elimination ordering is a tuple of vertices, first-eliminated first.  An
ordering is compatible with a dependency poset when it is a linear extension
of the reversed poset: whenever ``u < v`` in the poset, ``v`` is eliminated
before ``u``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import DecompositionError, OrderingError
from .poset import DependencyPoset
from .qbf import PrimalGraph

log = logging.getLogger(__name__)


def _check_permutation(g: PrimalGraph, order):
    if len(order) != len(g.vertices) or set(order) != set(g.vertices):
        raise OrderingError("ordering is not a permutation of the graph's vertices")


@dataclass(frozen=True, eq=False)
class FillInGraph:
    base: PrimalGraph
    order: tuple
    fill_edges: frozenset
    adjacency: dict = field(repr=False)

    def later_neighbors(self, v) -> frozenset:
        pos = self.position
        return frozenset(w for w in self.adjacency[v] if pos[w] > pos[v])

    @cached_property
    def position(self) -> dict:
        return {v: i for i, v in enumerate(self.order)}

    def has_edge(self, u, v) -> bool:
        return v in self.adjacency[u]

    def as_graph(self) -> PrimalGraph:
        return PrimalGraph(self.base.vertices, {v: frozenset(s) for v, s in self.adjacency.items()})


def fill_in_graph(g: PrimalGraph, order) -> FillInGraph:
    order = tuple(order)
    _check_permutation(g, order)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    fill = set()
    for v in order:
        later = sorted((w for w in adj[v] if pos[w] > pos[v]), key=pos.__getitem__)
        for i, a in enumerate(later):
            for b in later[i + 1:]:
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    fill.add((min(a, b), max(a, b)))
    return FillInGraph(g, order, frozenset(fill), {v: frozenset(s) for v, s in adj.items()})


def ordering_width(g: PrimalGraph, order) -> int:
    """Largest number of later neighbours of a vertex in the fill-in graph."""
    h = fill_in_graph(g, order)
    return max((len(h.later_neighbors(v)) for v in g.vertices), default=0)


def elimination_width(g: PrimalGraph, order) -> int:
    """Same value as :func:`ordering_width`, by simulating elimination."""
    order = tuple(order)
    _check_permutation(g, order)
    ix = g.index
    return _kernels.elimination_width(g, np.array([ix[v] for v in order], dtype=np.int64))


def check_compatibility(order, p: DependencyPoset) -> bool:
    order = tuple(order)
    if len(order) != len(p.elements) or set(order) != set(p.elements):
        raise OrderingError("ordering and poset have different element sets")
    pos = {v: i for i, v in enumerate(order)}
    return all(pos[v] < pos[u] for u, v in p.strict)


# ---------------------------------------------------------------------------
# tree decompositions


@dataclass(frozen=True)
class DependencyTreeDecomposition:
    bags: tuple  # frozenset per node
    parent: tuple  # parent node per node, -1 at the root

    @cached_property
    def root(self) -> int:
        roots = [t for t, p in enumerate(self.parent) if p < 0]
        if len(roots) != 1:
            raise DecompositionError(f"expected exactly one root, found {len(roots)}")
        return roots[0]

    @cached_property
    def children(self) -> tuple:
        ch = [[] for _ in self.bags]
        for t, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(t)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def depth(self) -> tuple:
        d = [-1] * len(self.bags)
        for t in self.preorder():
            p = self.parent[t]
            d[t] = 0 if p < 0 else d[p] + 1
        return tuple(d)

    def preorder(self) -> list:
        out = []
        stack = [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(self.children[t]))
        return out

    @property
    def width(self) -> int:
        # an empty graph still has width 0
        return max(max((len(b) for b in self.bags), default=0) - 1, 0)

    def topmost(self) -> dict:
        """Highest node whose bag contains each vertex."""
        top = {}
        for t in self.preorder():
            for v in self.bags[t]:
                if v not in top or self.depth[t] < self.depth[top[v]]:
                    top[v] = t
        return top

    def is_ancestor(self, a, b) -> bool:
        """True iff ``a`` is a strict ancestor of ``b``."""
        t = self.parent[b]
        while t >= 0:
            if t == a:
                return True
            t = self.parent[t]
        return False

    def cover(self, t) -> frozenset:
        """Union of the bags in the subtree rooted at ``t``."""
        out = set()
        stack = [t]
        while stack:
            u = stack.pop()
            out |= self.bags[u]
            stack.extend(self.children[u])
        return frozenset(out)


def ordering_to_decomposition(g: PrimalGraph, p: DependencyPoset, order) -> DependencyTreeDecomposition:
    """Build a dependency tree decomposition from a compatible ordering.

    Vertices are added from the last-eliminated one backwards; each gets a
    new leaf holding itself and its later fill-in neighbours, hung below the
    most recently created node that already contains those neighbours.
    """
    order = tuple(order)
    _check_permutation(g, order)
    if not check_compatibility(order, p):
        raise OrderingError("ordering is not compatible with the dependency poset")
    if not order:
        return DependencyTreeDecomposition((frozenset(),), (-1,))
    h = fill_in_graph(g, order)
    bags = [frozenset([order[-1]])]
    parent = [-1]
    for v in reversed(order[:-1]):
        later = h.later_neighbors(v)
        host = next(t for t in range(len(bags) - 1, -1, -1) if later <= bags[t])
        bags.append(later | {v})
        parent.append(host)
    return DependencyTreeDecomposition(tuple(bags), tuple(parent))


@dataclass(frozen=True)
class Violation:
    prop: str
    witness: tuple
    message: str


@dataclass
class DecompositionReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self) -> set:
        return {v.prop for v in self.violations}


def validate_decomposition(g: PrimalGraph, p: DependencyPoset | None, t: DependencyTreeDecomposition) -> DecompositionReport:
    """Check T1-T4 independently.  T4 is skipped when ``p`` is None."""
    out = []
    n = len(t.bags)
    roots = [x for x in range(n) if t.parent[x] < 0]
    if len(roots) != 1:
        out.append(Violation("tree", tuple(roots), f"expected one root, found {len(roots)}"))
        return DecompositionReport(out)
    # every node must reach the root without cycling
    for x in range(n):
        seen = set()
        y = x
        while y >= 0:
            if y in seen or y >= n:
                out.append(Violation("tree", (x,), f"node {x} does not reach the root"))
                return DecompositionReport(out)
            seen.add(y)
            y = t.parent[y]

    verts = set(g.vertices)
    covered = set()
    for x, bag in enumerate(t.bags):
        unknown = bag - verts
        if unknown:
            out.append(Violation("T1", (x,), f"bag {x} holds unknown vertices {sorted(unknown)}"))
        covered |= bag
    for v in sorted(verts - covered):
        out.append(Violation("T1", (v,), f"vertex {v} is in no bag"))

    for u, v in g.edges():
        if not any(u in b and v in b for b in t.bags):
            out.append(Violation("T2", (u, v), f"edge {u}-{v} is in no bag"))

    for v in sorted(covered):
        heads = [x for x in range(n) if v in t.bags[x] and (t.parent[x] < 0 or v not in t.bags[t.parent[x]])]
        if len(heads) != 1:
            out.append(Violation("T3", (v,), f"nodes containing {v} form {len(heads)} subtrees"))

    if p is not None and "T3" not in {o.prop for o in out}:
        top = t.topmost()
        for u in sorted(top):
            for v in sorted(top):
                if u != v and top[u] != top[v] and t.is_ancestor(top[u], top[v]) and p.lt(v, u):
                    out.append(
                        Violation("T4", (u, v), f"{u} is introduced above {v} but {v} <= {u} in the poset")
                    )
    return DecompositionReport(out)


def decomposition_to_ordering(t: DependencyTreeDecomposition, p: DependencyPoset, g: PrimalGraph) -> tuple:
    """Compatible elimination ordering of width at most the decomposition's.

    Eliminates, among the poset-maximal remaining vertices, the smallest id
    whose current closed neighbourhood fits in one (restricted) bag; that
    keeps the restricted decomposition valid for the growing fill-in graph.
    """
    report = validate_decomposition(g, p, t)
    if not report.ok:
        v = report.violations[0]
        raise DecompositionError(f"invalid decomposition ({v.prop}): {v.message}")

    bags_of = {v: [] for v in g.vertices}
    for x, bag in enumerate(t.bags):
        for v in bag:
            bags_of[v].append(bag)
    remaining = set(g.vertices)
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    order = []
    while remaining:
        cands = [v for v in sorted(remaining) if not (p.above(v) & remaining)]
        pick = None
        for v in cands:
            closed = adj[v] | {v}
            if any(closed <= (bag & remaining) for bag in bags_of[v]):
                pick = v
                break
        if pick is None:
            # only reachable for posets whose relations cross separated branches
            pick = min(cands, key=lambda v: (len(adj[v]), v))
            log.warning("no bag-respecting choice left; eliminating %s greedily", pick)
        nb = adj[pick]
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(pick)
        del adj[pick]
        remaining.discard(pick)
        order.append(pick)
    return tuple(order)


# ---------------------------------------------------------------------------
# "s td" text format


def format_td(t: DependencyTreeDecomposition, g: PrimalGraph) -> str:
    width1 = max((len(b) for b in t.bags), default=0)
    lines = [f"s td {len(t.bags)} {width1} {len(g.vertices)}"]
    for x, bag in enumerate(t.bags):
        lines.append(" ".join(["b", str(x + 1)] + [str(v) for v in sorted(bag)] + ["0"]))
    for x, par in enumerate(t.parent):
        if par >= 0:
            lines.append(f"e {par + 1} {x + 1}")
    lines.append(f"r {t.root + 1}")
    return "\n".join(lines) + "\n"


def parse_td(text) -> DependencyTreeDecomposition:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    n_nodes = None
    bags = {}
    parent = {}
    root = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if parts[1] != "td" or len(parts) != 5:
                    raise DecompositionError(f"line {lineno}: malformed header")
                n_nodes = int(parts[2])
            elif parts[0] == "b":
                vals = [int(x) for x in parts[1:]]
                if not vals or vals[-1] != 0:
                    raise DecompositionError(f"line {lineno}: bag line not terminated by 0")
                bags[vals[0] - 1] = frozenset(vals[1:-1])
            elif parts[0] == "e":
                parent[int(parts[2]) - 1] = int(parts[1]) - 1
            elif parts[0] == "r":
                root = int(parts[1]) - 1
            else:
                raise DecompositionError(f"line {lineno}: unknown record {parts[0]!r}")
        except (ValueError, IndexError):
            raise DecompositionError(f"line {lineno}: malformed record") from None
    if n_nodes is None:
        raise DecompositionError("missing 's td' header")
    if sorted(bags) != list(range(n_nodes)):
        raise DecompositionError("bag ids do not match the announced node count")
    par = tuple(parent.get(x, -1) for x in range(n_nodes))
    t = DependencyTreeDecomposition(tuple(bags[x] for x in range(n_nodes)), par)
    if root is not None and t.root != root:
        raise DecompositionError("root line disagrees with the edge list")
    return t
