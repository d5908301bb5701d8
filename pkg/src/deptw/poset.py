"""Dependency posets over QBF variables.

Relations are kept transitively closed as strict up/down sets per element,
so comparability queries are constant time.  ``relation`` exposes the
reflexive closure for callers that want the textbook view.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import BoundExceeded, PosetError
from .qbf import QbfInstance

LINEAR_EXTENSION_BOUND = 10


@dataclass(frozen=True)
class DependencyPoset:
    elements: tuple
    strict: frozenset  # pairs (u, v) with u < v, transitively closed

    @classmethod
    def from_pairs(cls, elements, pairs) -> "DependencyPoset":
        """Transitive closure of ``pairs``; raises on a cycle."""
        elements = tuple(sorted(set(elements)))
        known = set(elements)
        succ = {v: set() for v in elements}
        for u, v in pairs:
            if u not in known or v not in known:
                raise PosetError(f"pair ({u}, {v}) mentions an unknown element", pair=(u, v))
            if u != v:
                succ[u].add(v)
        closed = set()
        for s in elements:
            stack = list(succ[s])
            seen = set()
            while stack:
                w = stack.pop()
                if w in seen:
                    continue
                seen.add(w)
                stack.extend(succ[w])
            if s in seen:
                raise PosetError(f"cycle through {s}: relation is not antisymmetric", pair=(s, s))
            closed.update((s, w) for w in seen)
        return cls(elements, frozenset(closed))

    @cached_property
    def _up(self) -> dict:
        up = {v: set() for v in self.elements}
        for u, v in self.strict:
            up[u].add(v)
        return {v: frozenset(s) for v, s in up.items()}

    @cached_property
    def _down(self) -> dict:
        down = {v: set() for v in self.elements}
        for u, v in self.strict:
            down[v].add(u)
        return {v: frozenset(s) for v, s in down.items()}

    def above(self, v) -> frozenset:
        """Elements strictly greater than ``v``."""
        return self._up[v]

    def below(self, v) -> frozenset:
        return self._down[v]

    def lt(self, u, v) -> bool:
        return (u, v) in self.strict

    def leq(self, u, v) -> bool:
        return u == v or (u, v) in self.strict

    def comparable(self, u, v) -> bool:
        return self.leq(u, v) or self.leq(v, u)

    @property
    def relation(self) -> frozenset:
        return self.strict | {(v, v) for v in self.elements}

    def cover_pairs(self) -> list:
        """Hasse diagram edges, sorted."""
        out = []
        for u, v in self.strict:
            if not (self._up[u] & self._down[v]):
                out.append((u, v))
        return sorted(out)

    def maximal(self, subset) -> list:
        subset = set(subset)
        return sorted(v for v in subset if not (self._up[v] & subset))

    def __len__(self):
        return len(self.elements)

    @cached_property
    def width(self) -> int:
        return len(chain_partition(self).chains)


def closure_is_identity(p: DependencyPoset) -> bool:
    return DependencyPoset.from_pairs(p.elements, p.strict) == p


def validate_poset(p: DependencyPoset, inst: QbfInstance | None = None) -> list:
    """Problems with ``p`` as human-readable strings (empty when valid).

    With an instance, also checks that every strict pair goes forward in the
    prefix.
    """
    problems = []
    elems = set(p.elements)
    for u, v in sorted(p.strict):
        if u not in elems or v not in elems:
            problems.append(f"pair ({u}, {v}) mentions an unknown element")
        if u == v:
            problems.append(f"strict relation contains ({u}, {u})")
        if (v, u) in p.strict:
            problems.append(f"antisymmetry violated by ({u}, {v})")
    for u, v in p.strict:
        for w in p._up.get(v, ()):
            if (u, w) not in p.strict:
                problems.append(f"not transitive: ({u}, {v}), ({v}, {w}) without ({u}, {w})")
    if inst is not None:
        pos = inst.position
        if set(inst.variables) != elems:
            problems.append("element set differs from the instance variables")
        for u, v in sorted(p.strict):
            if u in pos and v in pos and pos[u] >= pos[v]:
                problems.append(f"pair ({u}, {v}) goes against the prefix order")
    return problems


def build_trivial_poset(inst: QbfInstance) -> DependencyPoset:
    """u < v iff u's quantifier block lies strictly before v's."""
    block = inst.block_of
    vs = inst.variables
    pairs = frozenset(
        (u, v) for u in vs for v in vs if block[u] < block[v]
    )
    return DependencyPoset(tuple(sorted(vs)), pairs)


def poset_from_pairs(inst: QbfInstance, pairs) -> DependencyPoset:
    """Closed poset over the instance variables, checked against the prefix."""
    pos = inst.position
    for u, v in pairs:
        if u not in pos or v not in pos:
            bad = u if u not in pos else v
            raise PosetError(f"variable {bad} does not occur in the instance", pair=(u, v))
        if u != v and pos[u] > pos[v]:
            raise PosetError(f"pair ({u}, {v}): {u} comes after {v} in the prefix", pair=(u, v))
    p = DependencyPoset.from_pairs(inst.variables, pairs)
    problems = validate_poset(p, inst)
    if problems:
        raise PosetError(problems[0])
    return p


def parse_poset_file(text, inst: QbfInstance) -> DependencyPoset:
    """Read ``u v`` lines (meaning u <= v); ``#`` starts a comment line.

    The file is trusted to describe a sound dependency scheme; only the
    syntactic poset properties and prefix order are checked.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    pos = inst.position
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PosetError("expected two variable ids", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise PosetError(f"not an integer pair: {line!r}", lineno) from None
        for w in (u, v):
            if w not in pos:
                raise PosetError(f"unknown variable {w}", lineno, (u, v))
        if u != v and pos[u] > pos[v]:
            raise PosetError(
                f"pair ({u}, {v}) violates the prefix order: {u} is after {v}", lineno, (u, v)
            )
        pairs.append((u, v))
    return DependencyPoset.from_pairs(inst.variables, pairs)


def format_poset_file(pairs) -> str:
    return "".join(f"{u} {v}\n" for u, v in pairs)


def reverse_poset(p: DependencyPoset) -> DependencyPoset:
    # no prefix check: a reversed poset goes against the prefix by design
    return DependencyPoset(p.elements, frozenset((v, u) for u, v in p.strict))


def is_downward_closed(p: DependencyPoset, s) -> bool:
    s = set(s)
    unknown = s - set(p.elements)
    if unknown:
        raise PosetError(f"unknown elements {sorted(unknown)}")
    return all(p.below(a) <= s for a in s)


@dataclass(frozen=True)
class ChainPartition:
    chains: tuple  # tuple of tuples, each increasing in the poset

    @property
    def width(self) -> int:
        return len(self.chains)


def chain_partition(p: DependencyPoset) -> ChainPartition:
    """Minimum chain partition via maximum matching on the strict order.

    Each matched pair (u, v) puts v right after u in a chain; unmatched
    right-hand vertices start chains.  Chains are listed by first element.
    """
    elems = p.elements
    n = len(elems)
    if n == 0:
        return ChainPartition(())
    ix = {v: i for i, v in enumerate(elems)}
    rows, cols = [], []
    for u, v in sorted(p.strict):
        rows.append(ix[u])
        cols.append(ix[v])
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    nxt = {}
    has_prev = set()
    for i in range(n):
        j = int(match[i])
        if j >= 0:
            nxt[i] = j
            has_prev.add(j)
    chains = []
    for i in range(n):
        if i in has_prev:
            continue
        chain = [elems[i]]
        while i in nxt:
            i = nxt[i]
            chain.append(elems[i])
        chains.append(tuple(chain))
    chains.sort(key=lambda c: c[0])
    return ChainPartition(tuple(chains))


def enumerate_linear_extensions(
    p: DependencyPoset, bound: int = LINEAR_EXTENSION_BOUND
) -> Iterator[tuple]:
    """Every linear extension once, in lexicographic order of ids."""
    if len(p.elements) > bound:
        raise BoundExceeded(
            f"{len(p.elements)} elements exceed the linear-extension bound {bound}"
        )
    remaining_below = {v: len(p.below(v)) for v in p.elements}
    order = []
    n = len(p.elements)

    def rec():
        if len(order) == n:
            yield tuple(order)
            return
        for v in p.elements:
            if remaining_below[v] != 0:
                continue
            remaining_below[v] = -1
            for w in p.above(v):
                remaining_below[w] -= 1
            order.append(v)
            yield from rec()
            order.pop()
            for w in p.above(v):
                remaining_below[w] += 1
            remaining_below[v] = 0

    yield from rec()
