"""Dependency cops-and-robber game: arena, attractor solving, strategies.

Positions are handled internally as bitmasks over vertex indices of the
primal graph.  A cop position is ``(C, R)`` with ``R`` a non-empty component
of ``G - C``; a robber position is ``(C, C', R)`` where ``C'`` is the cop
placement announced for the next round.  The robber is caught when no
component of ``R - C'`` is left, i.e. the robber position has no successors.

Rule CM3 (new cops downward closed in the robber space) places cops on
poset-minimal vertices first: a new cop ``c`` is forbidden while some
uncovered robber vertex ``r`` satisfies ``r <= c``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .decomp import (
    DependencyTreeDecomposition,
    decomposition_to_ordering,
    validate_decomposition,
)
from .errors import DecompositionError, StrategyError
from .poset import DependencyPoset
from .qbf import PrimalGraph, guards


# -- bitmask helpers ---------------------------------------------------------------


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _components(nbr, space):
    """Components of the subgraph induced by ``space``, ordered by lowest bit."""
    out = []
    while space:
        comp = space & -space
        frontier = comp
        while frontier:
            reach = 0
            for i in _bits(frontier):
                reach |= nbr[i]
            frontier = reach & space & ~comp
            comp |= frontier
        out.append(comp)
        space &= ~comp
    return out


def _guards(nbr, r):
    out = 0
    for i in _bits(r):
        out |= nbr[i]
    return out & ~r


class _Space:
    """Index-space view of (G, P) shared by arena construction and checks."""

    def __init__(self, g: PrimalGraph, p: DependencyPoset):
        self.g = g
        self.p = p
        self.nbr = g.nbr_mask
        self.full = (1 << len(g.vertices)) - 1
        self.below = [g.to_mask(p.below(v)) for v in g.vertices]

    def below_any(self, x):
        out = 0
        for i in _bits(x):
            out |= self.below[i]
        return out

    def cm3(self, c, c2, r):
        new = c2 & ~c
        return not (r & ~c2 & self.below_any(new))

    def legal(self, c, r, c2, r2):
        # CM1: R and R' inside one component of G - (C & C')
        if r2:
            keep = c & c2
            space = self.full & ~keep
            comp = next(x for x in _components(self.nbr, space) if x & r) if r else 0
            if not r or (r | r2) & ~comp:
                return False
        # CM2
        if _guards(self.nbr, r) & ~c2:
            return False
        return self.cm3(c, c2, r)

    def is_position(self, c, r):
        if not r:
            return True
        if r & c:
            return False
        return r in _components(self.nbr, self.full & ~c)


def is_legal_move(g: PrimalGraph, p: DependencyPoset, src, dst) -> bool:
    """CM1, CM2 and CM3 for a move between positions ``(C, R)``."""
    sp = _Space(g, p)
    (c, r), (c2, r2) = src, dst
    c, r, c2, r2 = (g.to_mask(x) for x in (c, r, c2, r2))
    if not sp.is_position(c, r) or not sp.is_position(c2, r2):
        return False
    return sp.legal(c, r, c2, r2)


# -- arena ---------------------------------------------------------------------


@dataclass
class Arena:
    """Bipartite game graph over reachable positions.

    Robber vertex 0 is the start.  ``cop_succ[i]`` lists robber vertices,
    ``rob_succ[j]`` lists cop vertices.
    """

    graph: PrimalGraph
    poset: DependencyPoset
    omega: int
    cop_pos: list = field(default_factory=list)  # (C, R) masks
    rob_pos: list = field(default_factory=list)  # (C, C', R) masks; index 0 is None
    cop_succ: list = field(default_factory=list)
    rob_succ: list = field(default_factory=list)

    @property
    def n_vertices(self) -> int:
        return len(self.cop_pos) + len(self.rob_pos)

    @property
    def n_arcs(self) -> int:
        return sum(map(len, self.cop_succ)) + sum(map(len, self.rob_succ))

    def cop_position(self, i):
        c, r = self.cop_pos[i]
        return self.graph.from_mask(c), self.graph.from_mask(r)

    def robber_position(self, j):
        if j == 0:
            return None
        c, c2, r = self.rob_pos[j]
        g = self.graph
        return g.from_mask(c), g.from_mask(c2), g.from_mask(r)


def build_arena(g: PrimalGraph, p: DependencyPoset, omega: int) -> Arena:
    """Arena for ``omega`` cops, restricted to positions reachable from start.

    Candidate placements are ``C' = guards(R) | X`` with ``X`` a subset of
    ``R`` that satisfies CM3 and keeps ``|C'| <= omega``.
    """
    if omega < 1:
        raise ValueError("omega must be at least 1")
    sp = _Space(g, p)
    nbr = sp.nbr
    n = len(g.vertices)
    arena = Arena(g, p, omega)
    cop_index = {}
    rob_index = {}
    arena.rob_pos.append(None)
    arena.rob_succ.append([])
    queue = deque()

    def cop_vertex(c, r):
        key = (c, r)
        i = cop_index.get(key)
        if i is None:
            i = len(arena.cop_pos)
            cop_index[key] = i
            arena.cop_pos.append(key)
            arena.cop_succ.append([])
            queue.append(i)
        return i

    for comp in _components(nbr, sp.full):
        arena.rob_succ[0].append(cop_vertex(0, comp))

    while queue:
        i = queue.popleft()
        c, r = arena.cop_pos[i]
        delta = _guards(nbr, r)
        free = omega - bin(delta).count("1")
        if free < 0:
            continue
        r_bits = list(_bits(r))
        succ = arena.cop_succ[i]
        for size in range(0, min(free, len(r_bits)) + 1):
            for pick in combinations(r_bits, size):
                x = 0
                for b in pick:
                    x |= 1 << b
                c2 = delta | x
                if not sp.cm3(c, c2, r):
                    continue
                key = (c, c2, r)
                j = rob_index.get(key)
                if j is None:
                    j = len(arena.rob_pos)
                    rob_index[key] = j
                    arena.rob_pos.append(key)
                    arena.rob_succ.append([cop_vertex(c2, r2) for r2 in _components(nbr, r & ~c2)])
                succ.append(j)
    assert n == 0 or len(arena.cop_pos) <= n ** (omega + 1)
    return arena


@dataclass
class GameSolution:
    cop_wins: list  # bool per cop vertex
    rob_wins: list  # bool per robber vertex ("wins" for the cop player)
    cop_strategy: dict  # cop vertex -> robber vertex
    cop_rank: dict
    rob_rank: dict

    @property
    def start_won(self) -> bool:
        return self.rob_wins[0]


def solve_game(arena: Arena) -> GameSolution:
    """Cop attractor of the robber dead ends, with round numbers as ranks.

    FIFO processing makes every vertex's rank its fixpoint round: a cop
    vertex is one round after its best successor, a robber vertex one round
    after its slowest successor.  Linear in vertices plus arcs.
    """
    nc, nr = len(arena.cop_pos), len(arena.rob_pos)
    cop_pred = [[] for _ in range(nc)]
    rob_pred = [[] for _ in range(nr)]
    for i, succ in enumerate(arena.cop_succ):
        for j in succ:
            rob_pred[j].append(i)
    for j, succ in enumerate(arena.rob_succ):
        for i in succ:
            cop_pred[i].append(j)

    cop_win = [False] * nc
    rob_win = [False] * nr
    pending = [len(set(s)) for s in arena.rob_succ]
    strategy = {}
    cop_rank = {}
    rob_rank = {}
    queue = deque()
    for j in range(nr):
        if pending[j] == 0:
            rob_win[j] = True
            rob_rank[j] = 0
            queue.append(("r", j))
    while queue:
        kind, x = queue.popleft()
        if kind == "r":
            for i in rob_pred[x]:
                if not cop_win[i]:
                    cop_win[i] = True
                    strategy[i] = x
                    cop_rank[i] = rob_rank[x] + 1
                    queue.append(("c", i))
        else:
            for j in set(cop_pred[x]):
                if rob_win[j]:
                    continue
                pending[j] -= 1
                if pending[j] == 0:
                    rob_win[j] = True
                    rob_rank[j] = cop_rank[x] + 1
                    queue.append(("r", j))
    return GameSolution(cop_win, rob_win, strategy, cop_rank, rob_rank)


# -- strategy trees --------------------------------------------------------------


@dataclass(frozen=True)
class StrategyTree:
    """Cop strategy as a rooted tree.

    ``alpha[t]`` is the cop placement at node ``t``; ``beta[t]`` labels the
    edge from ``t``'s parent (the robber space the cops answered), ``None``
    at the root.
    """

    alpha: tuple
    beta: tuple
    parent: tuple

    @property
    def root(self) -> int:
        return self.parent.index(-1)

    def children(self, t) -> list:
        return [x for x, par in enumerate(self.parent) if par == t]

    @property
    def cops(self) -> int:
        return max((len(a) for a in self.alpha), default=0)


def extract_strategy(arena: Arena, sol: GameSolution, g: PrimalGraph | None = None) -> StrategyTree:
    """Unfold the memoryless winning strategy from the start vertex."""
    if not sol.start_won:
        raise StrategyError("the robber wins this arena; no cop strategy to extract")
    g = g or arena.graph
    alpha, beta, parent = [frozenset()], [None], [-1]
    stack = [(0, cop_i) for cop_i in reversed(arena.rob_succ[0])]
    while stack:
        par, i = stack.pop()
        j = sol.cop_strategy[i]
        _, c2, r = arena.rob_pos[j]
        node = len(alpha)
        alpha.append(g.from_mask(c2))
        beta.append(g.from_mask(r))
        parent.append(par)
        for nxt in reversed(arena.rob_succ[j]):
            if sol.cop_rank[nxt] >= sol.cop_rank[i]:
                raise StrategyError("rank did not decrease along the strategy")
            stack.append((node, nxt))
    return StrategyTree(tuple(alpha), tuple(beta), tuple(parent))


def validate_strategy(g: PrimalGraph, p: DependencyPoset, s: StrategyTree) -> list:
    """Violations of CS1/CS2 as ``(rule, node, message)`` triples."""
    sp = _Space(g, p)
    out = []
    root = s.root
    if s.alpha[root]:
        out.append(("CS1", root, "root places cops"))
    comps = sorted(g.components(), key=min)
    kids = s.children(root)
    labels = [s.beta[k] for k in kids]
    if sorted(labels, key=lambda x: min(x) if x else -1) != comps:
        out.append(("CS1", root, "root children do not match the components of G"))
    for t in range(len(s.alpha)):
        if t == root:
            continue
        par = s.parent[t]
        c = g.to_mask(s.alpha[par])
        r = g.to_mask(s.beta[t])
        c2 = g.to_mask(s.alpha[t])
        if not sp.is_position(c, r):
            out.append(("CS2", t, "edge label is not a robber component"))
            continue
        kids = s.children(t)
        want = [x for x in _components(sp.nbr, sp.full & ~c2) if not x & ~r]
        got = [g.to_mask(s.beta[k]) for k in kids]
        if sorted(got) != sorted(want) or len(set(got)) != len(got):
            out.append(("CS2", t, "children do not enumerate the robber's escapes"))
        targets = got or [0]
        for r2 in targets:
            if not sp.legal(c, r, c2, r2):
                out.append(("CS2", t, "illegal cop move"))
                break
    return out


def normalize_strategy(g: PrimalGraph, s: StrategyTree) -> StrategyTree:
    """Drop cops outside guards(beta) | beta at every non-root node."""
    alpha = list(s.alpha)
    for t in range(len(alpha)):
        if s.beta[t] is None:
            continue
        keep = guards(g, s.beta[t]) | s.beta[t]
        alpha[t] = alpha[t] & keep
    return StrategyTree(tuple(alpha), s.beta, s.parent)


def strategy_to_decomposition(s: StrategyTree, g: PrimalGraph, p: DependencyPoset) -> DependencyTreeDecomposition:
    s = normalize_strategy(g, s)
    return DependencyTreeDecomposition(tuple(s.alpha), s.parent)


def normalize_decomposition(t: DependencyTreeDecomposition, g: PrimalGraph) -> DependencyTreeDecomposition:
    """Empty root, and every child subtree covering exactly one component
    of G minus its parent's bag (subtrees are copied and restricted per
    component where needed; subtrees adding nothing are dropped)."""
    bags, parent = [frozenset()], [-1]

    def cover(x, restrict):
        out = set()
        stack = [x]
        while stack:
            u = stack.pop()
            out |= t.bags[u] & restrict
            stack.extend(t.children[u])
        return frozenset(out)

    everything = frozenset(g.vertices)
    # (original node, restriction set, new parent id)
    work = []

    def expand(new_id, bag, kids, restrict):
        for c in kids:
            rest_cover = cover(c, restrict) - bag
            if not rest_cover:
                continue
            for comp in g.components(bag):
                if comp & rest_cover:
                    work.append((c, comp | bag, new_id))

    expand(0, frozenset(), [t.root], everything)
    while work:
        orig, restrict, par = work.pop(0)
        bag = t.bags[orig] & restrict
        new_id = len(bags)
        bags.append(bag)
        parent.append(par)
        expand(new_id, bag, t.children[orig], restrict)
    return DependencyTreeDecomposition(tuple(bags), tuple(parent))


def decomposition_to_strategy(t: DependencyTreeDecomposition, g: PrimalGraph, p: DependencyPoset) -> StrategyTree:
    report = validate_decomposition(g, p, t)
    if not report.ok:
        v = report.violations[0]
        raise DecompositionError(f"invalid decomposition ({v.prop}): {v.message}")
    nt = normalize_decomposition(t, g)
    beta = [None]
    for x in range(1, len(nt.bags)):
        beta.append(nt.cover(x) - nt.bags[nt.parent[x]])
    return StrategyTree(nt.bags, tuple(beta), nt.parent)


# -- driver ------------------------------------------------------------------------


@dataclass
class GameResult:
    width: int | None  # None when the cap was exceeded
    decomposition: DependencyTreeDecomposition | None
    ordering: tuple | None
    strategy: StrategyTree | None
    arena_sizes: dict  # omega -> (vertices, arcs)


def treewidth_via_game(g: PrimalGraph, p: DependencyPoset, max_width: int | None = None) -> GameResult:
    """Least number of cops that win, minus one, with its witnesses."""
    if max_width is None:
        max_width = max(len(g.vertices) - 1, 0)
    sizes = {}
    for omega in range(1, max_width + 2):
        arena = build_arena(g, p, omega)
        sizes[omega] = (arena.n_vertices, arena.n_arcs)
        sol = solve_game(arena)
        if sol.start_won:
            strat = extract_strategy(arena, sol, g)
            td = strategy_to_decomposition(strat, g, p)
            order = decomposition_to_ordering(td, p, g)
            return GameResult(omega - 1, td, order, strat, sizes)
    return GameResult(None, None, None, None, sizes)
