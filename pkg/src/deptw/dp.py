"""Davis-Putnam style QBF evaluation along a dependency elimination ordering.

The prefix is first permuted to the reverse of the ordering (sound for a
compatible ordering of a dependency poset); then the innermost variable is
repeatedly eliminated, by resolution if existential and by dropping its
literals if universal.  Every clause carries a derivation record, so a
false verdict comes with a Q-resolution refutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decomp import check_compatibility, fill_in_graph
from .errors import InvariantError, OrderingError, SolverError
from .poset import DependencyPoset
from .proof import Refutation, Step
from .qbf import QbfInstance, build_primal_graph, clause_vars, is_tautological, make_clause


@dataclass
class SolveStats:
    max_clauses: int = 0
    max_clause_width: int = 0
    resolvents: int = 0
    tautologies_skipped: int = 0
    new_clauses_per_step: list = field(default_factory=list)
    derived_clauses: int = 0


@dataclass
class SolveResult:
    verdict: bool
    refutation: Refutation | None
    stats: SolveStats


class WorkingFormula:
    """Clause database with ids, derivation records and an occurrence index."""

    def __init__(self, inst: QbfInstance, order):
        self.quant = inst.quantifier
        self.prefix = list(reversed(order))  # innermost variable last
        self.clauses = {}  # id -> clause (live only)
        self.steps = []
        self.by_clause = {}  # live clause -> id
        self.occurs = {v: set() for v in self.prefix}
        self.next_id = 1
        self.empty_id = None
        for c in inst.clauses:
            self._add(c, "I", None, ())

    def _add(self, clause, rule, var, ants):
        """Insert unless an identical clause is live; returns (id, is_new)."""
        if clause in self.by_clause:
            return self.by_clause[clause], False
        cid = self.next_id
        self.next_id += 1
        self.clauses[cid] = clause
        self.by_clause[clause] = cid
        for l in clause:
            self.occurs[abs(l)].add(cid)
        self.steps.append(Step(cid, clause, rule, var, tuple(ants)))
        if not clause and self.empty_id is None:
            self.empty_id = cid
        return cid, True

    def _remove(self, cid):
        clause = self.clauses.pop(cid)
        del self.by_clause[clause]
        for l in clause:
            self.occurs[abs(l)].discard(cid)

    def innermost(self):
        return self.prefix[-1]

    def eliminate_existential(self, x):
        """Replace the clauses on ``x`` by their non-tautological resolvents."""
        if not self.prefix or self.prefix[-1] != x or self.quant[x] != "e":
            raise SolverError(f"{x} is not the innermost existential variable")
        pos = sorted(cid for cid in self.occurs[x] if x in self.clauses[cid])
        neg = sorted(cid for cid in self.occurs[x] if -x in self.clauses[cid])
        resolvents = []
        taut = 0
        for a in pos:
            for b in neg:
                lits = [l for l in self.clauses[a] if l != x] + [l for l in self.clauses[b] if l != -x]
                if is_tautological(lits):
                    taut += 1
                    continue
                resolvents.append((make_clause(lits), a, b))
        for cid in pos + neg:
            self._remove(cid)
        new = 0
        for clause, a, b in resolvents:
            _, fresh = self._add(clause, "R", x, (a, b))
            new += fresh
        self.prefix.pop()
        del self.occurs[x]
        return new, len(resolvents), taut

    def eliminate_universal(self, x):
        """Drop ``x`` and its negation from every clause."""
        if not self.prefix or self.prefix[-1] != x or self.quant[x] != "a":
            raise SolverError(f"{x} is not the innermost universal variable")
        touched = sorted(self.occurs[x])
        reduced = []
        for cid in touched:
            clause = self.clauses[cid]
            reduced.append((tuple(l for l in clause if abs(l) != x), cid))
            self._remove(cid)
        new = 0
        for clause, cid in reduced:
            _, fresh = self._add(clause, "U", x, (cid,))
            new += fresh
        self.prefix.pop()
        del self.occurs[x]
        return new

    def universal_clause(self):
        """Some live clause whose variables are all universal, if any."""
        for cid in sorted(self.clauses):
            if all(self.quant[abs(l)] == "a" for l in self.clauses[cid]):
                return cid
        return None

    def reduce_to_empty(self, cid):
        """Cascade of single-literal reductions, innermost variable first."""
        depth = {v: i for i, v in enumerate(self.prefix)}
        clause = self.clauses[cid]
        new = 0
        while clause:
            u = max((abs(l) for l in clause), key=depth.__getitem__)
            clause = tuple(l for l in clause if abs(l) != u)
            cid, fresh = self._add(clause, "U", u, (cid,))
            new += fresh
        return new


def solve(inst: QbfInstance, p: DependencyPoset, order, check_invariants: bool = False) -> SolveResult:
    """Decide ``inst`` along the compatible ordering ``order``.

    With ``check_invariants`` the working formula's primal graph is checked
    against the fill-in graph after every step, along with the per-step
    clause bound.
    """
    order = tuple(order)
    if set(order) != set(inst.variables) or len(order) != len(inst.variables):
        raise OrderingError("ordering does not match the instance variables")
    if not check_compatibility(order, p):
        raise OrderingError("ordering is not compatible with the dependency poset")

    w = WorkingFormula(inst, order)
    stats = SolveStats()
    if check_invariants:
        h = fill_in_graph(build_primal_graph(inst), order)
        k = max((len(h.later_neighbors(v)) for v in order), default=0)

    def snapshot():
        stats.max_clauses = max(stats.max_clauses, len(w.clauses))
        stats.max_clause_width = max(
            stats.max_clause_width, max((len(c) for c in w.clauses.values()), default=0)
        )

    def finish_false():
        stats.derived_clauses = len(w.steps) - len(inst.clauses)
        return SolveResult(False, Refutation(order, tuple(w.steps)), stats)

    snapshot()
    for x in order:
        if w.empty_id is not None:
            return finish_false()
        cid = w.universal_clause()
        if cid is not None:
            stats.new_clauses_per_step.append(w.reduce_to_empty(cid))
            return finish_false()
        if inst.quantifier[x] == "e":
            new, made, taut = w.eliminate_existential(x)
            stats.resolvents += made
            stats.tautologies_skipped += taut
        else:
            new = w.eliminate_universal(x)
        stats.new_clauses_per_step.append(new)
        snapshot()
        if check_invariants:
            _check_step(w, h, k, x, new)
    if w.empty_id is not None:
        return finish_false()
    if w.clauses:
        raise InvariantError("clauses left after eliminating every variable")
    stats.derived_clauses = len(w.steps) - len(inst.clauses)
    return SolveResult(True, None, stats)


def _check_step(w, h, k, x, new):
    if new > 3 ** k:
        raise InvariantError(f"step on {x} added {new} clauses, more than 3^{k}")
    for c in w.clauses.values():
        vs = sorted(clause_vars(c))
        if len(vs) > k + 1:
            raise InvariantError(f"clause {c} wider than k + 1 = {k + 1}")
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                if not h.has_edge(a, b):
                    raise InvariantError(f"edge {a}-{b} of the working formula is not a fill-in edge")
