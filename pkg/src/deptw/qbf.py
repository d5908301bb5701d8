"""QBF data model: clauses, prenex instances, QDIMACS I/O, primal graphs.

Literals are signed integers in the DIMACS convention (``3`` is x3, ``-3``
its negation).  A clause is a tuple of literals in canonical order, sorted
by ``(variable, polarity)``.  Instances are normalized on construction:
duplicate literals and duplicate clauses are merged, tautological clauses
are dropped, free matrix variables are bound existentially in a new
outermost block, and prefix variables that do not occur in the matrix are
removed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import GraphError, QdimacsError

log = logging.getLogger(__name__)

EXISTS = "e"
FORALL = "a"

Clause = tuple  # tuple[int, ...], canonical literal order


def lit_key(lit: int):
    return (abs(lit), lit > 0)


def make_clause(lits: Iterable[int]) -> Clause:
    """Canonical clause from arbitrary literals (duplicates removed)."""
    return tuple(sorted(set(lits), key=lit_key))


def is_tautological(clause: Iterable[int]) -> bool:
    lits = set(clause)
    return any(-l in lits for l in lits)


def clause_vars(clause: Clause) -> frozenset:
    return frozenset(abs(l) for l in clause)


@dataclass(frozen=True)
class NormalizationReport:
    tautologies_dropped: int = 0
    duplicate_clauses: int = 0
    free_vars_bound: tuple = ()
    unused_vars_dropped: tuple = ()
    warnings: tuple = ()


@dataclass(frozen=True)
class QbfInstance:
    """Prenex CNF formula.

    ``prefix`` is a tuple of ``(variable, quantifier)`` pairs, outermost
    first; ``clauses`` keeps first-occurrence order so output is stable.
    Build through :meth:`build` to get the normalization guarantees.
    """

    prefix: tuple
    clauses: tuple
    report: NormalizationReport = field(default=NormalizationReport(), compare=False)

    @classmethod
    def build(cls, prefix, clauses) -> "QbfInstance":
        seen_vars = set()
        for v, q in prefix:
            if q not in (EXISTS, FORALL):
                raise ValueError(f"unknown quantifier {q!r}")
            if v < 1:
                raise ValueError(f"invalid variable id {v}")
            if v in seen_vars:
                raise ValueError(f"variable {v} quantified twice")
            seen_vars.add(v)

        taut = dups = 0
        kept = []
        index = set()
        for raw in clauses:
            if any(l == 0 for l in raw):
                raise ValueError("literal 0 inside a clause")
            c = make_clause(raw)
            if is_tautological(c):
                taut += 1
                continue
            if c in index:
                dups += 1
                continue
            index.add(c)
            kept.append(c)

        used = set()
        for c in kept:
            used.update(abs(l) for l in c)
        free = tuple(sorted(used - seen_vars))
        full_prefix = [(v, EXISTS) for v in free] + list(prefix)
        unused = tuple(v for v, _ in full_prefix if v not in used)
        final_prefix = tuple((v, q) for v, q in full_prefix if v in used)

        if taut:
            log.warning("dropped %d tautological clause(s)", taut)
        report = NormalizationReport(
            tautologies_dropped=taut,
            duplicate_clauses=dups,
            free_vars_bound=free,
            unused_vars_dropped=unused,
        )
        return cls(final_prefix, tuple(kept), report)

    @cached_property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.prefix)

    @cached_property
    def quantifier(self) -> dict:
        return dict(self.prefix)

    @cached_property
    def position(self) -> dict:
        return {v: i for i, (v, _) in enumerate(self.prefix)}

    @cached_property
    def block_of(self) -> dict:
        """Index of the quantifier block of each variable."""
        out = {}
        block = -1
        prev = None
        for v, q in self.prefix:
            if q != prev:
                block += 1
                prev = q
            out[v] = block
        return out

    def blocks(self) -> list:
        out = []
        for v, q in self.prefix:
            if out and out[-1][0] == q:
                out[-1][1].append(v)
            else:
                out.append((q, [v]))
        return out

    def is_existential(self, v: int) -> bool:
        return self.quantifier[v] == EXISTS

    def is_universal(self, v: int) -> bool:
        return self.quantifier[v] == FORALL

    @property
    def n_vars(self) -> int:
        return len(self.prefix)


# ---------------------------------------------------------------------------
# QDIMACS


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise QdimacsError(f"not an integer: {exc}", lineno) from None


def parse_qdimacs(text) -> QbfInstance:
    """Parse QDIMACS text (``str`` or ``bytes``) into a normalized instance.

    Clauses may span several lines; quantifier lines must be closed by ``0``
    on the same line and must precede all clauses.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")

    header = None
    prefix = []
    quantified = set()
    clauses = []
    current = []
    current_start = None
    seen_clause = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise QdimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise QdimacsError("malformed header, expected 'p cnf <nvars> <nclauses>'", lineno)
            nvars, ncls = _ints(parts[2:], lineno)
            if nvars < 0 or ncls < 0:
                raise QdimacsError("negative count in header", lineno)
            header = (nvars, ncls)
            continue
        if header is None:
            raise QdimacsError("data before 'p cnf' header", lineno)
        nvars = header[0]

        if line[0] in "ea" and (len(line) == 1 or line[1].isspace()):
            if seen_clause or current:
                raise QdimacsError("quantifier line after clauses", lineno)
            parts = line.split()
            vals = _ints(parts[1:], lineno)
            if not vals or vals[-1] != 0:
                raise QdimacsError("quantifier line not terminated by 0", lineno)
            for v in vals[:-1]:
                if v <= 0 or v > nvars:
                    raise QdimacsError(f"variable {v} out of range 1..{nvars}", lineno)
                if v in quantified:
                    raise QdimacsError(f"variable {v} quantified twice", lineno)
                quantified.add(v)
                prefix.append((v, parts[0]))
            continue

        for lit in _ints(line.split(), lineno):
            if lit == 0:
                clauses.append(current)
                current = []
                current_start = None
                seen_clause = True
                continue
            if abs(lit) > nvars:
                raise QdimacsError(f"variable {abs(lit)} out of range 1..{nvars}", lineno)
            if current_start is None:
                current_start = lineno
            current.append(lit)

    if header is None:
        raise QdimacsError("missing 'p cnf' header")
    if current:
        raise QdimacsError("unterminated clause", current_start)

    inst = QbfInstance.build(prefix, clauses)
    if len(clauses) != header[1]:
        msg = f"header announces {header[1]} clauses, found {len(clauses)}"
        log.warning(msg)
        inst = replace(inst, report=replace(inst.report, warnings=(msg,)))
    return inst


def to_qdimacs(inst: QbfInstance) -> str:
    nvars = max(inst.variables, default=0)
    lines = [f"p cnf {nvars} {len(inst.clauses)}"]
    for q, vs in inst.blocks():
        lines.append(q + " " + " ".join(map(str, vs)) + " 0")
    for c in inst.clauses:
        lines.append(" ".join(map(str, c + (0,))))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# primal graph


@dataclass(frozen=True, eq=False)
class PrimalGraph:
    """Simple undirected graph over integer vertex ids."""

    vertices: tuple
    adjacency: Mapping[int, frozenset]

    @classmethod
    def from_edges(cls, vertices, edges) -> "PrimalGraph":
        adj = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                continue
            if u not in adj or v not in adj:
                raise GraphError(f"edge {u}-{v} uses an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        return cls(tuple(sorted(adj)), {v: frozenset(s) for v, s in adj.items()})

    def __eq__(self, other):
        if not isinstance(other, PrimalGraph):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.adjacency) == dict(other.adjacency)

    __hash__ = None

    def __len__(self):
        return len(self.vertices)

    def neighbors(self, v) -> frozenset:
        return self.adjacency[v]

    def has_edge(self, u, v) -> bool:
        return v in self.adjacency.get(u, ())

    def edges(self) -> list:
        return sorted((u, v) for u in self.vertices for v in self.adjacency[u] if u < v)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.adjacency.values()) // 2

    # index-space views used by the numeric kernels
    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adj_matrix(self) -> np.ndarray:
        n = len(self.vertices)
        m = np.zeros((n, n), dtype=np.bool_)
        ix = self.index
        for u in self.vertices:
            for v in self.adjacency[u]:
                m[ix[u], ix[v]] = True
        return m

    @cached_property
    def csr(self):
        ix = self.index
        indptr = np.zeros(len(self.vertices) + 1, dtype=np.int64)
        indices = []
        for i, u in enumerate(self.vertices):
            nb = sorted(ix[v] for v in self.adjacency[u])
            indices.extend(nb)
            indptr[i + 1] = len(indices)
        return indptr, np.asarray(indices, dtype=np.int64)

    @cached_property
    def nbr_mask(self) -> list:
        """Neighbourhood bitmask per vertex index."""
        ix = self.index
        out = []
        for u in self.vertices:
            m = 0
            for v in self.adjacency[u]:
                m |= 1 << ix[v]
            out.append(m)
        return out

    def to_mask(self, vs) -> int:
        ix = self.index
        m = 0
        for v in vs:
            m |= 1 << ix[v]
        return m

    def from_mask(self, mask: int) -> frozenset:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self.vertices[i])
            mask >>= 1
            i += 1
        return frozenset(out)

    def components(self, removed=frozenset()) -> list:
        """Connected components of G minus ``removed``, each a frozenset,
        listed by ascending minimum vertex."""
        removed = set(removed)
        seen = set(removed)
        comps = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = {s}
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return comps


def build_primal_graph(inst: QbfInstance) -> PrimalGraph:
    edges = set()
    for c in inst.clauses:
        vs = sorted({abs(l) for l in c})
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                edges.add((u, v))
    used = set()
    for c in inst.clauses:
        used.update(abs(l) for l in c)
    return PrimalGraph.from_edges(sorted(used), edges)


def guards(g: PrimalGraph, s) -> frozenset:
    """Vertices outside ``s`` with at least one neighbour inside it."""
    s = frozenset(s)
    unknown = s - set(g.adjacency)
    if unknown:
        raise GraphError(f"unknown vertices {sorted(unknown)}")
    out = set()
    for v in s:
        out.update(g.adjacency[v])
    return frozenset(out - s)


# ---------------------------------------------------------------------------
# instance families


@dataclass(frozen=True)
class FamilyInstance:
    instance: QbfInstance
    poset_pairs: tuple | None  # generating pairs (u, v) meaning u <= v, or None
    names: Mapping[int, str]


def _family_a(i):
    xs = list(range(1, i + 1))
    y, x = i + 1, i + 2
    prefix = [(v, EXISTS) for v in xs] + [(y, FORALL), (x, EXISTS)]
    clauses = [(y, x)] + [(xj, x) for xj in xs]
    names = {j: f"x{j}" for j in xs}
    names.update({y: "y", x: "x"})
    return prefix, clauses, ((y, x),), names


def _family_b(i):
    top = 2 ** i + 1
    prefix = [(v, EXISTS if v % 2 else FORALL) for v in range(1, top + 1)]
    clauses = []
    for j in range(1, 2 ** (i - 1) + 1):
        clauses.append((j, 2 * j))
        clauses.append((j, 2 * j + 1))
    return prefix, clauses, None, {v: f"x{v}" for v in range(1, top + 1)}


def _family_e(i):
    prefix = [(v, FORALL) for v in range(1, i + 1)]
    clauses = [(p, q) for p in range(1, i + 1) for q in range(p + 1, i + 1)]
    return prefix, clauses, None, {v: f"x{v}" for v in range(1, i + 1)}


def _family_f(i):
    def xv(j):
        return j

    def yv(j):
        return 2 * i + j

    z = 4 * i + 1
    prefix = []
    for j in range(2 * i, 0, -1):
        q = FORALL if j % 2 == 0 else EXISTS
        prefix += [(xv(j), q), (yv(j), q)]
    prefix.append((z, FORALL))
    clauses = [(z, xv(1), yv(1))]
    for j in range(1, 2 * i):
        clauses.append((xv(j), xv(j + 1)))
        clauses.append((yv(j), yv(j + 1)))
    for j in range(1, i + 1):
        clauses.append((xv(2 * j - 1), yv(1)))
    pairs = []
    for j in range(2 * i, 1, -1):
        pairs.append((xv(j), xv(j - 1)))
        pairs.append((yv(j), yv(j - 1)))
    pairs += [(xv(1), z), (yv(1), z)]
    names = {xv(j): f"x{j}" for j in range(1, 2 * i + 1)}
    names.update({yv(j): f"y{j}" for j in range(1, 2 * i + 1)})
    names[z] = "z"
    return prefix, clauses, tuple(sorted(pairs)), names


_FAMILIES = {"A": _family_a, "B": _family_b, "E": _family_e, "F": _family_f}


def generate_family(name: str, i: int) -> FamilyInstance:
    """Instance ``name_i`` of the families A, B, E, F.

    For A and F the refined (resolution-path) poset is returned as its
    generating pairs so callers need not compute a dependency scheme.
    """
    key = str(name).upper()
    if key not in _FAMILIES:
        raise ValueError(f"unknown family {name!r}; expected one of A, B, E, F")
    if not isinstance(i, int) or i < 1:
        raise ValueError(f"family index must be a positive integer, got {i!r}")
    prefix, clauses, pairs, names = _FAMILIES[key](i)
    return FamilyInstance(QbfInstance.build(prefix, clauses), pairs, names)
