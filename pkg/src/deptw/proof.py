"""Q-resolution refutations: data model, the ``dqrp`` text format, and a checker.

The checker only relies on the instance and the proof text; it re-derives
every clause from its antecedents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ProofFormatError
from .qbf import QbfInstance, is_tautological, make_clause

INPUT, RESOLUTION, REDUCTION = "I", "R", "U"


@dataclass(frozen=True)
class Step:
    id: int
    clause: tuple
    rule: str
    var: int | None  # pivot for R, reduced variable for U
    antecedents: tuple = ()


@dataclass(frozen=True)
class Refutation:
    ordering: tuple
    steps: tuple

    def derives_empty(self) -> bool:
        return any(not s.clause for s in self.steps)


def _format_step(s: Step) -> str:
    lits = " ".join(str(l) for l in s.clause)
    tail = f" {lits} 0" if lits else " 0"
    if s.rule == INPUT:
        head = f"{s.id} I 0"
    elif s.rule == RESOLUTION:
        head = f"{s.id} R {s.var} {s.antecedents[0]} {s.antecedents[1]} 0"
    elif s.rule == REDUCTION:
        head = f"{s.id} U {s.var} {s.antecedents[0]} 0"
    else:
        raise ValueError(f"unknown rule {s.rule!r}")
    return head + tail


def serialize(r: Refutation) -> bytes:
    lines = ["p dqrp 1", " ".join(["o"] + [str(v) for v in r.ordering] + ["0"])]
    lines.extend(_format_step(s) for s in r.steps)
    return ("\n".join(lines) + "\n").encode("ascii")


def _ints(parts, lineno):
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise ProofFormatError("expected integers", line=lineno) from None


def parse_proof(data) -> Refutation:
    """Parse the ``dqrp`` format.  Only syntax is checked here."""
    text = data.decode("ascii") if isinstance(data, (bytes, bytearray)) else data
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, p) for i, p in lines if p]
    if not lines or lines[0][1] != ["p", "dqrp", "1"]:
        raise ProofFormatError("missing 'p dqrp 1' header", line=lines[0][0] if lines else 1)
    if len(lines) < 2 or lines[1][1][0] != "o":
        raise ProofFormatError("missing ordering line", line=lines[1][0] if len(lines) > 1 else 2)
    oline, oparts = lines[1]
    order = _ints(oparts[1:], oline)
    if not order or order[-1] != 0 or 0 in order[:-1]:
        raise ProofFormatError("ordering line must end with a single 0", line=oline)
    steps = []
    last_id = 0
    for lineno, parts in lines[2:]:
        if len(parts) < 3:
            raise ProofFormatError("truncated step", line=lineno)
        rule = parts[1]
        sid = _ints(parts[:1], lineno)[0]
        nums = _ints(parts[2:], lineno)
        arity = {INPUT: 0, RESOLUTION: 3, REDUCTION: 2}.get(rule)
        if arity is None:
            raise ProofFormatError(f"unknown rule {rule!r}", line=lineno)
        if len(nums) < arity + 2 or nums[arity] != 0 or nums[-1] != 0:
            raise ProofFormatError("step is not terminated properly", line=lineno)
        lits = nums[arity + 1:-1]
        if 0 in lits:
            raise ProofFormatError("literal 0 inside a clause", line=lineno)
        if sid <= last_id:
            raise ProofFormatError(f"step id {sid} is not increasing", line=lineno)
        last_id = sid
        head = nums[:arity]
        var = head[0] if arity else None
        steps.append(Step(sid, tuple(lits), rule, var, tuple(head[1:])))
    return Refutation(tuple(order[:-1]), tuple(steps))


@dataclass
class CheckReport:
    verified: bool
    errors: list = field(default_factory=list)  # (step id or None, reason)
    notes: list = field(default_factory=list)

    def render(self) -> str:
        lines = ["VERIFIED" if self.verified else "REJECTED"]
        for sid, reason in self.errors:
            lines.append(f"  step {sid}: {reason}" if sid is not None else f"  {reason}")
        lines.extend(f"c {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def check_refutation(inst: QbfInstance, proof, poset=None) -> CheckReport:
    """Verify a refutation of ``inst`` under the prefix reverse(ordering)."""
    r = proof if isinstance(proof, Refutation) else parse_proof(proof)
    errors = []
    notes = []
    quant = inst.quantifier
    order = r.ordering
    if sorted(order) != sorted(inst.variables) or len(set(order)) != len(order):
        errors.append((None, "ordering line is not a permutation of the instance variables"))
        return CheckReport(False, errors, notes)
    # depth in the permuted prefix: the first eliminated variable is innermost
    depth = {v: len(order) - 1 - i for i, v in enumerate(order)}
    if poset is None:
        notes.append("prefix permutation trusted: no dependency poset was given")
    else:
        bad = [(u, v) for u, v in sorted(poset.strict) if depth[u] > depth[v]]
        if bad:
            u, v = bad[0]
            errors.append((None, f"ordering is not compatible with the poset ({u} < {v})"))
        else:
            notes.append("ordering compatible with the supplied poset")

    matrix = set(inst.clauses)
    known = {}
    empty_seen = False
    for s in r.steps:
        reason = _check_step(s, known, matrix, quant, depth)
        if reason:
            errors.append((s.id, reason))
        known[s.id] = make_clause(s.clause) if not reason else None
        if not reason and not s.clause:
            empty_seen = True
    if not empty_seen:
        errors.append((None, "no valid step derives the empty clause"))
    return CheckReport(not errors, errors, notes)


def _antecedent(known, aid):
    if aid not in known:
        return None, f"antecedent {aid} is not an earlier step"
    if known[aid] is None:
        return None, f"antecedent {aid} is itself invalid"
    return known[aid], None


def _check_step(s: Step, known, matrix, quant, depth):
    if any(abs(l) not in quant for l in s.clause):
        return "clause mentions an unknown variable"
    if len(set(s.clause)) != len(s.clause):
        return "repeated literal"
    if is_tautological(s.clause):
        return "tautological clause"
    clause = make_clause(s.clause)
    if s.rule == INPUT:
        return None if clause in matrix else "input clause is not in the matrix"
    if s.rule == RESOLUTION:
        x = s.var
        if x not in quant:
            return f"unknown pivot {x}"
        if quant[x] != "e":
            return f"pivot {x} is not existential"
        a, err = _antecedent(known, s.antecedents[0])
        if err:
            return err
        b, err = _antecedent(known, s.antecedents[1])
        if err:
            return err
        if x not in a:
            return f"first antecedent lacks literal {x}"
        if -x not in b:
            return f"second antecedent lacks literal {-x}"
        resolvent = make_clause([l for l in a if l != x] + [l for l in b if l != -x])
        if is_tautological(resolvent):
            return "resolvent is tautological"
        if resolvent != clause:
            return "clause is not the resolvent of its antecedents"
        return None
    # universal reduction
    u = s.var
    if u not in quant:
        return f"unknown variable {u}"
    if quant[u] != "a":
        return f"reduced variable {u} is not universal"
    a, err = _antecedent(known, s.antecedents[0])
    if err:
        return err
    if u not in a and -u not in a:
        return f"antecedent does not contain variable {u}"
    if make_clause([l for l in a if abs(l) != u]) != clause:
        return "clause is not the antecedent minus the reduced literal"
    for l in a:
        if quant[abs(l)] == "e" and depth[abs(l)] > depth[u]:
            return f"reduction order violation: existential {abs(l)} is inner to {u}"
    return None
