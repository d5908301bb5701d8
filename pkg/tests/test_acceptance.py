"""Acceptance suite: one test per criterion, each with its time budget.

Run under pytest (a summary line per criterion is printed at the end) or
directly with ``python tests/test_acceptance.py``.
"""

import random
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from deptw.chain import min_width_via_chains, search_ordering
from deptw.decomp import (
    check_compatibility,
    decomposition_to_ordering,
    ordering_to_decomposition,
    ordering_width,
    validate_decomposition,
)
from deptw.dp import solve
from deptw.game import (
    decomposition_to_strategy,
    strategy_to_decomposition,
    treewidth_via_game,
    validate_strategy,
)
from deptw.oracle import brute_force_min_width, brute_force_truth
from deptw.poset import build_trivial_poset, poset_from_pairs
from deptw.proof import Refutation, Step, check_refutation, serialize
from deptw.qbf import build_primal_graph, generate_family

sys.path.insert(0, str(Path(__file__).parent))
from _corpus import family_corpus, full_corpus, random_corpus  # noqa: E402

RESULTS = {}


@contextmanager
def criterion(num, title, budget=None):
    start = time.perf_counter()
    ok = False
    detail = ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed >= budget:
            detail = f"over budget: {elapsed:.1f}s >= {budget}s"
            raise AssertionError(detail)
        ok = True
        detail = f"{elapsed:.1f}s" + (f" (budget {budget}s)" if budget else "")
    except BaseException as e:
        detail = detail or f"{type(e).__name__}: {e}"
        raise
    finally:
        RESULTS[num] = f"criterion {num} {title}: {'PASS' if ok else 'FAIL'} [{detail}]"
        print(RESULTS[num])


def _poset(fam, refined):
    inst = fam.instance
    return poset_from_pairs(inst, fam.poset_pairs) if refined else build_trivial_poset(inst)


# -- 1 ---------------------------------------------------------------------------

WIDTH_FIXTURES = (
    [("E", i, False, i - 1) for i in range(2, 8)]
    + [("A", i, False, i + 1) for i in range(1, 6)]
    + [("B", i, False, 1) for i in range(1, 4)]
    + [("A", i, True, 1) for i in range(1, 6)]
    + [("F", i, True, 2) for i in range(1, 3)]
)


def test_criterion_1_width_fixtures():
    with criterion(1, "width fixtures", budget=120):
        for name, i, refined, want in WIDTH_FIXTURES:
            fam = generate_family(name, i)
            g = build_primal_graph(fam.instance)
            p = _poset(fam, refined)
            game = treewidth_via_game(g, p).width
            chain, _ = min_width_via_chains(g, p)
            assert game == chain == want, (name, i, refined, game, chain, want)
            if name == "F":
                assert brute_force_min_width(g, p) == want


# -- 2, 3, 4 ---------------------------------------------------------------------


def _solve_with_bounds(inst, p):
    """Solve along a minimum-width ordering, asserting the clause bounds."""
    g = build_primal_graph(inst)
    _, order = min_width_via_chains(g, p)
    res = solve(inst, p, order, check_invariants=True)
    if not res.verdict:
        k = ordering_width(g, order)
        for new in res.stats.new_clauses_per_step:
            assert new <= 3 ** k, (new, k)
        assert len(res.refutation.steps) <= len(inst.clauses) + 3 ** k * len(inst.variables)
    return res


def _criterion2_cases():
    cases = [(lab, inst, p) for lab, inst, p in family_corpus() if len(inst.variables) <= 12]
    cases += [(f"random{k}", inst, build_trivial_poset(inst)) for k, inst in enumerate(random_corpus(500))]
    return cases


_FALSE_RUNS = []


def _false_runs():
    if not _FALSE_RUNS:
        for lab, inst, p in _criterion2_cases():
            res = _solve_with_bounds(inst, p)
            if not res.verdict:
                _FALSE_RUNS.append((lab, inst, p, res.refutation))
    return _FALSE_RUNS


def test_criterion_2_oracle_agreement():
    with criterion(2, "oracle agreement", budget=120):
        n = 0
        for lab, inst, p in _criterion2_cases():
            res = _solve_with_bounds(inst, p)
            assert res.verdict == brute_force_truth(inst), lab
            n += 1
        assert n >= 500


def test_criterion_3_proof_soundness():
    with criterion(3, "proof soundness", budget=60):
        runs = _false_runs()
        assert runs
        for lab, inst, p, ref in runs:
            assert check_refutation(inst, serialize(ref), p).verified, lab
        rng = random.Random(3)
        eligible = [
            r for r in runs
            if any(s.rule == "R" for s in r[3].steps) and any(s.rule != "I" and s.clause for s in r[3].steps)
        ]
        assert len(eligible) >= 50
        for lab, inst, p, ref in rng.sample(eligible, 50):
            for corrupt in (_flip_literal, _swap_antecedents, _drop_empty):
                bad = corrupt(ref, rng)
                assert not check_refutation(inst, serialize(bad), p).verified, (lab, corrupt.__name__)


def _replace_step(ref, idx, step):
    steps = list(ref.steps)
    steps[idx] = step
    return Refutation(ref.ordering, tuple(steps))


def _flip_literal(ref, rng):
    idx = rng.choice([i for i, s in enumerate(ref.steps) if s.rule != "I" and s.clause])
    s = ref.steps[idx]
    j = rng.randrange(len(s.clause))
    clause = s.clause[:j] + (-s.clause[j],) + s.clause[j + 1:]
    return _replace_step(ref, idx, Step(s.id, clause, s.rule, s.var, s.antecedents))


def _swap_antecedents(ref, rng):
    idx = rng.choice([i for i, s in enumerate(ref.steps) if s.rule == "R"])
    s = ref.steps[idx]
    return _replace_step(ref, idx, Step(s.id, s.clause, s.rule, s.var, s.antecedents[::-1]))


def _drop_empty(ref, rng):
    return Refutation(ref.ordering, tuple(s for s in ref.steps if s.clause))


def test_criterion_4_clause_count_bounds():
    with criterion(4, "clause-count bounds"):
        runs = _false_runs()  # bounds are asserted inside _solve_with_bounds
        assert runs


# -- 5, 6 ------------------------------------------------------------------------


def _small_corpus():
    out = []
    for lab, inst, p in full_corpus():
        g = build_primal_graph(inst)
        if len(g.vertices) <= 8:
            out.append((lab, g, p))
    return out


def test_criterion_5_equivalence_triangle():
    with criterion(5, "equivalence triangle", budget=300):
        for lab, g, p in _small_corpus():
            res = treewidth_via_game(g, p)
            best = brute_force_min_width(g, p)
            # (a) cop number = dependency treewidth + 1
            assert res.width + 1 == best + 1, lab
            # (c) witnesses are valid
            assert validate_strategy(g, p, res.strategy) == [], lab
            assert validate_decomposition(g, p, res.decomposition).ok, lab
            # (b) strategy -> decomposition -> strategy
            td = strategy_to_decomposition(res.strategy, g, p)
            assert validate_decomposition(g, p, td).ok, lab
            back = decomposition_to_strategy(td, g, p)
            assert validate_strategy(g, p, back) == [], lab
            assert back.cops <= res.strategy.cops, lab
            # (b) ordering -> decomposition -> ordering
            _, order = min_width_via_chains(g, p)
            td2 = ordering_to_decomposition(g, p, order)
            assert validate_decomposition(g, p, td2).ok, lab
            again = decomposition_to_ordering(td2, p, g)
            assert check_compatibility(again, p)
            assert ordering_width(g, again) <= ordering_width(g, order), lab
            assert ordering_width(g, res.ordering) == res.width, lab


def test_criterion_6_memo_soundness():
    with criterion(6, "memoization soundness", budget=120):
        for lab, g, p in _small_corpus():
            for omega in range(0, max(len(g.vertices), 1)):
                memo = search_ordering(g, p, omega, memo=True).ordering is not None
                plain = search_ordering(g, p, omega, memo=False).ordering is not None
                assert memo == plain, (lab, omega)


# -- 7 ---------------------------------------------------------------------------


def _cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "deptw", *args], cwd=cwd, capture_output=True, check=False
    )


def _cli_suite(workdir: Path):
    """Run every CLI command once in ``workdir``; return stdout and files."""
    outputs = []
    for fam, i in (("A", 3), ("E", 4), ("F", 1), ("B", 2)):
        r = _cli(["gen", fam, str(i), "--poset-out", f"{fam}{i}.poset"], workdir)
        (workdir / f"{fam}{i}.qdimacs").write_bytes(r.stdout)
        outputs.append(r.stdout)
    (workdir / "yx.qdimacs").write_text("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n")
    cmds = [
        ["width", "E4.qdimacs", "--algo", "game"],
        ["width", "E4.qdimacs", "--algo", "chain"],
        ["width", "A3.qdimacs", "--poset", "A3.poset"],
        ["width", "F1.qdimacs", "--poset", "F1.poset", "--algo", "game"],
        ["solve", "yx.qdimacs", "--proof", "yx.dqrp", "--ordering", "yx.ord"],
        ["solve", "A3.qdimacs", "--poset", "A3.poset", "--algo", "game"],
        ["solve", "B2.qdimacs", "--algo", "chain"],
        ["decompose", "F1.qdimacs", "--poset", "F1.poset", "--out", "F1.td", "--ordering", "F1.ord"],
        ["decompose", "E4.qdimacs", "--algo", "game"],
        ["check", "yx.qdimacs", "yx.dqrp"],
        ["oracle", "A3.qdimacs"],
    ]
    for c in cmds:
        r = _cli(c, workdir)
        outputs.append((c, r.returncode, r.stdout))
    files = {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}
    return outputs, files


def test_criterion_7_determinism(tmp_path):
    with criterion(7, "CLI determinism"):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir()
        b.mkdir()
        out_a, files_a = _cli_suite(a)
        out_b, files_b = _cli_suite(b)
        assert out_a == out_b
        assert files_a == files_b
        assert {"yx.dqrp", "yx.ord", "F1.td", "F1.ord"} <= set(files_a)


if __name__ == "__main__":
    import tempfile

    failed = 0
    tests = [
        test_criterion_1_width_fixtures,
        test_criterion_2_oracle_agreement,
        test_criterion_3_proof_soundness,
        test_criterion_4_clause_count_bounds,
        test_criterion_5_equivalence_triangle,
        test_criterion_6_memo_soundness,
    ]
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    with tempfile.TemporaryDirectory() as d:
        try:
            test_criterion_7_determinism(Path(d))
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
