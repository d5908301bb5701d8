import pytest

from deptw.dp import solve
from deptw.errors import ProofFormatError
from deptw.poset import build_trivial_poset
from deptw.proof import Refutation, Step, check_refutation, parse_proof, serialize
from deptw.qbf import QbfInstance

YX = QbfInstance.build([(1, "e"), (2, "a")], [(1, 2), (-1, -2)])


def _proof():
    return solve(YX, build_trivial_poset(YX), (2, 1)).refutation


def test_serialize_example():
    text = serialize(_proof()).decode()
    assert text == (
        "p dqrp 1\n"
        "o 2 1 0\n"
        "1 I 0 1 2 0\n"
        "2 I 0 -1 -2 0\n"
        "3 U 2 1 0 1 0\n"
        "4 U 2 2 0 -1 0\n"
        "5 R 1 3 4 0 0\n"
    )


def test_empty_clause_input():
    inst = QbfInstance.build([], [()])
    r = Refutation((), (Step(1, (), "I", None, ()),))
    assert serialize(r) == b"p dqrp 1\no 0\n1 I 0 0\n"
    assert check_refutation(inst, serialize(r)).verified


def test_round_trip_byte_identical():
    data = serialize(_proof())
    assert serialize(parse_proof(data)) == data


def test_verified_with_note():
    rep = check_refutation(YX, serialize(_proof()))
    assert rep.verified
    assert any("trusted" in n for n in rep.notes)
    rep = check_refutation(YX, serialize(_proof()), build_trivial_poset(YX))
    assert rep.verified


def test_universal_pivot_rejected():
    data = serialize(_proof()).replace(b"5 R 1 3 4", b"5 R 2 3 4")
    rep = check_refutation(YX, data)
    assert not rep.verified
    assert any("not existential" in reason for _, reason in rep.errors)


def test_reduction_order_violation():
    # with ordering (1, 2) the universal 2 is outer to the existential 1
    data = serialize(_proof()).replace(b"o 2 1 0", b"o 1 2 0")
    rep = check_refutation(YX, data)
    assert not rep.verified
    assert any("reduction order" in reason for _, reason in rep.errors)


def test_incompatible_ordering_flagged_with_poset():
    inst = QbfInstance.build([(1, "e"), (2, "a"), (3, "e")], [(1, 2, 3)])
    r = Refutation((1, 2, 3), (Step(1, (1, 2, 3), "I", None, ()),))
    rep = check_refutation(inst, serialize(r), build_trivial_poset(inst))
    assert not rep.verified
    assert any("compatible" in reason for _, reason in rep.errors)


def test_missing_empty_clause():
    steps = _proof().steps[:-1]
    rep = check_refutation(YX, Refutation((2, 1), steps))
    assert not rep.verified


def test_input_not_in_matrix():
    r = Refutation((2, 1), (Step(1, (1,), "I", None, ()),))
    rep = check_refutation(YX, r)
    assert (1, "input clause is not in the matrix") in rep.errors


@pytest.mark.parametrize(
    "text",
    [
        "",
        "p dqrp 2\no 0\n",
        "p dqrp 1\n",
        "p dqrp 1\no 1 2\n",
        "p dqrp 1\no 0\n1 X 0 0\n",
        "p dqrp 1\no 0\n1 I 0 1\n",
        "p dqrp 1\no 0\n2 I 0 0\n1 I 0 0\n",
        "p dqrp 1\no 0\n1 R 1 0 0\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ProofFormatError):
        parse_proof(text)
