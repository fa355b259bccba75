import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pecr.errors import CapacityError
from pecr.listops import cap, chain, conclst, eqlst, equivlst, minus, order, sublst, unique

short_lists = st.lists(st.sampled_from("pqrstuvw"), max_size=8)


def test_conclst_removes_one_bracket_level():
    assert conclst(["a", "b", "c"], ["d", "e"]) == ["a", "b", "c", "d", "e"]
    assert conclst([], ["x", "y"]) == ["x", "y"]


def test_conclst_promotes_scalars():
    assert conclst("a", ["b", "c"]) == ["a", "b", "c"]


def test_chain_keeps_inner_brackets():
    assert chain(["a", ["b", "c"]], ["b", "d"], ["e", "f"]) == [
        "a",
        ["b", "c"],
        "b",
        "d",
        "e",
        "f",
    ]


def test_chain_empty():
    assert chain() == []


def test_conclst_capacity():
    with pytest.raises(CapacityError):
        conclst([1, 2], [3, 4], bound=3)


def test_cap_keeps_first_argument_order():
    assert cap(list("pqrs"), list("rqsq")) == ["q", "r", "s"]
    assert cap(list("rqsq"), list("pqrs")) == ["r", "q", "s"]
    assert cap(list("abc"), []) == []


def test_minus_examples():
    assert minus(list("pqrs"), ["p", "t"]) == ["q", "r", "s"]
    assert minus(list("abc"), []) == list("abc")
    assert minus(list("abc"), list("abc")) == []


def test_unique_examples():
    assert unique(list("pqrsrqsq")) == list("pqrs")
    assert unique(list("rqsq")) == list("rqs")
    assert unique([]) == []


def test_sublist_flags():
    assert sublst(list("bbab"), list("abc"))
    assert equivlst(list("bbab"), list("aba"))
    assert not eqlst(list("bbab"), list("aba"))
    assert eqlst(list("ab"), list("ab"))


def test_order():
    assert order([6, 8, 9, 11, 16, 17]) == [6, 8, 9, 11, 16, 17]
    assert order([3, 1, 2]) == [1, 2, 3]


@given(short_lists, short_lists)
def test_minus_via_cap_identity(u, v):
    assert minus(u, v) == minus(u, cap(u, v))


@given(short_lists, short_lists)
def test_cap_is_duplicate_free(u, v):
    assert unique(cap(u, v)) == cap(u, v)


@given(short_lists, short_lists)
def test_results_are_subsequences_of_first_argument(u, v):
    for result in (cap(u, v), minus(u, v)):
        it = iter(u)
        assert all(e in it for e in result)


@given(short_lists, short_lists)
def test_conclst_length(u, v):
    assert len(conclst(u, v)) == len(u) + len(v)


def test_seeded_law_sweep():
    rng = random.Random(11)
    for _ in range(2000):
        u = [rng.randint(0, 9) for _ in range(rng.randint(0, 8))]
        v = [rng.randint(0, 9) for _ in range(rng.randint(0, 8))]
        assert minus(u, v) == minus(u, cap(u, v))
        assert unique(cap(u, v)) == cap(u, v)
        assert len(conclst(u, v)) == len(u) + len(v)
        assert sublst(cap(u, v), u) and sublst(cap(u, v), v)
