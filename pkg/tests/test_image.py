import pytest
from hypothesis import given, settings

from cantortx.corpus import DBL, PARITY, SYNC2, XB
from cantortx.errors import BudgetExceeded, EmptyPreimage
from cantortx.image import (
    ImageAnalyzer,
    cone_in_image,
    image_antichain,
    is_partially_invertible,
    lq,
)
from cantortx.machine import evaluate_prefix, product
from cantortx.words import Budget, words_of_length, words_up_to

from strategies import permutation_transducer

DEPTH = 6


def brute_meets(T, q, u, extra=3):
    """Does some input of length ``len(u) + extra`` write a word starting with ``u``."""
    for w in words_of_length(T.n, len(u) + extra):
        out, _ = evaluate_prefix(T, q, w)
        if out.startswith(u):
            return True
    return False


@pytest.mark.parametrize(
    "machine,state,alpha,expected",
    [(PARITY, "a", "0", "0"), (XB, "p0", "0", ""), (XB, "p0", "00", "0")],
)
def test_lq_examples(machine, state, alpha, expected):
    assert lq(machine, state, alpha) == expected


def test_lq_of_unreachable_cone():
    with pytest.raises(EmptyPreimage):
        lq(XB, "p1", "00")


@pytest.mark.parametrize("machine,state", [(PARITY, "a"), (XB, "p0"), (XB, "p1"), (SYNC2, "B")])
def test_lq_is_a_prefix_of_every_surviving_input(machine, state):
    for alpha in words_up_to(2, 4):
        try:
            prefix = lq(machine, state, alpha)
        except EmptyPreimage:
            continue
        for w in words_of_length(2, len(alpha) + 3):
            out, _ = evaluate_prefix(machine, state, w)
            if out.startswith(alpha):
                assert w.startswith(prefix)


def test_cone_in_image_examples():
    assert cone_in_image(PARITY, "b", "1")
    assert cone_in_image(XB, "p1", "01")
    assert not cone_in_image(XB, "p1", "00")


def test_image_antichain_examples():
    assert tuple(image_antichain(PARITY, "a")) == ("",)
    assert set(image_antichain(XB, "p1")) == {"1", "01"}
    assert tuple(image_antichain(XB, "p0")) == ("",)


def test_dbl_image_is_not_clopen():
    with pytest.raises(BudgetExceeded):
        image_antichain(DBL, "d", Budget(20_000, 24))


def test_dbl_point_outside_image_is_decided():
    assert not cone_in_image(DBL, "d", "0")


@pytest.mark.parametrize("machine", [PARITY, XB, SYNC2])
def test_image_antichain_matches_brute_force(machine):
    for q in machine.states:
        W = image_antichain(machine, q)
        for u in words_up_to(2, DEPTH):
            assert W.meets_cone(u) == brute_meets(machine, q, u), (q, u)


def test_partial_invertibility_of_corpus():
    assert is_partially_invertible(PARITY).passed
    assert is_partially_invertible(XB).passed


def test_dbl_fails_partial_invertibility():
    report = is_partially_invertible(DBL, Budget(20_000, 24))
    assert not report.passed
    verdict = report["d"]
    assert verdict.clopen is None
    assert "budget exceeded" in verdict.note


def test_injectivity_detects_collisions():
    from cantortx.machine import Transducer

    T = Transducer.from_notation(2, "s: 0|0->t 1|01->u; t: 0|10->u 1|11->u; u: 0|0->u 1|1->u")
    # 0·1χ and 1χ write the same word from s
    assert not ImageAnalyzer(T).injective("s")
    assert ImageAnalyzer(XB).injective("p0")


@pytest.mark.parametrize("first,second", [(PARITY, XB), (XB, PARITY), (XB, XB), (SYNC2, XB)])
def test_partial_invertibility_closed_under_product(first, second):
    assert is_partially_invertible(first).passed and is_partially_invertible(second).passed
    assert is_partially_invertible(product(first, second)).passed


@settings(max_examples=20)
@given(permutation_transducer())
def test_letter_permuting_states_are_surjective(T):
    for q in T.machine.states:
        assert image_antichain(T.machine, q).is_full()
