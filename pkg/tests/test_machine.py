import pytest
from hypothesis import given, settings

from cantortx.corpus import BUILTINS, DBL, PARITY, XB
from cantortx.errors import FixpointDivergence, InputError
from cantortx.machine import (
    InitialTransducer,
    Transducer,
    canonical_key,
    disjoint_union,
    evaluate_ep,
    evaluate_prefix,
    identity_transducer,
    is_identity_map,
    minimize,
    omega_classes,
    omega_equal,
    product,
    product_initial,
    validate,
)
from cantortx.words import EpWord

from strategies import ep_word, transducer


def test_from_notation_matches_from_table():
    T = Transducer.from_table(2, {"a": [("a", "0"), ("b", "1")], "b": [("a", "1"), ("b", "0")]})
    assert T == PARITY


def test_transition_to_unknown_state_is_rejected():
    with pytest.raises(InputError):
        Transducer.from_notation(2, "a: 0|0->a 1|1->z")


def test_parity_on_sample_words():
    assert evaluate_prefix(PARITY, "a", "0110") == ("0101", "a")
    assert evaluate_ep(PARITY, "a", EpWord.parse("(1)")) == EpWord.parse("1(0)")


def test_xb_moves_cones():
    T = BUILTINS["XB"]
    assert T(EpWord.parse("0(1)")) == EpWord.parse("00(1)")
    assert T(EpWord.parse("10(1)")) == EpWord.parse("01(1)")
    assert T(EpWord.parse("11(0)")) == EpWord.parse("1(0)")


def test_dbl_doubles_zeros():
    assert evaluate_ep(DBL, "d", EpWord.parse("01(1)")) == EpWord.parse("001(1)")


def test_validate_flags_unreachable_and_degenerate():
    T = Transducer.from_notation(2, "s: 0|ε->s 1|1->t; t: 0|0->t 1|1->t; u: 0|0->u 1|1->u")
    report = validate(InitialTransducer(T, "s"))
    assert not report.ok
    assert report.unreachable_states == {"u"}
    assert "s" in report.degenerate_states
    assert validate(BUILTINS["PARITY"]).ok


def test_minimize_corpus_sizes():
    assert len(minimize(BUILTINS["PARITY"])[1].machine.states) == 2
    assert len(minimize(BUILTINS["XB"])[1].machine.states) == 3
    assert is_identity_map(InitialTransducer(identity_transducer(2), "id"))


def test_incomplete_response_moves_into_preamble():
    T = InitialTransducer(Transducer.from_notation(2, "s: 0|10->s 1|11->s"), "s")
    preamble, M = minimize(T)
    assert preamble == "1"
    assert M.machine.lam[0] == ("01", "11")


def test_constant_image_state_is_rejected():
    T = InitialTransducer(Transducer.from_notation(2, "s: 0|0->s 1|0->s"), "s")
    with pytest.raises(FixpointDivergence):
        minimize(T)


def test_omega_classes_compare_across_machines():
    U = disjoint_union(PARITY, identity_transducer(2))
    cls = omega_classes(U)
    assert cls[(0, "a")] != cls[(1, "id")]
    assert len(set(cls.values())) == 3


@given(transducer(), ep_word())
def test_minimize_preserves_the_map(T, x):
    preamble, M = minimize(T)
    assert T(x) == M(x).prepend(preamble)


@given(transducer())
def test_minimize_is_idempotent(T):
    _, M = minimize(T)
    preamble, M2 = minimize(M)
    assert preamble == ""
    assert canonical_key(M) == canonical_key(M2)
    assert M2.machine == M.machine


@given(transducer(), transducer(), ep_word())
def test_product_is_composition(T, R, x):
    assert product_initial(T, R)(x) == R(T(x))


@settings(max_examples=15)
@given(transducer(max_states=3), transducer(max_states=3), transducer(max_states=3))
def test_product_is_associative_up_to_omega(A, B, C):
    left = product_initial(product_initial(A, B), C)
    right = product_initial(A, product_initial(B, C))
    assert omega_equal(left, right)


@given(transducer())
def test_relabelling_does_not_change_canonical_key(T):
    names = {q: f"s{q}" for q in T.machine.states}
    R = InitialTransducer(T.machine.relabel(names), names[T.initial])
    assert canonical_key(R) == canonical_key(T)


def test_product_states_are_pairs():
    P = product(PARITY, XB)
    assert ("a", "p0") in P.states
    assert all(isinstance(q, tuple) and len(q) == 2 for q in P.states)
