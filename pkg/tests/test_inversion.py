import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantortx.corpus import BUILTINS, DBL, PARITY, XB
from cantortx.errors import BudgetExceeded, NotSurjective
from cantortx.image import is_partially_invertible
from cantortx.inversion import _close, _synchronous_inverse, invert, partial_inverse, verify_inverse
from cantortx.machine import InitialTransducer, InvState, Transducer, evaluate_ep, omega_equal
from cantortx.prefix_maps import random_element, to_transducer
from cantortx.words import DEFAULT_BUDGET, Budget, EpWord

from strategies import permutation_transducer


def test_parity_inverse_structure():
    S = invert(BUILTINS["PARITY"]).machine
    assert len(S.states) == 2
    assert all(S.delta[x][0] == x for x in S.states)
    assert all(S.delta[x][1] != x for x in S.states)


def test_xb_inverse_first_step():
    S = invert(BUILTINS["XB"])
    root = InvState("", "p0")
    assert S.initial == root
    assert S.machine.lam[root][0] == ""
    assert S.machine.delta[root][0] == InvState("0", "p0")


@pytest.mark.parametrize("name", ["PARITY", "XB", "SYNC2", "IDENTITY1"])
def test_round_trip_on_corpus(name, ep6):
    T = BUILTINS[name]
    S = invert(T)
    assert verify_inverse(T, S).ok
    for x in ep6:
        assert S(T(x)) == x
        assert T(S(x)) == x


def test_not_surjective():
    with pytest.raises(NotSurjective):
        invert(InitialTransducer(XB, "p1"))


def test_non_clopen_image_exhausts_budget():
    with pytest.raises(BudgetExceeded):
        invert(InitialTransducer(DBL, "d"), Budget(20_000, 24))


def test_two_to_one_map_is_not_inverted():
    # both letters are forgotten, so every point has two preimages
    T = Transducer.from_notation(2, "s: 0|ε->u 1|ε->u; u: 0|0->u 1|1->u")
    assert is_partially_invertible(T)["s"].injective is False
    # the pending residual grows without bound before any round trip is tried
    with pytest.raises(BudgetExceeded):
        invert(InitialTransducer(T, "s"), Budget(20_000, 12))


def test_certificate_rejects_a_wrong_inverse():
    cert = verify_inverse(BUILTINS["PARITY"], BUILTINS["PARITY"])
    assert not cert.ok
    assert not cert.forward_then_back_identity


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_random_v2_elements_invert(seed):
    v = random_element(2, random.Random(seed), max_depth=4, max_splits=4)
    T = to_transducer(v)
    S = invert(T)
    assert verify_inverse(T, S).ok
    for x in [EpWord.parse(s) for s in ("(0)", "(1)", "01(10)", "110(0)", "1(011)")]:
        assert S(T(x)) == x


@settings(max_examples=25)
@given(permutation_transducer())
def test_fast_path_agrees_with_general_construction(T):
    fast = _synchronous_inverse(T.machine, T.initial)
    root = InvState("", T.initial)
    general = InitialTransducer(_close(T.machine, [root], DEFAULT_BUDGET), root)
    assert omega_equal(fast, general)


@pytest.mark.parametrize("machine", [PARITY, XB])
def test_partial_inverse_undoes_each_state(machine, ep6):
    P = partial_inverse(machine)
    for s in P.states:
        w, p = s
        for x in ep6[:400]:
            y = evaluate_ep(machine, p, x)
            if y.starts_with(w):
                assert evaluate_ep(P, s, y.drop(len(w))) == x


def test_partial_inverse_of_parity_matches_inverse():
    P = partial_inverse(PARITY)
    S = invert(BUILTINS["PARITY"])
    for s in P.states:
        assert any(omega_equal(InitialTransducer(P, s), S.machine.at(r)) for r in S.machine.states)


@pytest.mark.parametrize("machine", [PARITY, XB])
def test_partial_inverse_does_not_depend_on_the_cover(machine):
    from cantortx.image import analyzer
    from cantortx.machine import disjoint_union, evaluate_prefix, omega_classes

    A = analyzer(machine)
    roots = []
    for q in machine.states:
        # split every cone of the canonical cover into its children
        for eta in A.image(q):
            for child in (eta + "0", eta + "1"):
                out, p = evaluate_prefix(machine, q, A.lq(q, child))
                roots.append(InvState(child[len(out):], p))
    refined = _close(machine, list(dict.fromkeys(roots)), DEFAULT_BUDGET)
    P = partial_inverse(machine)
    cls = omega_classes(disjoint_union(refined, P))
    canonical = {cls[(1, s)] for s in P.states}
    assert {cls[(0, s)] for s in refined.states} <= canonical
