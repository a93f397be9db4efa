import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantortx.corpus import AUTOMATON_B, AUTOMATON_C, BUILTINS
from cantortx.errors import InputError
from cantortx.machine import omega_equal
from cantortx.prefix_maps import (
    PrefixExchangeMap,
    compose,
    from_transducer,
    invert,
    preserves_relation,
    random_element,
    random_preserving,
    small_swap,
    to_transducer,
)
from cantortx.synchronization import collapse
from cantortx.words import EpWord

seeds = st.integers(0, 100_000)
POINTS = [EpWord.parse(s) for s in ("(0)", "(1)", "01(10)", "110(0)", "1(011)", "0010(1)", "(01)")]


def element(seed):
    return random_element(2, random.Random(seed))


def test_table_is_sibling_reduced():
    v = PrefixExchangeMap.of(2, [("00", "10"), ("01", "11"), ("1", "0")])
    assert v.table == (("0", "1"), ("1", "0"))


def test_identity_after_merging():
    v = PrefixExchangeMap.of(2, [("0", "0"), ("10", "10"), ("11", "11")])
    assert v.is_identity()


def test_rejects_incomplete_codes():
    with pytest.raises(InputError):
        PrefixExchangeMap.of(2, [("0", "0"), ("10", "1")])
    with pytest.raises(InputError):
        PrefixExchangeMap.of(2, [("0", "0"), ("1", "10")])


def test_small_swap():
    s = small_swap("0", "10")
    assert s(EpWord.parse("0(1)")) == EpWord.parse("10(1)")
    assert s(EpWord.parse("11(0)")) == EpWord.parse("11(0)")
    assert s.compose(s).is_identity()
    with pytest.raises(InputError):
        small_swap("0", "01")


def test_xb_table_is_recovered():
    v = from_transducer(BUILTINS["XB"])
    assert v == PrefixExchangeMap.of(2, [("0", "00"), ("10", "01"), ("11", "1")])


def test_parity_is_not_in_v2():
    assert from_transducer(BUILTINS["PARITY"]) is None


@given(seeds, seeds, seeds)
def test_composition_is_associative(a, b, c):
    u, v, w = element(a), element(b), element(c)
    assert u.compose(v).compose(w) == u.compose(v.compose(w))


@given(seeds)
def test_inverse_and_identity(a):
    v = element(a)
    e = PrefixExchangeMap.identity(2)
    assert v.compose(invert(v)) == e
    assert invert(v).compose(v) == e
    assert v.compose(e) == v == e.compose(v)


@given(seeds, seeds)
def test_compose_means_first_then_second(a, b):
    v, w = element(a), element(b)
    for x in POINTS:
        assert compose(v, w)(x) == w(v(x))


@given(seeds, st.data())
def test_table_does_not_depend_on_representation(a, data):
    v = element(a)
    alpha = data.draw(st.sampled_from(v.domain))
    refined = v.refine(alpha)
    assert PrefixExchangeMap.of(2, refined.table) == v
    for x in POINTS:
        assert refined(x) == v(x)


@settings(max_examples=25)
@given(seeds)
def test_transducer_round_trip(a):
    v = element(a)
    T = to_transducer(v)
    assert from_transducer(T) == v
    for x in POINTS:
        assert T(x) == v(x)


@settings(max_examples=20)
@given(seeds, seeds)
def test_transducer_of_a_product(a, b):
    from cantortx.machine import product_initial

    v, w = element(a), element(b)
    assert omega_equal(product_initial(to_transducer(v), to_transducer(w)), to_transducer(v.compose(w)))


def test_membership_for_b():
    C = collapse(AUTOMATON_B)
    assert not preserves_relation(small_swap("00", "01"), C).member
    assert preserves_relation(small_swap("01", "10"), C).member


def test_membership_for_c():
    C = collapse(AUTOMATON_C)
    verdict = preserves_relation(small_swap("0", "10"), C)
    assert not verdict.member
    assert verdict.violations
    assert preserves_relation(small_swap("00", "11"), C).member


@given(seeds)
def test_random_preserving_maps_preserve(a):
    C = collapse(AUTOMATON_C)
    v = random_preserving(C, random.Random(a))
    assert preserves_relation(v, C).member
