from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantortx.errors import InputError
from cantortx.words import (
    Budget,
    ConeAntichain,
    EpWord,
    complement,
    ep_words,
    is_antichain,
    is_complete_code,
    lcp,
    measure,
    merge_siblings,
    parse_word,
    render,
    words_up_to,
)

binary = st.text(alphabet="01", max_size=6)


def test_render_and_parse_empty_word():
    assert render("") == "ε"
    assert parse_word("ε") == ""
    assert parse_word("-") == ""
    assert parse_word("0110", 2) == "0110"


def test_parse_word_rejects_out_of_range_letter():
    with pytest.raises(InputError):
        parse_word("012", 2)


def test_lcp():
    assert lcp(["0110", "0111", "01"]) == "01"
    assert lcp(["0", "1"]) == ""


def test_budget_must_be_positive():
    with pytest.raises((InputError, ValueError)):
        Budget(0, 5)


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("TX_BUDGET", "500,7")
    b = Budget.from_env()
    assert (b.max_configurations, b.max_depth) == (500, 7)


class TestEpWord:
    def test_parse_and_print(self):
        x = EpWord.parse("01(10)")
        assert str(x) == "01(10)"
        assert x.prefix(5) == "01101"

    def test_canonical_period_is_primitive(self):
        assert EpWord.of("", "0000") == EpWord.of("0", "0")
        assert str(EpWord.of("0101", "01")) == "(01)"

    @given(binary, binary.filter(bool), st.integers(0, 12))
    def test_prefix_agrees_with_unrolled_word(self, pre, per, k):
        x = EpWord.of(pre, per)
        unrolled = pre + per * (k + 1)
        assert x.prefix(k) == unrolled[:k]

    @given(binary, binary.filter(bool), binary)
    def test_prepend_then_drop(self, pre, per, w):
        x = EpWord.of(pre, per)
        assert x.prepend(w).drop(len(w)) == x
        assert x.prepend(w).starts_with(w)

    def test_enumeration_is_duplicate_free(self):
        xs = ep_words(2, 6)
        assert len(xs) == len(set(xs))
        assert all(len(x.pre) + len(x.per) <= 6 for x in xs)

    def test_enumeration_count_at_depth_ten(self):
        assert len(ep_words(2, 10)) == 8862


class TestCodes:
    def test_measure(self):
        assert measure(["0", "10"], 2) == Fraction(3, 4)

    def test_complete_code(self):
        assert is_complete_code(["0", "10", "11"], 2)
        assert not is_complete_code(["0", "10"], 2)
        assert not is_complete_code(["0", "01", "1"], 2)

    def test_complement(self):
        assert complement(["0"], 2) == ["1"]
        rest = complement(["00", "11"], 2)
        assert sorted(rest) == ["01", "10"]

    def test_merge_siblings(self):
        assert merge_siblings(["00", "01", "1"], 2) == [""]

    @given(st.lists(binary, max_size=5))
    def test_antichain_plus_complement_is_complete(self, ws):
        if not is_antichain(ws) or len(set(ws)) != len(ws):
            return
        code = list(ws) + complement(ws, 2)
        assert is_complete_code(code, 2)


class TestConeAntichain:
    def test_canonical_merge(self):
        c = ConeAntichain.of(2, ["00", "01"])
        assert tuple(c) == ("0",)
        assert c.measure == Fraction(1, 2)
        assert tuple(c.complement()) == ("1",)

    def test_full_and_empty(self):
        assert ConeAntichain.full(2).is_full()
        assert ConeAntichain.empty(2).is_empty()
        assert ConeAntichain.of(2, ["0", "1"]).is_full()

    def test_cone_queries(self):
        c = ConeAntichain.of(2, ["1", "01"])
        assert c.contains_cone("011")
        assert not c.contains_cone("0")
        assert c.meets_cone("0")
        assert not c.meets_cone("00")

    def test_set_operations(self):
        a = ConeAntichain.of(2, ["0"])
        b = ConeAntichain.of(2, ["10"])
        assert a.isdisjoint(b)
        assert a.issubset(a.union(b))
        assert a.union(b).measure == Fraction(3, 4)
        assert tuple(a.prefixed("1")) == ("10",)

    @given(st.lists(binary, max_size=6, unique=True))
    def test_canonical_form_invariants(self, ws):
        if not is_antichain(ws):
            with pytest.raises(InputError):
                ConeAntichain.of(2, ws)
            return
        c = ConeAntichain.of(2, ws)
        words = list(c)
        assert is_antichain(words)
        for u in {w[:-1] for w in words if w}:
            assert not (u + "0" in words and u + "1" in words)
        assert c.measure == measure(ws, 2)
        for u in words_up_to(2, 7):
            if len(u) == 7:
                assert c.contains_cone(u) == any(u.startswith(w) for w in ws)
