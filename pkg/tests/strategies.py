"""Hypothesis strategies shared by the test modules."""

from hypothesis import reject
from hypothesis import strategies as st

from cantortx.errors import FixpointDivergence
from cantortx.machine import InitialTransducer, Transducer, common_prefixes
from cantortx.words import EpWord

binary = st.text(alphabet="01", max_size=5)


@st.composite
def ep_word(draw):
    pre = draw(binary)
    per = draw(st.text(alphabet="01", min_size=1, max_size=4))
    return EpWord.of(pre, per)


@st.composite
def transducer(draw, max_states=4, max_out=2):
    """A binary transducer whose every transition writes at least one letter."""
    k = draw(st.integers(1, max_states))
    states = tuple(range(k))
    delta = {q: tuple(draw(st.integers(0, k - 1)) for _ in range(2)) for q in states}
    lam = {
        q: tuple(draw(st.text(alphabet="01", min_size=1, max_size=max_out)) for _ in range(2))
        for q in states
    }
    T = Transducer(2, states, delta, lam)
    try:
        common_prefixes(T)
    except FixpointDivergence:
        # a state with a one-point image; rejected by design
        reject()
    return InitialTransducer(T, 0)


@st.composite
def permutation_transducer(draw, max_states=4):
    """A synchronous binary transducer whose states permute the letters."""
    k = draw(st.integers(1, max_states))
    states = tuple(range(k))
    delta = {q: tuple(draw(st.integers(0, k - 1)) for _ in range(2)) for q in states}
    lam = {q: draw(st.sampled_from([("0", "1"), ("1", "0")])) for q in states}
    return InitialTransducer(Transducer(2, states, delta, lam), 0)
