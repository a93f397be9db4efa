"""Elements of the Higman–Thompson group V_n as prefix-exchange tables."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError
from .machine import InitialTransducer, State, Transducer, is_identity_state, minimize
from .synchronization import DEFAULT_KMAX, CollapsedAutomaton, relation_classify
from .words import (
    EpWord,
    check_alphabet,
    check_word,
    comparable,
    complement,
    is_complete_code,
    length_lex,
    letters,
    render,
)


def _canonical(n: int, pairs: Iterable[tuple[str, str]]) -> tuple[tuple[str, str], ...]:
    """Merge sibling blocks ``u·i -> v·i`` into ``u -> v`` until none remain."""
    table = dict(pairs)
    changed = True
    while changed:
        changed = False
        for alpha in sorted(table, key=length_lex, reverse=True):
            if not alpha or alpha not in table:
                continue
            u = alpha[:-1]
            beta = table[alpha]
            if not beta or beta[-1] != alpha[-1]:
                continue
            v = beta[:-1]
            block = [u + a for a in letters(n)]
            if all(table.get(u + a) == v + a for a in letters(n)):
                for w in block:
                    del table[w]
                table[u] = v
                changed = True
    return tuple(sorted(table.items(), key=lambda p: length_lex(p[0])))


@dataclass(frozen=True)
class PrefixExchangeMap:
    """The homeomorphism ``α_i χ ↦ β_i χ`` of Cantor space.

    Build through :meth:`of`, which validates both columns as complete prefix
    codes and stores the sibling-reduced canonical table, so equality of
    instances is equality of group elements.
    """

    n: int
    table: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, n: int, pairs: Iterable[tuple[str, str]]) -> "PrefixExchangeMap":
        check_alphabet(n)
        pairs = list(pairs)
        for a, b in pairs:
            check_word(a, n)
            check_word(b, n)
        dom = [a for a, _ in pairs]
        rng = [b for _, b in pairs]
        if not is_complete_code(dom, n):
            raise InputError(f"domain {sorted(map(render, dom))} is not a complete prefix code")
        if not is_complete_code(rng, n):
            raise InputError(f"range {sorted(map(render, rng))} is not a complete prefix code")
        return cls(n, _canonical(n, pairs))

    @classmethod
    def identity(cls, n: int) -> "PrefixExchangeMap":
        check_alphabet(n)
        return cls(n, (("", ""),))

    def __str__(self) -> str:
        return "{" + ", ".join(f"{render(a)}→{render(b)}" for a, b in self.table) + "}"

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.table)

    @property
    def range(self) -> tuple[str, ...]:
        return tuple(b for _, b in self.table)

    def is_identity(self) -> bool:
        return self.table == (("", ""),)

    def lookup(self, word: str) -> tuple[str, str] | None:
        """The pair whose domain word is a prefix of ``word``, if any."""
        for a, b in self.table:
            if word.startswith(a):
                return a, b
        return None

    def __call__(self, x: EpWord) -> EpWord:
        for a, b in self.table:
            if x.starts_with(a):
                return x.drop(len(a)).prepend(b)
        raise AssertionError("complete code misses a point")

    def apply_word(self, word: str) -> str | None:
        """Image of a finite word long enough to pass a domain word, else ``None``."""
        hit = self.lookup(word)
        if hit is None:
            return None
        a, b = hit
        return b + word[len(a):]

    def compose(self, other: "PrefixExchangeMap") -> "PrefixExchangeMap":
        """``self`` first, then ``other``."""
        if self.n != other.n:
            raise InputError("alphabet sizes differ")
        pairs = []
        for a, b in self.table:
            hit = other.lookup(b)
            if hit is not None:
                g, d = hit
                pairs.append((a, d + b[len(g):]))
            else:
                for g, d in other.table:
                    if g.startswith(b):
                        pairs.append((a + g[len(b):], d))
        return PrefixExchangeMap.of(self.n, pairs)

    def inverse(self) -> "PrefixExchangeMap":
        return PrefixExchangeMap(self.n, _canonical(self.n, ((b, a) for a, b in self.table)))

    def refine(self, alpha: str) -> "PrefixExchangeMap":
        """Non-canonical copy with the pair at ``alpha`` split into its children."""
        pairs = []
        for a, b in self.table:
            if a == alpha:
                pairs.extend((a + x, b + x) for x in letters(self.n))
            else:
                pairs.append((a, b))
        return PrefixExchangeMap(self.n, tuple(pairs))


def compose(v: PrefixExchangeMap, w: PrefixExchangeMap) -> PrefixExchangeMap:
    return v.compose(w)


def invert(v: PrefixExchangeMap) -> PrefixExchangeMap:
    return v.inverse()


def small_swap(alpha: str, beta: str, n: int = 2) -> PrefixExchangeMap:
    """The involution exchanging the cones ``[alpha]`` and ``[beta]``."""
    check_alphabet(n)
    check_word(alpha, n)
    check_word(beta, n)
    if comparable(alpha, beta):
        raise InputError(f"swapped words must be incomparable: {render(alpha)}, {render(beta)}")
    rest = complement([alpha, beta], n)
    return PrefixExchangeMap.of(n, [(alpha, beta), (beta, alpha)] + [(w, w) for w in rest])


# --------------------------------------------------------------------------
# transducer form


def to_transducer(v: PrefixExchangeMap) -> InitialTransducer:
    """Minimal transducer of ``v``: a domain tree falling into the identity state."""
    n = v.n
    ident = ("id",)
    leaves = dict(v.table)
    internal = sorted({a[:k] for a in leaves for k in range(len(a))}, key=length_lex)
    delta: dict = {ident: (ident,) * n}
    lam: dict = {ident: tuple(letters(n))}
    for u in internal:
        succ, outs = [], []
        for x in letters(n):
            if u + x in leaves:
                succ.append(ident)
                outs.append(leaves[u + x])
            else:
                succ.append(u + x)
                outs.append("")
        delta[u] = tuple(succ)
        lam[u] = tuple(outs)
    states = tuple(internal) + (ident,)
    initial = "" if internal else ident
    preamble, M = minimize(InitialTransducer(Transducer(n, states, delta, lam), initial))
    if preamble:
        raise AssertionError("a prefix exchange map has full image")
    return M


def _escapes_identity(T: Transducer, start: State, ident: State) -> bool:
    """True iff some infinite input from ``start`` never visits ``ident``."""
    color: dict = {}
    stack = [(start, iter(T.delta[start]))]
    color[start] = 1
    while stack:
        q, it = stack[-1]
        for t in it:
            if t == ident:
                continue
            c = color.get(t, 0)
            if c == 1:
                return True
            if c == 0:
                color[t] = 1
                stack.append((t, iter(T.delta[t])))
                break
        else:
            color[q] = 2
            stack.pop()
    return False


def from_transducer(T: InitialTransducer, kmax: int = DEFAULT_KMAX) -> PrefixExchangeMap | None:
    """Read off the prefix-exchange table of ``T`` if it is an element of V_n.

    Succeeds iff the minimized machine reaches its identity state along
    every input within ``kmax`` letters and the emitted prefixes form a
    complete code; otherwise returns ``None``.
    """
    preamble, M = minimize(T)
    m = M.machine
    idents = [q for q in m.states if is_identity_state(m, q)]
    if preamble or not idents:
        return None
    ident = idents[0]
    if M.initial != ident and _escapes_identity(m, M.initial, ident):
        return None
    pairs: list[tuple[str, str]] = []
    stack = [("", "", M.initial)]
    while stack:
        word, out, q = stack.pop()
        if q == ident:
            pairs.append((word, out))
            continue
        if len(word) >= kmax:
            return None
        for x in letters(m.n):
            stack.append((word + x, out + m.lam[q][int(x)], m.delta[q][int(x)]))
    if not is_complete_code([b for _, b in pairs], m.n):
        return None
    return PrefixExchangeMap.of(m.n, pairs)


# --------------------------------------------------------------------------
# membership in V_{∼_A}


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    witnesses: tuple[tuple[str, str, int, int], ...]

    @property
    def violations(self) -> tuple[tuple[str, str, int, int], ...]:
        return tuple(w for w in self.witnesses if w[2] != w[3])


def preserves_relation(v: PrefixExchangeMap, C: CollapsedAutomaton) -> MembershipVerdict:
    """Whether every table pair maps a word to a ∼_A-related word."""
    if v.n != C.original.n:
        raise InputError("alphabet sizes differ")
    if v.is_identity():
        return MembershipVerdict(True, ())
    rows = tuple((a, b, relation_classify(C, a), relation_classify(C, b)) for a, b in v.table)
    return MembershipVerdict(all(r[2] == r[3] for r in rows), rows)


# --------------------------------------------------------------------------
# random elements (test utilities)


def random_complete_code(n: int, rng: random.Random, splits: int, max_depth: int) -> list[str]:
    """A complete prefix code obtained by ``splits`` random leaf splits."""
    code = [""]
    for _ in range(splits):
        open_leaves = [w for w in code if len(w) < max_depth]
        if not open_leaves:
            break
        w = rng.choice(open_leaves)
        code.remove(w)
        code.extend(w + a for a in letters(n))
    return code


def random_element(n: int, rng: random.Random, max_depth: int = 5, max_splits: int = 6) -> PrefixExchangeMap:
    """Random complete codes of equal size, paired uniformly at random."""
    while True:
        k = rng.randint(0, max_splits)
        dom = random_complete_code(n, rng, k, max_depth)
        rng_code = random_complete_code(n, rng, k, max_depth)
        if len(dom) == len(rng_code):
            rng.shuffle(rng_code)
            return PrefixExchangeMap.of(n, zip(dom, rng_code))


def _random_incomparable(n: int, rng: random.Random, max_len: int) -> tuple[str, str]:
    while True:
        a = "".join(rng.choice(letters(n)) for _ in range(rng.randint(1, max_len)))
        b = "".join(rng.choice(letters(n)) for _ in range(rng.randint(1, max_len)))
        if not comparable(a, b):
            return a, b


def random_small_swap(n: int, rng: random.Random, max_len: int = 4) -> PrefixExchangeMap:
    return small_swap(*_random_incomparable(n, rng, max_len), n)


def random_preserving(C: CollapsedAutomaton, rng: random.Random, swaps: int = 3, max_len: int = 4) -> PrefixExchangeMap:
    """Product of random small swaps between ∼_A-related cones."""
    n = C.original.n
    v = PrefixExchangeMap.identity(n)
    done = 0
    while done < swaps:
        a, b = _random_incomparable(n, rng, max_len)
        if relation_classify(C, a) == relation_classify(C, b):
            v = v.compose(small_swap(a, b, n))
            done += 1
    return v
