"""Finite words, eventually periodic words and cone antichains.

Words over X_n are plain ``str`` objects whose characters are the digits
``0..n-1``; this keeps prefix tests and concatenation cheap and limits the
alphabet size to 10.  The empty word is ``""`` and is rendered as ``ε``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import InputError

EMPTY_MARK = "ε"
MAX_ALPHABET = 10


def render(word: str) -> str:
    return word if word else EMPTY_MARK


def parse_word(token: str, n: int | None = None) -> str:
    """Parse a word token; ``ε`` and ``-`` denote the empty word."""
    word = "" if token in (EMPTY_MARK, "-") else token
    if n is not None:
        check_word(word, n)
    elif not word.isdigit() and word:
        raise InputError(f"not a word: {token!r}")
    return word


def check_alphabet(n: int) -> None:
    if not isinstance(n, int) or not 2 <= n <= MAX_ALPHABET:
        raise InputError(f"alphabet size must be an integer in 2..{MAX_ALPHABET}, got {n!r}")


def check_word(word: str, n: int) -> None:
    for ch in word:
        if not ("0" <= ch <= "9") or int(ch) >= n:
            raise InputError(f"letter {ch!r} out of range for alphabet {n} in word {render(word)!r}")


def letters(n: int) -> str:
    return "".join(str(i) for i in range(n))


def is_prefix(u: str, v: str) -> bool:
    return v.startswith(u)


def comparable(u: str, v: str) -> bool:
    return u.startswith(v) or v.startswith(u)


def lcp(words: Iterable[str]) -> str:
    it = iter(words)
    try:
        first = next(it)
    except StopIteration:
        return ""
    prefix = first
    for w in it:
        i = 0
        m = min(len(prefix), len(w))
        while i < m and prefix[i] == w[i]:
            i += 1
        prefix = prefix[:i]
        if not prefix:
            break
    return prefix


def length_lex(word: str) -> tuple[int, str]:
    return (len(word), word)


def words_of_length(n: int, k: int) -> Iterator[str]:
    for tup in itertools.product(letters(n), repeat=k):
        yield "".join(tup)


def words_up_to(n: int, k: int) -> Iterator[str]:
    for length in range(k + 1):
        yield from words_of_length(n, length)


@dataclass(frozen=True)
class Budget:
    """Bounds for the semi-decision procedures of image analysis."""

    max_configurations: int = 100_000
    max_depth: int = 24

    def __post_init__(self) -> None:
        if self.max_configurations <= 0 or self.max_depth <= 0:
            raise InputError("budget bounds must be positive")

    @classmethod
    def from_env(cls, var: str = "TX_BUDGET") -> "Budget":
        raw = os.environ.get(var)
        if not raw:
            return cls()
        try:
            configs, depth = (int(part) for part in raw.split(","))
        except ValueError:
            raise InputError(f"{var} must look like '<configs>,<depth>', got {raw!r}") from None
        return cls(configs, depth)


DEFAULT_BUDGET = Budget()


# --------------------------------------------------------------------------
# eventually periodic words


@dataclass(frozen=True, order=True)
class EpWord:
    """The infinite word ``pre · per · per · ...`` in canonical form.

    Construct through :meth:`of` (or :meth:`parse`), which reduces the period
    to its primitive root and then shortens the preperiod as far as possible.
    """

    pre: str
    per: str

    @classmethod
    def of(cls, pre: str, per: str) -> "EpWord":
        if not per:
            raise InputError("period of an eventually periodic word must be nonempty")
        m = len(per)
        for d in range(1, m + 1):
            if m % d == 0 and per[:d] * (m // d) == per:
                per = per[:d]
                break
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1] + per[:-1]
        return cls(pre, per)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "EpWord":
        """Parse ``u(v)``, e.g. ``0(01)``; a bare ``(v)`` has empty preperiod."""
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise InputError(f"eventually periodic word must look like 'u(v)', got {text!r}")
        head, _, tail = text[:-1].partition("(")
        pre = parse_word(head) if head else ""
        per = parse_word(tail) if tail else ""
        if n is not None:
            check_word(pre, n)
            check_word(per, n)
        return cls.of(pre, per)

    def __str__(self) -> str:
        return f"{self.pre}({self.per})"

    def prefix(self, k: int) -> str:
        if k <= len(self.pre):
            return self.pre[:k]
        rest = k - len(self.pre)
        reps = rest // len(self.per) + 1
        return self.pre + (self.per * reps)[:rest]

    def drop(self, k: int) -> "EpWord":
        if k <= len(self.pre):
            return EpWord(self.pre[k:], self.per)
        j = (k - len(self.pre)) % len(self.per)
        return EpWord.of("", self.per[j:] + self.per[:j])

    def prepend(self, word: str) -> "EpWord":
        return EpWord.of(word + self.pre, self.per)

    def starts_with(self, word: str) -> bool:
        return self.prefix(len(word)) == word


def ep_words(n: int, max_total: int) -> list[EpWord]:
    """All canonical EpWords with ``len(pre) + len(per) <= max_total``, sorted."""
    found: set[EpWord] = set()
    for total in range(1, max_total + 1):
        for split in range(total):
            for pre in words_of_length(n, split):
                for per in words_of_length(n, total - split):
                    found.add(EpWord.of(pre, per))
    return sorted(found, key=lambda x: (len(x.pre) + len(x.per), x.pre, x.per))


# --------------------------------------------------------------------------
# antichains of cones


def is_antichain(words: Iterable[str]) -> bool:
    ordered = sorted(set(words))
    return all(not ordered[i + 1].startswith(ordered[i]) for i in range(len(ordered) - 1))


def measure(words: Iterable[str], n: int) -> Fraction:
    return sum((Fraction(1, n ** len(w)) for w in words), Fraction(0))


def is_complete_code(words: Iterable[str], n: int) -> bool:
    """True iff ``words`` is a maximal antichain (complete prefix code)."""
    ws = list(words)
    return len(ws) == len(set(ws)) and is_antichain(ws) and measure(ws, n) == 1


def complement(words: Iterable[str], n: int) -> list[str]:
    """Antichain of cones covering exactly the complement of ``⋃[w]``."""
    ws = set(words)
    out: list[str] = []

    def walk(u: str) -> None:
        if u in ws:
            return
        if not any(w.startswith(u) for w in ws):
            out.append(u)
            return
        for a in letters(n):
            walk(u + a)

    if ws:
        walk("")
    else:
        out.append("")
    return sorted(out, key=length_lex)


def merge_siblings(words: Iterable[str], n: int) -> list[str]:
    """Repeatedly replace complete sibling sets ``u0..u(n-1)`` by ``u``."""
    ws = set(words)
    changed = True
    while changed:
        changed = False
        for w in sorted(ws, key=length_lex, reverse=True):
            if not w or w not in ws:
                continue
            parent = w[:-1]
            kids = [parent + a for a in letters(n)]
            if all(k in ws for k in kids):
                ws.difference_update(kids)
                ws.add(parent)
                changed = True
    return sorted(ws, key=length_lex)


@dataclass(frozen=True)
class ConeAntichain:
    """A clopen subset of Cantor space as a canonical antichain of cones."""

    n: int
    words: tuple[str, ...]

    @classmethod
    def of(cls, n: int, words: Iterable[str]) -> "ConeAntichain":
        check_alphabet(n)
        ws = list(words)
        for w in ws:
            check_word(w, n)
        if not is_antichain(ws):
            raise InputError(f"words are not pairwise incomparable: {sorted(map(render, ws))}")
        return cls(n, tuple(merge_siblings(ws, n)))

    @classmethod
    def full(cls, n: int) -> "ConeAntichain":
        return cls(n, ("",))

    @classmethod
    def empty(cls, n: int) -> "ConeAntichain":
        return cls(n, ())

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __str__(self) -> str:
        return "{" + ", ".join(render(w) for w in self.words) + "}"

    @property
    def measure(self) -> Fraction:
        return measure(self.words, self.n)

    def is_full(self) -> bool:
        return self.words == ("",)

    def is_empty(self) -> bool:
        return not self.words

    def contains_cone(self, u: str) -> bool:
        """True iff ``[u]`` lies inside the set."""
        return any(u.startswith(w) for w in self.words)

    def meets_cone(self, u: str) -> bool:
        return any(comparable(u, w) for w in self.words)

    def contains_point(self, x: EpWord) -> bool:
        return any(x.starts_with(w) for w in self.words)

    def complement(self) -> "ConeAntichain":
        return ConeAntichain.of(self.n, complement(self.words, self.n))

    def prefixed(self, rho: str) -> "ConeAntichain":
        return ConeAntichain(self.n, tuple(sorted((rho + w for w in self.words), key=length_lex)))

    def issubset(self, other: "ConeAntichain") -> bool:
        return all(other.contains_cone(w) for w in self.words)

    def isdisjoint(self, other: "ConeAntichain") -> bool:
        return not any(comparable(u, v) for u in self.words for v in other.words)

    def union(self, other: "ConeAntichain") -> "ConeAntichain":
        kept = [w for w in self.words if not other.contains_cone(w)]
        kept += [w for w in other.words if not self.contains_cone(w)]
        return ConeAntichain.of(self.n, set(kept))
