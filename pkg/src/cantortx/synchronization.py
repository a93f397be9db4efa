"""Collapsing procedure, synchronizing level, core, and the relation ∼_A."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import InputError, InternalInvariantViolation, NotSynchronizing
from .machine import InitialTransducer, State, Transducer, minimize, reachable, state_label
from .words import DEFAULT_BUDGET, Budget, check_alphabet, check_word, words_of_length

DEFAULT_KMAX = 16


@dataclass(frozen=True, eq=False)
class Automaton:
    """A transducer with its outputs forgotten, optionally with an initial state."""

    n: int
    states: tuple[State, ...]
    delta: Mapping[State, tuple[State, ...]]
    initial: State | None = None

    def __post_init__(self) -> None:
        check_alphabet(self.n)
        known = set(self.states)
        if len(known) != len(self.states):
            raise InputError("state names must be unique")
        delta = {}
        for q in self.states:
            if q not in self.delta:
                raise InputError(f"state {state_label(q)} lacks transitions")
            succ = tuple(self.delta[q])
            if len(succ) != self.n or any(t not in known for t in succ):
                raise InputError(f"state {state_label(q)} has malformed transitions")
            delta[q] = succ
        if self.initial is not None and self.initial not in known:
            raise InputError(f"initial state {state_label(self.initial)} is not a state")
        object.__setattr__(self, "delta", MappingProxyType(delta))

    @classmethod
    def of(cls, machine: "Automaton | Transducer | InitialTransducer") -> "Automaton":
        if isinstance(machine, Automaton):
            return machine
        if isinstance(machine, InitialTransducer):
            T = machine.machine
            return cls(T.n, T.states, T.delta, machine.initial)
        return cls(machine.n, machine.states, machine.delta, None)

    @classmethod
    def from_table(cls, n: int, table: Mapping[State, Sequence[State]], initial: State | None = None) -> "Automaton":
        return cls(n, tuple(table), {q: tuple(v) for q, v in table.items()}, initial)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Automaton):
            return NotImplemented
        return (self.n, self.states, dict(self.delta), self.initial) == (
            other.n, other.states, dict(other.delta), other.initial,
        )

    def __hash__(self) -> int:
        return hash((self.n, self.states, self.initial))

    def run(self, word: str, q: State | None = None) -> State:
        check_word(word, self.n)
        q = self.initial if q is None else q
        if q is None:
            raise InputError("automaton has no initial state")
        for ch in word:
            q = self.delta[q][ord(ch) - 48]
        return q


@dataclass(frozen=True)
class CollapsedAutomaton:
    original: Automaton
    class_of: Mapping[State, int]
    steps: int
    quotient: Automaton

    def classify(self, word: str) -> int:
        return relation_classify(self, word)


def _renumber(states: Sequence[State], cls: Mapping[State, int]) -> dict[State, int]:
    """Number classes by the first original state that belongs to them."""
    fresh: dict[int, int] = {}
    for q in states:
        fresh.setdefault(cls[q], len(fresh))
    return {q: fresh[cls[q]] for q in states}


def collapse_trace(A: Automaton) -> list[dict[State, int]]:
    """Class maps after each step of the collapsing procedure (step 0 first)."""
    cls = {q: i for i, q in enumerate(A.states)}
    trace = [dict(cls)]
    while True:
        sig = {q: tuple(cls[t] for t in A.delta[q]) for q in A.states}
        merged = _renumber(A.states, sig)
        if len(set(merged.values())) == len(set(cls.values())):
            return trace
        cls = merged
        trace.append(dict(cls))


def collapse(A: "Automaton | Transducer | InitialTransducer") -> CollapsedAutomaton:
    """Merge states with identical transition tuples until no two agree."""
    A = Automaton.of(A)
    trace = collapse_trace(A)
    cls = trace[-1]
    m = len(set(cls.values()))
    rep: dict[int, State] = {}
    for q in A.states:
        rep.setdefault(cls[q], q)
    delta = {k: tuple(cls[t] for t in A.delta[rep[k]]) for k in range(m)}
    initial = None if A.initial is None else cls[A.initial]
    quotient = Automaton(A.n, tuple(range(m)), delta, initial)
    return CollapsedAutomaton(A, MappingProxyType(cls), len(trace) - 1, quotient)


def satisfies_condition_one(A: Automaton) -> bool:
    tuples = [A.delta[q] for q in A.states]
    return len(set(tuples)) == len(tuples)


def synchronizing_level(T: "Automaton | Transducer | InitialTransducer", kmax: int = DEFAULT_KMAX) -> int | None:
    """Least ``k <= kmax`` after which the active state ignores the start state."""
    C = collapse(T)
    if len(C.quotient.states) == 1 and C.steps <= kmax:
        return C.steps
    return None


def synchronizing_level_bruteforce(T: "Automaton | Transducer | InitialTransducer", kmax: int = DEFAULT_KMAX) -> int | None:
    """Reference oracle scanning every word of length ``k`` for ``k = 0..kmax``."""
    A = Automaton.of(T)
    for k in range(kmax + 1):
        if all(len({A.run(g, q) for q in A.states}) == 1 for g in words_of_length(A.n, k)):
            return k
    return None


def core(T: Transducer, kmax: int = DEFAULT_KMAX) -> Transducer:
    """Sub-transducer on the states reachable after words of the synchronizing length."""
    if isinstance(T, InitialTransducer):
        T = T.machine
    k = synchronizing_level(T, kmax)
    if k is None:
        raise NotSynchronizing(f"not synchronizing within level {kmax}")
    current = set(T.states)
    for _ in range(k):
        current = {t for q in current for t in T.delta[q]}
    keep = [q for q in T.states if q in current]
    for q in keep:
        if set(reachable(T, q)) != current:
            raise InternalInvariantViolation("core of a synchronizing transducer is not strongly connected")
    return T.restrict(keep)


class Synchronicity(str, enum.Enum):
    BI = "bi_synchronizing"
    ONE_WAY = "one_way"
    NONE = "not_synchronizing"

    def __str__(self) -> str:
        return self.value


def classify_synchronicity(
    T: InitialTransducer, kmax: int = DEFAULT_KMAX, budget: Budget = DEFAULT_BUDGET
) -> Synchronicity:
    """Compare synchronization of the minimized machine and of its minimized inverse."""
    from .inversion import invert

    _, M = minimize(T)
    if synchronizing_level(M, kmax) is None:
        return Synchronicity.NONE
    _, N = minimize(invert(T, budget))
    if synchronizing_level(N, kmax) is None:
        return Synchronicity.ONE_WAY
    return Synchronicity.BI


def relation_classify(C: CollapsedAutomaton, word: str) -> int:
    """Class of ``word`` under the relation ∼_A induced by the collapsed automaton."""
    if not word:
        raise InputError("the relation is defined on nonempty words only")
    if C.original.initial is None:
        raise InputError("automaton has no initial state")
    return C.class_of[C.original.run(word)]


def related(C: CollapsedAutomaton, u: str, v: str) -> bool:
    return relation_classify(C, u) == relation_classify(C, v)
