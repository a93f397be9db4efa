"""Reference machines used by the examples, the tests and the CLI."""

from __future__ import annotations

from .machine import InitialTransducer, Transducer, identity_transducer

# Copies the first letter, then emits each letter XOR its predecessor.
PARITY = Transducer.from_notation(2, "a: 0|0->a 1|1->b; b: 0|1->a 1|0->b")

# The V_2 element 0 -> 00, 10 -> 01, 11 -> 1 followed by the identity.
XB = Transducer.from_notation(2, "p0: 0|00->id 1|ε->p1; p1: 0|01->id 1|1->id; id: 0|0->id 1|1->id")

# Injective, but its image (even 0-blocks) is not clopen.
DBL = Transducer.from_notation(2, "d: 0|00->d 1|1->d")

IDENTITY1 = identity_transducer(2)

# Synchronous, minimal, synchronizing at level 2 with all three states in the core.
SYNC2 = Transducer.from_notation(2, "A: 0|0->A 1|1->C; B: 0|1->A 1|0->C; C: 0|1->B 1|0->C")

BUILTINS: dict[str, InitialTransducer] = {
    "PARITY": InitialTransducer(PARITY, "a"),
    "XB": InitialTransducer(XB, "p0"),
    "DBL": InitialTransducer(DBL, "d"),
    "IDENTITY1": InitialTransducer(IDENTITY1, "id"),
    "SYNC2": InitialTransducer(SYNC2, "A"),
}


def _automata():
    from .synchronization import Automaton

    # ∼_B separates the words 0^k from everything else
    b = Automaton.from_table(2, {"a": ("a", "b"), "b": ("b", "b")}, "a")
    # ∼_C separates even from odd word lengths
    c = Automaton.from_table(2, {"a": ("b", "b"), "b": ("a", "a")}, "a")
    return b, c


AUTOMATON_B, AUTOMATON_C = _automata()
