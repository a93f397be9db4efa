"""Transducers over X_n: construction, evaluation, products and minimization."""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .errors import AlphabetMismatch, FixpointDivergence, InputError, NonProductiveCycle
from .words import EpWord, check_alphabet, check_word, lcp, render

State = Hashable


class InvState(NamedTuple):
    """A state ``(residual, base)`` of an inverse or partial inverse."""

    residual: str
    base: Any


def state_label(state: State) -> str:
    """Render a state as a single whitespace-free token."""
    if isinstance(state, InvState):
        if not state.residual and not isinstance(state.base, tuple):
            return f"{state_label(state.base)}⁻¹"
        return f"({render(state.residual)},{state_label(state.base)})"
    if isinstance(state, tuple):
        return "·".join(state_label(s) for s in state)
    return str(state)


@dataclass(frozen=True, eq=False)
class Transducer:
    """A finite transducer ``<X_n, Q, π, λ>``.

    ``delta[q][i]`` is the successor of ``q`` on letter ``i`` and ``lam[q][i]``
    the emitted word.  Instances are immutable.
    """

    n: int
    states: tuple[State, ...]
    delta: Mapping[State, tuple[State, ...]]
    lam: Mapping[State, tuple[str, ...]]
    _index: Mapping[State, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        check_alphabet(self.n)
        if len(set(self.states)) != len(self.states):
            raise InputError("state names must be unique")
        known = set(self.states)
        delta = {}
        lam = {}
        for q in self.states:
            if q not in self.delta or q not in self.lam:
                raise InputError(f"state {state_label(q)} lacks transitions")
            succ = tuple(self.delta[q])
            outs = tuple(self.lam[q])
            if len(succ) != self.n or len(outs) != self.n:
                raise InputError(f"state {state_label(q)} must have exactly {self.n} transitions")
            for target in succ:
                if target not in known:
                    raise InputError(f"transition from {state_label(q)} to unknown state {state_label(target)}")
            for out in outs:
                check_word(out, self.n)
            delta[q] = succ
            lam[q] = outs
        object.__setattr__(self, "delta", MappingProxyType(delta))
        object.__setattr__(self, "lam", MappingProxyType(lam))
        object.__setattr__(self, "_index", MappingProxyType({q: i for i, q in enumerate(self.states)}))

    @classmethod
    def from_table(cls, n: int, table: Mapping[State, Sequence[tuple[State, str]]]) -> "Transducer":
        """Build from ``{state: [(next, output) for each letter]}``."""
        states = tuple(table)
        return cls(
            n,
            states,
            {q: tuple(t for t, _ in row) for q, row in table.items()},
            {q: tuple(o for _, o in row) for q, row in table.items()},
        )

    @classmethod
    def from_notation(cls, n: int, text: str) -> "Transducer":
        """Build from compact notation ``"a: 0|0->a 1|1->b; b: 0|1->a 1|0->b"``.

        ``ε`` or ``-`` marks an empty output.
        """
        table: dict[str, list] = {}
        for chunk in filter(None, (c.strip() for c in text.split(";"))):
            name, _, body = chunk.partition(":")
            row: dict[int, tuple[str, str]] = {}
            for item in body.replace(",", " ").split():
                m = re.fullmatch(r"(\d)\|([0-9ε-]*)->(\S+)", item)
                if not m:
                    raise InputError(f"bad transition {item!r}")
                out = m.group(2)
                row[int(m.group(1))] = (m.group(3), "" if out in ("ε", "-") else out)
            if sorted(row) != list(range(n)):
                raise InputError(f"state {name.strip()} must define letters 0..{n - 1}")
            table[name.strip()] = [row[i] for i in range(n)]
        return cls.from_table(n, table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transducer):
            return NotImplemented
        return (
            self.n == other.n
            and self.states == other.states
            and dict(self.delta) == dict(other.delta)
            and dict(self.lam) == dict(other.lam)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.states, tuple(self.delta[q] for q in self.states), tuple(self.lam[q] for q in self.states)))

    def __repr__(self) -> str:
        return f"Transducer(n={self.n}, states={len(self.states)})"

    def index(self, q: State) -> int:
        return self._index[q]

    def step(self, q: State, letter: int) -> tuple[str, State]:
        return self.lam[q][letter], self.delta[q][letter]

    def is_synchronous(self) -> bool:
        return all(len(o) == 1 for q in self.states for o in self.lam[q])

    def max_output_len(self) -> int:
        return max((len(o) for q in self.states for o in self.lam[q]), default=0)

    def at(self, q: State) -> "InitialTransducer":
        return InitialTransducer(self, q)

    def restrict(self, keep: Iterable[State]) -> "Transducer":
        keep_set = set(keep)
        states = tuple(q for q in self.states if q in keep_set)
        for q in states:
            if not set(self.delta[q]) <= keep_set:
                raise InputError("restriction is not closed under transitions")
        return Transducer(self.n, states, {q: self.delta[q] for q in states}, {q: self.lam[q] for q in states})

    def relabel(self, names: Mapping[State, State]) -> "Transducer":
        return Transducer(
            self.n,
            tuple(names[q] for q in self.states),
            {names[q]: tuple(names[t] for t in self.delta[q]) for q in self.states},
            {names[q]: self.lam[q] for q in self.states},
        )

    def with_outputs(self, lam: Mapping[State, tuple[str, ...]]) -> "Transducer":
        return Transducer(self.n, self.states, self.delta, lam)


@dataclass(frozen=True)
class InitialTransducer:
    machine: Transducer
    initial: State

    def __post_init__(self) -> None:
        if self.initial not in self.machine.delta:
            raise InputError(f"initial state {state_label(self.initial)} is not a state")

    @property
    def n(self) -> int:
        return self.machine.n

    def accessible(self) -> "InitialTransducer":
        reach = reachable(self.machine, self.initial)
        if len(reach) == len(self.machine.states):
            return self
        return InitialTransducer(self.machine.restrict(reach), self.initial)

    def __call__(self, x: EpWord) -> EpWord:
        return evaluate_ep(self.machine, self.initial, x)


def identity_transducer(n: int, name: State = "id") -> Transducer:
    check_alphabet(n)
    return Transducer(n, (name,), {name: (name,) * n}, {name: tuple(str(i) for i in range(n))})


def is_identity_state(T: Transducer, q: State) -> bool:
    return all(T.delta[q][i] == q and T.lam[q][i] == str(i) for i in range(T.n))


def reachable(T: Transducer, start: State) -> list[State]:
    """States accessible from ``start`` in breadth-first, letter-increasing order."""
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for t in T.delta[q]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    accessible: bool
    unreachable_states: frozenset
    degenerate_states: frozenset
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.accessible and not self.degenerate_states


def nonproductive_states(T: Transducer) -> set[State]:
    """States lying on a cycle all of whose outputs are empty."""
    succ = {q: {T.delta[q][i] for i in range(T.n) if T.lam[q][i] == ""} for q in T.states}
    # Tarjan's SCC on the empty-output subgraph.
    index: dict[State, int] = {}
    low: dict[State, int] = {}
    on_stack: set[State] = set()
    stack: list[State] = []
    bad: set[State] = set()
    counter = itertools.count()

    def strongconnect(v: State) -> None:
        work = [(v, iter(succ[v]))]
        index[v] = low[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                if len(comp) > 1 or node in succ[node]:
                    bad.update(comp)

    for q in T.states:
        if q not in index:
            strongconnect(q)
    return bad


def validate(T: InitialTransducer) -> ValidationReport:
    reach = set(reachable(T.machine, T.initial))
    unreachable = frozenset(q for q in T.machine.states if q not in reach)
    degenerate = frozenset(nonproductive_states(T.machine))
    notes = []
    if unreachable:
        notes.append(f"{len(unreachable)} state(s) unreachable from {state_label(T.initial)}")
    if degenerate:
        notes.append("empty-output cycle: induced map leaves Cantor space")
    return ValidationReport(not unreachable, unreachable, degenerate, "; ".join(notes))


# --------------------------------------------------------------------------
# evaluation


def evaluate_prefix(T: Transducer, q: State, word: str) -> tuple[str, State]:
    check_word(word, T.n)
    out = []
    delta, lam = T.delta, T.lam
    for ch in word:
        i = ord(ch) - 48
        out.append(lam[q][i])
        q = delta[q][i]
    return "".join(out), q


def evaluate_ep(T: Transducer, q: State, x: EpWord) -> EpWord:
    """Image of the infinite word ``x`` under ``T_q``."""
    delta, lam = T.delta, T.lam
    out: list[str] = []
    for ch in x.pre:
        i = ord(ch) - 48
        out.append(lam[q][i])
        q = delta[q][i]
    period = [ord(ch) - 48 for ch in x.per]
    seen: dict[State, int] = {}
    marks: list[int] = []
    emitted = sum(len(o) for o in out)
    while q not in seen:
        seen[q] = len(marks)
        marks.append(emitted)
        for i in period:
            o = lam[q][i]
            out.append(o)
            emitted += len(o)
            q = delta[q][i]
    start = marks[seen[q]]
    text = "".join(out)
    cycle = text[start:]
    if not cycle:
        raise NonProductiveCycle(f"state {state_label(q)} loops on {x.per!r} without output")
    return EpWord.of(text[:start], cycle)


# --------------------------------------------------------------------------
# products


def _product_step(T: Transducer, R: Transducer, t: State, r: State, i: int) -> tuple[str, tuple]:
    mid = T.lam[t][i]
    rq = r
    out = []
    for ch in mid:
        j = ord(ch) - 48
        out.append(R.lam[rq][j])
        rq = R.delta[rq][j]
    return "".join(out), (T.delta[t][i], rq)


def product(T: Transducer, R: Transducer, start: tuple | None = None) -> Transducer:
    """The product ``TR`` (first ``T`` then ``R``) on state pairs.

    With ``start`` the result is restricted to pairs accessible from it;
    otherwise all of ``Q_T × Q_R`` is built.
    """
    if T.n != R.n:
        raise AlphabetMismatch(f"alphabet sizes differ: {T.n} vs {R.n}")
    if start is None:
        pending = list(itertools.product(T.states, R.states))
    else:
        pending = [start]
    delta: dict = {}
    lam: dict = {}
    order: list = []
    queue = deque(pending)
    seen = set(pending)
    while queue:
        t, r = queue.popleft()
        order.append((t, r))
        succ = []
        outs = []
        for i in range(T.n):
            o, nxt = _product_step(T, R, t, r, i)
            succ.append(nxt)
            outs.append(o)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
        delta[(t, r)] = tuple(succ)
        lam[(t, r)] = tuple(outs)
    if start is None:
        order = list(itertools.product(T.states, R.states))
    return Transducer(T.n, tuple(order), delta, lam)


def product_initial(A: InitialTransducer, B: InitialTransducer) -> InitialTransducer:
    start = (A.initial, B.initial)
    return InitialTransducer(product(A.machine, B.machine, start), start)


def disjoint_union(*machines: Transducer) -> Transducer:
    """States are tagged ``(k, q)`` with ``k`` the position of the machine."""
    n = machines[0].n
    states, delta, lam = [], {}, {}
    for k, M in enumerate(machines):
        if M.n != n:
            raise AlphabetMismatch("alphabet sizes differ")
        for q in M.states:
            states.append((k, q))
            delta[(k, q)] = tuple((k, t) for t in M.delta[q])
            lam[(k, q)] = M.lam[q]
    return Transducer(n, tuple(states), delta, lam)


# --------------------------------------------------------------------------
# incomplete response and minimization


def common_prefixes(T: Transducer) -> dict[State, str]:
    """For every state, the longest common prefix of all its outputs.

    Iterates ``c(q) = lcp_x λ(x,q)·c(π(x,q))`` from ``c = ε`` to a fixpoint.
    """
    bad = nonproductive_states(T)
    if bad:
        raise NonProductiveCycle(f"empty-output cycle through {sorted(map(state_label, bad))}")
    bound = len(T.states) * (1 + T.max_output_len())
    c = {q: "" for q in T.states}
    while True:
        nxt = {q: lcp(T.lam[q][i] + c[T.delta[q][i]] for i in range(T.n)) for q in T.states}
        if nxt == c:
            return c
        for q, w in nxt.items():
            if len(w) > bound:
                raise FixpointDivergence(f"common output prefix of {state_label(q)} exceeds {bound}")
        c = nxt


def remove_incomplete_response_machine(T: Transducer) -> tuple[dict[State, str], Transducer]:
    c = common_prefixes(T)
    lam = {}
    for q in T.states:
        lam[q] = tuple((T.lam[q][i] + c[T.delta[q][i]])[len(c[q]):] for i in range(T.n))
    return c, T.with_outputs(lam)


def remove_incomplete_response(T: InitialTransducer) -> tuple[str, InitialTransducer]:
    """Return ``(preamble, T̂)`` with ``T = preamble · T̂`` and no incomplete response."""
    c, hat = remove_incomplete_response_machine(T.machine)
    return c[T.initial], InitialTransducer(hat, T.initial)


def _refine(T: Transducer, initial_key: Mapping[State, Any]) -> dict[State, int]:
    """Coarsest partition compatible with outputs and successor classes."""
    keys: dict[Any, int] = {}
    cls = {}
    for q in T.states:
        cls[q] = keys.setdefault(initial_key[q], len(keys))
    while True:
        keys = {}
        nxt = {}
        for q in T.states:
            sig = (cls[q], T.lam[q], tuple(cls[t] for t in T.delta[q]))
            nxt[q] = keys.setdefault(sig, len(keys))
        if len(keys) == len(set(cls.values())):
            return nxt
        cls = nxt


def omega_classes(T: Transducer) -> dict[State, int]:
    """Map each state to an id shared exactly by its ω-equivalent states."""
    c, hat = remove_incomplete_response_machine(T)
    return _refine(hat, c)


def minimize(T: InitialTransducer) -> tuple[str, InitialTransducer]:
    """Minimal transducer ω-equivalent to ``T`` after a preamble.

    States of the result are the integers ``0..m-1`` in breadth-first order
    from the initial state.
    """
    acc = T.accessible()
    preamble, hat = remove_incomplete_response(acc)
    M = hat.machine
    cls = _refine(M, {q: 0 for q in M.states})
    rep: dict[int, State] = {}
    for q in M.states:
        rep.setdefault(cls[q], q)
    # breadth-first numbering on the quotient
    number = {cls[acc.initial]: 0}
    queue = deque([cls[acc.initial]])
    delta, lam = {}, {}
    while queue:
        k = queue.popleft()
        q = rep[k]
        succ = []
        for t in M.delta[q]:
            kt = cls[t]
            if kt not in number:
                number[kt] = len(number)
                queue.append(kt)
            succ.append(number[kt])
        delta[number[k]] = tuple(succ)
        lam[number[k]] = M.lam[q]
    states = tuple(range(len(number)))
    return preamble, InitialTransducer(Transducer(M.n, states, delta, lam), 0)


def canonical_key(T: InitialTransducer) -> tuple:
    """Hashable key equal for two initial transducers iff they are ω-equal."""
    preamble, M = minimize(T)
    m = M.machine
    return (m.n, preamble, tuple((m.delta[q], m.lam[q]) for q in m.states))


def omega_equal(T: InitialTransducer, R: InitialTransducer) -> bool:
    if T.n != R.n:
        raise AlphabetMismatch("alphabet sizes differ")
    return canonical_key(T) == canonical_key(R)


def is_identity_map(T: InitialTransducer) -> bool:
    preamble, M = minimize(T)
    return preamble == "" and len(M.machine.states) == 1 and is_identity_state(M.machine, 0)
