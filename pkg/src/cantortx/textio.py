"""Line-based text format for machines, automata, V_n tables and completions.

::

    alphabet 2
    transducer PARITY
      state a b
      initial a
      trans a 0 a 0
      trans a 1 b 1
      trans b 0 a 1
      trans b 1 b 0
    end

Other blocks: ``automaton NAME`` (``trans q i next``), ``vmap NAME`` with
``pair α β`` lines, and ``comp NAME over MACHINE`` with ``leaf η ρ state``
lines.  ``#`` starts a comment; ``ε`` or ``-`` is the empty word.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import BUILTINS
from .errors import InputError
from .group_actions import CompletionMap
from .machine import InitialTransducer, State, Transducer, state_label
from .prefix_maps import PrefixExchangeMap
from .synchronization import Automaton
from .words import MAX_ALPHABET, render


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class Document:
    """Named objects parsed from one file, in declaration order."""

    transducers: dict[str, InitialTransducer] = field(default_factory=dict)
    automata: dict[str, Automaton] = field(default_factory=dict)
    vmaps: dict[str, PrefixExchangeMap] = field(default_factory=dict)
    completions: dict[str, CompletionMap] = field(default_factory=dict)

    def names(self) -> set[str]:
        return set(self.transducers) | set(self.automata) | set(self.vmaps) | set(self.completions)

    def transducer(self, name: str) -> InitialTransducer:
        if name in self.transducers:
            return self.transducers[name]
        if name in BUILTINS:
            return BUILTINS[name]
        raise InputError(f"no transducer named {name!r}")

    def automaton(self, name: str) -> Automaton:
        if name in self.automata:
            return self.automata[name]
        return Automaton.of(self.transducer(name))

    def vmap(self, name: str) -> PrefixExchangeMap:
        if name not in self.vmaps:
            raise InputError(f"no vmap named {name!r}")
        return self.vmaps[name]

    def completion(self, name: str) -> CompletionMap:
        if name not in self.completions:
            raise InputError(f"no completion named {name!r}")
        return self.completions[name]


# --------------------------------------------------------------------------
# parsing


@dataclass
class _Token:
    text: str
    line: int
    column: int


def _tokenize(line: str, number: int) -> list[_Token]:
    body = line.split("#", 1)[0]
    tokens = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        tokens.append(_Token(body[i:j], number, i + 1))
        i = j
    return tokens


def _word(tok: _Token, n: int) -> str:
    text = "" if tok.text in ("ε", "-") else tok.text
    for k, ch in enumerate(text):
        if not ch.isdigit() or int(ch) >= n:
            raise ParseError(f"letter {ch!r} out of range for alphabet {n}", tok.line, tok.column + k)
    return text


def _letter(tok: _Token, n: int) -> int:
    if not tok.text.isdigit() or int(tok.text) >= n:
        raise ParseError(f"letter {tok.text!r} out of range for alphabet {n}", tok.line, tok.column)
    return int(tok.text)


def _expect(tokens: list[_Token], count: int, usage: str) -> None:
    if len(tokens) != count:
        t = tokens[0]
        raise ParseError(f"expected '{usage}'", t.line, t.column)


class _Block:
    def __init__(self, kind: str, name: _Token, n: int, over: _Token | None = None):
        self.kind = kind
        self.name = name
        self.n = n
        self.over = over
        self.states: list[str] = []
        self.state_tok: dict[str, _Token] = {}
        self.initial: _Token | None = None
        self.trans: dict[tuple[str, int], tuple[_Token, str]] = {}
        self.pairs: list[tuple[str, str]] = []
        self.leaves: list[tuple[str, str, _Token]] = []


def parse(text: str) -> Document:
    """Parse a document; raises :class:`ParseError` with line and column."""
    doc = Document()
    n: int | None = None
    block: _Block | None = None
    last_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        last_line = number
        tokens = _tokenize(raw, number)
        if not tokens:
            continue
        head = tokens[0]
        kw = head.text
        if block is None:
            if kw == "alphabet":
                _expect(tokens, 2, "alphabet N")
                if not tokens[1].text.isdigit() or not 2 <= int(tokens[1].text) <= MAX_ALPHABET:
                    raise ParseError(f"alphabet size must be in 2..{MAX_ALPHABET}", number, tokens[1].column)
                n = int(tokens[1].text)
            elif kw in ("transducer", "automaton", "vmap", "comp"):
                if n is None:
                    raise ParseError("'alphabet' must precede the first block", number, head.column)
                if kw == "comp":
                    if len(tokens) != 4 or tokens[2].text != "over":
                        raise ParseError("expected 'comp NAME over MACHINE'", number, head.column)
                    block = _Block(kw, tokens[1], n, tokens[3])
                else:
                    _expect(tokens, 2, f"{kw} NAME")
                    block = _Block(kw, tokens[1], n)
                if block.name.text in doc.names():
                    raise ParseError(f"duplicate name {block.name.text!r}", number, block.name.column)
            else:
                raise ParseError(f"unexpected {kw!r}", number, head.column)
            continue
        if kw == "end":
            _expect(tokens, 1, "end")
            _finish(doc, block)
            block = None
        elif kw == "state" and block.kind in ("transducer", "automaton"):
            if len(tokens) < 2:
                raise ParseError("expected 'state NAME...'", number, head.column)
            for tok in tokens[1:]:
                if tok.text in block.state_tok:
                    raise ParseError(f"duplicate state {tok.text!r}", number, tok.column)
                block.states.append(tok.text)
                block.state_tok[tok.text] = tok
        elif kw == "initial" and block.kind in ("transducer", "automaton"):
            _expect(tokens, 2, "initial STATE")
            block.initial = tokens[1]
        elif kw == "trans" and block.kind in ("transducer", "automaton"):
            if block.kind == "transducer":
                _expect(tokens, 5, "trans STATE LETTER NEXT OUTPUT")
                out = _word(tokens[4], block.n)
            else:
                _expect(tokens, 4, "trans STATE LETTER NEXT")
                out = ""
            letter = _letter(tokens[2], block.n)
            key = (tokens[1].text, letter)
            if key in block.trans:
                raise ParseError(f"duplicate transition for {key[0]} on {letter}", number, head.column)
            for tok in (tokens[1], tokens[3]):
                if tok.text not in block.state_tok:
                    raise ParseError(f"unknown state {tok.text!r}", number, tok.column)
            block.trans[key] = (tokens[3], out)
        elif kw == "pair" and block.kind == "vmap":
            _expect(tokens, 3, "pair ALPHA BETA")
            block.pairs.append((_word(tokens[1], block.n), _word(tokens[2], block.n)))
        elif kw == "leaf" and block.kind == "comp":
            _expect(tokens, 4, "leaf ETA RHO STATE")
            block.leaves.append((_word(tokens[1], block.n), _word(tokens[2], block.n), tokens[3]))
        else:
            raise ParseError(f"unexpected {kw!r} in {block.kind} block", number, head.column)
    if block is not None:
        raise ParseError(f"block {block.name.text!r} lacks 'end'", last_line + 1)
    return doc


def _finish(doc: Document, b: _Block) -> None:
    name, line = b.name.text, b.name.line
    try:
        if b.kind in ("transducer", "automaton"):
            if not b.states:
                raise ParseError("block declares no states", line, b.name.column)
            delta, lam = {}, {}
            for q in b.states:
                succ, outs = [], []
                for i in range(b.n):
                    if (q, i) not in b.trans:
                        tok = b.state_tok[q]
                        raise ParseError(f"state {q!r} lacks a transition on {i}", tok.line, tok.column)
                    nxt, out = b.trans[(q, i)]
                    succ.append(nxt.text)
                    outs.append(out)
                delta[q] = tuple(succ)
                lam[q] = tuple(outs)
            initial = b.states[0]
            if b.initial is not None:
                if b.initial.text not in b.state_tok:
                    raise ParseError(f"unknown state {b.initial.text!r}", b.initial.line, b.initial.column)
                initial = b.initial.text
            if b.kind == "transducer":
                T = Transducer(b.n, tuple(b.states), delta, lam)
                doc.transducers[name] = InitialTransducer(T, initial)
            else:
                doc.automata[name] = Automaton(b.n, tuple(b.states), delta, initial)
        elif b.kind == "vmap":
            doc.vmaps[name] = PrefixExchangeMap.of(b.n, b.pairs)
        else:
            over = b.over.text
            U = doc.transducer(over).machine
            labels = {state_label(q): q for q in U.states}
            leaves = []
            for eta, rho, tok in b.leaves:
                if tok.text not in labels:
                    raise ParseError(f"{tok.text!r} is not a state of {over}", tok.line, tok.column)
                leaves.append((eta, rho, labels[tok.text]))
            doc.completions[name] = CompletionMap.of(U, leaves, over=over, budget=None)
    except ParseError:
        raise
    except InputError as exc:
        raise ParseError(f"{b.kind} {name}: {exc}", line, b.name.column) from None


# --------------------------------------------------------------------------
# serialization


def format_transducer(name: str, T: InitialTransducer | Transducer) -> str:
    if isinstance(T, Transducer):
        T = InitialTransducer(T, T.states[0])
    M = T.machine
    lines = [f"transducer {name}", "  state " + " ".join(state_label(q) for q in M.states)]
    lines.append(f"  initial {state_label(T.initial)}")
    for q in M.states:
        for i in range(M.n):
            lines.append(f"  trans {state_label(q)} {i} {state_label(M.delta[q][i])} {render(M.lam[q][i])}")
    lines.append("end")
    return "\n".join(lines)


def format_automaton(name: str, A: Automaton) -> str:
    lines = [f"automaton {name}", "  state " + " ".join(state_label(q) for q in A.states)]
    if A.initial is not None:
        lines.append(f"  initial {state_label(A.initial)}")
    for q in A.states:
        for i in range(A.n):
            lines.append(f"  trans {state_label(q)} {i} {state_label(A.delta[q][i])}")
    lines.append("end")
    return "\n".join(lines)


def format_vmap(name: str, v: PrefixExchangeMap) -> str:
    lines = [f"vmap {name}"]
    lines += [f"  pair {render(a)} {render(b)}" for a, b in v.table]
    lines.append("end")
    return "\n".join(lines)


def format_completion(name: str, h: CompletionMap, over: str | None = None) -> str:
    lines = [f"comp {name} over {over or h.over}"]
    lines += [f"  leaf {render(e)} {render(r)} {state_label(p)}" for e, r, p in h.leaves]
    lines.append("end")
    return "\n".join(lines)


def serialize(doc: Document) -> str:
    """Canonical text of a document: one alphabet line, then blocks by kind."""
    ns = {T.n for T in doc.transducers.values()} | {A.n for A in doc.automata.values()}
    ns |= {v.n for v in doc.vmaps.values()} | {h.n for h in doc.completions.values()}
    if len(ns) > 1:
        raise InputError("a serialized document uses a single alphabet")
    parts = [f"alphabet {ns.pop() if ns else 2}"]
    parts += [format_transducer(k, T) for k, T in doc.transducers.items()]
    parts += [format_automaton(k, A) for k, A in doc.automata.items()]
    parts += [format_vmap(k, v) for k, v in doc.vmaps.items()]
    parts += [format_completion(k, h) for k, h in doc.completions.items()]
    return "\n".join(parts) + "\n"


def emit_dot(T: InitialTransducer | Transducer, name: str = "T") -> str:
    """Graphviz text; the initial state is drawn as a double circle."""
    if isinstance(T, Transducer):
        T = InitialTransducer(T, T.states[0])
    M = T.machine
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for q in M.states:
        shape = "doublecircle" if q == T.initial else "circle"
        lines.append(f'  "{state_label(q)}" [shape={shape}];')
    for q in M.states:
        for i in range(M.n):
            lines.append(f'  "{state_label(q)}" -> "{state_label(M.delta[q][i])}" [label="{i}|{render(M.lam[q][i])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def relabel_for_output(T: InitialTransducer) -> InitialTransducer:
    """Replace structured state names by their printed labels."""
    names: dict[State, str] = {q: state_label(q) for q in T.machine.states}
    if len(set(names.values())) != len(names):
        raise InputError("state labels collide")
    return InitialTransducer(T.machine.relabel(names), names[T.initial])
