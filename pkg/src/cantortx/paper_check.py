"""Executable reproduction suite for the worked examples and theorems.

Each check returns named sub-results; a check passes iff all of them do.
The same functions back ``tx paper-check`` and the acceptance tests.
"""

from __future__ import annotations

import contextlib
import io
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable

from .corpus import BUILTINS, AUTOMATON_B, AUTOMATON_C, DBL, PARITY
from .group_actions import (
    automaton_group_ts,
    completion_compose,
    completion_invert,
    conjugate_overgroup,
    conjugate_subgroup,
    contracting_check,
)
from .image import is_partially_invertible
from .inversion import invert, partial_inverse, verify_inverse
from .machine import (
    InitialTransducer,
    InvState,
    Transducer,
    disjoint_union,
    is_identity_map,
    minimize,
    omega_classes,
    omega_equal,
    product,
    product_initial,
)
from .prefix_maps import (
    PrefixExchangeMap,
    from_transducer,
    preserves_relation,
    random_element,
    random_preserving,
    random_small_swap,
    small_swap,
    to_transducer,
)
from .synchronization import (
    Synchronicity,
    classify_synchronicity,
    collapse,
    relation_classify,
    synchronizing_level,
    synchronizing_level_bruteforce,
)
from .words import EpWord, ep_words, words_of_length, words_up_to

SEED = 20240601
EP_DEPTH = 10

FLIP = Transducer.from_notation(2, "f: 0|1->f 1|0->f")


@dataclass
class CheckResult:
    number: int
    title: str
    items: list[tuple[str, bool]] = field(default_factory=list)
    seconds: float = 0.0
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and bool(self.items) and all(ok for _, ok in self.items)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number}. {self.title} ({self.seconds:.1f}s)"


_EP_CACHE: dict[int, list[EpWord]] = {}


def _ep(depth: int = EP_DEPTH) -> list[EpWord]:
    if depth not in _EP_CACHE:
        _EP_CACHE[depth] = ep_words(2, depth)
    return _EP_CACHE[depth]


def _parity_a() -> InitialTransducer:
    return BUILTINS["PARITY"]


# --------------------------------------------------------------------------


def check_1() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T)
    M = S.machine
    C = collapse(S)
    cls = {k % 2: relation_classify(C, "1" * k if k else "0") for k in (0, 1)}
    parity_ok = cls[0] != cls[1] and all(
        relation_classify(C, w) == cls[w.count("1") % 2] for w in words_up_to(2, 10) if w
    )
    return [
        ("synchronizing level of PARITY is 1", synchronizing_level(PARITY) == 1),
        ("PARITY_a is one-way synchronizing", classify_synchronicity(T) == Synchronicity.ONE_WAY),
        ("inverse automaton has 2 states", len(M.states) == 2),
        ("inverse: letter 0 fixes every state", all(M.delta[x][0] == x for x in M.states)),
        ("inverse: letter 1 moves every state", all(M.delta[x][1] != x for x in M.states)),
        ("relation = parity of ones on all words of length 1..10", parity_ok),
    ]


def check_2() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T).machine
    TS = product(PARITY, S)
    a_, b_ = InvState("", "a"), InvState("", "b")
    at = lambda t, s: InitialTransducer(TS, (t, s))  # noqa: E731
    flip = InitialTransducer(FLIP, "f")
    return [
        ("TS has 4 states", len(TS.states) == 4),
        ("(a,a⁻¹) is the identity", is_identity_map(at("a", a_))),
        ("(b,b⁻¹) is the identity", is_identity_map(at("b", b_))),
        ("(a,b⁻¹) ω-equals (b,a⁻¹)", omega_equal(at("a", b_), at("b", a_))),
        ("(a,b⁻¹) complements every letter", omega_equal(at("a", b_), flip)),
        ("G(TS) has order 2", automaton_group_ts(T).order == 2),
    ]


def check_3() -> list[tuple[str, bool]]:
    rng = random.Random(SEED + 3)
    machines = [("PARITY_a", _parity_a()), ("XB_p0", BUILTINS["XB"])]
    machines += [(f"random V_2 element {i}", to_transducer(random_element(2, rng))) for i in range(25)]
    xs = _ep()
    out = []
    cert_ok = trip_ok = True
    for name, T in machines:
        S = invert(T)
        if not verify_inverse(T, S).ok:
            cert_ok = False
            out.append((f"certificate for {name}", False))
        if not all(S(T(x)) == x and T(S(x)) == x for x in xs):
            trip_ok = False
            out.append((f"round trip for {name}", False))
    out.insert(0, (f"verify_inverse on {len(machines)} machines", cert_ok))
    out.insert(1, (f"pointwise round trip on {len(xs)} EpWords", trip_ok))
    return out


def check_4() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T)
    C = collapse(S)
    rng = random.Random(SEED + 4)
    expected = PrefixExchangeMap.of(2, [("00", "11"), ("01", "10"), ("10", "01"), ("11", "00")])
    instance = conjugate_subgroup(small_swap("0", "1"), T) == expected
    sub_ok = True
    for _ in range(100):
        c = conjugate_subgroup(random_small_swap(2, rng), T)
        sub_ok &= preserves_relation(c, C).member
    over_ok = True
    for _ in range(50):
        v = random_preserving(C, rng)
        machine = product_initial(product_initial(T, to_transducer(v)), S)
        over_ok &= from_transducer(machine, kmax=64) is not None
    return [
        ("(0,1)^PARITY_a = {00↔11, 01↔10}", instance),
        ("100 conjugated small swaps lie in V_2 and preserve ∼_A", sub_ok),
        ("50 parity-preserving maps conjugated by PARITY_a⁻¹ lie in V_2", over_ok),
    ]


def check_5() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T)
    rng = random.Random(SEED + 5)
    xs = _ep()
    tx = [T(x) for x in xs]
    h0 = conjugate_overgroup(small_swap("0", "1"), T)
    flip = InitialTransducer(FLIP, "f")
    instance = all(h0(x) == flip(x) for x in xs) and [(e, r) for e, r, _ in h0.leaves] == [("0", "1"), ("1", "0")]
    agree = True
    strict = from_transducer(h0.machine_form()) is None
    for _ in range(50):
        v = random_small_swap(2, rng)
        h = conjugate_overgroup(v, T)
        for x, y in zip(xs, tx):
            if h(x) != S(v(y)):
                agree = False
                break
        strict |= from_transducer(h.machine_form()) is None
    return [
        ("(0,1)^{PARITY_a⁻¹} swaps the first letter and complements the rest", instance),
        ("50 conjugates agree with T∘v∘S on all EpWords", agree),
        ("some conjugate lies outside V_2", strict),
    ]


def _sync_criterion(T: InitialTransducer) -> tuple[bool, int | None]:
    """Whether every ``S_{p⁻¹} T_q`` is a V_n element acting trivially after ``k`` letters."""
    _, M = minimize(T)
    S = invert(M)
    level = synchronizing_level(M.machine)
    bound = len(M.machine.states) + 1 if level is None else level
    for q in M.machine.states:
        table = from_transducer(product_initial(S, InitialTransducer(M.machine, q)))
        if table is None or max(len(a) for a in table.domain) > bound:
            return False, level
    return True, level


def check_6() -> list[tuple[str, bool]]:
    out = []
    for name in ("PARITY", "SYNC2"):
        T = BUILTINS[name]
        ok, level = _sync_criterion(T)
        out.append((f"{name}: all S_p⁻¹T_q are trivial-core prefix maps", ok and level is not None))
        out.append((f"{name}: collapse count = brute-force level", level == synchronizing_level_bruteforce(T.machine, 6)))
    out.append(("PARITY level is 1 and SYNC2 level is 2", synchronizing_level(PARITY) == 1
                and synchronizing_level(BUILTINS["SYNC2"].machine) == 2))
    inv = invert(_parity_a())
    ok, level = _sync_criterion(inv)
    out.append(("non-synchronizing inverse fails the criterion", not ok and level is None))
    return out


def check_7() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T).machine
    ts = contracting_check(product(PARITY, S), 3, 4)
    st = contracting_check(product(S, PARITY), 3, 4)
    return [
        ("TS contracting to depth (L=3, D=4)", ts.verdict == "contracting_to_depth"),
        ("ST contracting to depth (L=3, D=4)", st.verdict == "contracting_to_depth"),
    ]


def check_8() -> list[tuple[str, bool]]:
    T = _parity_a()
    S = invert(T).machine
    P = partial_inverse(PARITY)
    cls = omega_classes(disjoint_union(P, S))
    targets = {cls[(1, s)] for s in S.states}
    p_ok = all(cls[(0, p)] in targets for p in P.states)
    TS = product(PARITY, S)
    PT = partial_inverse(TS)
    cls = omega_classes(disjoint_union(PT, TS))
    targets = {cls[(1, s)] for s in TS.states}
    after = {PT.delta[PT.delta[p][i]][j] for p in PT.states for i in range(2) for j in range(2)}
    ts_ok = all(cls[(0, p)] in targets for p in after)
    xs = _ep()
    rng = random.Random(SEED + 8)
    trip = True
    for v in [small_swap("0", "1")] + [random_small_swap(2, rng) for _ in range(4)]:
        h = conjugate_overgroup(v, T)
        hi = completion_invert(h)
        there = completion_compose(h, hi)
        back = completion_compose(hi, h)
        trip &= all(there(x) == x and back(x) == x for x in xs)
    return [
        ("every state of PARITY' is a state of the inverse", p_ok),
        ("(TS)' settles into TS states after 2 letters", ts_ok),
        ("completion inverse round trips on all EpWords", trip),
    ]


def _zero_star(w: str) -> bool:
    return set(w) == {"0"}


def check_9() -> list[tuple[str, bool]]:
    CB, CC = collapse(AUTOMATON_B), collapse(AUTOMATON_C)
    rng = random.Random(SEED + 9)
    samples = [random_element(2, rng) for _ in range(300)]
    samples += [small_swap(a, b) for a in words_up_to(2, 3) for b in words_up_to(2, 3)
                if a and b and not (a.startswith(b) or b.startswith(a))]
    b_ok = c_ok = True
    for v in samples:
        moves = any(_zero_star(a) != _zero_star(b) for a, b in v.table if a)
        b_ok &= preserves_relation(v, CB).member == (not moves)
        mixes = any(len(a) % 2 != len(b) % 2 for a, b in v.table if a)
        c_ok &= preserves_relation(v, CC).member == (not mixes)
    blocks = list(words_of_length(2, 2))
    v4_ok = True
    count = 0
    for prefix in [""] + blocks:
        for _ in range(12):
            perm = blocks[:]
            rng.shuffle(perm)
            pairs = [(prefix + a, prefix + b) for a, b in zip(blocks, perm)]
            pairs += [(w, w) for w in blocks if prefix and w != prefix]
            v = PrefixExchangeMap.of(2, pairs)
            v4_ok &= preserves_relation(v, CC).member
            count += 1
    return [
        ("B rejects exactly the maps moving 0* prefixes off 0*", b_ok),
        ("C rejects exactly the maps mixing length parities", c_ok),
        (f"C accepts {count} level-2 block permutations", v4_ok),
    ]


def check_10() -> list[tuple[str, bool]]:
    from . import cli
    from .textio import format_transducer, format_vmap

    report = is_partially_invertible(DBL)
    d = report["d"]
    inv = invert(_parity_a())
    text = "alphabet 2\n" + format_transducer("PINV", inv) + "\n" + format_vmap("SWAP", small_swap("0", "1")) + "\n"
    fd, path = tempfile.mkstemp(suffix=".tx")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            code = cli.main(["conj", path, "PINV", "SWAP"])
    finally:
        os.unlink(path)
    return [
        ("DBL fails the clopen check by exhausting the budget", not report.passed and d.clopen is None
         and "budget" in d.note),
        ("non-synchronizing machine classifies as not_synchronizing",
         classify_synchronicity(inv) == Synchronicity.NONE),
        ("conj refuses the non-synchronizing machine with exit code 1", code == 1),
    ]


CHECKS: dict[int, tuple[str, Callable[[], list[tuple[str, bool]]]]] = {
    1: ("PARITY synchronization and the parity relation", check_1),
    2: ("TS states and G(TS) of order 2", check_2),
    3: ("inversion soundness on corpus and random V_2 elements", check_3),
    4: ("conjugation into V_n and the relation ∼_A", check_4),
    5: ("conjugation into the overgroup V_n(TS)", check_5),
    6: ("synchronicity criterion for synchronous machines", check_6),
    7: ("TS and ST are contracting at desk scale", check_7),
    8: ("partial inverse and inverse completions", check_8),
    9: ("relations of automata B and C", check_9),
    10: ("negative controls", check_10),
}


def run_check(number: int) -> CheckResult:
    title, fn = CHECKS[number]
    result = CheckResult(number, title)
    start = time.perf_counter()
    try:
        result.items = fn()
    except Exception as exc:  # a crash is reported as a failure, not hidden
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.perf_counter() - start
    return result


def run_all() -> list[CheckResult]:
    return [run_check(k) for k in sorted(CHECKS)]
