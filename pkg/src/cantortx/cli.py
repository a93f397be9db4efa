"""The ``tx`` command-line driver.

Exit codes: 0 success, 1 negative verdict, 2 parse or input error,
3 budget exceeded.  ``TX_BUDGET=<configs>,<depth>`` overrides the budget.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    BudgetExceeded,
    EmptyPreimage,
    InputError,
    NotInjective,
    NotSurjective,
    NotSynchronizing,
    TransducerError,
)
from .group_actions import (
    automaton_group_ts,
    conjugate_overgroup,
    conjugate_subgroup,
    contracting_check,
    ts_machine,
    validate_viable,
)
from .image import is_partially_invertible
from .inversion import invert, partial_inverse
from .machine import (
    InitialTransducer,
    evaluate_ep,
    minimize,
    product_initial,
    state_label,
    validate,
)
from .prefix_maps import preserves_relation
from .synchronization import (
    DEFAULT_KMAX,
    Synchronicity,
    classify_synchronicity,
    collapse,
    core,
    relation_classify,
    synchronizing_level,
)
from .textio import (
    Document,
    emit_dot,
    format_completion,
    format_transducer,
    format_vmap,
    parse,
)
from .words import Budget, EpWord, parse_word, render

OK, NEGATIVE, INPUT, BUDGET = 0, 1, 2, 3


def _load(path: str) -> Document:
    if path == "builtin":
        return Document()
    if path == "-":
        return parse(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _state(T: InitialTransducer, label: str):
    for q in T.machine.states:
        if state_label(q) == label:
            return q
    raise InputError(f"no state {label!r}")


def _yn(flag) -> str:
    return "yes" if flag else "no"


# --------------------------------------------------------------------------
# commands


def cmd_validate(args, doc, budget):
    T = doc.transducer(args.machine)
    report = validate(T)
    print(f"accessible: {_yn(report.accessible)}")
    print("unreachable: " + " ".join(sorted(map(state_label, report.unreachable_states))))
    print("degenerate: " + " ".join(sorted(map(state_label, report.degenerate_states))))
    verdicts = is_partially_invertible(T.machine, budget) if not report.degenerate_states else None
    if verdicts is not None:
        for v in verdicts.verdicts:
            clopen = "unknown" if v.clopen is None else _yn(v.clopen)
            injective = "unknown" if v.injective is None else _yn(v.injective)
            print(f"state {state_label(v.state)} clopen-image: {clopen} injective: {injective}")
    print(f"ok: {_yn(report.ok)}")
    return OK if report.ok else NEGATIVE


def cmd_minimize(args, doc, budget):
    preamble, M = minimize(doc.transducer(args.machine))
    print(f"preamble: {render(preamble)}")
    print(format_transducer(f"{args.machine}_min", M))
    return OK


def cmd_invert(args, doc, budget):
    S = invert(doc.transducer(args.machine), budget)
    print(format_transducer(f"{args.machine}_inv", S))
    return OK


def cmd_product(args, doc, budget):
    P = product_initial(doc.transducer(args.first), doc.transducer(args.second))
    print(format_transducer(f"{args.first}_{args.second}", P))
    return OK


def cmd_sync_level(args, doc, budget):
    level = synchronizing_level(doc.automaton(args.machine), args.max)
    print(f"level: {'none' if level is None else level}")
    return OK if level is not None else NEGATIVE


def cmd_classify(args, doc, budget):
    verdict = classify_synchronicity(doc.transducer(args.machine), args.max, budget)
    print(verdict.value)
    return NEGATIVE if verdict == Synchronicity.NONE else OK


def cmd_core(args, doc, budget):
    T = doc.transducer(args.machine)
    C = core(T.machine, args.max)
    print(format_transducer(f"{args.machine}_core", C))
    return OK


def cmd_collapse(args, doc, budget):
    C = collapse(doc.automaton(args.machine))
    print(f"steps: {C.steps}")
    print(f"classes: {len(C.quotient.states)}")
    for q in C.original.states:
        print(f"class {state_label(q)} {C.class_of[q]}")
    return OK


def cmd_relation(args, doc, budget):
    C = collapse(doc.automaton(args.machine))
    for token in args.words:
        word = parse_word(token, C.original.n)
        print(f"{render(word)} {relation_classify(C, word)}")
    return OK


def cmd_member(args, doc, budget):
    C = collapse(doc.automaton(args.automaton))
    verdict = preserves_relation(doc.vmap(args.vmap), C)
    print(f"member: {_yn(verdict.member)}")
    for a, b, ca, cb in verdict.witnesses:
        print(f"pair {render(a)} {render(b)} classes {ca} {cb}")
    return OK if verdict.member else NEGATIVE


def cmd_conj(args, doc, budget):
    T = doc.transducer(args.machine)
    v = doc.vmap(args.vmap)
    if args.inverse:
        h = conjugate_overgroup(v, T, budget)
        over = f"{args.machine}_TS"
        print(format_transducer(over, h.U))
        print(format_completion(f"{args.vmap}_conj", h, over))
    else:
        print(format_vmap(f"{args.vmap}_conj", conjugate_subgroup(v, T, DEFAULT_KMAX, budget)))
    return OK


def cmd_group_ts(args, doc, budget):
    G = automaton_group_ts(doc.transducer(args.machine), args.max_order, budget)
    words = G.words()
    print(f"block_length: {G.block_length}")
    print(f"order: {G.order}")
    for g in G.generators:
        print("generator " + " ".join(f"{render(words[i])}>{render(words[j])}" for i, j in enumerate(g)))
    return OK


def cmd_viable(args, doc, budget):
    h = doc.completion(args.comp)
    verdict = validate_viable(h.U, h.leaves, budget)
    print(f"valid: {_yn(verdict.valid)}")
    print(f"effective: {_yn(verdict.effective)}")
    if verdict.reason:
        print(f"reason: {verdict.reason}")
    return OK if verdict.valid else NEGATIVE


def cmd_partial_inverse(args, doc, budget):
    P = partial_inverse(doc.transducer(args.machine).machine, budget)
    print(format_transducer(f"{args.machine}_pinv", P))
    return OK


def cmd_contracting(args, doc, budget):
    verdict = contracting_check(doc.transducer(args.machine).machine, args.len, args.depth, budget)
    print(f"verdict: {verdict.verdict}")
    print(f"checked: {verdict.products_checked}")
    if verdict.counterexample is not None:
        choice, state = verdict.counterexample
        print(f"counterexample: factors {''.join(map(str, choice))} state {state_label(state)}")
    if verdict.note:
        print(f"note: {verdict.note}")
    return {"contracting_to_depth": OK, "counterexample": NEGATIVE}.get(verdict.verdict, BUDGET)


def cmd_eval(args, doc, budget):
    T = doc.transducer(args.machine)
    q = T.initial if args.state == "-" else _state(T, args.state)
    print(evaluate_ep(T.machine, q, EpWord.parse(args.epword, T.n)))
    return OK


def cmd_dot(args, doc, budget):
    sys.stdout.write(emit_dot(doc.transducer(args.machine), args.machine))
    return OK


def cmd_ts(args, doc, budget):
    print(format_transducer(f"{args.machine}_TS", ts_machine(doc.transducer(args.machine), budget)))
    return OK


def cmd_paper_check(args, doc, budget):
    from .paper_check import run_all

    results = run_all()
    for r in results:
        print(r.line())
        for label, ok in r.items:
            if args.verbose or not ok:
                print(f"    {'ok' if ok else 'FAILED'}: {label}")
        if r.error:
            print(f"    error: {r.error}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return OK if passed == len(results) else NEGATIVE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tx", description="Transducers over Cantor space and the groups V_n.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text, *positional):
        sp = sub.add_parser(name, help=help_text)
        if positional and positional[0] == "file":
            sp.add_argument("file", help="document path, '-' for stdin, or 'builtin'")
            positional = positional[1:]
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=fn)
        return sp

    cmd("validate", cmd_validate, "accessibility, degeneracy and per-state image checks", "file", "machine")
    cmd("minimize", cmd_minimize, "minimal ω-equivalent transducer", "file", "machine")
    cmd("invert", cmd_invert, "inverse of a homeomorphism transducer", "file", "machine")
    cmd("product", cmd_product, "product of two initial transducers", "file", "first", "second")
    cmd("sync-level", cmd_sync_level, "synchronizing level", "file", "machine").add_argument(
        "--max", type=int, default=DEFAULT_KMAX)
    cmd("classify", cmd_classify, "bi-, one-way or not synchronizing", "file", "machine").add_argument(
        "--max", type=int, default=DEFAULT_KMAX)
    cmd("core", cmd_core, "core of a synchronizing transducer", "file", "machine").add_argument(
        "--max", type=int, default=DEFAULT_KMAX)
    cmd("collapse", cmd_collapse, "collapsing procedure", "file", "machine")
    sp = cmd("relation", cmd_relation, "classes of words under the induced relation", "file", "machine")
    sp.add_argument("words", nargs="+")
    cmd("member", cmd_member, "does a V_n element preserve the relation", "file", "automaton", "vmap")
    cmd("conj", cmd_conj, "conjugate a V_n element by a transducer", "file", "machine", "vmap").add_argument(
        "--inverse", action="store_true", help="conjugate by the inverse (overgroup side)")
    cmd("group-ts", cmd_group_ts, "the finite group G(TS)", "file", "machine").add_argument(
        "--max-order", type=int, default=100_000)
    cmd("viable", cmd_viable, "check a completion's viable combination", "file", "comp")
    cmd("partial-inverse", cmd_partial_inverse, "partial inverse transducer", "file", "machine")
    sp = cmd("contracting", cmd_contracting, "bounded contraction check", "file", "machine")
    sp.add_argument("--len", type=int, default=3)
    sp.add_argument("--depth", type=int, default=4)
    cmd("eval", cmd_eval, "evaluate on an eventually periodic word u(v)", "file", "machine", "state", "epword")
    cmd("dot", cmd_dot, "Graphviz export", "file", "machine")
    cmd("ts", cmd_ts, "full product of a machine with its inverse", "file", "machine")
    sp = sub.add_parser("paper-check", help="run the built-in reproduction suite")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_paper_check, file="builtin")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT if exc.code else OK
    try:
        budget = Budget.from_env()
        doc = _load(args.file)
        return args.func(args, doc, budget)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT
    except (NotSynchronizing, NotSurjective, NotInjective, EmptyPreimage) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NEGATIVE
    except TransducerError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
