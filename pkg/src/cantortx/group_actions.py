"""Conjugating V_n by transducers, completions, G(TS), contraction and flexibility."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import (
    BudgetExceeded,
    InputError,
    InternalInvariantViolation,
    NotSynchronizing,
    OrderBudgetExceeded,
    TransducerError,
)
from .image import image_antichain
from .inversion import invert, partial_inverse
from .machine import (
    InitialTransducer,
    State,
    Transducer,
    canonical_key,
    disjoint_union,
    evaluate_ep,
    evaluate_prefix,
    minimize,
    omega_classes,
    product,
    product_initial,
    state_label,
)
from .prefix_maps import PrefixExchangeMap, from_transducer, to_transducer
from .synchronization import DEFAULT_KMAX, synchronizing_level
from .words import (
    DEFAULT_BUDGET,
    Budget,
    ConeAntichain,
    EpWord,
    check_word,
    complement,
    is_antichain,
    is_complete_code,
    length_lex,
    letters,
    render,
    words_of_length,
)


def _require_synchronizing(T: InitialTransducer, kmax: int) -> int:
    _, M = minimize(T)
    k = synchronizing_level(M, kmax)
    if k is None:
        raise NotSynchronizing(f"{state_label(T.initial)} is not synchronizing within level {kmax}")
    return k


# --------------------------------------------------------------------------
# conjugating into V_n


def conjugate_subgroup(
    v: PrefixExchangeMap, T: InitialTransducer, kmax: int = DEFAULT_KMAX, budget: Budget = DEFAULT_BUDGET
) -> PrefixExchangeMap:
    """The conjugate ``v^T = T⁻¹ v T`` as a prefix-exchange table.

    For a synchronizing homeomorphism ``T`` the conjugate always lies in V_n,
    so failure to read off a table is reported as an internal error.
    """
    _require_synchronizing(T, kmax)
    S = invert(T, budget)
    machine = product_initial(product_initial(S, to_transducer(v)), T)
    table = from_transducer(machine, kmax=max(kmax, 64))
    if table is None:
        raise InternalInvariantViolation("conjugate by a synchronizing transducer left V_n")
    return table


# --------------------------------------------------------------------------
# completions


class Leaf(NamedTuple):
    """Input cone ``[eta]`` is sent to ``rho`` followed by the action of ``state``."""

    eta: str
    rho: str
    state: State


@dataclass(frozen=True)
class ViableVerdict:
    valid: bool
    effective: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate_viable(U: Transducer, leaves: Iterable[Sequence], budget: Budget = DEFAULT_BUDGET) -> ViableVerdict:
    """Whether the translated images ``ρ_i·im(p_i)`` tile Cantor space.

    ``leaves`` holds ``(rho, state)`` pairs or full ``(eta, rho, state)``
    triples.  Effective means the number of pieces is ``1 mod (n-1)``.
    """
    pieces = [tuple(leaf)[-2:] for leaf in leaves]
    if not pieces:
        return ViableVerdict(False, False, "no pieces")
    effective = len(pieces) % (U.n - 1) == 1 % (U.n - 1)
    images = []
    for rho, p in pieces:
        check_word(rho, U.n)
        images.append(image_antichain(U, p, budget).prefixed(rho))
    for i, j in itertools.combinations(range(len(images)), 2):
        if not images[i].isdisjoint(images[j]):
            return ViableVerdict(False, effective, f"pieces {i} and {j} overlap")
    total = sum((im.measure for im in images), Fraction(0))
    if total != 1:
        return ViableVerdict(False, effective, f"pieces cover measure {total}, not 1")
    return ViableVerdict(True, effective)


@dataclass(frozen=True)
class CompletionMap:
    """A homeomorphism given by prefix replacement followed by states of ``U``."""

    U: Transducer
    leaves: tuple[Leaf, ...]
    over: str = ""

    @classmethod
    def of(
        cls,
        U: Transducer,
        leaves: Iterable[Sequence],
        over: str = "",
        budget: Budget | None = DEFAULT_BUDGET,
    ) -> "CompletionMap":
        """Validate and store leaves; pass ``budget=None`` to skip the viability check."""
        items = tuple(Leaf(*leaf) for leaf in leaves)
        for leaf in items:
            check_word(leaf.eta, U.n)
            check_word(leaf.rho, U.n)
            if leaf.state not in U.delta:
                raise InputError(f"{state_label(leaf.state)} is not a state of the underlying machine")
        if not is_complete_code([leaf.eta for leaf in items], U.n):
            raise InputError("leaf domain words do not form a complete prefix code")
        if budget is not None:
            verdict = validate_viable(U, items, budget)
            if not verdict.valid:
                raise InputError(f"not a viable combination: {verdict.reason}")
        return cls(U, tuple(sorted(items, key=lambda leaf: length_lex(leaf.eta))), over)

    @classmethod
    def identity(cls, U: Transducer, state: State, over: str = "") -> "CompletionMap":
        return cls(U, (Leaf("", "", state),), over)

    @property
    def n(self) -> int:
        return self.U.n

    def __str__(self) -> str:
        body = ", ".join(f"{render(e)}→{render(r)}·{state_label(p)}" for e, r, p in self.leaves)
        return "{" + body + "}"

    def leaf_for(self, x: EpWord) -> Leaf:
        for leaf in self.leaves:
            if x.starts_with(leaf.eta):
                return leaf
        raise AssertionError("complete code misses a point")

    def __call__(self, x: EpWord) -> EpWord:
        return completion_evaluate(self, x)

    def viable(self, budget: Budget = DEFAULT_BUDGET) -> ViableVerdict:
        return validate_viable(self.U, self.leaves, budget)

    def canonical(self) -> "CompletionMap":
        """Merge sibling leaves that one state of ``U`` reproduces from their parent."""
        return CompletionMap(self.U, _merge_leaves(self.U, self.leaves), self.over)

    def machine_form(self) -> InitialTransducer:
        return _machine_form(self)


def _merge_leaves(U: Transducer, leaves: Iterable[Leaf]) -> tuple[Leaf, ...]:
    n = U.n
    table = {leaf.eta: leaf for leaf in leaves}
    changed = True
    while changed:
        changed = False
        for eta in sorted(table, key=length_lex, reverse=True):
            if not eta or eta not in table:
                continue
            u = eta[:-1]
            block = [table.get(u + a) for a in letters(n)]
            if any(b is None for b in block):
                continue
            for p in U.states:
                rhos = []
                for i, b in enumerate(block):
                    o = U.lam[p][i]
                    if U.delta[p][i] != b.state or not b.rho.endswith(o):
                        break
                    rhos.append(b.rho[: len(b.rho) - len(o)])
                else:
                    if len(set(rhos)) == 1:
                        for a in letters(n):
                            del table[u + a]
                        table[u] = Leaf(u, rhos[0], p)
                        changed = True
                        break
    return tuple(sorted(table.values(), key=lambda leaf: length_lex(leaf.eta)))


def completion_evaluate(h: CompletionMap, x: EpWord) -> EpWord:
    leaf = h.leaf_for(x)
    return evaluate_ep(h.U, leaf.state, x.drop(len(leaf.eta))).prepend(leaf.rho)


def completion_compose(h: CompletionMap, g: CompletionMap, budget: Budget = DEFAULT_BUDGET) -> CompletionMap:
    """``h`` first, then ``g``; a completion over ``product(h.U, g.U)``."""
    if h.n != g.n:
        raise InputError("alphabet sizes differ")
    U, W = h.U, g.U
    UW = product(U, W)
    out: list[Leaf] = []
    for eta, rho, p in h.leaves:
        stack = [("", "", p)]
        while stack:
            sigma, emitted, u = stack.pop()
            y = rho + emitted
            hit = next((leaf for leaf in g.leaves if y.startswith(leaf.eta)), None)
            if hit is not None:
                o, w = evaluate_prefix(W, hit.state, y[len(hit.eta):])
                out.append(Leaf(eta + sigma, hit.rho + o, (u, w)))
                continue
            if len(sigma) >= budget.max_depth:
                raise BudgetExceeded("composition did not resolve the second map's prefix")
            for i, a in enumerate(letters(h.n)):
                stack.append((sigma + a, emitted + U.lam[u][i], U.delta[u][i]))
    over = f"{h.over}·{g.over}" if h.over and g.over else ""
    return CompletionMap(UW, _merge_leaves(UW, out), over)


class _Node(NamedTuple):
    """Internal node of a completion's domain tree inside its machine form."""

    word: str


def _machine_form(h: CompletionMap) -> InitialTransducer:
    U = h.U
    n = U.n
    leaves = {leaf.eta: leaf for leaf in h.leaves}
    delta: dict = {q: U.delta[q] for q in U.states}
    lam: dict = {q: U.lam[q] for q in U.states}
    if "" in leaves:
        # a single leaf: fold its prefix into a fresh root state
        _, rho, p = leaves[""]
        root = _Node("")
        delta[root] = U.delta[p]
        lam[root] = tuple(rho + U.lam[p][i] for i in range(n))
        return InitialTransducer(Transducer(n, (root,) + U.states, delta, lam), root)
    internal = sorted({e[:k] for e in leaves for k in range(len(e))}, key=length_lex)
    for u in internal:
        succ, outs = [], []
        for a in letters(n):
            leaf = leaves.get(u + a)
            if leaf is not None:
                succ.append(leaf.state)
                outs.append(leaf.rho)
            else:
                succ.append(_Node(u + a))
                outs.append("")
        delta[_Node(u)] = tuple(succ)
        lam[_Node(u)] = tuple(outs)
    states = tuple(_Node(u) for u in internal) + U.states
    return InitialTransducer(Transducer(n, states, delta, lam), _Node(""))


def completion_invert(h: CompletionMap, budget: Budget = DEFAULT_BUDGET) -> CompletionMap:
    """``h⁻¹`` as a completion over the partial inverse of ``h.U``.

    The machine form of ``h`` is inverted; the inverse is then read down
    every input path until its active state acts as a state of the partial
    inverse, which becomes the leaf target.
    """
    M = _machine_form(h)
    S = invert(M, budget)
    P = partial_inverse(h.U, budget)
    joint = disjoint_union(S.machine, P)
    cls = omega_classes(joint)
    target: dict[int, State] = {}
    for p in P.states:
        target.setdefault(cls[(1, p)], p)
    out: list[Leaf] = []
    stack = [("", "", S.initial)]
    while stack:
        word, emitted, s = stack.pop()
        k = cls[(0, s)]
        if k in target and not isinstance(s.base, _Node):
            out.append(Leaf(word, emitted, target[k]))
            continue
        if len(word) >= budget.max_depth:
            raise BudgetExceeded("inverse completion did not settle into the partial inverse")
        for i, a in enumerate(letters(h.n)):
            stack.append((word + a, emitted + S.machine.lam[s][i], S.machine.delta[s][i]))
    over = f"{h.over}'" if h.over else ""
    return CompletionMap(P, _merge_leaves(P, out), over)


def same_completion(h: CompletionMap, g: CompletionMap) -> bool:
    """Equality of canonical leaves, with states compared up to ω-equivalence."""
    if h.n != g.n:
        return False
    cls = omega_classes(disjoint_union(h.U, g.U))
    key_h = [(e, r, cls[(0, p)]) for e, r, p in h.canonical().leaves]
    key_g = [(e, r, cls[(1, p)]) for e, r, p in g.canonical().leaves]
    return key_h == key_g


# --------------------------------------------------------------------------
# conjugating V_n into the overgroup


def conjugate_overgroup(
    v: PrefixExchangeMap, T: InitialTransducer, budget: Budget = DEFAULT_BUDGET
) -> CompletionMap:
    """The conjugate ``v^{T⁻¹} = T v T⁻¹`` as a completion over ``TS``.

    Reads the triple product ``T·v·S`` until the middle component reaches
    the identity; from there on the map acts as the state ``(t, s)`` of the
    full product ``TS``.
    """
    S = invert(T, budget)
    B = to_transducer(v)
    Bm = B.machine
    ident = next(q for q in Bm.states if all(Bm.delta[q][i] == q and Bm.lam[q][i] == str(i) for i in range(Bm.n)))
    TBS = product(product(T.machine, Bm), S.machine)
    TS = product(T.machine, S.machine)
    out: list[Leaf] = []
    stack = [("", "", ((T.initial, B.initial), S.initial))]
    while stack:
        word, emitted, state = stack.pop()
        (t, b), s = state
        if b == ident:
            out.append(Leaf(word, emitted, (t, s)))
            continue
        for i, a in enumerate(letters(TBS.n)):
            stack.append((word + a, emitted + TBS.lam[state][i], TBS.delta[state][i]))
    return CompletionMap(TS, tuple(sorted(out, key=lambda leaf: length_lex(leaf.eta))), "TS")


# --------------------------------------------------------------------------
# the finite group G(TS)


@dataclass(frozen=True)
class BlockPermutationGroup:
    """A permutation group on ``X_n^k``; permutations are image-index tuples."""

    n: int
    block_length: int
    generators: tuple[tuple[int, ...], ...]
    elements: frozenset = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def words(self) -> list[str]:
        return list(words_of_length(self.n, self.block_length))


def _compose_perm(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """``p`` first, then ``q``."""
    return tuple(q[i] for i in p)


def permutation_closure(generators: Iterable[tuple[int, ...]], size: int, max_order: int) -> frozenset:
    gens = list(generators)
    identity = tuple(range(size))
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = _compose_perm(g, s)
            if h not in seen:
                seen.add(h)
                if len(seen) > max_order:
                    raise OrderBudgetExceeded(f"group order exceeds {max_order}")
                queue.append(h)
    return frozenset(seen)


def block_permutation(T: Transducer, q: State, k: int) -> tuple[int, ...]:
    words = list(words_of_length(T.n, k))
    index = {w: i for i, w in enumerate(words)}
    perm = []
    for w in words:
        out, _ = evaluate_prefix(T, q, w)
        if out not in index:
            raise InputError(f"{state_label(q)} does not permute blocks of length {k}")
        perm.append(index[out])
    if len(set(perm)) != len(perm):
        raise InputError(f"{state_label(q)} does not permute blocks of length {k}")
    return tuple(perm)


def ts_machine(T: InitialTransducer, budget: Budget = DEFAULT_BUDGET) -> Transducer:
    """The full product of ``T`` with its inverse."""
    return product(T.machine, invert(T, budget).machine)


def automaton_group_ts(
    T: InitialTransducer, max_order: int = 100_000, budget: Budget = DEFAULT_BUDGET, kmax: int = DEFAULT_KMAX
) -> BlockPermutationGroup:
    """G(TS) realized as permutations of ``X_n^k`` for a synchronous ``T``."""
    if not T.machine.is_synchronous():
        raise InputError("G(TS) as a block permutation group needs a synchronous transducer")
    k = _require_synchronizing(T, kmax)
    TS = ts_machine(T, budget)
    gens = sorted({block_permutation(TS, p, k) for p in TS.states})
    elements = permutation_closure(gens, T.n ** k, max_order)
    return BlockPermutationGroup(T.n, k, tuple(gens), elements)


def state_products_count(TS: Transducer, max_len: int, max_elements: int = 10_000) -> int:
    """Number of distinct maps induced by products of at most ``max_len`` states of ``TS``."""
    gens = [InitialTransducer(TS, p) for p in TS.states]
    seen: dict[tuple, InitialTransducer] = {}
    frontier = []
    for g in gens:
        key = canonical_key(g)
        if key not in seen:
            _, m = minimize(g)
            seen[key] = m
            frontier.append(m)
    for _ in range(max_len - 1):
        nxt = []
        for m in frontier:
            for g in gens:
                _, prod = minimize(product_initial(m, g))
                key = canonical_key(prod)
                if key not in seen:
                    seen[key] = prod
                    nxt.append(prod)
                    if len(seen) > max_elements:
                        raise OrderBudgetExceeded(f"more than {max_elements} distinct products")
        if not nxt:
            break
        frontier = nxt
    return len(seen)


# --------------------------------------------------------------------------
# contraction


@dataclass(frozen=True)
class ContractingVerdict:
    verdict: str  # contracting_to_depth | counterexample | inconclusive
    products_checked: int
    counterexample: tuple | None = None
    note: str = ""

    def __str__(self) -> str:
        return self.verdict


def contracting_check(
    T: Transducer, product_len: int = 3, depth: int = 4, budget: Budget = DEFAULT_BUDGET
) -> ContractingVerdict:
    """Bounded check that products of ``T`` and ``T'`` settle into states of ``T``.

    For every product of at most ``product_len`` factors drawn from ``T`` and
    its partial inverse, and every state of that product, some ``j <= depth``
    must exist such that all words of length ``j`` lead to states
    ω-equivalent to a state of ``T``.
    """
    try:
        P = partial_inverse(T, budget)
    except BudgetExceeded as exc:
        return ContractingVerdict("inconclusive", 0, note=f"partial inverse: {exc}")
    pool = (T, P)
    checked = 0
    for length in range(1, product_len + 1):
        for choice in itertools.product(range(2), repeat=length):
            U = pool[choice[0]]
            for c in choice[1:]:
                U = product(U, pool[c])
            if len(U.states) > budget.max_configurations:
                return ContractingVerdict("inconclusive", checked, note="product too large")
            try:
                cls = omega_classes(disjoint_union(U, T))
            except TransducerError as exc:
                return ContractingVerdict("inconclusive", checked, note=str(exc))
            good = {cls[(1, q)] for q in T.states}
            for u in U.states:
                checked += 1
                level = {u}
                for _ in range(depth + 1):
                    if all(cls[(0, r)] in good for r in level):
                        break
                    level = {t for r in level for t in U.delta[r]}
                else:
                    return ContractingVerdict("counterexample", checked, (choice, u))
    return ContractingVerdict("contracting_to_depth", checked)


# --------------------------------------------------------------------------
# flexibility and local agreement


def _split_first(code: list[str], n: int) -> list[str]:
    w = min(code, key=length_lex)
    code = [c for c in code if c != w]
    return code + [w + a for a in letters(n)]


def flexibility_witness(E1: ConeAntichain, E2: ConeAntichain) -> PrefixExchangeMap:
    """An element ``g`` of V_n with ``(E1)g`` a proper subset of ``E2``.

    ``E1`` is sent into proper subcones of the length-lex least cone ``[w]``
    of ``E2``; the complements are then balanced by splitting leaves and
    paired in length-lex order.
    """
    n = E1.n
    if E2.n != n:
        raise InputError("alphabet sizes differ")
    for E in (E1, E2):
        if E.is_empty() or E.is_full():
            raise InputError("clopen sets must be nonempty and proper")
    w = min(E2.words, key=length_lex)
    m = len(E1)
    inner = [w]
    while len(inner) < m + 1:
        inner = _split_first(inner, n)
    inner.sort(key=length_lex)
    dom_rest = complement(E1.words, n)
    rng_rest = inner[m:] + complement([w], n)
    while len(dom_rest) != len(rng_rest):
        if len(dom_rest) < len(rng_rest):
            dom_rest = _split_first(dom_rest, n)
        else:
            rng_rest = _split_first(rng_rest, n)
    pairs = list(zip(sorted(E1.words, key=length_lex), inner[:m]))
    pairs += list(zip(sorted(dom_rest, key=length_lex), sorted(rng_rest, key=length_lex)))
    g = PrefixExchangeMap.of(n, pairs)
    image = ConeAntichain.of(n, [g.apply_word(e) for e in E1.words])
    if not (image.issubset(E2) and image.measure < E2.measure):
        raise InternalInvariantViolation("flexibility witness does not shrink E1 into E2")
    return g


def local_agreement_check(
    h: Callable[[EpWord], EpWord],
    cover: Sequence[tuple[str, Callable[[EpWord], EpWord]]],
    depth: int = 10,
    n: int | None = None,
) -> bool:
    """True iff ``h`` agrees with the paired map on each cover cone, for all EpWords to ``depth``."""
    from .words import ep_words

    if n is None:
        n = getattr(h, "n", None)
    if n is None:
        raise InputError("alphabet size required")
    cones = [c for c, _ in cover]
    if not is_antichain(cones) or len(set(cones)) != len(cones):
        raise InputError("cover cones must be pairwise incomparable")
    if not is_complete_code(cones, n):
        raise InputError("cover cones must cover Cantor space")
    for x in ep_words(n, depth):
        g = next(g for c, g in cover if x.starts_with(c))
        if h(x) != g(x):
            return False
    return True
