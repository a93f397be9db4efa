"""Images of transducer states: preimage prefixes, cone covers, clopen antichains.

Every procedure here is a budgeted semi-decision.  Configurations explored
count against ``Budget.max_configurations``; pending words longer than
``Budget.max_depth`` are treated as unknown, and any verdict that depends on
an unknown configuration raises :class:`BudgetExceeded`.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable

from .errors import BudgetExceeded, EmptyPreimage
from .machine import State, Transducer, state_label
from .words import DEFAULT_BUDGET, Budget, ConeAntichain, check_word, letters, render

_UNKNOWN = "unknown"
_DEFERRED = "deferred"


class ImageAnalyzer:
    """Memoizing image oracle for one transducer under one budget."""

    def __init__(self, T: Transducer, budget: Budget = DEFAULT_BUDGET):
        self.T = T
        self.budget = budget
        self.configurations = 0
        self._reach: dict[tuple[str, State], bool] = {}
        self._alts: dict[tuple[str, State], list] = {}
        self._cover: dict[tuple[str, State], bool] = {}
        self._open: set[tuple[str, State]] = set()

    def _charge(self, k: int = 1) -> None:
        self.configurations += k
        if self.configurations > self.budget.max_configurations:
            raise BudgetExceeded(
                f"more than {self.budget.max_configurations} configurations explored"
            )

    # ---- preimage of a cone -------------------------------------------------

    def _successors(self, r: str, p: State):
        """Configurations after one input letter; ``None`` marks acceptance."""
        T = self.T
        for i in range(T.n):
            o = T.lam[p][i]
            if o.startswith(r):
                yield i, None
            elif r.startswith(o):
                yield i, (r[len(o):], T.delta[p][i])

    def meets(self, r: str, p: State) -> bool:
        """True iff some output of ``T_p`` starts with ``r``, i.e. ``[r] ∩ im(p) ≠ ∅``."""
        root = (r, p)
        if root in self._reach:
            return self._reach[root]
        if r == "":
            return True
        # explore the unexplored part of the configuration graph
        graph: dict[tuple[str, State], list] = {}
        queue = deque([root])
        while queue:
            node = queue.popleft()
            if node in graph or node in self._reach:
                continue
            self._charge()
            succ = [s for _, s in self._successors(*node)]
            graph[node] = succ
            for s in succ:
                if s is not None and s[0] != "" and s not in graph:
                    queue.append(s)
        # least fixpoint: reachability of acceptance
        good = {node: False for node in graph}

        def value(s) -> bool:
            if s is None or s[0] == "":
                return True
            if s in self._reach:
                return self._reach[s]
            return good[s]

        changed = True
        while changed:
            changed = False
            for node, succ in graph.items():
                if not good[node] and any(value(s) for s in succ):
                    good[node] = True
                    changed = True
        self._reach.update(good)
        return good[root]

    def lq(self, p: State, alpha: str) -> str:
        """Longest common prefix of the preimage of ``[alpha]`` under ``T_p``."""
        check_word(alpha, self.T.n)
        if not self.meets(alpha, p):
            raise EmptyPreimage(f"no input from {state_label(p)} maps into [{render(alpha)}]")
        prefix = []
        r = alpha
        steps = 0
        while r:
            viable = []
            for i, s in self._successors(r, p):
                if s is None or self.meets(*s):
                    viable.append((i, s))
            if len(viable) != 1:
                break
            i, s = viable[0]
            prefix.append(str(i))
            if s is None:
                break
            r, p = s
            steps += 1
            if steps > self.budget.max_configurations:
                raise BudgetExceeded("preimage prefix walk did not terminate")
        return "".join(prefix)

    # ---- cone inclusion ---------------------------------------------------

    def _expand(self, w: str, p: State) -> list:
        T = self.T
        alts: list = []
        extenders = 0
        for i in range(T.n):
            o = T.lam[p][i]
            if w.startswith(o):
                alts.append(((w[len(o):], T.delta[p][i]),))
            elif o.startswith(w):
                extenders += 1
        if extenders or len(alts) >= 2:
            # splitting is only explored on demand when another alternative exists
            alts.append(_DEFERRED if alts else self._split(w, p))
        return alts

    def _split(self, w: str, p: State):
        if len(w) >= self.budget.max_depth:
            return _UNKNOWN
        return tuple((w + a, p) for a in letters(self.T.n))

    def _explore(self, frontier) -> None:
        queue = deque(frontier)
        while queue:
            node = queue.popleft()
            if node in self._alts or node in self._cover:
                continue
            self._charge()
            alts = self._expand(*node)
            self._alts[node] = alts
            self._open.add(node)
            for alt in alts:
                if isinstance(alt, tuple):
                    queue.extend(c for c in alt if c not in self._alts and c not in self._cover)

    def covers(self, w: str, p: State) -> bool:
        """True iff ``[w] ⊆ im(p)``.

        Decided as the greatest fixpoint of an and/or system over
        configurations ``(pending word, state)``: a configuration holds if one
        letter's output is a prefix of the pending word and the remainder is
        covered from the successor, or if every one-letter extension of the
        pending word is covered.  Without empty-output cycles every cycle of
        this system consumes output, so the greatest fixpoint is sound.
        Splits are expanded lazily, round by round, only where the verdict
        still depends on them.
        """
        root = (w, p)
        frontier = [root]
        while True:
            if root in self._cover:
                return self._cover[root]
            self._explore(frontier)
            undecided = list(self._open)
            optimistic = self._gfp(undecided, True)
            pessimistic = self._gfp(undecided, False)
            for node in undecided:
                if optimistic[node] == pessimistic[node]:
                    self._cover[node] = optimistic[node]
                    self._open.discard(node)
            if root in self._cover:
                return self._cover[root]
            pending = self._pending(root)
            frontier = []
            for node in pending:
                alts = self._alts[node]
                k = alts.index(_DEFERRED)
                alts[k] = self._split(*node)
                if isinstance(alts[k], tuple):
                    frontier.extend(alts[k])
            if not pending:
                raise BudgetExceeded(
                    f"cannot decide [{render(w)}] ⊆ im({state_label(p)}) within depth {self.budget.max_depth}"
                )

    def _pending(self, root) -> list:
        """Undecided nodes reachable from ``root`` that still hold a deferred split."""
        seen = {root}
        stack = [root]
        out = []
        while stack:
            node = stack.pop()
            alts = self._alts[node]
            if _DEFERRED in alts:
                out.append(node)
            for alt in alts:
                if isinstance(alt, tuple):
                    for c in alt:
                        if c not in seen and c not in self._cover:
                            seen.add(c)
                            stack.append(c)
        return out

    def _gfp(self, nodes: list, unknown: bool) -> dict:
        val = {node: True for node in nodes}
        cover = self._cover

        def holds(child) -> bool:
            if child in cover:
                return cover[child]
            return val[child]

        changed = True
        while changed:
            changed = False
            for node in nodes:
                if not val[node]:
                    continue
                ok = False
                for alt in self._alts[node]:
                    if not isinstance(alt, tuple):
                        if unknown:
                            ok = True
                            break
                    elif all(holds(c) for c in alt):
                        ok = True
                        break
                if not ok:
                    val[node] = False
                    changed = True
        return val

    # ---- clopen image -------------------------------------------------------

    def image(self, p: State) -> ConeAntichain:
        """Canonical antichain ``W`` with ``im(p) = ⋃_{w∈W} [w]``."""
        kept = []
        queue = deque([""])
        while queue:
            u = queue.popleft()
            self._charge()
            if not self.meets(u, p):
                continue
            if self.covers(u, p):
                kept.append(u)
                continue
            if len(u) >= self.budget.max_depth:
                raise BudgetExceeded(
                    f"image of {state_label(p)} not resolved to depth {self.budget.max_depth} (likely not clopen)"
                )
            queue.extend(u + a for a in letters(self.T.n))
        return ConeAntichain.of(self.T.n, kept)

    # ---- injectivity --------------------------------------------------------

    def injective(self, p: State) -> bool:
        """Decide injectivity of ``T_p`` through the graph of diverging input pairs.

        A node is a pair of states plus the output lag of the side that is
        ahead.  ``T_p`` fails to be injective iff a cycle is reachable.
        """
        T = self.T

        def settle(s1, s2, a1: str, a2: str):
            if a1.startswith(a2):
                return (s1, s2, a1[len(a2):], "")
            if a2.startswith(a1):
                return (s1, s2, "", a2[len(a1):])
            return None

        starts = set()
        for x in range(T.n):
            for y in range(x + 1, T.n):
                node = settle(T.delta[p][x], T.delta[p][y], T.lam[p][x], T.lam[p][y])
                if node is not None:
                    starts.add(node)
        graph: dict = {}
        queue = deque(starts)
        while queue:
            node = queue.popleft()
            if node in graph:
                continue
            s1, s2, u1, u2 = node
            if len(u1) > self.budget.max_depth or len(u2) > self.budget.max_depth:
                raise BudgetExceeded(f"output lag unbounded while checking injectivity of {state_label(p)}")
            self._charge()
            succ = []
            for x in range(T.n):
                for y in range(T.n):
                    nxt = settle(T.delta[s1][x], T.delta[s2][y], u1 + T.lam[s1][x], u2 + T.lam[s2][y])
                    if nxt is not None:
                        succ.append(nxt)
                        if nxt not in graph:
                            queue.append(nxt)
            graph[node] = succ
        return not _has_cycle(graph)


def _has_cycle(graph: dict) -> bool:
    color: dict = {}
    for root in graph:
        if root in color:
            continue
        stack = [(root, iter(graph[root]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                c = color.get(nxt, 0)
                if c == 1:
                    return True
                if c == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(graph[nxt])))
                    break
            else:
                color[node] = 2
                stack.pop()
    return False


@functools.lru_cache(maxsize=128)
def analyzer(T: Transducer, budget: Budget = DEFAULT_BUDGET) -> ImageAnalyzer:
    return ImageAnalyzer(T, budget)


def lq(T: Transducer, q: State, alpha: str, budget: Budget = DEFAULT_BUDGET) -> str:
    return analyzer(T, budget).lq(q, alpha)


def cone_in_image(T: Transducer, q: State, u: str, budget: Budget = DEFAULT_BUDGET) -> bool:
    check_word(u, T.n)
    return analyzer(T, budget).covers(u, q)


def image_antichain(T: Transducer, q: State, budget: Budget = DEFAULT_BUDGET) -> ConeAntichain:
    return analyzer(T, budget).image(q)


@dataclass(frozen=True)
class StateVerdict:
    state: Hashable
    clopen: bool | None
    injective: bool | None
    image: ConeAntichain | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.clopen) and bool(self.injective)


@dataclass(frozen=True)
class PartialInvertibilityReport:
    verdicts: tuple[StateVerdict, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def __getitem__(self, state) -> StateVerdict:
        for v in self.verdicts:
            if v.state == state:
                return v
        raise KeyError(state)


def is_partially_invertible(T: Transducer, budget: Budget = DEFAULT_BUDGET) -> PartialInvertibilityReport:
    """Per-state verdicts on injectivity and clopen image.

    ``None`` in a verdict means the budget ran out before a decision.
    """
    out = []
    for q in T.states:
        # a fresh analyzer per state keeps one state's blow-up from starving the rest
        A = ImageAnalyzer(T, budget)
        notes = []
        image = None
        try:
            image = A.image(q)
            clopen = True
        except BudgetExceeded as exc:
            clopen = None
            notes.append(f"clopen check: budget exceeded ({exc})")
        try:
            injective = ImageAnalyzer(T, budget).injective(q)
        except BudgetExceeded as exc:
            injective = None
            notes.append(f"injectivity check: budget exceeded ({exc})")
        out.append(StateVerdict(q, clopen, injective, image, "; ".join(notes)))
    return PartialInvertibilityReport(tuple(out))
