"""Inverse and partial inverse of transducers, with round-trip certificates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    EmptyPreimage,
    NotInjective,
    NotSurjective,
    TransducerError,
)
from .image import analyzer
from .machine import (
    InitialTransducer,
    InvState,
    State,
    Transducer,
    evaluate_prefix,
    is_identity_map,
    product_initial,
)
from .words import DEFAULT_BUDGET, Budget, letters


@dataclass(frozen=True)
class InverseCertificate:
    forward_then_back_identity: bool
    back_then_forward_identity: bool
    budgets_used: Budget = DEFAULT_BUDGET

    @property
    def ok(self) -> bool:
        return self.forward_then_back_identity and self.back_then_forward_identity


def _is_identity(T: InitialTransducer) -> bool:
    try:
        return is_identity_map(T)
    except TransducerError:
        return False


def verify_inverse(T: InitialTransducer, S: InitialTransducer, budget: Budget = DEFAULT_BUDGET) -> InverseCertificate:
    """Check that ``T·S`` and ``S·T`` both minimize to the one-state identity."""
    return InverseCertificate(
        _is_identity(product_initial(T, S)),
        _is_identity(product_initial(S, T)),
        budget,
    )


def _inverse_step(T: Transducer, A, state: InvState, letter: str) -> tuple[str, InvState]:
    """One transition of the inversion construction from ``(w, p)`` on ``letter``."""
    w, p = state
    target = w + letter
    nu = A.lq(p, target)
    out, nxt = evaluate_prefix(T, p, nu)
    if not target.startswith(out):
        # an output overshooting the target means (w, p) was not a valid pair
        raise EmptyPreimage(f"output of {nu!r} leaves the cone [{target}]")
    return nu, InvState(target[len(out):], nxt)


def _close(T: Transducer, roots: list[InvState], budget: Budget) -> Transducer:
    A = analyzer(T, budget)
    delta: dict = {}
    lam: dict = {}
    order: list[InvState] = []
    seen = set(roots)
    queue = deque(roots)
    while queue:
        s = queue.popleft()
        order.append(s)
        if len(order) > budget.max_configurations:
            raise BudgetExceeded("too many inverse states")
        succ, outs = [], []
        for a in letters(T.n):
            out, nxt = _inverse_step(T, A, s, a)
            if len(nxt.residual) > budget.max_depth:
                raise BudgetExceeded(f"inverse residual longer than {budget.max_depth}")
            succ.append(nxt)
            outs.append(out)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
        delta[s] = tuple(succ)
        lam[s] = tuple(outs)
    return Transducer(T.n, tuple(order), delta, lam)


def _synchronous_inverse(T: Transducer, q0: State) -> InitialTransducer | None:
    """Letter-permutation fast path; ``None`` when some state is not a permutation."""
    delta, lam = {}, {}
    for q in T.states:
        outs = T.lam[q]
        if sorted(outs) != list(letters(T.n)):
            return None
        back = {int(o): i for i, o in enumerate(outs)}
        delta[InvState("", q)] = tuple(InvState("", T.delta[q][back[j]]) for j in range(T.n))
        lam[InvState("", q)] = tuple(str(back[j]) for j in range(T.n))
    states = tuple(InvState("", q) for q in T.states)
    return InitialTransducer(Transducer(T.n, states, delta, lam), InvState("", q0)).accessible()


def invert(T: InitialTransducer, budget: Budget = DEFAULT_BUDGET) -> InitialTransducer:
    """Inverse of a homeomorphism ``T_{q0}``, certified by a round trip.

    States are pairs ``(w, p)``; ``(w, p)`` reads ``β``, emits the longest
    common prefix ``ν`` of the preimage of ``[wβ]`` under ``T_p``, and moves
    to ``(wβ - λ(ν, p), π(ν, p))``.  Only pairs accessible from ``(ε, q0)``
    are built; each of them satisfies ``[w] ⊆ im(p)``, so no prior
    minimization is needed.
    """
    acc = T.accessible()
    M, q0 = acc.machine, acc.initial
    S = _synchronous_inverse(M, q0) if M.is_synchronous() else None
    if S is None:
        A = analyzer(M, budget)
        if not A.image(q0).is_full():
            raise NotSurjective(f"image of {q0} is {A.image(q0)}, not the whole space")
        try:
            S = InitialTransducer(_close(M, [InvState("", q0)], budget), InvState("", q0))
        except EmptyPreimage as exc:
            raise NotSurjective(str(exc)) from exc
    if not verify_inverse(acc, S, budget).ok:
        raise NotInjective(f"round trip through the candidate inverse of {q0} is not the identity")
    return S


def partial_inverse(T: Transducer, budget: Budget = DEFAULT_BUDGET) -> Transducer:
    """The partial inverse ``T'`` of a partially invertible transducer.

    Seeds are read off the canonical image antichain of every state: for a
    cone ``[η]`` of ``im(q)`` with ``ν = 𝓛_q(η)`` the seed is
    ``(η - λ(ν, q), π(ν, q))``.  The seed set is then closed under the
    one-letter rule of :func:`invert`.
    """
    A = analyzer(T, budget)
    roots: list[InvState] = []
    for q in T.states:
        for eta in A.image(q):
            nu = A.lq(q, eta)
            out, p = evaluate_prefix(T, q, nu)
            seed = InvState(eta[len(out):], p)
            if seed not in roots:
                roots.append(seed)
    return _close(T, roots, budget)
