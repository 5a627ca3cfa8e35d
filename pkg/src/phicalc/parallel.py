"""Parallel reduction, complete development, and the diamond machinery.

Parallel reduction contracts any number of redexes of a term in one
step (including none: the relation is reflexive).  The complete
development contracts all of them; it is the join witness in the
diamond property.  ``decompose_standard`` splits one parallel step into
a head-reduction prefix followed by a purely internal parallel step,
which is the constructive core of the standardization argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import PhiError
from .reduce import head_step
from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
    increment,
    substitute,
)

DEFAULT_PAR_BUDGET = 20_000


class _Budget:
    __slots__ = ("left", "hit")

    def __init__(self, n: int):
        self.left = n
        self.hit = False

    def take(self) -> bool:
        if self.left <= 0:
            self.hit = True
            return False
        self.left -= 1
        return True


@dataclass(frozen=True)
class ParEnum:
    """Distinct one-step parallel reducts; ``truncated`` when the budget hit."""

    terms: tuple[Term, ...]
    truncated: bool

    def __contains__(self, t: Term) -> bool:
        return t in set(self.terms)


def _par(t: Term, budget: _Budget) -> list[Term]:
    out: list[Term] = []
    seen: set[Term] = set()

    def add(x: Term) -> None:
        if x not in seen:
            seen.add(x)
            out.append(x)

    match t:
        case Locator():
            if budget.take():
                add(t)
        case ObjectTerm():
            attached = [(l, b) for l, b in t.bindings if b is not VOID]
            options = [_par(b, budget) for _, b in attached]
            for combo in itertools.product(*options):
                if not budget.take():
                    break
                picks = dict(zip((l for l, _ in attached), combo))
                add(
                    ObjectTerm(
                        tuple(
                            (l, b if b is VOID else picks[l]) for l, b in t.bindings
                        )
                    )
                )
        case Access(s, c):
            for s2 in _par(s, budget):
                if not budget.take():
                    break
                add(Access(s2, c))
                if isinstance(s2, ObjectTerm):
                    b = s2.get(c)
                    if b is not None and b is not VOID:
                        if budget.take():
                            add(substitute(b, 0, s2))
                    elif b is None and s2.get(PHI) is not None:
                        if budget.take():
                            add(Access(Access(s2, PHI), c))
        case App(s, c, u):
            targets = _par(s, budget)
            args = _par(u, budget)
            for s2 in targets:
                for u2 in args:
                    if not budget.take():
                        break
                    add(App(s2, c, u2))
                    if isinstance(s2, ObjectTerm) and s2.get(c) is VOID:
                        if budget.take():
                            add(s2.with_binding(c, increment(0, u2)))
        case _:
            raise TypeError(f"parallel reduction: not a core term: {t!r}")
    return out


def par_reducts(t: Term, budget: int = DEFAULT_PAR_BUDGET) -> ParEnum:
    """Enumerate the one-step parallel reducts of ``t``.

    The enumeration walks derivations and deduplicates the resulting
    terms; the identity derivation comes first, so ``t`` itself is
    always a member (reflexivity) unless the budget truncates.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    b = _Budget(budget)
    terms = _par(t, b)
    return ParEnum(tuple(terms), b.hit)


def is_par_step(t: Term, u: Term, budget: int = DEFAULT_PAR_BUDGET) -> bool:
    """Decide ``t`` parallel-reduces to ``u`` in one step, by enumeration."""
    return u in par_reducts(t, budget)


def complete_development(t: Term) -> Term:
    """Contract every redex of ``t`` simultaneously.

    Access over a developed object extracts (instantiation of a void
    attribute takes priority over plain congruence in the application
    case); everything that matches no computation rule stays congruent.
    """
    match t:
        case Locator():
            return t
        case ObjectTerm():
            return t.map_attached(complete_development)
        case Access(s, a):
            sp = complete_development(s)
            if isinstance(sp, ObjectTerm):
                b = sp.get(a)
                if b is not None and b is not VOID:
                    return substitute(b, 0, sp)
                if b is None and sp.get(PHI) is not None:
                    return Access(Access(sp, PHI), a)
            return Access(sp, a)
        case App(s, a, u):
            sp = complete_development(s)
            up = complete_development(u)
            if isinstance(sp, ObjectTerm) and sp.get(a) is VOID:
                return sp.with_binding(a, increment(0, up))
            return App(sp, a, up)
    raise TypeError(f"complete_development: not a core term: {t!r}")


@dataclass(frozen=True)
class DiamondReport:
    """Outcome of checking that every parallel reduct rejoins at ``t+``."""

    term: Term
    development: Term
    checked: int
    violations: tuple[tuple[Term, Term], ...]
    inconclusive: bool

    @property
    def ok(self) -> bool:
        return not self.violations and not self.inconclusive


def check_diamond(t: Term, budget: int = DEFAULT_PAR_BUDGET) -> DiamondReport:
    """Verify ``u => t+`` for every parallel reduct ``u`` of ``t``.

    Budget exhaustion during enumeration makes the report inconclusive
    rather than a violation.
    """
    tp = complete_development(t)
    enum = par_reducts(t, budget)
    inconclusive = enum.truncated
    violations: list[tuple[Term, Term]] = []
    for u in enum.terms:
        back = par_reducts(u, budget)
        if tp in back:
            continue
        if back.truncated:
            inconclusive = True
        else:
            violations.append((u, tp))
    return DiamondReport(t, tp, len(enum.terms), tuple(violations), inconclusive)


def is_internal_par(a: Term, b: Term, budget: int = DEFAULT_PAR_BUDGET) -> bool:
    """Parallel reduction that never contracts a redex on the head spine.

    Object bodies and application arguments may take full parallel
    steps; the spine itself must stay rigid.
    """
    match (a, b):
        case (Locator(), _):
            return a == b
        case (ObjectTerm(), ObjectTerm()):
            if set(a.void_labels()) != set(b.void_labels()):
                return False
            abodies = {l: x for l, x in a.bindings if x is not VOID}
            bbodies = {l: x for l, x in b.bindings if x is not VOID}
            if abodies.keys() != bbodies.keys():
                return False
            return all(is_par_step(abodies[l], bbodies[l], budget) for l in abodies)
        case (Access(s, c), Access(s2, c2)):
            return c == c2 and is_internal_par(s, s2, budget)
        case (App(s, c, u), App(s2, c2, u2)):
            return c == c2 and is_internal_par(s, s2, budget) and is_par_step(u, u2, budget)
    return False


def _last(prefix: list[Term], start: Term) -> Term:
    return prefix[-1] if prefix else start


def _decompose(t: Term, u: Term, budget: int) -> list[Term]:
    """Head-step chain from ``t`` whose endpoint reaches ``u`` internally."""
    if is_internal_par(t, u, budget):
        return []
    match t:
        case Access(s, c):
            if isinstance(u, Access) and u.label == c and is_par_step(s, u.target, budget):
                pre = _decompose(s, u.target, budget)
                r = Access(_last(pre, s), c)
                if is_internal_par(r, u, budget):
                    return [Access(p, c) for p in pre]
            for s2 in par_reducts(s, budget).terms:
                if not isinstance(s2, ObjectTerm):
                    continue
                b2 = s2.get(c)
                if b2 is not None and b2 is not VOID and substitute(b2, 0, s2) == u:
                    pre_s = _decompose(s, s2, budget)
                    q = _last(pre_s, s)
                    if not isinstance(q, ObjectTerm):
                        continue
                    qb = q.get(c)
                    if qb is None or qb is VOID:
                        continue
                    mid = substitute(qb, 0, q)
                    inner = _decompose(qb, b2, budget)
                    prefix = (
                        [Access(p, c) for p in pre_s]
                        + [mid]
                        + [substitute(p, 0, q) for p in inner]
                    )
                    if is_internal_par(_last(prefix, t), u, budget):
                        return prefix
                if b2 is None and s2.get(PHI) is not None and Access(Access(s2, PHI), c) == u:
                    pre_s = _decompose(s, s2, budget)
                    q = _last(pre_s, s)
                    prefix = [Access(p, c) for p in pre_s] + [Access(Access(q, PHI), c)]
                    if is_internal_par(prefix[-1], u, budget):
                        return prefix
        case App(s, c, v):
            if (
                isinstance(u, App)
                and u.label == c
                and is_par_step(s, u.target, budget)
                and is_par_step(v, u.arg, budget)
            ):
                pre = _decompose(s, u.target, budget)
                r = App(_last(pre, s), c, v)
                if is_internal_par(r, u, budget):
                    return [App(p, c, v) for p in pre]
            if isinstance(u, ObjectTerm):
                for s2 in par_reducts(s, budget).terms:
                    if not (isinstance(s2, ObjectTerm) and s2.get(c) is VOID):
                        continue
                    for v2 in par_reducts(v, budget).terms:
                        if s2.with_binding(c, increment(0, v2)) != u:
                            continue
                        pre_s = _decompose(s, s2, budget)
                        q = _last(pre_s, s)
                        if not (isinstance(q, ObjectTerm) and q.get(c) is VOID):
                            continue
                        mid = q.with_binding(c, increment(0, v))
                        prefix = [App(p, c, v) for p in pre_s] + [mid]
                        if is_internal_par(mid, u, budget):
                            return prefix
    raise PhiError("standard decomposition failed; input pair is not a parallel step")


def decompose_standard(
    t: Term, u: Term, budget: int = DEFAULT_PAR_BUDGET
) -> tuple[Term, list[Term]]:
    """Split ``t => u`` into head steps ``t -> ... -> r`` and ``r`` internal to ``u``.

    Returns ``(r, prefix)`` where ``prefix`` lists the successive head
    reducts (empty when the step was already internal).  Raises
    ``ValueError`` if ``u`` is not a one-step parallel reduct of ``t``.
    """
    if not is_par_step(t, u, budget):
        raise ValueError("witness is not a one-step parallel reduct of the source")
    prefix = _decompose(t, u, budget)
    cur = t
    for nxt in prefix:  # head reduction is deterministic, so replay is exact
        stepped = head_step(cur)
        if stepped != nxt:
            raise PhiError("decomposition produced a non-head prefix")
        cur = nxt
    r = _last(prefix, t)
    if not is_internal_par(r, u, budget):
        raise PhiError("decomposition endpoint is not internal to the witness")
    return r, prefix
