"""Seeded random generators for terms and pure lambda terms.

``closed_term`` plants reducible shapes on purpose (extractions from
literal objects, instantiations of void attributes, decorator
fall-throughs), so small samples still exercise multi-redex terms,
cycles, and stuck shapes rather than being mostly normal forms.
"""

from __future__ import annotations

import random

from .lam import Abs, Apply, Index, LamTerm
from .terms import PHI, VOID, Access, App, Locator, ObjectTerm, Term

LABELS = ("x", "y", "z", "a", "b", "c")


def _pick_label(rng: random.Random, allow_phi: bool = True) -> str:
    if allow_phi and rng.random() < 0.12:
        return PHI
    return rng.choice(LABELS)


def closed_term(rng: random.Random, size: int) -> Term:
    """A closed term with roughly ``size`` nodes, biased toward redexes."""

    def leaf(depth: int) -> Term:
        if depth > 0 and rng.random() < 0.5:
            return Locator(rng.randrange(depth))
        return ObjectTerm(())

    def extra_binding(budget: int, depth: int, taken: set[str]) -> tuple[str, object] | None:
        pool = [l for l in LABELS + (PHI,) if l not in taken]
        if not pool:
            return None
        label = rng.choice(pool)
        if rng.random() < 0.4:
            return label, VOID
        return label, go(budget, depth + 1)

    def object_with(
        budget: int, depth: int, fixed: list[tuple[str, object]]
    ) -> ObjectTerm:
        bindings = list(fixed)
        taken = {l for l, _ in bindings}
        while len(bindings) < 3 and rng.random() < 0.45:
            more = extra_binding(max(1, budget // 2), depth, taken)
            if more is None:
                break
            taken.add(more[0])
            bindings.append(more)
        rng.shuffle(bindings)
        return ObjectTerm(tuple(bindings))

    def redex(budget: int, depth: int) -> Term:
        roll = rng.random()
        label = rng.choice(LABELS)
        if roll < 0.40:
            # extraction: [..., label -> body, ...].label
            body = go(max(1, budget - 3), depth + 1)
            return Access(object_with(budget // 3, depth, [(label, body)]), label)
        if roll < 0.75:
            # instantiation: [..., label -> ?, ...](label -> arg)
            arg = go(max(1, (budget - 3) // 2), depth)
            obj = object_with(max(1, (budget - 3) // 2), depth, [(label, VOID)])
            return App(obj, label, arg)
        # decorator fall-through: [..., @ -> component, ...].missing
        component = go(max(1, budget - 3), depth + 1)
        obj = object_with(budget // 3, depth, [(PHI, component)])
        missing = [l for l in LABELS if obj.get(l) is None]
        return Access(obj, rng.choice(missing) if missing else label)

    def go(budget: int, depth: int) -> Term:
        if budget <= 2:
            return leaf(depth)
        roll = rng.random()
        if roll < 0.42:
            return redex(budget, depth)
        if roll < 0.72:
            # object literal with reducible bodies
            width = rng.randint(1, min(3, budget // 2))
            labels = rng.sample(LABELS, k=width)
            if rng.random() < 0.2:
                labels[rng.randrange(width)] = PHI
            bindings = []
            for l in labels:
                if rng.random() < 0.25:
                    bindings.append((l, VOID))
                else:
                    bindings.append((l, go(max(1, (budget - 1) // width), depth + 1)))
            return ObjectTerm(tuple(bindings))
        if roll < 0.84:
            # access on an arbitrary target (congruence or stuck material)
            target = go(budget - 1, depth)
            label = _pick_label(rng)
            if isinstance(target, ObjectTerm) and target.labels and rng.random() < 0.6:
                label = rng.choice(target.labels)
            return Access(target, label)
        if roll < 0.96:
            half = max(1, (budget - 1) // 2)
            return App(go(half, depth), _pick_label(rng, allow_phi=False), go(half, depth))
        return leaf(depth)

    return go(max(1, size), 0)


def some_term(rng: random.Random, size: int, free: int = 3) -> Term:
    """A possibly-open term; locators may exceed the enclosing depth by ``free``."""

    def go(budget: int, depth: int) -> Term:
        if budget <= 1:
            return Locator(rng.randrange(depth + free + 1))
        roll = rng.random()
        if roll < 0.35:
            width = rng.randint(1, min(3, budget))
            labels = rng.sample(LABELS, k=width)
            bindings = []
            for label in labels:
                if rng.random() < 0.25:
                    bindings.append((label, VOID))
                else:
                    bindings.append((label, go(max(1, (budget - 1) // width), depth + 1)))
            return ObjectTerm(tuple(bindings))
        if roll < 0.6:
            return Access(go(budget - 1, depth), _pick_label(rng))
        if roll < 0.85:
            half = max(1, (budget - 1) // 2)
            return App(go(half, depth), _pick_label(rng, allow_phi=False), go(half, depth))
        return Locator(rng.randrange(depth + free + 1))

    return go(max(1, size), 0)


def closed_corpus(rng: random.Random, count: int, size: int) -> list[Term]:
    """Distinct closed terms."""
    seen: set[Term] = set()
    out: list[Term] = []
    while len(out) < count:
        t = closed_term(rng, size)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def pure_lambda(rng: random.Random, size: int) -> LamTerm:
    """A closed pure lambda term with at most ``size`` nodes."""

    def go(budget: int, depth: int) -> tuple[LamTerm, int]:
        if budget <= 1:
            if depth > 0:
                return Index(rng.randrange(depth)), 1
            return Abs(Index(0)), 2
        roll = rng.random()
        if roll < 0.45 or depth == 0:
            body, used = go(budget - 1, depth + 1)
            return Abs(body), used + 1
        if roll < 0.8:
            f, used = go((budget - 1) // 2 + 1, depth)
            a, used2 = go(budget - used - 1, depth)
            return Apply(f, a), used + used2 + 1
        return Index(rng.randrange(depth)), 1

    term, _ = go(max(1, size), 0)
    return term
