"""Term-actions-parents machine: call-by-name evaluation to WHNF.

A configuration is a focused term (or the empty symbol), a stack of
pending actions (attribute accesses and applications carried as
closures), and a stack of parents.  Each parent pairs an object term
with an application mapping that records which of its void attributes
have been instantiated, and by which closures.  Locators are resolved
by walking the parent stack instead of substituting eagerly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .errors import MachineError, OpenTermError
from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
    free_locator_excesses,
    substitute,
)

DEFAULT_MACHINE_FUEL = 10_000


@dataclass(frozen=True)
class Closure:
    """A term together with the parent stack it must be evaluated under."""

    term: Term
    parents: tuple["Parent", ...] = ()


@dataclass(frozen=True)
class Parent:
    """An object on the stack plus its application mapping.

    The mapping may only bind void attributes of the object, each at
    most once.
    """

    obj: ObjectTerm
    apps: tuple[tuple[str, Closure], ...] = ()

    def __post_init__(self):
        if not isinstance(self.obj, ObjectTerm):
            raise MachineError(f"parent object must be an object term, got {type(self.obj).__name__}")
        seen = set()
        for label, closure in self.apps:
            if label in seen:
                raise MachineError(f"application mapping binds {label!r} twice")
            seen.add(label)
            if self.obj.get(label) is not VOID:
                raise MachineError(f"application mapping binds non-void attribute {label!r}")
            if not isinstance(closure, Closure):
                raise MachineError("application mapping values must be closures")

    def app_for(self, label: str) -> Closure | None:
        for l, c in self.apps:
            if l == label:
                return c
        return None


@dataclass(frozen=True)
class AccessAction:
    label: str


@dataclass(frozen=True)
class ApplyAction:
    label: str
    closure: Closure


Action = Union[AccessAction, ApplyAction]


@dataclass(frozen=True)
class Configuration:
    """Machine state: focus (None is the empty symbol), actions, parents."""

    focus: Term | None
    actions: tuple[Action, ...] = ()
    parents: tuple[Parent, ...] = ()


def inject(t: Term) -> Configuration:
    """Initial configuration for a closed term; open terms are rejected."""
    excesses = free_locator_excesses(t)
    if excesses:
        raise OpenTermError(excesses)
    return Configuration(t, (), ())


def _step(c: Configuration) -> tuple[int, Configuration] | None:
    """Apply the first matching transition rule; None when terminal."""
    focus, actions, parents = c.focus, c.actions, c.parents
    match focus:
        case Locator(0):
            return 1, Configuration(None, actions, parents)
        case Locator(n):
            if not parents:
                raise MachineError("locator escaped the parent stack; input was not closed")
            return 2, Configuration(Locator(n - 1), actions, parents[1:])
        case Access(target, label):
            return 3, Configuration(target, (AccessAction(label),) + actions, parents)
        case App(target, label, arg):
            action = ApplyAction(label, Closure(arg, parents))
            return 4, Configuration(target, (action,) + actions, parents)
        case ObjectTerm():
            return 5, Configuration(None, actions, (Parent(focus, ()),) + parents)
    if focus is None and actions and parents:
        action = actions[0]
        top = parents[0]
        if isinstance(action, AccessAction):
            a = action.label
            binding = top.obj.get(a)
            if binding is not None and binding is not VOID:
                return 6, Configuration(binding, actions[1:], parents)
            if binding is VOID:
                closure = top.app_for(a)
                if closure is not None:
                    return 7, Configuration(closure.term, actions[1:], closure.parents)
            if binding is None and top.obj.get(PHI) is not None:
                return 8, Configuration(None, (AccessAction(PHI),) + actions, parents)
        else:
            a = action.label
            if top.obj.get(a) is VOID and top.app_for(a) is None:
                extended = Parent(top.obj, top.apps + ((a, action.closure),))
                return 9, Configuration(None, actions[1:], (extended,) + parents[1:])
    return None


def applicable_rules(c: Configuration) -> list[int]:
    """Every rule whose pattern and side conditions match ``c``.

    The transition rules are meant to be mutually exclusive; this is the
    oracle the determinism check runs against.
    """
    out: list[int] = []
    focus, actions, parents = c.focus, c.actions, c.parents
    if isinstance(focus, Locator):
        if focus.index == 0:
            out.append(1)
        elif parents:
            out.append(2)
    if isinstance(focus, Access):
        out.append(3)
    if isinstance(focus, App):
        out.append(4)
    if isinstance(focus, ObjectTerm):
        out.append(5)
    if focus is None and actions and parents:
        action = actions[0]
        top = parents[0]
        if isinstance(action, AccessAction):
            a = action.label
            binding = top.obj.get(a)
            if binding is not None and binding is not VOID:
                out.append(6)
            if binding is VOID and top.app_for(a) is not None:
                out.append(7)
            if binding is None and top.obj.get(PHI) is not None:
                out.append(8)
        else:
            a = action.label
            if top.obj.get(a) is VOID and top.app_for(a) is None:
                out.append(9)
    return out


def machine_step(c: Configuration) -> Configuration | None:
    """One transition, or None when no rule matches."""
    nxt = _step(c)
    return None if nxt is None else nxt[1]


class RunStatus(enum.Enum):
    TERMINAL = "terminal"
    FUEL_EXHAUSTED = "fuel-exhausted"


@dataclass(frozen=True)
class RunResult:
    config: Configuration
    steps: int
    status: RunStatus
    trace: tuple[tuple[int, Configuration], ...] | None = None


def run(t: Term, fuel: int = DEFAULT_MACHINE_FUEL, trace: bool = False) -> RunResult:
    """Inject ``t`` and iterate transitions until terminal or out of fuel."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    c = inject(t)
    tr: list[tuple[int, Configuration]] | None = [] if trace else None
    steps = 0
    while steps < fuel:
        nxt = _step(c)
        if nxt is None:
            return RunResult(c, steps, RunStatus.TERMINAL, tuple(tr) if tr is not None else None)
        rule, c = nxt
        steps += 1
        if tr is not None:
            tr.append((rule, c))
    status = RunStatus.TERMINAL if _step(c) is None else RunStatus.FUEL_EXHAUSTED
    return RunResult(c, steps, status, tuple(tr) if tr is not None else None)


# ---------------------------------------------------------------------------
# decoding configurations back to terms

def decode_parent(p: Parent) -> Term:
    """A parent as a term: the object with its recorded instantiations
    re-applied as syntactic applications."""
    t: Term = p.obj
    for label, closure in p.apps:
        t = App(t, label, decode_closure(closure))
    return t


def decode_closure(closure: Closure) -> Term:
    """Fold the parent stack into the focused term, innermost first.

    Each decoded parent is substituted for locator index 0; the
    substitution clauses take care of the index shifts for the parents
    further out.
    """
    t = closure.term
    for p in closure.parents:
        t = substitute(t, 0, decode_parent(p))
    return t


def decode(c: Configuration) -> Term:
    """Convert a configuration back to the term it denotes."""
    if c.focus is not None:
        t = decode_closure(Closure(c.focus, c.parents))
    else:
        if not c.parents:
            raise MachineError("cannot decode: empty focus with an empty parent stack")
        t = decode_closure(Closure(decode_parent(c.parents[0]), c.parents[1:]))
    for action in c.actions:
        if isinstance(action, AccessAction):
            t = Access(t, action.label)
        else:
            t = App(t, action.label, decode_closure(action.closure))
    return t


# ---------------------------------------------------------------------------
# trace export

def _closure_json(closure: Closure, render) -> dict:
    return {
        "term": render(closure.term),
        "parents": [_parent_json(p, render) for p in closure.parents],
    }


def _parent_json(p: Parent, render) -> dict:
    return {
        "object": render(p.obj),
        "apps": {label: _closure_json(c, render) for label, c in p.apps},
    }


def _action_json(action: Action, render) -> dict:
    if isinstance(action, AccessAction):
        return {"access": action.label}
    return {"apply": action.label, "closure": _closure_json(action.closure, render)}


def config_json(c: Configuration) -> dict:
    """JSON-ready view of a configuration, terms pretty-printed."""
    from .surface import pretty

    return {
        "focus": None if c.focus is None else pretty(c.focus),
        "actions": [_action_json(a, pretty) for a in c.actions],
        "parents": [_parent_json(p, pretty) for p in c.parents],
    }


def trace_json(result: RunResult) -> list[dict]:
    """One record per executed step: {step, rule, focus, actions, parents}."""
    if result.trace is None:
        raise ValueError("run() was not asked to record a trace")
    records = []
    for i, (rule, config) in enumerate(result.trace, start=1):
        record = {"step": i, "rule": rule}
        record.update(config_json(config))
        records.append(record)
    return records
