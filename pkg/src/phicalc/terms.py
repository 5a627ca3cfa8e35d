"""Core terms of the decorated-object calculus.

Terms are immutable trees built from four constructions: locators
(``^n``, de Bruijn style references to the n-th enclosing object),
attribute access (``t.a``), application aka attribute instantiation
(``t(a -> u)``), and object literals.  An object maps labels to either
``VOID`` (a declared-but-unattached attribute) or an attached term;
labels absent from the mapping are missing.  The decorator attribute is
the distinguished label ``"@"``.

Structural equality ignores the order of object bindings (objects are
mappings); source order is preserved so printers can round-trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

from .errors import (
    BadLabelError,
    DuplicateLabelError,
    LocatorRangeError,
    NotAnObjectError,
)

PHI = "@"
MAX_LOCATOR = 2**32 - 1

_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_label(name: str) -> bool:
    return name == PHI or bool(_LABEL_RE.match(name))


def require_label(name: str) -> str:
    if not isinstance(name, str) or not is_label(name):
        raise BadLabelError(f"invalid label: {name!r}")
    return name


class _Void:
    """Marker for a void (declared, unattached) attribute."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "VOID"


VOID = _Void()


class Term:
    """Base class for term nodes; every instance is immutable."""

    __slots__ = ()


Binding = Union[Term, _Void]


@dataclass(frozen=True)
class Locator(Term):
    """``^n``: reference to the n-th enclosing object."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or not 0 <= self.index <= MAX_LOCATOR:
            raise LocatorRangeError(f"locator index out of range: {self.index!r}")


@dataclass(frozen=True)
class Access(Term):
    """``t.a``: attribute access."""

    target: Term
    label: str

    def __post_init__(self):
        require_label(self.label)


@dataclass(frozen=True)
class App(Term):
    """``t(a -> u)``: attach ``u`` to the void attribute ``a`` of ``t``."""

    target: Term
    label: str
    arg: Term

    def __post_init__(self):
        require_label(self.label)


@dataclass(frozen=True, eq=False)
class ObjectTerm(Term):
    """Object literal: ordered ``(label, binding)`` pairs, no duplicates.

    Bindings are ``VOID`` or a term.  Equality and hashing canonicalize
    by sorting labels, so two literals that differ only in binding order
    compare equal.
    """

    bindings: tuple[tuple[str, Binding], ...]

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple((l, b) for l, b in self.bindings))
        seen = set()
        for label, binding in self.bindings:
            require_label(label)
            if label in seen:
                raise DuplicateLabelError(label)
            seen.add(label)
            if binding is not VOID and not isinstance(binding, Term):
                raise TypeError(f"binding for {label!r} must be a term or VOID")

    @cached_property
    def _canon(self) -> tuple[tuple[str, Binding], ...]:
        # no duplicate labels, so sorting never compares binding values
        return tuple(sorted(self.bindings, key=lambda kv: kv[0]))

    @cached_property
    def _hash(self) -> int:
        return hash(("obj", self._canon))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ObjectTerm):
            return NotImplemented
        return self._canon == other._canon

    def __hash__(self) -> int:
        return self._hash

    def get(self, label: str) -> Binding | None:
        """The binding at ``label``: a term, ``VOID``, or None if missing."""
        for l, b in self.bindings:
            if l == label:
                return b
        return None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.bindings)

    def void_labels(self) -> tuple[str, ...]:
        return tuple(l for l, b in self.bindings if b is VOID)

    def with_binding(self, label: str, term: Term) -> "ObjectTerm":
        """Copy with the binding at ``label`` replaced; order is preserved."""
        if self.get(label) is None:
            raise KeyError(label)
        return ObjectTerm(tuple((l, term if l == label else b) for l, b in self.bindings))

    def map_attached(self, fn: Callable[[Term], Term]) -> "ObjectTerm":
        """Copy with ``fn`` applied to every attached binding."""
        return ObjectTerm(tuple((l, b if b is VOID else fn(b)) for l, b in self.bindings))


def attrs(t: Term) -> frozenset[str]:
    """All void and attached labels of an object term (missing labels excluded)."""
    if not isinstance(t, ObjectTerm):
        raise NotAnObjectError(f"attrs: expected an object term, got {type(t).__name__}")
    return frozenset(t.labels)


def is_abstract(t: Term) -> bool:
    """True iff the object has at least one void attribute."""
    if not isinstance(t, ObjectTerm):
        raise NotAnObjectError(f"is_abstract: expected an object term, got {type(t).__name__}")
    return any(b is VOID for _, b in t.bindings)


def increment(n: int, t: Term) -> Term:
    """Locator increment: bump locators that reference outside depth ``n``.

    ``^m`` stays put for m < n and becomes ``^(m+1)`` for n <= m; access
    and application descend with the same cutoff; object bodies descend
    with the cutoff raised by one.
    """
    match t:
        case Locator(m):
            return Locator(m + 1) if m >= n else t
        case Access(target, label):
            return Access(increment(n, target), label)
        case App(target, label, arg):
            return App(increment(n, target), label, increment(n, arg))
        case ObjectTerm():
            return t.map_attached(lambda b: increment(n + 1, b))
    raise TypeError(f"increment: not a core term: {t!r}")


def inc(t: Term) -> Term:
    """``increment`` with cutoff 0."""
    return increment(0, t)


def substitute(t: Term, n: int, u: Term) -> Term:
    """Locator substitution ``t[^n := u]``.

    Locators below ``n`` are untouched, ``^n`` becomes ``u``, and higher
    locators drop by one (the object they skipped over is gone).
    Descending into an object body raises the index and increments ``u``.
    """
    match t:
        case Locator(m):
            if m < n:
                return t
            if m == n:
                return u
            return Locator(m - 1)
        case Access(target, label):
            return Access(substitute(target, n, u), label)
        case App(target, label, arg):
            return App(substitute(target, n, u), label, substitute(arg, n, u))
        case ObjectTerm():
            iu = increment(0, u)
            return t.map_attached(lambda b: substitute(b, n + 1, iu))
    raise TypeError(f"substitute: not a core term: {t!r}")


def free_locator_excesses(t: Term) -> tuple[int, ...]:
    """Sorted excesses ``m - depth`` of locators not bound by an enclosing object."""
    found: set[int] = set()

    def walk(s: Term, depth: int) -> None:
        match s:
            case Locator(m):
                if m >= depth:
                    found.add(m - depth)
            case Access(target, _):
                walk(target, depth)
            case App(target, _, arg):
                walk(target, depth)
                walk(arg, depth)
            case ObjectTerm():
                for _, b in s.bindings:
                    if b is not VOID:
                        walk(b, depth + 1)

    walk(t, 0)
    return tuple(sorted(found))


def max_free_locator(t: Term) -> int | None:
    """Largest excess of a locator over its object depth, or None if closed."""
    excesses = free_locator_excesses(t)
    return excesses[-1] if excesses else None


def is_closed(t: Term) -> bool:
    """True iff every locator is bound by enough enclosing objects."""
    return max_free_locator(t) is None


def _children(t: Term) -> tuple[Term, ...]:
    match t:
        case Locator():
            return ()
        case Access(target, _):
            return (target,)
        case App(target, _, arg):
            return (target, arg)
        case ObjectTerm():
            return tuple(b for _, b in t.bindings if b is not VOID)
    raise TypeError(f"not a core term: {t!r}")


def term_size(t: Term) -> int:
    """Number of term nodes (void bindings count toward their object)."""
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(_children(node))
    return count


def exceeds_bounds(t: Term, max_size: int, max_depth: int) -> bool:
    """True as soon as the term is larger or deeper than the bounds.

    Iterative, so it is safe to call on terms too deep for the recursive
    operations; it is the guard that keeps them out.
    """
    count = 0
    stack = [(t, 0)]
    while stack:
        node, depth = stack.pop()
        count += 1
        if count > max_size or depth > max_depth:
            return True
        stack.extend((c, depth + 1) for c in _children(node))
    return False
