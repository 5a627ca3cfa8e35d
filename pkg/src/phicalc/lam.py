"""Nameless lambda calculus with records, and the object-calculus translation.

The target language has de Bruijn indices, abstraction, application,
record literals, projection, record extension (``with``), record
concatenation (``||``, right-biased), and an explicit fixed point.
Projection through an extension falls back to the extended term when
the field is absent; ``fix`` unfolds lazily, only in head position.

Objects translate to fixed points of two nested abstractions: the outer
one ties the recursive knot for locators, the inner one receives the
record of instantiated void attributes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DuplicateLabelError, UnsupportedConstructError
from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
)


class LamTerm:
    """Base class for lambda-term nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Index(LamTerm):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("de Bruijn index must be non-negative")


@dataclass(frozen=True)
class Abs(LamTerm):
    body: LamTerm


@dataclass(frozen=True)
class Apply(LamTerm):
    fn: LamTerm
    arg: LamTerm


def _check_fields(fields):
    seen = set()
    for label, value in fields:
        if label in seen:
            raise DuplicateLabelError(label)
        seen.add(label)
        if not isinstance(value, LamTerm):
            raise TypeError(f"field {label!r} must be a lambda term")


@dataclass(frozen=True)
class Record(LamTerm):
    fields: tuple[tuple[str, LamTerm], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        _check_fields(self.fields)

    def get(self, label: str) -> LamTerm | None:
        for l, v in self.fields:
            if l == label:
                return v
        return None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.fields)


@dataclass(frozen=True)
class Project(LamTerm):
    target: LamTerm
    label: str


@dataclass(frozen=True)
class With(LamTerm):
    target: LamTerm
    fields: tuple[tuple[str, LamTerm], ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        _check_fields(self.fields)


@dataclass(frozen=True)
class Concat(LamTerm):
    left: LamTerm
    right: LamTerm


@dataclass(frozen=True)
class Fix(LamTerm):
    body: LamTerm


# ---------------------------------------------------------------------------
# index arithmetic

def lam_shift(cutoff: int, e: LamTerm) -> LamTerm:
    """Shift free indices (>= cutoff) up by one."""
    match e:
        case Index(n):
            return Index(n + 1) if n >= cutoff else e
        case Abs(body):
            return Abs(lam_shift(cutoff + 1, body))
        case Apply(fn, arg):
            return Apply(lam_shift(cutoff, fn), lam_shift(cutoff, arg))
        case Record(fields):
            return Record(tuple((l, lam_shift(cutoff, v)) for l, v in fields))
        case Project(target, label):
            return Project(lam_shift(cutoff, target), label)
        case With(target, fields):
            return With(lam_shift(cutoff, target), tuple((l, lam_shift(cutoff, v)) for l, v in fields))
        case Concat(left, right):
            return Concat(lam_shift(cutoff, left), lam_shift(cutoff, right))
        case Fix(body):
            return Fix(lam_shift(cutoff, body))
    raise TypeError(f"lam_shift: not a lambda term: {e!r}")


def lam_substitute(e: LamTerm, j: int, v: LamTerm) -> LamTerm:
    """Replace index ``j`` by ``v`` and pull higher indices down by one."""
    match e:
        case Index(n):
            if n == j:
                return v
            return Index(n - 1) if n > j else e
        case Abs(body):
            return Abs(lam_substitute(body, j + 1, lam_shift(0, v)))
        case Apply(fn, arg):
            return Apply(lam_substitute(fn, j, v), lam_substitute(arg, j, v))
        case Record(fields):
            return Record(tuple((l, lam_substitute(x, j, v)) for l, x in fields))
        case Project(target, label):
            return Project(lam_substitute(target, j, v), label)
        case With(target, fields):
            return With(
                lam_substitute(target, j, v),
                tuple((l, lam_substitute(x, j, v)) for l, x in fields),
            )
        case Concat(left, right):
            return Concat(lam_substitute(left, j, v), lam_substitute(right, j, v))
        case Fix(body):
            return Fix(lam_substitute(body, j, v))
    raise TypeError(f"lam_substitute: not a lambda term: {e!r}")


def _children(e: LamTerm) -> tuple[LamTerm, ...]:
    match e:
        case Index():
            return ()
        case Abs(body) | Fix(body):
            return (body,)
        case Apply(fn, arg):
            return (fn, arg)
        case Record(fields):
            return tuple(v for _, v in fields)
        case Project(target, _):
            return (target,)
        case With(target, fields):
            return (target,) + tuple(v for _, v in fields)
        case Concat(left, right):
            return (left, right)
    raise TypeError(f"not a lambda term: {e!r}")


def lam_size(e: LamTerm) -> int:
    """Node count (iterative; normalized terms can be very deep)."""
    count = 0
    stack = [e]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(_children(node))
    return count


def _exceeds(e: LamTerm, max_size: int, max_depth: int) -> bool:
    """True as soon as the term is too large or too deep to keep reducing."""
    count = 0
    stack = [(e, 0)]
    while stack:
        node, depth = stack.pop()
        count += 1
        if count > max_size or depth > max_depth:
            return True
        stack.extend((c, depth + 1) for c in _children(node))
    return False


# ---------------------------------------------------------------------------
# reduction

def _has_field(e: LamTerm, label: str) -> bool | None:
    """Static field membership: True/False when decidable, else None."""
    match e:
        case Record():
            return label in e.labels
        case With(target, fields):
            if any(l == label for l, _ in fields):
                return True
            return _has_field(target, label)
        case Concat(left, right):
            r = _has_field(right, label)
            if r is True:
                return True
            if r is False:
                return _has_field(left, label)
            return None
    return None


def _unfold(e: Fix) -> LamTerm:
    return Apply(e.body, e)


def lam_step(e: LamTerm) -> LamTerm | None:
    """One normal-order step; None when no rule applies.

    Beta and the projection rules fire before congruence descent; the
    fixed point unfolds only when it is the head of an application or a
    projection.  Reduction goes under binders and into record fields,
    so iterating this yields full normal forms where they exist.
    """
    match e:
        case Index():
            return None
        case Apply(Abs(body), arg):
            return lam_substitute(body, 0, arg)
        case Apply(Fix() as f, arg):
            return Apply(_unfold(f), arg)
        case Apply(fn, arg):
            fn2 = lam_step(fn)
            if fn2 is not None:
                return Apply(fn2, arg)
            arg2 = lam_step(arg)
            return None if arg2 is None else Apply(fn, arg2)
        case Project(Record() as r, label):
            value = r.get(label)
            if value is not None:
                return value
            return _congruence_project(e)
        case Project(With(target, fields) as w, label):
            for l, v in fields:
                if l == label:
                    return v
            return Project(target, label)
        case Project(Concat(left, right), label):
            present = _has_field(right, label)
            if present is True:
                return Project(right, label)
            if present is False:
                return Project(left, label)
            return _congruence_project(e)
        case Project(Fix() as f, label):
            return Project(_unfold(f), label)
        case Project():
            return _congruence_project(e)
        case Abs(body):
            body2 = lam_step(body)
            return None if body2 is None else Abs(body2)
        case Record(fields):
            stepped = _step_fields(fields)
            return None if stepped is None else Record(stepped)
        case With(target, fields):
            target2 = lam_step(target)
            if target2 is not None:
                return With(target2, fields)
            stepped = _step_fields(fields)
            return None if stepped is None else With(target, stepped)
        case Concat(left, right):
            left2 = lam_step(left)
            if left2 is not None:
                return Concat(left2, right)
            right2 = lam_step(right)
            return None if right2 is None else Concat(left, right2)
        case Fix(body):
            body2 = lam_step(body)
            return None if body2 is None else Fix(body2)
    raise TypeError(f"lam_step: not a lambda term: {e!r}")


def _congruence_project(e: Project) -> LamTerm | None:
    target2 = lam_step(e.target)
    return None if target2 is None else Project(target2, e.label)


def _step_fields(fields):
    for i, (l, v) in enumerate(fields):
        v2 = lam_step(v)
        if v2 is not None:
            return fields[:i] + ((l, v2),) + fields[i + 1 :]
    return None


class _Gas:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


# the depth cap keeps recursive traversals far from the interpreter limit
_MAX_NORMALIZE_SIZE = 20_000
_MAX_NORMALIZE_DEPTH = 200


def _normalize(e: LamTerm, gas: _Gas, max_size: int = _MAX_NORMALIZE_SIZE) -> tuple[LamTerm, bool]:
    """Reduce to normal form within the shared gas; False if cut short."""
    while True:
        nxt = lam_step(e)
        if nxt is None:
            return e, True
        if not gas.spend():
            return e, False
        if _exceeds(nxt, max_size, _MAX_NORMALIZE_DEPTH):
            return e, False
        e = nxt


def lam_normalize(e: LamTerm, fuel: int = 2000) -> tuple[LamTerm, bool]:
    """Fuel-bounded normal form; the flag reports completion."""
    return _normalize(e, _Gas(fuel))


# ---------------------------------------------------------------------------
# zeta/eta canonicalization (applied after normalization only)

def _free_at(e: LamTerm, k: int) -> bool:
    match e:
        case Index(n):
            return n == k
        case Abs(body):
            return _free_at(body, k + 1)
        case Apply(fn, arg):
            return _free_at(fn, k) or _free_at(arg, k)
        case Record(fields):
            return any(_free_at(v, k) for _, v in fields)
        case Project(target, _):
            return _free_at(target, k)
        case With(target, fields):
            return _free_at(target, k) or any(_free_at(v, k) for _, v in fields)
        case Concat(left, right):
            return _free_at(left, k) or _free_at(right, k)
        case Fix(body):
            return _free_at(body, k)
    raise TypeError


def _unshift(e: LamTerm, cutoff: int = 0) -> LamTerm:
    match e:
        case Index(n):
            if n == cutoff:
                raise ValueError("index in scope")
            return Index(n - 1) if n > cutoff else e
        case Abs(body):
            return Abs(_unshift(body, cutoff + 1))
        case Apply(fn, arg):
            return Apply(_unshift(fn, cutoff), _unshift(arg, cutoff))
        case Record(fields):
            return Record(tuple((l, _unshift(v, cutoff)) for l, v in fields))
        case Project(target, label):
            return Project(_unshift(target, cutoff), label)
        case With(target, fields):
            return With(_unshift(target, cutoff), tuple((l, _unshift(v, cutoff)) for l, v in fields))
        case Concat(left, right):
            return Concat(_unshift(left, cutoff), _unshift(right, cutoff))
        case Fix(body):
            return Fix(_unshift(body, cutoff))
    raise TypeError


def _merge_fields(base, extra):
    """Right-biased field merge preserving first-seen order."""
    out = list(base)
    labels = {l: i for i, (l, _) in enumerate(out)}
    for l, v in extra:
        if l in labels:
            out[labels[l]] = (l, v)
        else:
            labels[l] = len(out)
            out.append((l, v))
    return tuple(out)


def _concat_items(e: LamTerm) -> list[LamTerm]:
    if isinstance(e, Concat):
        return _concat_items(e.left) + _concat_items(e.right)
    return [e]


def _local_canon(e: LamTerm) -> LamTerm:
    """One pass of the congruence normalizations at this node."""
    match e:
        case With(target, fields):
            # extension and (right-biased) concatenation with a literal agree
            if not fields:
                return target
            return Concat(target, Record(tuple(sorted(fields))))
        case Concat():
            items = [x for x in _concat_items(e) if not (isinstance(x, Record) and not x.fields)]
            merged: list[LamTerm] = []
            for item in items:
                if merged and isinstance(merged[-1], Record) and isinstance(item, Record):
                    merged[-1] = Record(_merge_fields(merged[-1].fields, item.fields))
                else:
                    merged.append(item)
            if not merged:
                return Record(())
            out = merged[-1]
            for item in reversed(merged[:-1]):
                out = Concat(item, out)
            return out
        case Record(fields):
            ordered = tuple(sorted(fields))
            if ordered != fields:
                return Record(ordered)
        case Abs(Apply(fn, Index(0))):
            if not _free_at(fn, 0):
                return _unshift(fn)
    return e


def lam_canon(e: LamTerm) -> LamTerm:
    """Canonical form modulo the record congruences and eta."""
    match e:
        case Index():
            out = e
        case Abs(body):
            out = Abs(lam_canon(body))
        case Apply(fn, arg):
            out = Apply(lam_canon(fn), lam_canon(arg))
        case Record(fields):
            out = Record(tuple((l, lam_canon(v)) for l, v in fields))
        case Project(target, label):
            out = Project(lam_canon(target), label)
        case With(target, fields):
            out = With(lam_canon(target), tuple((l, lam_canon(v)) for l, v in fields))
        case Concat(left, right):
            out = Concat(lam_canon(left), lam_canon(right))
        case Fix(body):
            out = Fix(lam_canon(body))
        case _:
            raise TypeError(f"lam_canon: not a lambda term: {e!r}")
    while True:
        nxt = _local_canon(out)
        if nxt == out:
            return out
        out = lam_canon(nxt)


def _fix_free(e: LamTerm) -> bool:
    match e:
        case Fix():
            return False
        case Index():
            return True
        case Abs(body):
            return _fix_free(body)
        case Apply(fn, arg):
            return _fix_free(fn) and _fix_free(arg)
        case Record(fields):
            return all(_fix_free(v) for _, v in fields)
        case Project(target, _):
            return _fix_free(target)
        case With(target, fields):
            return _fix_free(target) and all(_fix_free(v) for _, v in fields)
        case Concat(left, right):
            return _fix_free(left) and _fix_free(right)
    raise TypeError


# ---------------------------------------------------------------------------
# observational equivalence (sound under-approximation)

class ObsVerdict(enum.Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ObsResult:
    verdict: ObsVerdict
    lhs: LamTerm
    rhs: LamTerm


_UNFOLD_BUDGET = 8


def _whnf(e: LamTerm, gas: _Gas) -> tuple[LamTerm, bool]:
    """Spine reduction only: beta, projection, fix unfolding in head
    position.  Fields, arguments, and bodies are left untouched."""
    while True:
        match e:
            case Apply(fn, arg):
                fn2, ok = _whnf(fn, gas)
                if not ok:
                    return e, False
                if isinstance(fn2, Abs):
                    if not gas.spend():
                        return Apply(fn2, arg), False
                    e = lam_substitute(fn2.body, 0, arg)
                    continue
                if isinstance(fn2, Fix):
                    if not gas.spend():
                        return Apply(fn2, arg), False
                    e = Apply(_unfold(fn2), arg)
                    continue
                return Apply(fn2, arg), True
            case Project(target, label):
                t2, ok = _whnf(target, gas)
                if not ok:
                    return e, False
                if isinstance(t2, Record):
                    value = t2.get(label)
                    if value is not None:
                        if not gas.spend():
                            return Project(t2, label), False
                        e = value
                        continue
                    return Project(t2, label), True
                if isinstance(t2, With):
                    hit = next((v for l, v in t2.fields if l == label), None)
                    if not gas.spend():
                        return Project(t2, label), False
                    e = hit if hit is not None else Project(t2.target, label)
                    continue
                if isinstance(t2, Concat):
                    present = _has_field(t2.right, label)
                    if present is None:
                        return Project(t2, label), True
                    if not gas.spend():
                        return Project(t2, label), False
                    e = Project(t2.right if present else t2.left, label)
                    continue
                if isinstance(t2, Fix):
                    if not gas.spend():
                        return Project(t2, label), False
                    e = Project(_unfold(t2), label)
                    continue
                return Project(t2, label), True
            case _:
                return e, True


def _zeta_root(e: LamTerm, gas: _Gas, state: dict) -> LamTerm:
    """Record-algebra canonicalization of a weak head normal form.

    Extensions become concatenations with a literal; concatenations are
    flattened right-associatively with items brought to weak head form,
    empty literals dropped, and adjacent literals merged right-biased;
    literal record fields are sorted.
    """
    if isinstance(e, With):
        e = Concat(e.target, Record(e.fields))
    if isinstance(e, Concat):
        items: list[LamTerm] = []
        pending = [e]
        while pending:
            item = pending.pop()
            if isinstance(item, Concat):
                pending.append(item.left)
                pending.append(item.right)
                continue
            w, ok = _whnf(item, gas)
            if not ok:
                state["uncertain"] = True
            if isinstance(w, With):
                pending.append(Concat(w.target, Record(w.fields)))
                continue
            if isinstance(w, Concat):
                pending.append(w)
                continue
            items.append(w)
        items.reverse()
        merged: list[LamTerm] = []
        for item in items:
            if isinstance(item, Record) and not item.fields:
                continue
            if merged and isinstance(merged[-1], Record) and isinstance(item, Record):
                merged[-1] = Record(_merge_fields(merged[-1].fields, item.fields))
            else:
                merged.append(item)
        if not merged:
            return Record(())
        e = merged[-1]
        for item in reversed(merged[:-1]):
            e = Concat(item, e)
    if isinstance(e, Record):
        return Record(tuple(sorted(e.fields)))
    return e


def _eta_expand(e: LamTerm) -> LamTerm:
    return Abs(Apply(lam_shift(0, e), Index(0)))


def _conv(a: LamTerm, b: LamTerm, unfolds: int, gas: _Gas, state: dict) -> bool:
    """Convertibility on weak head normal forms with bounded unfolding."""
    if a == b:
        return True
    a, ok_a = _whnf(a, gas)
    b, ok_b = _whnf(b, gas)
    if not (ok_a and ok_b):
        state["uncertain"] = True
        return False
    a = _zeta_root(a, gas, state)
    b = _zeta_root(b, gas, state)
    if a == b:
        return True
    if isinstance(a, Fix) or isinstance(b, Fix):
        if unfolds <= 0:
            state["uncertain"] = True
            return False
        if isinstance(a, Fix):
            a = _unfold(a)
        if isinstance(b, Fix):
            b = _unfold(b)
        return _conv(a, b, unfolds - 1, gas, state)
    # eta: an abstraction can match any non-record value
    if isinstance(a, Abs) and not isinstance(b, Abs):
        b = _eta_expand(b)
    elif isinstance(b, Abs) and not isinstance(a, Abs):
        a = _eta_expand(a)
    match (a, b):
        case (Index(), Index()):
            return False  # structural equality already failed
        case (Abs(x), Abs(y)):
            return _conv(x, y, unfolds, gas, state)
        case (Record(fs1), Record(fs2)):
            if a.labels != b.labels:  # both sorted by the canonicalization
                return False
            return all(_conv(v1, v2, unfolds, gas, state) for (_, v1), (_, v2) in zip(fs1, fs2))
        case (Apply(f1, a1), Apply(f2, a2)):
            return _conv(f1, f2, unfolds, gas, state) and _conv(a1, a2, unfolds, gas, state)
        case (Project(t1, l1), Project(t2, l2)):
            return l1 == l2 and _conv(t1, t2, unfolds, gas, state)
        case (Concat(l1, r1), Concat(l2, r2)):
            # stuck concatenations: mismatches may still be joinable record
            # algebra, so never report them as a certain difference
            if _conv(l1, l2, unfolds, gas, state) and _conv(r1, r2, unfolds, gas, state):
                return True
            state["uncertain"] = True
            return False
    if isinstance(a, (Concat, With)) or isinstance(b, (Concat, With)):
        state["uncertain"] = True
    return False


def obs_equal(e1: LamTerm, e2: LamTerm, fuel: int = 2000) -> ObsResult:
    """Decide beta/eta/record-congruence equivalence, conservatively.

    Both sides are compared through weak head normal forms with the
    record congruences applied at every comparison point and fixed
    points unfolded a bounded number of times.  NOT_EQUAL is reported
    only when the difference is rigid (no budget ran out and no record
    algebra or fixed point was involved at the mismatch), so a NOT_EQUAL
    verdict is trustworthy; divergence or exhausted budgets yield
    INCONCLUSIVE.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    gas = _Gas(fuel)
    state: dict = {"uncertain": False}
    if _conv(e1, e2, _UNFOLD_BUDGET, gas, state):
        return ObsResult(ObsVerdict.EQUAL, e1, e2)
    if state["uncertain"]:
        return ObsResult(ObsVerdict.INCONCLUSIVE, e1, e2)
    return ObsResult(ObsVerdict.NOT_EQUAL, e1, e2)


# ---------------------------------------------------------------------------
# translation from the object calculus

def phi_to_lambda(t: Term) -> LamTerm:
    """Translate a core term.

    A locator becomes a function that applies the right outer binder to
    its own instantiations concatenated over the binder's; access
    applies an empty instantiation record and projects; application
    re-abstracts and extends the instantiation record; objects become
    fixed points over the record of their attributes, decorated objects
    extending their decorator's record.
    """
    match t:
        case Locator(n):
            return Abs(Apply(Index(2 * n + 2), Concat(Index(2 * n + 1), Index(0))))
        case Access(target, label):
            return Project(Apply(phi_to_lambda(target), Record(())), label)
        case App(target, label, arg):
            return Abs(
                Apply(
                    lam_shift(0, phi_to_lambda(target)),
                    With(Index(0), ((label, lam_shift(0, phi_to_lambda(arg))),)),
                )
            )
        case ObjectTerm():
            fields = tuple(
                (l, Project(Index(0), l) if b is VOID else phi_to_lambda(b))
                for l, b in t.bindings
            )
            phi_binding = t.get(PHI)
            if phi_binding is not None and phi_binding is not VOID:
                component = Apply(Project(Apply(Index(1), Index(0)), PHI), Record(()))
                return Fix(Abs(Abs(With(component, fields))))
            return Fix(Abs(Abs(Record(fields))))
    raise TypeError(f"phi_to_lambda: not a core term: {t!r}")


def lambda_to_phi(e: LamTerm) -> Term:
    """Embed a pure lambda term (indices, abstraction, application only)."""
    match e:
        case Index(n):
            return Access(Locator(n), "arg")
        case Abs(body):
            return ObjectTerm((("arg", VOID), ("body", lambda_to_phi(body))))
        case Apply(fn, arg):
            return Access(App(lambda_to_phi(fn), "arg", lambda_to_phi(arg)), "body")
    raise UnsupportedConstructError(type(e).__name__)


def pure_lambda_of_phi(t: Term) -> LamTerm:
    """Inverse of the embedding, defined exactly on its image."""
    match t:
        case Access(Locator(n), "arg"):
            return Index(n)
        case Access(App(fn, "arg", arg), "body"):
            return Apply(pure_lambda_of_phi(fn), pure_lambda_of_phi(arg))
        case ObjectTerm():
            if set(t.labels) == {"arg", "body"} and t.get("arg") is VOID:
                body = t.get("body")
                if body is not VOID and body is not None:
                    return Abs(pure_lambda_of_phi(body))
    raise UnsupportedConstructError(f"not in the embedding image: {t!r}")


# ---------------------------------------------------------------------------
# concrete syntax for lambda terms (output only)

def _atomic(e: LamTerm) -> bool:
    return isinstance(e, (Index, Record))


def _wrap(e: LamTerm) -> str:
    s = lam_pretty(e)
    return s if _atomic(e) else f"({s})"


def lam_pretty(e: LamTerm) -> str:
    match e:
        case Index(n):
            return f"#{n}"
        case Abs(body):
            return f"\\ {lam_pretty(body)}"
        case Apply(fn, arg):
            return f"({lam_pretty(fn)}) {_wrap(arg)}"
        case Record(fields):
            inner = ", ".join(f"{l} = {lam_pretty(v)}" for l, v in fields)
            return "{" + inner + "}"
        case Project(target, label):
            return f"{_wrap(target)}.{label}"
        case With(target, fields):
            inner = ", ".join(f"{l} = {lam_pretty(v)}" for l, v in fields)
            return f"{_wrap(target)} with {{{inner}}}"
        case Concat(left, right):
            return f"{_wrap(left)} || {_wrap(right)}"
        case Fix(body):
            return f"fix {_wrap(body)}"
    raise TypeError(f"lam_pretty: not a lambda term: {e!r}")
