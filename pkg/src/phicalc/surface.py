"""Concrete syntax and the sugar layers.

Grammar (whitespace-insensitive, ``#`` comments to end of line)::

    term    := chain
    chain   := atom (('.' label) | '(' args ')')*
    atom    := '^' NAT | '$' | '[' [binding (',' binding)*] ']' | IDENT | '(' term ')'
    binding := label '->' ('?' | term)
             | IDENT '(' IDENT (',' IDENT)* ')' '->' term
    args    := (label '->' term (',' label '->' term)*) | (term (',' term)*)
    label   := IDENT | '@'

On top of the core language the parser accepts three sugared forms:
bare attribute-variables (``x`` for ``^n.x`` with an inferred locator),
the global-object locator ``$``, and positional arguments backed by the
reserved void attributes ``p1..pk`` (declared by method bindings like
``f(a, b) -> [...]``).  ``resolve_locators`` eliminates all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateLabelError, ParseError, PhiError, UnresolvedAttributeError
from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
    is_label,
)

# ---------------------------------------------------------------------------
# surface-only nodes

Pos = "tuple[int, int] | None"


@dataclass(frozen=True)
class AttrVar(Term):
    """Bare attribute-variable, resolved to ``^n.name`` during desugaring."""

    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GlobalLocator(Term):
    """``$``: the locator of the outermost object of the compilation unit."""

    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PositionalApp(Term):
    """``t(u1, ..., un)``: application through positional attributes."""

    target: Term
    args: tuple[Term, ...]


@dataclass(frozen=True)
class MethodSugar(Term):
    """``f(a, b) -> [...]`` binding body; expands to positional attributes."""

    params: tuple[str, ...]
    body: Term  # must be an object literal


_SURFACE_NODES = (AttrVar, GlobalLocator, PositionalApp, MethodSugar)


def _is_positional_label(name: str) -> bool:
    return len(name) > 1 and name[0] == "p" and name[1:].isdigit()


# ---------------------------------------------------------------------------
# tokenizer

_PUNCT = {"[", "]", "(", ")", ",", ".", "?", "^", "$", "@", "->"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "ident" | "nat" | punctuation | "eof"
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("ident", src[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(_Tok("nat", src[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-" and i + 1 < n and src[i + 1] == ">":
            toks.append(_Tok("->", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in "[](),.?^$@":
            toks.append(_Tok(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.pos = 0
        # true while parsing a method-sugar body, where p<N> labels are reserved
        self.in_method_body = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return self.next()

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # grammar ---------------------------------------------------------------

    def parse_unit(self) -> Term:
        t = self.term()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
        return t

    def term(self) -> Term:
        t = self.atom()
        while True:
            tok = self.peek()
            if tok.kind == ".":
                self.next()
                t = Access(t, self.label())
            elif tok.kind == "(":
                self.next()
                t = self.args(t)
            else:
                return t

    def label(self) -> str:
        tok = self.peek()
        if tok.kind == "ident":
            return self.next().text
        if tok.kind == "@":
            self.next()
            return PHI
        raise self.fail(f"expected a label, found {tok.text or 'end of input'!r}")

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "^":
            self.next()
            nat = self.expect("nat")
            return Locator(int(nat.text))
        if tok.kind == "$":
            self.next()
            return GlobalLocator(pos=(tok.line, tok.col))
        if tok.kind == "[":
            return self.object_literal()
        if tok.kind == "ident":
            self.next()
            return AttrVar(tok.text, pos=(tok.line, tok.col))
        if tok.kind == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        raise self.fail(f"expected a term, found {tok.text or 'end of input'!r}")

    def object_literal(self) -> ObjectTerm:
        open_tok = self.expect("[")
        bindings: list[tuple[str, object]] = []
        positions: dict[str, tuple[int, int]] = {}
        if self.peek().kind != "]":
            while True:
                label, value, pos = self.binding()
                if label in positions:
                    raise DuplicateLabelError(
                        label, where=f"{pos[0]}:{pos[1]} (first bound at {positions[label][0]}:{positions[label][1]})"
                    )
                positions[label] = pos
                bindings.append((label, value))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
        self.expect("]")
        del open_tok
        return ObjectTerm(tuple(bindings))

    def binding(self) -> tuple[str, object, tuple[int, int]]:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if tok.kind == "ident" and self.peek(1).kind == "(":
            return (*self.method_binding(), pos)
        label_tok = self.peek()
        label = self.label()
        if self.in_method_body and _is_positional_label(label):
            raise ParseError(
                f"label {label!r} is reserved for positional attributes inside method bodies",
                label_tok.line,
                label_tok.col,
            )
        self.expect("->")
        if self.peek().kind == "?":
            self.next()
            return label, VOID, pos
        return label, self.term(), pos

    def method_binding(self) -> tuple[str, MethodSugar]:
        name = self.expect("ident").text
        self.expect("(")
        params: list[str] = []
        while True:
            p = self.expect("ident")
            if _is_positional_label(p.text):
                raise ParseError(
                    f"parameter {p.text!r} is reserved for positional attributes", p.line, p.col
                )
            if p.text in params:
                raise ParseError(f"duplicate parameter {p.text!r}", p.line, p.col)
            params.append(p.text)
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(")")
        self.expect("->")
        body_tok = self.peek()
        self.in_method_body += 1
        try:
            body = self.atom()
        finally:
            self.in_method_body -= 1
        if not isinstance(body, ObjectTerm):
            raise ParseError("method body must be an object literal", body_tok.line, body_tok.col)
        return name, MethodSugar(tuple(params), body)

    def args(self, target: Term) -> Term:
        tok = self.peek()
        if tok.kind == ")":
            raise self.fail("expected at least one argument")
        named = (tok.kind in ("ident", "@")) and self.peek(1).kind == "->"
        if named:
            t = target
            while True:
                t = self.named_arg(t)
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            self.expect(")")
            return t
        args: list[Term] = []
        while True:
            args.append(self.term())
            if self.peek().kind == "->":
                raise self.fail("cannot mix named and positional arguments")
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(")")
        return PositionalApp(target, tuple(args))

    def named_arg(self, target: Term) -> Term:
        tok = self.peek()
        if tok.kind not in ("ident", "@"):
            raise self.fail("cannot mix named and positional arguments")
        label = self.label()
        self.expect("->")
        return App(target, label, self.term())


def parse(src: str) -> Term:
    """Parse concrete syntax into a surface term (sugar not yet expanded)."""
    return _Parser(src).parse_unit()


# ---------------------------------------------------------------------------
# desugaring

def expand_sugar(t: Term) -> Term:
    """Eliminate method bindings and positional applications."""
    match t:
        case ObjectTerm():
            out: list[tuple[str, object]] = []
            for label, b in t.bindings:
                if isinstance(b, MethodSugar):
                    body = expand_sugar(b.body)
                    assert isinstance(body, ObjectTerm)
                    pi = [(f"p{i + 1}", VOID) for i in range(len(b.params))]
                    aliases = [
                        (p, Access(Locator(0), f"p{i + 1}")) for i, p in enumerate(b.params)
                    ]
                    out.append((label, ObjectTerm(tuple(pi + aliases + list(body.bindings)))))
                elif b is VOID:
                    out.append((label, VOID))
                else:
                    out.append((label, expand_sugar(b)))
            return ObjectTerm(tuple(out))
        case PositionalApp(target, args):
            result = expand_sugar(target)
            for i, a in enumerate(args):
                result = App(result, f"p{i + 1}", expand_sugar(a))
            return result
        case Access(target, label):
            return Access(expand_sugar(target), label)
        case App(target, label, arg):
            return App(expand_sugar(target), label, expand_sugar(arg))
        case _:
            return t


def resolve_locators(t: Term, gamma: dict[str, int] | None = None) -> Term:
    """Desugar a surface term down to the core language.

    Positional sugar is expanded first; then attribute-variables become
    ``^n.a`` with the depth taken from the context (the innermost object
    binding ``a`` wins), and ``$`` becomes the locator of the root
    object.  Raises if a variable has no binder or ``$`` is used in a
    unit whose root is not an object.
    """
    t = expand_sugar(t)
    root_is_object = isinstance(t, ObjectTerm)

    def go(s: Term, env: dict[str, int], depth: int) -> Term:
        match s:
            case AttrVar(name):
                n = env.get(name)
                if n is None:
                    raise UnresolvedAttributeError(name, s.pos)
                return Access(Locator(n), name)
            case GlobalLocator():
                if not root_is_object or depth == 0:
                    raise PhiError(
                        "global object locator '$' requires the compilation unit to be an object"
                    )
                return Locator(depth - 1)
            case Locator():
                return s
            case Access(target, label):
                return Access(go(target, env, depth), label)
            case App(target, label, arg):
                return App(go(target, env, depth), label, go(arg, env, depth))
            case ObjectTerm():
                inner = {name: n + 1 for name, n in env.items()}
                for label in s.labels:
                    inner[label] = 0
                return s.map_attached(lambda b: go(b, inner, depth + 1))
        raise TypeError(f"resolve_locators: unexpected node {s!r}")

    return go(t, dict(gamma or {}), 0)


def parse_term(src: str, gamma: dict[str, int] | None = None) -> Term:
    """Parse and fully desugar to a core term."""
    return resolve_locators(parse(src), gamma)


def erase_locators(t: Term) -> Term:
    """Replace ``^n.a`` with the bare attribute-variable ``a`` where the
    replacement resolves back to the same term; everything else is kept."""

    def go(s: Term, env: dict[str, int]) -> Term:
        match s:
            case Access(Locator(n), label) if env.get(label) == n:
                return AttrVar(label)
            case Access(target, label):
                return Access(go(target, env), label)
            case App(target, label, arg):
                return App(go(target, env), label, go(arg, env))
            case ObjectTerm():
                inner = {name: n + 1 for name, n in env.items()}
                for label in s.labels:
                    inner[label] = 0
                return s.map_attached(lambda b: go(b, inner))
            case _:
                return s

    return go(t, {})


# ---------------------------------------------------------------------------
# pretty printing

def _binding_text(label: str, b, render) -> str:
    if b is VOID:
        return f"{label} -> ?"
    if isinstance(b, MethodSugar):
        return f"{label}({', '.join(b.params)}) -> {render(b.body)}"
    return f"{label} -> {render(b)}"


def _compact(t: Term) -> str:
    match t:
        case Locator(n):
            return f"^{n}"
        case GlobalLocator():
            return "$"
        case AttrVar(name):
            return name
        case Access(target, label):
            return f"{_compact(target)}.{label}"
        case App():
            pairs: list[tuple[str, Term]] = []
            node = t
            while isinstance(node, App):
                pairs.append((node.label, node.arg))
                node = node.target
            pairs.reverse()
            inner = ", ".join(f"{l} -> {_compact(a)}" for l, a in pairs)
            return f"{_compact(node)}({inner})"
        case PositionalApp(target, args):
            return f"{_compact(target)}({', '.join(_compact(a) for a in args)})"
        case ObjectTerm():
            if not t.bindings:
                return "[]"
            body = ", ".join(_binding_text(l, b, _compact) for l, b in t.bindings)
            return f"[{body}]"
    raise TypeError(f"pretty: unexpected node {t!r}")


def _indented(t: Term, level: int) -> str:
    pad = "  " * level
    match t:
        case ObjectTerm() if t.bindings:
            inner = ",\n".join(
                f"{pad}  {_binding_text(l, b, lambda x: _indented(x, level + 1).lstrip())}"
                for l, b in t.bindings
            )
            return f"[\n{inner}\n{pad}]"
        case Access(target, label):
            return f"{_indented(target, level)}.{label}"
        case App():
            pairs = []
            node = t
            while isinstance(node, App):
                pairs.append((node.label, node.arg))
                node = node.target
            pairs.reverse()
            inner = ", ".join(f"{l} -> {_indented(a, level + 1).lstrip()}" for l, a in pairs)
            return f"{_indented(node, level)}({inner})"
        case _:
            return _compact(t)


def pretty(t: Term, style: str = "compact") -> str:
    """Render a term; ``parse`` maps the result back to an equal term."""
    if style == "compact":
        return _compact(t)
    if style == "indented":
        return _indented(t, 0)
    raise ValueError(f"unknown style: {style!r}")
