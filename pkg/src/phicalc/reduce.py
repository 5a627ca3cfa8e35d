"""One-step reduction, evaluation strategies, and reduction graphs.

The one-step relation has three computation rules — attribute
extraction (with locator substitution), decorator fall-through for a
missing attribute, and instantiation of a void attribute — plus
congruence closure everywhere.  Head reduction restricts the congruence
to targets of access/application; normal order runs head steps first
and otherwise rewrites the leftmost reducible subterm.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
    exceeds_bounds,
    increment,
    substitute,
)

DEFAULT_FUEL = 10_000
DEFAULT_MAX_NODES = 10_000

# growth guards: substitution can nest objects geometrically, so runaway
# terms are cut off as resource exhaustion before traversals get too deep
DEFAULT_MAX_TERM_SIZE = 10_000
_MAX_TERM_DEPTH = 400


class RuleId(enum.Enum):
    CONG_OBJ = "cong_OBJ"
    CONG_DOT = "cong_DOT"
    CONG_APP_L = "cong_APP_L"
    CONG_APP_R = "cong_APP_R"
    DOT = "DOT"
    DOT_PHI = "DOT_phi"
    APP = "APP"
    APP_PHI = "APP_phi"


Path = "tuple[str, ...]"


@dataclass(frozen=True)
class Redex:
    """A one-step reduction opportunity: where, which rule, and the result.

    ``path`` addresses the rewritten subterm from the root with steps
    ``"target"``, ``"arg"``, and ``"body:<label>"``; ``result`` is the
    whole contracted term.
    """

    path: tuple[str, ...]
    rule: RuleId
    result: Term


def outer_rule(source: Term, redex: Redex) -> RuleId:
    """The congruence rule justifying ``redex`` at the root of ``source``."""
    if not redex.path:
        return redex.rule
    step = redex.path[0]
    if step == "arg":
        return RuleId.CONG_APP_R
    if step.startswith("body:"):
        return RuleId.CONG_OBJ
    return RuleId.CONG_DOT if isinstance(source, Access) else RuleId.CONG_APP_L


def _root_steps(t: Term, variant: bool) -> list[tuple[RuleId, Term]]:
    """Computation rules applicable at the root (at most one fires)."""
    match t:
        case Access(ObjectTerm() as o, c):
            b = o.get(c)
            if b is not None and b is not VOID:
                return [(RuleId.DOT, substitute(b, 0, o))]
            if b is None and o.get(PHI) is not None:
                return [(RuleId.DOT_PHI, Access(Access(o, PHI), c))]
        case App(ObjectTerm() as o, c, u):
            b = o.get(c)
            if b is VOID:
                return [(RuleId.APP, o.with_binding(c, increment(0, u)))]
            if b is None and variant:
                phi_b = o.get(PHI)
                if phi_b is not None and phi_b is not VOID:
                    return [
                        (RuleId.APP_PHI, o.with_binding(PHI, App(phi_b, c, increment(0, u))))
                    ]
    return []


def step_all(t: Term, variant_app_phi: bool = False) -> list[Redex]:
    """Every one-step reduct of ``t``, leftmost-outermost first.

    At each node the computation rule (if any) precedes the congruence
    descents; descents visit access/application targets before
    arguments and object bodies in source order.  An empty list means
    ``t`` is in normal form.
    """
    out: list[Redex] = []

    def go(s: Term, path: tuple[str, ...], rebuild) -> None:
        for rule, res in _root_steps(s, variant_app_phi):
            out.append(Redex(path, rule, rebuild(res)))
        match s:
            case Access(target, label):
                go(target, path + ("target",), lambda x: rebuild(Access(x, label)))
            case App(target, label, arg):
                go(target, path + ("target",), lambda x: rebuild(App(x, label, arg)))
                go(arg, path + ("arg",), lambda x: rebuild(App(target, label, x)))
            case ObjectTerm():
                for l, b in s.bindings:
                    if b is VOID:
                        continue
                    go(
                        b,
                        path + (f"body:{l}",),
                        lambda x, _l=l: rebuild(s.with_binding(_l, x)),
                    )

    go(t, (), lambda x: x)
    return out


def head_redex(t: Term, variant_app_phi: bool = False) -> Redex | None:
    """The unique head reduction step, or None if ``t`` is in WHNF.

    Head reduction never enters object bodies or application arguments;
    it follows the target spine and fires the computation rules there.
    """
    roots = _root_steps(t, variant_app_phi)
    if roots:
        rule, res = roots[0]
        return Redex((), rule, res)
    match t:
        case Access(target, label):
            inner = head_redex(target, variant_app_phi)
            if inner is not None:
                return Redex(("target",) + inner.path, inner.rule, Access(inner.result, label))
        case App(target, label, arg):
            inner = head_redex(target, variant_app_phi)
            if inner is not None:
                return Redex(("target",) + inner.path, inner.rule, App(inner.result, label, arg))
    return None


def head_step(t: Term, variant_app_phi: bool = False) -> Term | None:
    r = head_redex(t, variant_app_phi)
    return None if r is None else r.result


def normal_order_redex(t: Term, variant_app_phi: bool = False) -> Redex | None:
    """Head step if possible, else the leftmost reducible subterm."""
    h = head_redex(t, variant_app_phi)
    if h is not None:
        return h
    match t:
        case Access(target, label):
            inner = normal_order_redex(target, variant_app_phi)
            if inner is not None:
                return Redex(("target",) + inner.path, inner.rule, Access(inner.result, label))
        case App(target, label, arg):
            inner = normal_order_redex(target, variant_app_phi)
            if inner is not None:
                return Redex(("target",) + inner.path, inner.rule, App(inner.result, label, arg))
            inner = normal_order_redex(arg, variant_app_phi)
            if inner is not None:
                return Redex(("arg",) + inner.path, inner.rule, App(target, label, inner.result))
        case ObjectTerm():
            for l, b in t.bindings:
                if b is VOID:
                    continue
                inner = normal_order_redex(b, variant_app_phi)
                if inner is not None:
                    return Redex(
                        (f"body:{l}",) + inner.path, inner.rule, t.with_binding(l, inner.result)
                    )
    return None


def normal_order_step(t: Term, variant_app_phi: bool = False) -> Term | None:
    r = normal_order_redex(t, variant_app_phi)
    return None if r is None else r.result


def is_nf(t: Term, variant_app_phi: bool = False) -> bool:
    """No redex anywhere (stuck accesses/applications count as normal)."""
    return not step_all(t, variant_app_phi)


def is_whnf(t: Term, variant_app_phi: bool = False) -> bool:
    """No head reduction is possible."""
    return head_redex(t, variant_app_phi) is None


def find_stuck(t: Term, variant_app_phi: bool = False) -> tuple[tuple[str, ...], str] | None:
    """First access/application on the head spine whose object target
    matches no rule; returns its path and label for diagnostics."""
    cur: Term = t
    path: tuple[str, ...] = ()
    while isinstance(cur, (Access, App)):
        if isinstance(cur.target, ObjectTerm) and not _root_steps(cur, variant_app_phi):
            return path, cur.label
        path += ("target",)
        cur = cur.target
    return None


class Strategy(enum.Enum):
    NORMAL_ORDER = "normal"
    HEAD_ONLY = "head"


class EvalStatus(enum.Enum):
    NORMAL = "normal"
    WEAK_HEAD = "weak-head"
    STUCK = "stuck"
    FUEL_EXHAUSTED = "fuel-exhausted"
    CYCLE = "cycle"


@dataclass(frozen=True)
class TraceStep:
    rule: RuleId
    path: tuple[str, ...]
    term: Term


@dataclass(frozen=True)
class EvalOutcome:
    status: EvalStatus
    term: Term
    steps: int
    trace: tuple[TraceStep, ...] | None = None


def evaluate(
    t: Term,
    strategy: Strategy = Strategy.NORMAL_ORDER,
    fuel: int = DEFAULT_FUEL,
    trace: bool = False,
    variant_app_phi: bool = False,
    max_size: int = DEFAULT_MAX_TERM_SIZE,
) -> EvalOutcome:
    """Iterate the chosen step function with cycle detection.

    Stops with NORMAL/WEAK_HEAD (or STUCK when the head spine is blocked
    on an object lacking the accessed/instantiated attribute) when no
    step applies, with CYCLE as soon as a term repeats, and with
    FUEL_EXHAUSTED after ``fuel`` steps or when the term outgrows
    ``max_size`` nodes.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    stepper = normal_order_redex if strategy is Strategy.NORMAL_ORDER else head_redex
    seen = {t}
    cur = t
    steps = 0
    tr: list[TraceStep] | None = [] if trace else None

    def done(status: EvalStatus, term: Term) -> EvalOutcome:
        return EvalOutcome(status, term, steps, tuple(tr) if tr is not None else None)

    while True:
        r = stepper(cur, variant_app_phi)
        if r is None:
            if find_stuck(cur, variant_app_phi) is not None:
                return done(EvalStatus.STUCK, cur)
            status = (
                EvalStatus.NORMAL if strategy is Strategy.NORMAL_ORDER else EvalStatus.WEAK_HEAD
            )
            return done(status, cur)
        if steps >= fuel:
            return done(EvalStatus.FUEL_EXHAUSTED, cur)
        nxt = r.result
        if exceeds_bounds(nxt, max_size, _MAX_TERM_DEPTH):
            return done(EvalStatus.FUEL_EXHAUSTED, cur)
        steps += 1
        if tr is not None:
            tr.append(TraceStep(r.rule, r.path, nxt))
        if nxt in seen:
            return done(EvalStatus.CYCLE, nxt)
        seen.add(nxt)
        cur = nxt


@dataclass
class ReductionGraph:
    """BFS closure of ``step_all`` with structural deduplication."""

    root: Term
    nodes: list[Term]
    edges: list[tuple[int, RuleId, int]]
    truncated: bool
    sinks: list[int]

    def successors(self, i: int) -> list[int]:
        return [v for (u, _, v) in self.edges if u == i]

    def back_edges(self) -> list[tuple[int, RuleId, int]]:
        """Edges that close a cycle (target is on the current DFS stack)."""
        adj: dict[int, list[tuple[RuleId, int]]] = {}
        for u, r, v in self.edges:
            adj.setdefault(u, []).append((r, v))
        color = [0] * len(self.nodes)  # 0 unseen, 1 on stack, 2 done
        out: list[tuple[int, RuleId, int]] = []
        for start in range(len(self.nodes)):
            if color[start]:
                continue
            stack: list[tuple[int, int]] = [(start, 0)]
            color[start] = 1
            while stack:
                node, idx = stack[-1]
                succs = adj.get(node, [])
                if idx < len(succs):
                    stack[-1] = (node, idx + 1)
                    rule, nxt = succs[idx]
                    if color[nxt] == 1:
                        out.append((node, rule, nxt))
                    elif color[nxt] == 0:
                        color[nxt] = 1
                        stack.append((nxt, 0))
                else:
                    color[node] = 2
                    stack.pop()
        return out

    def has_cycle(self) -> bool:
        return bool(self.back_edges())


def reduction_graph(
    t: Term,
    max_nodes: int = DEFAULT_MAX_NODES,
    variant_app_phi: bool = False,
    max_size: int = DEFAULT_MAX_TERM_SIZE,
) -> ReductionGraph:
    """All terms reachable by reduction, up to ``max_nodes`` distinct ones.

    ``truncated`` is set when a budget dropped a successor (node count or
    term growth); sink detection stays exact because it only needs a
    node's own redex count.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    index: dict[Term, int] = {t: 0}
    nodes: list[Term] = [t]
    edges: list[tuple[int, RuleId, int]] = []
    edge_seen: set[tuple[int, RuleId, int]] = set()
    sinks: list[int] = []
    truncated = False
    queue: deque[int] = deque([0])
    while queue:
        i = queue.popleft()
        redexes = step_all(nodes[i], variant_app_phi)
        if not redexes:
            sinks.append(i)
            continue
        for r in redexes:
            j = index.get(r.result)
            if j is None:
                if len(nodes) >= max_nodes or exceeds_bounds(
                    r.result, max_size, _MAX_TERM_DEPTH
                ):
                    truncated = True
                    continue
                j = len(nodes)
                index[r.result] = j
                nodes.append(r.result)
                queue.append(j)
            key = (i, r.rule, j)
            if key not in edge_seen:
                edge_seen.add(key)
                edges.append(key)
    return ReductionGraph(t, nodes, edges, truncated, sinks)


def join_status(
    u: Term,
    v: Term,
    max_nodes: int = 200,
    variant_app_phi: bool = False,
    max_size: int = DEFAULT_MAX_TERM_SIZE,
) -> str:
    """Whether ``u`` and ``v`` reach a common term within the budget.

    Alternating breadth-first searches from both sides that stop at the
    first shared term.  Returns ``"joined"``, ``"disjoint"`` (both
    reduction graphs complete and share nothing — a genuine
    counterexample), or ``"unknown"`` when a budget ran out first.
    """
    if u == v:
        return "joined"
    seen: tuple[set[Term], set[Term]] = ({u}, {v})
    queues = (deque([u]), deque([v]))
    truncated = [False, False]
    while queues[0] or queues[1]:
        for side in (0, 1):
            if not queues[side]:
                continue
            node = queues[side].popleft()
            for r in step_all(node, variant_app_phi):
                nxt = r.result
                if nxt in seen[side]:
                    continue
                if nxt in seen[1 - side]:
                    return "joined"
                if len(seen[side]) >= max_nodes or exceeds_bounds(
                    nxt, max_size, _MAX_TERM_DEPTH
                ):
                    truncated[side] = True
                    continue
                seen[side].add(nxt)
                queues[side].append(nxt)
    if not truncated[0] and not truncated[1]:
        return "disjoint"
    return "unknown"


def joinable(u: Term, v: Term, max_nodes: int = 200, variant_app_phi: bool = False) -> bool:
    return join_status(u, v, max_nodes, variant_app_phi) == "joined"
