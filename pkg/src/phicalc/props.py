"""Executable property suites over seeded random corpora.

Each suite samples terms, checks one of the metatheoretic properties at
desk scale, and returns a report: hard violations (always bugs), an
inconclusive count (budgets ran out), and summary stats.  The command
line ``props`` subcommand and the acceptance tests both run these.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import gen
from .lam import ObsVerdict, lam_normalize, lambda_to_phi, obs_equal, phi_to_lambda, pure_lambda_of_phi
from .machine import RunStatus, decode, run
from .parallel import check_diamond, par_reducts
from .reduce import (
    EvalStatus,
    Strategy,
    evaluate,
    head_step,
    join_status,
    reduction_graph,
    step_all,
)
from .terms import increment, substitute
from .surface import pretty


@dataclass
class SuiteReport:
    name: str
    total: int = 0
    failures: list[str] = field(default_factory=list)
    inconclusive: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        verdict = "pass" if self.ok else "FAIL"
        extra = f", inconclusive={self.inconclusive}" if self.inconclusive else ""
        stats = "".join(f", {k}={v}" for k, v in self.stats.items())
        return f"[{verdict}] {self.name}: {self.total} samples{extra}{stats}"


def confluence_suite(
    samples: int = 1000, size: int = 10, seed: int = 20240, join_budget: int = 200
) -> SuiteReport:
    """Every pair of one-step reducts of a random closed term joins."""
    rng = random.Random(seed)
    report = SuiteReport("confluence: one-step reduct pairs join")
    pairs = 0
    for _ in range(samples):
        t = gen.closed_term(rng, size)
        report.total += 1
        reducts = []
        seen = set()
        for r in step_all(t):
            if r.result not in seen:
                seen.add(r.result)
                reducts.append(r.result)
        sample_unknown = False
        for i in range(len(reducts)):
            for j in range(i + 1, len(reducts)):
                pairs += 1
                status = join_status(reducts[i], reducts[j], join_budget)
                if status == "disjoint":
                    report.failures.append(f"unjoinable reducts of {pretty(t)}")
                elif status == "unknown":
                    sample_unknown = True
        if sample_unknown:
            report.inconclusive += 1
    report.stats["pairs"] = pairs
    return report


def diamond_suite(samples: int = 500, size: int = 8, seed: int = 20241, budget: int = 20_000) -> SuiteReport:
    """Every parallel reduct rejoins at the complete development."""
    rng = random.Random(seed)
    report = SuiteReport("diamond: parallel reducts rejoin at the complete development")
    for _ in range(samples):
        t = gen.closed_term(rng, size)
        report.total += 1
        d = check_diamond(t, budget)
        if d.violations:
            report.failures.append(f"diamond violation for {pretty(t)}")
        elif d.inconclusive:
            report.inconclusive += 1
    return report


def substitution_lemmas_suite(samples: int = 2000, size: int = 8, seed: int = 20242) -> SuiteReport:
    """The index-arithmetic lemmas, as exact structural equalities."""
    rng = random.Random(seed)
    report = SuiteReport("index arithmetic: reordering and increment swaps")
    for _ in range(samples):
        t = gen.some_term(rng, size)
        u = gen.some_term(rng, max(2, size // 2))
        v = gen.some_term(rng, max(2, size // 2))
        j = rng.randrange(0, 4)
        i = j + rng.randrange(0, 4)
        report.total += 1
        # reordering law; the inner increment cutoff must match the outer
        # substitution index j (at j=0 this is the plain inc form)
        lhs = substitute(substitute(t, j, u), i, v)
        rhs = substitute(substitute(t, i + 1, increment(j, v)), j, substitute(u, i, v))
        if lhs != rhs:
            report.failures.append(
                f"substitution reordering failed for t={pretty(t)} u={pretty(u)} v={pretty(v)} i={i} j={j}"
            )
        lhs = substitute(substitute(t, 0, u), i, v)
        rhs = substitute(substitute(t, i + 1, increment(0, v)), 0, substitute(u, i, v))
        if lhs != rhs:
            report.failures.append(
                f"substitution reordering at the root failed for t={pretty(t)} u={pretty(u)} v={pretty(v)} i={i}"
            )
        lhs = substitute(increment(j, t), i + 1, increment(j, u))
        rhs = increment(j, substitute(t, i, u))
        if lhs != rhs:
            report.failures.append(
                f"increment/substitution swap failed for t={pretty(t)} u={pretty(u)} i={i} j={j}"
            )
        lo = rng.randrange(0, 4)
        hi = lo + rng.randrange(0, 4)
        lhs = increment(lo, increment(hi, t))
        rhs = increment(hi + 1, increment(lo, t))
        if lhs != rhs:
            report.failures.append(f"increment swap failed for t={pretty(t)} i={lo} j={hi}")
    return report


def normal_order_suite(
    samples: int = 500,
    size: int = 8,
    seed: int = 20243,
    node_budget: int = 300,
    fuel: int = 300,
    max_attempts: int | None = None,
) -> SuiteReport:
    """Where bounded search finds a normal form, normal order reaches it."""
    rng = random.Random(seed)
    report = SuiteReport("normal order reaches the normal form found by search")
    attempts = 0
    limit = max_attempts or samples * 60
    while report.total < samples and attempts < limit:
        attempts += 1
        t = gen.closed_term(rng, size)
        g = reduction_graph(t, node_budget)
        if not g.sinks:
            continue
        sink_terms = {g.nodes[i] for i in g.sinks}
        report.total += 1
        if len(sink_terms) > 1:
            report.failures.append(f"distinct normal forms for {pretty(t)}")
            continue
        expected = next(iter(sink_terms))
        out = evaluate(t, Strategy.NORMAL_ORDER, fuel=fuel)
        if out.term != expected or out.status not in (EvalStatus.NORMAL, EvalStatus.STUCK):
            report.failures.append(
                f"normal order got {pretty(out.term)} ({out.status.value}), search found {pretty(expected)}"
            )
    report.stats["attempts"] = attempts
    return report


def machine_suite(
    count: int = 200,
    size: int = 8,
    seed: int = 20244,
    head_fuel: int = 500,
    fuel_ratio: int = 4,
    join_nodes: int = 100,
) -> SuiteReport:
    """Machine termination mirrors head evaluation; results join."""
    rng = random.Random(seed)
    report = SuiteReport("machine agrees with head evaluation")
    corpus = gen.closed_corpus(rng, count, size)
    terminating = 0
    for t in corpus:
        report.total += 1
        head = evaluate(t, Strategy.HEAD_ONLY, fuel=head_fuel)
        head_done = head.status in (EvalStatus.WEAK_HEAD, EvalStatus.STUCK, EvalStatus.NORMAL)
        machine = run(t, fuel=head_fuel * fuel_ratio)
        machine_done = machine.status is RunStatus.TERMINAL
        if head_done != machine_done:
            report.failures.append(
                f"termination mismatch on {pretty(t)}: head={head.status.value}, machine={machine.status.value}"
            )
            continue
        if head_done:
            terminating += 1
            decoded = decode(machine.config)
            if join_status(decoded, head.term, join_nodes) != "joined":
                report.failures.append(
                    f"decode of machine result does not join head result for {pretty(t)}"
                )
    report.stats["terminating"] = terminating
    return report


def translation_suite(
    pairs: int = 300,
    size: int = 6,
    seed: int = 20245,
    fuel: int = 2000,
    max_attempts: int | None = None,
) -> SuiteReport:
    """One reduction step never separates the lambda images."""
    rng = random.Random(seed)
    report = SuiteReport("translation soundness: images of reduction steps stay equal")
    equal = 0
    attempts = 0
    limit = max_attempts or pairs * 40
    while report.total < pairs and attempts < limit:
        attempts += 1
        t = gen.closed_term(rng, size)
        redexes = step_all(t)
        if not redexes:
            continue
        u = rng.choice(redexes).result
        report.total += 1
        res = obs_equal(phi_to_lambda(t), phi_to_lambda(u), fuel=fuel)
        if res.verdict is ObsVerdict.NOT_EQUAL:
            report.failures.append(f"images differ for {pretty(t)} ~> {pretty(u)}")
        elif res.verdict is ObsVerdict.EQUAL:
            equal += 1
        else:
            report.inconclusive += 1
    report.stats["equal"] = equal
    report.stats["equal_rate"] = round(equal / report.total, 3) if report.total else 0.0
    return report


def embedding_suite(
    count: int = 100,
    size: int = 8,
    seed: int = 20246,
    phi_fuel: int = 50_000,
    lambda_fuel: int = 400,
    normalizer=None,
    max_attempts: int | None = None,
) -> SuiteReport:
    """Pure lambda terms round-trip through the object calculus.

    ``normalizer(e, fuel) -> (nf, finished)`` computes the lambda normal
    form; the default uses this package's reducer, and tests may inject
    an independent one.
    """
    rng = random.Random(seed)
    report = SuiteReport("pure-lambda embedding is faithful")
    norm = normalizer or lam_normalize
    attempts = 0
    limit = max_attempts or count * 60
    while report.total < count and attempts < limit:
        attempts += 1
        e = gen.pure_lambda(rng, size)
        nf, finished = norm(e, lambda_fuel)
        if not finished:
            continue
        report.total += 1
        out = evaluate(lambda_to_phi(e), Strategy.NORMAL_ORDER, fuel=phi_fuel)
        if out.status is not EvalStatus.NORMAL:
            report.failures.append(f"embedded term did not normalize: status {out.status.value}")
            continue
        try:
            back = pure_lambda_of_phi(out.term)
        except Exception as exc:  # noqa: BLE001 - recorded as a failure
            report.failures.append(f"decode failed: {exc}")
            continue
        if back != nf:
            report.failures.append("decoded normal form differs from the lambda normal form")
    report.stats["attempts"] = attempts
    return report


def head_substitution_suite(samples: int = 400, size: int = 8, seed: int = 20247) -> SuiteReport:
    """Head steps commute with locator substitution."""
    rng = random.Random(seed)
    report = SuiteReport("head reduction commutes with substitution")
    attempts = 0
    while report.total < samples and attempts < samples * 40:
        attempts += 1
        t = gen.some_term(rng, size, free=2)
        s = head_step(t)
        if s is None:
            continue
        q = gen.closed_term(rng, max(2, size // 2))
        n = rng.randrange(0, 3)
        report.total += 1
        if head_step(substitute(t, n, q)) != substitute(s, n, q):
            report.failures.append(
                f"substitution broke the head step of {pretty(t)} at ^{n} := {pretty(q)}"
            )
    return report


def parallel_regular_suite(samples: int = 300, size: int = 7, seed: int = 20248) -> SuiteReport:
    """Regular steps are parallel steps; parallel steps are reachable."""
    rng = random.Random(seed)
    report = SuiteReport("parallel and regular reduction simulate each other")
    for _ in range(samples):
        t = gen.closed_term(rng, size)
        report.total += 1
        enum = par_reducts(t)
        members = set(enum.terms)
        if not enum.truncated and t not in members:
            report.failures.append(f"parallel reduction is not reflexive at {pretty(t)}")
            continue
        for r in step_all(t):
            if r.result not in members:
                if enum.truncated:
                    report.inconclusive += 1
                else:
                    report.failures.append(
                        f"regular reduct missing from parallel reducts of {pretty(t)}"
                    )
                break
        g = reduction_graph(t, 400)
        reachable = set(g.nodes)
        if not g.truncated:
            for u in enum.terms:
                if u not in reachable:
                    report.failures.append(
                        f"parallel reduct of {pretty(t)} unreachable by regular steps"
                    )
                    break
    return report


ALL_SUITES = {
    "confluence": confluence_suite,
    "diamond": diamond_suite,
    "substitution": substitution_lemmas_suite,
    "normal-order": normal_order_suite,
    "machine": machine_suite,
    "translation": translation_suite,
    "embedding": embedding_suite,
    "head-substitution": head_substitution_suite,
    "parallel-regular": parallel_regular_suite,
}
