"""Command-line interface.

Subcommands: ``eval`` (normal order, head reduction, or the abstract
machine), ``graph`` (reduction graph as text, JSON, or DOT), ``translate``
(lambda image), ``desugar`` (resolve sugar to the core language),
``check`` (closedness/duplicate lint), and ``props`` (property suites).

Results go to stdout, diagnostics to stderr.  Exit codes: 0 for
normal/weak-head/terminal outcomes, 2 for stuck terms, 3 for fuel
exhaustion or a detected cycle, 1 for usage, parse, and input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import PhiError, UnsupportedVariantError
from .lam import lam_pretty, phi_to_lambda
from .machine import RunStatus, decode, run, trace_json
from .props import ALL_SUITES
from .reduce import (
    DEFAULT_FUEL,
    DEFAULT_MAX_NODES,
    EvalStatus,
    Strategy,
    evaluate,
    find_stuck,
    reduction_graph,
)
from .surface import parse, pretty, resolve_locators
from .terms import Term, free_locator_excesses

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STUCK = 2
EXIT_NO_RESULT = 3


def _default_fuel() -> int:
    env = os.environ.get("PHIC_FUEL")
    if env:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
        print(f"warning: ignoring invalid PHIC_FUEL={env!r}", file=sys.stderr)
    return DEFAULT_FUEL


def _read_input(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.file is None:
        raise PhiError("no input: pass -e EXPR or a file (use '-' for stdin)")
    if args.file == "-":
        return sys.stdin.read()
    with open(args.file, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_term(args) -> Term:
    return resolve_locators(parse(_read_input(args)))


def _add_input_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("-e", "--expr", help="term given inline")
    group.add_argument("file", nargs="?", help="file containing the term ('-' for stdin)")


def _status_exit(status: EvalStatus) -> int:
    if status in (EvalStatus.NORMAL, EvalStatus.WEAK_HEAD):
        return EXIT_OK
    if status is EvalStatus.STUCK:
        return EXIT_STUCK
    return EXIT_NO_RESULT


def cmd_eval(args) -> int:
    term = _load_term(args)
    fuel = args.fuel
    if args.strategy == "machine":
        if args.variant_app_phi:
            raise UnsupportedVariantError(
                "the abstract machine does not support the decorated-instantiation variant"
            )
        result = run(term, fuel=fuel, trace=args.trace)
        final = decode(result.config)
        status_name = result.status.value
        exit_code = EXIT_OK if result.status is RunStatus.TERMINAL else EXIT_NO_RESULT
        if args.output == "json":
            payload = {
                "status": status_name,
                "term": pretty(final),
                "steps": result.steps,
            }
            if args.trace:
                payload["trace"] = trace_json(result)
            print(json.dumps(payload, indent=2))
        else:
            print(pretty(final))
            print(f"status: {status_name}  steps: {result.steps}", file=sys.stderr)
        return exit_code

    strategy = Strategy.NORMAL_ORDER if args.strategy == "normal" else Strategy.HEAD_ONLY
    outcome = evaluate(
        term, strategy, fuel=fuel, trace=args.trace, variant_app_phi=args.variant_app_phi
    )
    if args.output == "json":
        payload = {
            "status": outcome.status.value,
            "term": pretty(outcome.term),
            "steps": outcome.steps,
        }
        if args.trace:
            payload["trace"] = [
                {"rule": s.rule.value, "path": list(s.path), "term": pretty(s.term)}
                for s in outcome.trace or ()
            ]
        print(json.dumps(payload, indent=2))
    else:
        print(pretty(outcome.term))
        note = f"status: {outcome.status.value}  steps: {outcome.steps}"
        if outcome.status is EvalStatus.STUCK:
            stuck = find_stuck(outcome.term, args.variant_app_phi)
            if stuck:
                note += f"  (blocked on label {stuck[1]!r})"
        print(note, file=sys.stderr)
    return _status_exit(outcome.status)


def _graph_dot(g) -> str:
    back = set(g.back_edges())
    lines = ["digraph reduction {", "  node [shape=box, fontname=monospace];"]
    for i, node in enumerate(g.nodes):
        label = pretty(node).replace("\\", "\\\\").replace('"', '\\"')
        shape = ", peripheries=2" if i in set(g.sinks) else ""
        lines.append(f'  n{i} [label="{label}"{shape}];')
    for u, rule, v in g.edges:
        style = ', style=dashed, color=red, label="{} (cycle)"'.format(rule.value) if (
            u,
            rule,
            v,
        ) in back else f', label="{rule.value}"'
        lines.append(f"  n{u} -> n{v} [{style.lstrip(', ')}];")
    if g.truncated:
        lines.append('  truncated [shape=plaintext, label="(truncated)"];')
    lines.append("}")
    return "\n".join(lines)


def cmd_graph(args) -> int:
    term = _load_term(args)
    g = reduction_graph(term, max_nodes=args.max_nodes, variant_app_phi=args.variant_app_phi)
    if args.output == "dot":
        print(_graph_dot(g))
    elif args.output == "json":
        payload = {
            "nodes": [pretty(n) for n in g.nodes],
            "edges": [
                {"src": u, "rule": rule.value, "dst": v} for u, rule, v in g.edges
            ],
            "sinks": list(g.sinks),
            "truncated": g.truncated,
            "cyclic": g.has_cycle(),
        }
        print(json.dumps(payload, indent=2))
    else:
        for i, node in enumerate(g.nodes):
            mark = " (normal form)" if i in set(g.sinks) else ""
            print(f"{i}: {pretty(node)}{mark}")
        for u, rule, v in g.edges:
            print(f"  {u} -{rule.value}-> {v}")
        if g.truncated:
            print("(truncated)", file=sys.stderr)
    return EXIT_OK


def cmd_translate(args) -> int:
    term = _load_term(args)
    print(lam_pretty(phi_to_lambda(term)))
    return EXIT_OK


def cmd_desugar(args) -> int:
    term = _load_term(args)
    print(pretty(term, style=args.style))
    return EXIT_OK


def cmd_check(args) -> int:
    term = _load_term(args)  # parse errors (duplicates included) surface here
    excesses = free_locator_excesses(term)
    if excesses:
        refs = ", ".join(f"^{n}" for n in excesses)
        print(f"open term: unbound locator excess(es) {refs}", file=sys.stderr)
        return EXIT_STUCK
    print("ok: closed, no duplicate labels")
    return EXIT_OK


def cmd_props(args) -> int:
    names = args.suite or sorted(ALL_SUITES)
    failed = False
    for name in names:
        suite = ALL_SUITES.get(name)
        if suite is None:
            print(f"unknown suite: {name}", file=sys.stderr)
            return EXIT_USAGE
        kwargs = {}
        if args.samples is not None:
            first = suite.__code__.co_varnames[0]
            kwargs[first] = args.samples
        if args.seed is not None:
            kwargs["seed"] = args.seed
        report = suite(**kwargs)
        print(report.line())
        for failure in report.failures[:5]:
            print(f"    {failure}", file=sys.stderr)
        failed = failed or not report.ok
    return EXIT_NO_RESULT if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phic", description="workbench for the calculus of decorated objects"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a term")
    _add_input_args(p_eval)
    p_eval.add_argument(
        "--strategy", choices=("normal", "head", "machine"), default="normal"
    )
    p_eval.add_argument("--fuel", type=int, default=_default_fuel())
    p_eval.add_argument("--trace", action="store_true")
    p_eval.add_argument("--variant-app-phi", action="store_true", dest="variant_app_phi")
    p_eval.add_argument("--output", choices=("text", "json"), default="text")
    p_eval.add_argument("--json", action="store_const", const="json", dest="output")
    p_eval.set_defaults(func=cmd_eval)

    p_graph = sub.add_parser("graph", help="enumerate the reduction graph")
    _add_input_args(p_graph)
    p_graph.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p_graph.add_argument("--variant-app-phi", action="store_true", dest="variant_app_phi")
    p_graph.add_argument("--output", choices=("text", "json", "dot"), default="text")
    p_graph.set_defaults(func=cmd_graph)

    p_tr = sub.add_parser("translate", help="translate to the lambda calculus with records")
    _add_input_args(p_tr)
    p_tr.set_defaults(func=cmd_translate)

    p_de = sub.add_parser("desugar", help="resolve sugar down to the core language")
    _add_input_args(p_de)
    p_de.add_argument("--style", choices=("compact", "indented"), default="compact")
    p_de.set_defaults(func=cmd_desugar)

    p_check = sub.add_parser("check", help="lint: closedness and duplicate labels")
    _add_input_args(p_check)
    p_check.set_defaults(func=cmd_check)

    p_props = sub.add_parser("props", help="run the property suites")
    p_props.add_argument("suite", nargs="*", help=f"suites: {', '.join(sorted(ALL_SUITES))}")
    p_props.add_argument("--samples", type=int, default=None)
    p_props.add_argument("--seed", type=int, default=None)
    p_props.set_defaults(func=cmd_props)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits with 2 on usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except PhiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
