"""Command-line surface.

Subcommands: validate, parse, entail, enumerate, eval, export-smt, split.
Entailment exit codes: 0 entailed (True), 1 refuted (False), 2 Uncertain,
3 compile error, 4 engine error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .corpus import CorpusError, load_corpus, write_report
from .entailment import (
    InconsistentPremisesError, align_predicates, compile_error_verdict,
    entail, enumerate_entities, explain, export_smtlib,
)
from .labels import FALSE, TRUE, UNCERTAIN
from .metrics import srho_degenerate
from .runner import RunConfig, evaluate_corpus
from .semantics import BudgetExceededError, DEFAULT_NODE_BUDGET
from .syntax import Atom, Variable, parse, pretty
from .wellformed import check_swf

EXIT_BY_OUTCOME = {TRUE: 0, FALSE: 1, UNCERTAIN: 2}
EXIT_COMPILE_ERROR = 3
EXIT_ENGINE_ERROR = 4


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foleval",
        description="First-order-logic toolkit: validate and parse formulas, "
                    "decide entailment with explanations, and score corpora "
                    "of predicted FOL translations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate",
                       help="score a formula against the six well-formedness criteria")
    p.add_argument("formula")

    p = sub.add_parser("parse", help="parse a formula and print its canonical form")
    p.add_argument("formula")

    p = sub.add_parser("entail", help="decide whether the premises entail a query")
    p.add_argument("premises", help="file with one FOL formula per line")
    p.add_argument("query")
    _engine_flags(p)

    p = sub.add_parser("enumerate",
                       help="list constants satisfying a one-variable query template")
    p.add_argument("premises", help="file with one FOL formula per line")
    p.add_argument("template", help="atom with exactly one variable, e.g. 'p(x)'")
    _engine_flags(p)

    p = sub.add_parser("eval", help="evaluate a JSONL corpus and report metrics")
    p.add_argument("corpus")
    p.add_argument("--report", metavar="PATH", help="write the full JSON report here")
    p.add_argument("--lambda1", type=float, default=0.5,
                   help="weight of the harmonic SWF/LE term in the conversion "
                        "score (default 0.5)")
    p.add_argument("--seed", type=int, default=42,
                   help="seed for sampled logical-equivalence checks (default 42)")
    p.add_argument("--format", default="jsonl", choices=["jsonl"],
                   help="corpus format (default jsonl)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for per-record evaluation (default 1)")
    _engine_flags(p)

    p = sub.add_parser("export-smt",
                       help="print an SMT-LIB v2 script testing premises ∧ ¬query")
    p.add_argument("premises", help="file with one FOL formula per line")
    p.add_argument("query")
    p.add_argument("--closed-world", action="store_true",
                   help="assert the negation of every unstated fact")

    p = sub.add_parser("split", help="shuffle a corpus into train/test JSONL files")
    p.add_argument("corpus")
    p.add_argument("--train", required=True, metavar="PATH")
    p.add_argument("--test", required=True, metavar="PATH")
    p.add_argument("--ratio", type=float, default=0.8,
                   help="train fraction (default 0.8)")
    p.add_argument("--seed", type=int, default=42,
                   help="shuffle seed, recorded in the printed summary (default 42)")
    return parser


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--closed-world", action="store_true",
                   help="treat unstated facts of asserted predicates as false")
    p.add_argument("--domain-budget", type=int, default=DEFAULT_NODE_BUDGET,
                   help=f"grounding node budget (default {DEFAULT_NODE_BUDGET})")


def _read_premise_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as handle:
        return [line.strip() for line in handle
                if line.strip() and not line.strip().startswith("#")]


def _parse_many(texts):
    """(formulas, diagnostics); diagnostics nonempty on any failure."""
    formulas, diags = [], []
    for text in texts:
        result = parse(text)
        if result.ok:
            formulas.append(result.formula)
        else:
            diags.extend(result.errors)
    return formulas, diags


def cmd_validate(args) -> int:
    result = check_swf(args.formula)
    for criterion in result.criteria:
        status = "PASS" if criterion.passed else "FAIL"
        line = f"{status}  {criterion.id}"
        if criterion.evidence is not None and not criterion.passed:
            line += f"  ({criterion.evidence.message} at "\
                    f"{criterion.evidence.start}..{criterion.evidence.end})"
        print(line)
    print(f"score: {result.score:.4f}")
    return 0 if result.score == 1.0 else 1


def cmd_parse(args) -> int:
    result = parse(args.formula)
    if result.ok:
        print(pretty(result.formula))
        for warning in result.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        return 0
    for err in result.errors:
        print(f"error: {err}", file=sys.stderr)
    return 1


def _load_engine_inputs(args, query_text):
    premise_texts = _read_premise_lines(args.premises)
    premises, diags = _parse_many(premise_texts)
    query_result = parse(query_text)
    if not query_result.ok:
        diags.extend(query_result.errors)
    if diags:
        return None, None, diags
    return premises, query_result.formula, []


def cmd_entail(args) -> int:
    try:
        premises, query, diags = _load_engine_inputs(args, args.query)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE_ERROR
    if diags:
        kb, _ = align_predicates([], None)
        print(explain(compile_error_verdict(diags), kb, Atom("?")))
        return EXIT_COMPILE_ERROR
    kb, query = align_predicates(premises, query)
    for warning in kb.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    try:
        verdict = entail(kb, query, closed_world=args.closed_world,
                         budget=args.domain_budget)
    except (BudgetExceededError, InconsistentPremisesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE_ERROR
    print(explain(verdict, kb, query))
    return EXIT_BY_OUTCOME[verdict.outcome]


def cmd_enumerate(args) -> int:
    try:
        premises, template, diags = _load_engine_inputs(args, args.template)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE_ERROR
    if diags:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_COMPILE_ERROR
    if not isinstance(template, Atom) or \
            sum(isinstance(t, Variable) for t in template.args) != 1:
        print("error: template must be an atom with exactly one variable",
              file=sys.stderr)
        return EXIT_COMPILE_ERROR
    kb, template = align_predicates(premises, template)
    try:
        found = enumerate_entities(kb, template,
                                   closed_world=args.closed_world,
                                   budget=args.domain_budget)
    except InconsistentPremisesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE_ERROR
    for name in sorted(found):
        print(name)
    return 0


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def cmd_eval(args) -> int:
    try:
        load = load_corpus(args.corpus, fmt=args.format)
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    config = RunConfig(lambda1=args.lambda1, seed=args.seed,
                       closed_world=args.closed_world,
                       domain_budget=args.domain_budget, jobs=args.jobs)
    report = evaluate_corpus(load, config)
    for err in load.errors:
        print(f"skipped line {err.line}: {err.message}", file=sys.stderr)
    print("config: " + " ".join(f"{k}={v}" for k, v in sorted(
        report.config.items())))
    agg = report.aggregates
    if agg is None:
        print("records: 0 (nothing to aggregate)")
    else:
        print(f"records: {agg['n_records']}  skipped_lines: "
              f"{report.config['skipped_lines']}")
        print(f"SWF={_fmt(agg['mean_swf'])}  PSE={_fmt(agg['mean_pse'])}  "
              f"LE={_fmt(agg['mean_le'])}")
        srho = _fmt(agg["srho"])
        if agg["srho_degenerate"]:
            srho += " (degenerate)"
        print(f"Conv-Score={_fmt(agg['mean_conv'])}  "
              f"Accuracy={_fmt(agg['accuracy'])}  "
              f"Reason-Score={_fmt(agg['mean_reason'])}  "
              f"SRho-Score={srho}")
        print("confusion (predicted x gold):")
        for predicted, row in report.confusion.items():
            cells = "  ".join(f"{gold}={count}" for gold, count in row.items())
            print(f"  {predicted:>13}: {cells}")
    if args.report:
        write_report(report, args.report)
        print(f"report written to {args.report}")
    return 0


def cmd_export_smt(args) -> int:
    try:
        premises, query, diags = _load_engine_inputs(args, args.query)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE_ERROR
    if diags:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_COMPILE_ERROR
    kb, query = align_predicates(premises, query)
    sys.stdout.write(export_smtlib(kb, query, closed_world=args.closed_world))
    return 0


def cmd_split(args) -> int:
    try:
        with open(args.corpus, encoding="utf-8") as handle:
            lines = [line.rstrip("\n") for line in handle if line.strip()]
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    valid = []
    dropped = 0
    for line in lines:
        try:
            json.loads(line)
            valid.append(line)
        except json.JSONDecodeError:
            dropped += 1
    rng = random.Random(args.seed)
    order = list(range(len(valid)))
    rng.shuffle(order)
    n_train = int(len(valid) * args.ratio)
    train_idx = sorted(order[:n_train])
    test_idx = sorted(order[n_train:])
    for path, idxs in ((args.train, train_idx), (args.test, test_idx)):
        with open(path, "w", encoding="utf-8") as handle:
            for i in idxs:
                handle.write(valid[i] + "\n")
    print(json.dumps({"seed": args.seed, "ratio": args.ratio,
                      "n_train": len(train_idx), "n_test": len(test_idx),
                      "dropped_lines": dropped}, sort_keys=True))
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "parse": cmd_parse,
    "entail": cmd_entail,
    "enumerate": cmd_enumerate,
    "eval": cmd_eval,
    "export-smt": cmd_export_smt,
    "split": cmd_split,
}


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
