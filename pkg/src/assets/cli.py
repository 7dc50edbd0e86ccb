"""
Command-line front end.

Every verb loads its inputs, calls one chain of library operations and prints
the result. Exit codes: 0 when the property holds, 1 when it does not, 2 for
input and usage errors. Logging goes to stderr so that stdout carries only
results.
"""

import argparse
import dataclasses
import json
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.assets.catalog import (
    CONGRUENCES,
    DEFINITIONAL_CHECKERS,
    EQUIVALENT_SENTENCES,
    MALCEV_PREFIXES,
    MembershipChecker,
    Operator,
    apply_operator,
    builtin,
    congruence_partition,
    operator_oracle,
)
from src.assets.config import TABLE_FORMATS, ToolkitConfig, create_toolkit_config
from src.assets.errors import NotACongruence, SemigroupToolkitError
from src.assets.formulas import Evaluator, find_counterexample, free_vars, parse_formula
from src.assets.groupoid import (
    PartialGroupoid,
    associativity_witness,
    egg_box,
    format_egg_box,
    green_classes,
    idempotents,
    is_total,
    load_groupoid,
    save_groupoid,
    serialize_groupoid,
    verify_congruence,
)
from src.assets.instances import (
    dfa_transition_semigroup,
    enumerate_semigroups,
    graham_semigroup,
    load_text,
    parse_dfa,
    parse_graph,
    random_transformation_semigroup,
)
from src.assets.omega_terms import format_identity, parse_identity, satisfies_identity
from src.assets.rees import EADecider

EXIT_MEMBER = 0
EXIT_NOT_MEMBER = 1
EXIT_ERROR = 2

LOGGER_NAME = "src"

# (operator, inner builtin) pairs compared against explicit constructions
CORPUS_OPERATORS: Tuple[Tuple[Operator, str], ...] = (
    (Operator.D, "A"),
    (Operator.L, "I"),
    (Operator.HBAR, "G"),
) + tuple((op, inner) for op in MALCEV_PREFIXES.values() for inner in ("I", "A"))


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def _assignment(text: str) -> Tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"Expected name=value, got '{text}'")
    try:
        return name.strip(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not an element id")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", help="Print results as JSON with sorted keys."
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log to stderr: -v for progress, -vv for per-class detail.",
    )
    common.add_argument(
        "--format",
        choices=TABLE_FORMATS,
        default=None,
        help="Table format; inferred from the suffix when omitted (.mtb is packed).",
    )
    common.add_argument(
        "--lenient",
        action="store_true",
        help="Allow Green's classes on tables that are not semigroups.",
    )
    common.add_argument(
        "--no-memo", action="store_true", help="Disable the subformula evaluation cache."
    )
    common.add_argument(
        "--size-cap",
        type=_positive_int,
        default=4096,
        help="Largest generated semigroup accepted.",
    )
    common.add_argument(
        "--debug",
        action="store_true",
        help="Assert associativity of generated tables and cross-check EA base points.",
    )

    parser = argparse.ArgumentParser(
        prog="semigroup-membership",
        description="Decide membership of finite semigroups in definable classes.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, help_text: str) -> argparse.ArgumentParser:
        return verbs.add_parser(
            name,
            parents=[common],
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

    p = verb("validate", "Check that a table is a semigroup.")
    p.add_argument("table", help="Table file (.mt or .mtb).")

    p = verb("info", "Print Green's relations and the egg-box diagram.")
    p.add_argument("table")

    p = verb("classify", "Decide membership in a variety expression.")
    p.add_argument("--variety", required=True, help="For example A, D(A), K@D(A), EA.")
    p.add_argument("table")

    p = verb("check-identity", "Check an omega-identity such as 'x^w x = x^w'.")
    p.add_argument("identity")
    p.add_argument("table")

    p = verb("eval", "Evaluate a first-order formula.")
    p.add_argument("formula")
    p.add_argument("table")
    p.add_argument(
        "--assign",
        type=_assignment,
        action="append",
        default=[],
        metavar="NAME=ID",
        help="Value of a free variable; may be repeated.",
    )

    p = verb("ea", "Run the structural EA decider and print its trace.")
    p.add_argument("table")

    p = verb("gen-graham", "Build the Rees matrix semigroup of a graph file.")
    p.add_argument("graph")
    p.add_argument("-o", "--output", help="Table file to write; stdout when omitted.")

    p = verb("gen-random", "Generate a random transformation semigroup.")
    p.add_argument("--points", type=_positive_int, required=True)
    p.add_argument("--generators", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="Table file to write; stdout when omitted.")

    p = verb("from-dfa", "Build the transition semigroup of a DFA file.")
    p.add_argument("dfa")
    p.add_argument("-o", "--output", help="Table file to write; stdout when omitted.")

    p = verb("corpus-run", "Cross-check the catalog against oracles on all small semigroups.")
    p.add_argument("--order", type=_positive_int, required=True, help="Largest order swept.")

    return parser


def configure_logging(verbosity: int) -> logging.Logger:
    """Route the package loggers to the current stderr."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    logger.addHandler(handler)
    return logging.getLogger(f"{LOGGER_NAME}.cli")


def config_from_args(args: argparse.Namespace) -> ToolkitConfig:
    return create_toolkit_config(
        strict=not args.lenient,
        memoize=not args.no_memo,
        size_cap=args.size_cap,
        debug=args.debug,
        table_format=args.format or "text",
    )


class CommandRunner:
    """Executes one parsed command; each handler returns an exit code."""

    def __init__(self, args: argparse.Namespace, logger: logging.Logger):
        self.args = args
        self.config = config_from_args(args)
        self.logger = logger
        self.handlers: Dict[str, Callable[[], int]] = {
            "validate": self.validate,
            "info": self.info,
            "classify": self.classify,
            "check-identity": self.check_identity,
            "eval": self.eval_formula,
            "ea": self.ea,
            "gen-graham": self.gen_graham,
            "gen-random": self.gen_random,
            "from-dfa": self.from_dfa,
            "corpus-run": self.corpus_run,
        }

    def run(self) -> int:
        return self.handlers[self.args.verb]()

    # -- output helpers -----------------------------------------------------

    def emit(self, payload: dict, lines: Sequence[str]) -> None:
        if self.args.json:
            print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        else:
            for line in lines:
                print(line)

    def load(self) -> PartialGroupoid:
        return load_groupoid(self.args.table, self.args.format, self.config.encoding)

    def write_table(self, s: PartialGroupoid, extra: Optional[dict] = None) -> int:
        payload = {"n": s.n, "name": s.name, **(extra or {})}
        if self.args.output:
            path = save_groupoid(s, self.args.output, self.args.format)
            payload["output"] = str(path)
            self.emit(payload, [f"Wrote {s.n}-element table to {path}"])
        elif self.args.json:
            payload["table"] = [list(row) for row in s.table]
            self.emit(payload, [])
        else:
            sys.stdout.write(serialize_groupoid(s, "text"))
        return EXIT_MEMBER

    # -- verbs ----------------------------------------------------------------

    def validate(self) -> int:
        g = self.load()
        witness = associativity_witness(g)
        payload = {
            "n": g.n,
            "total": is_total(g),
            "semigroup": witness is None,
            "witness": list(witness) if witness else None,
        }
        if witness is None:
            lines = [f"{g.label()}: semigroup of order {g.n}"]
        elif not payload["total"]:
            lines = [f"{g.label()}: not total, {witness[0]}*{witness[1]} is undefined"]
        else:
            x, y, z = witness
            lines = [f"{g.label()}: not associative at ({x}*{y})*{z} != {x}*({y}*{z})"]
        self.emit(payload, lines)
        return EXIT_MEMBER if witness is None else EXIT_NOT_MEMBER

    def info(self) -> int:
        g = self.load()
        strict = self.config.strict
        if not strict and not g.is_semigroup:
            self.logger.warning(f"{g.label()} is not a semigroup; classes use mutual ideals")
        classes = {
            kind: green_classes(g, kind, strict=strict).as_lists() for kind in "RLHJ"
        }
        idem = sorted(idempotents(g))
        payload: dict = {
            "n": g.n,
            "semigroup": g.is_semigroup,
            "idempotents": idem,
            "classes": classes,
        }
        lines = [
            f"{g.label()}: order {g.n}, {'semigroup' if g.is_semigroup else 'not a semigroup'}",
            f"idempotents: {' '.join(map(str, idem)) or '-'}",
        ]
        lines.extend(f"{kind}-classes: {len(blocks)}" for kind, blocks in classes.items())
        if g.is_semigroup:
            payload["egg_box"] = [
                {
                    "members": sorted(box.members),
                    "regular": box.regular,
                    "cells": [[sorted(cell) for cell in row] for row in box.cells],
                }
                for box in egg_box(g)
            ]
            lines.append(format_egg_box(g))
        self.emit(payload, lines)
        return EXIT_MEMBER

    def classify(self) -> int:
        g = self.load()
        checker = MembershipChecker(self.config, logger=self.logger)
        result = checker.check(g, self.args.variety)
        lines = [f"{g.label()} {'is' if result.member else 'is not'} in {result.variety}"]
        if result.witness is not None:
            lines.append(f"witness: {json.dumps(result.witness, sort_keys=True)}")
        self.emit(result.to_dict(), lines)
        return EXIT_MEMBER if result.member else EXIT_NOT_MEMBER

    def check_identity(self) -> int:
        identity = parse_identity(self.args.identity)
        g = self.load()
        verdict = satisfies_identity(g, identity)
        assignment = dict(sorted(verdict.assignment.items())) if not verdict else None
        payload = {
            "identity": format_identity(identity),
            "holds": verdict.holds,
            "assignment": assignment,
        }
        lines = [f"{format_identity(identity)} {'holds' if verdict else 'fails'} in {g.label()}"]
        if assignment:
            lines.append(
                "first failing assignment: "
                + ", ".join(f"{k}={v}" for k, v in assignment.items())
            )
        self.emit(payload, lines)
        return EXIT_MEMBER if verdict else EXIT_NOT_MEMBER

    def eval_formula(self) -> int:
        formula = parse_formula(self.args.formula)
        g = self.load()
        assignment = dict(self.args.assign)
        evaluator = Evaluator(g, self.config, logger=self.logger)
        holds = evaluator.evaluate(formula, assignment)
        payload: dict = {"holds": holds, "assignment": dict(sorted(assignment.items()))}
        lines = [f"{'true' if holds else 'false'} in {g.label()}"]
        if not holds and not free_vars(formula):
            counterexample = find_counterexample(g, formula, evaluator=evaluator)
            if counterexample is not None:
                payload["counterexample"] = counterexample.to_dict()
                lines.append(f"failing conjunct: {payload['counterexample']['formula']}")
                if counterexample.assignment:
                    lines.append(
                        "at "
                        + ", ".join(f"{k}={v}" for k, v in sorted(counterexample.assignment.items()))
                    )
        payload["probes"] = evaluator.probes
        self.emit(payload, lines)
        return EXIT_MEMBER if holds else EXIT_NOT_MEMBER

    def ea(self) -> int:
        g = self.load()
        result = EADecider(self.config, logger=self.logger).decide(g)
        if self.args.json:
            sys.stdout.write(result.to_json_lines())
        else:
            for record in result.records:
                line = (
                    f"J-class {record.class_min_id}: |A|={record.a_size} |B|={record.b_size} "
                    f"|G|={record.g_size} edges={record.edges} bridges={record.bridges} "
                    f"{'ok' if record.verdict else 'FAIL'}"
                )
                print(line)
                if record.offending_cycle:
                    print(f"  offending cycle: {' - '.join(record.offending_cycle)}")
            print(f"{g.label()} {'is' if result.member else 'is not'} in EA")
        return EXIT_MEMBER if result.member else EXIT_NOT_MEMBER

    def gen_graham(self) -> int:
        graph = parse_graph(load_text(self.args.graph, self.config.encoding))
        return self.write_table(graham_semigroup(graph, self.config))

    def gen_random(self) -> int:
        s = random_transformation_semigroup(
            self.args.points, self.args.generators, self.args.seed, self.config
        )
        return self.write_table(s)

    def from_dfa(self) -> int:
        dfa = parse_dfa(load_text(self.args.dfa, self.config.encoding))
        s, letters = dfa_transition_semigroup(dfa, self.config)
        mapping = " ".join(f"{letter}={element}" for letter, element in letters.items())
        s = dataclasses.replace(s, name=f"{s.name}; letters {mapping}")
        return self.write_table(s, {"letters": letters})

    def corpus_run(self) -> int:
        checker = MembershipChecker(self.config, logger=self.logger)
        operators = [(op, builtin(inner)) for op, inner in CORPUS_OPERATORS]
        derived = [apply_operator(op, inner, self.config.guard_nonempty) for op, inner in operators]
        disagreements: List[dict] = []
        counts = {"semigroups": 0, "checks": 0}

        def compare(s: PartialGroupoid, check: str, catalog: bool, oracle: bool) -> None:
            counts["checks"] += 1
            if catalog != oracle:
                self.logger.warning(f"{check} disagrees on {s.label()}")
                disagreements.append(
                    {
                        "semigroup": s.label(),
                        "table": [list(row) for row in s.table],
                        "check": check,
                        "catalog": catalog,
                        "oracle": oracle,
                    }
                )

        for order in range(1, self.args.order + 1):
            for s in enumerate_semigroups(order):
                counts["semigroups"] += 1
                for name, direct in DEFINITIONAL_CHECKERS.items():
                    compare(s, name, checker.check(s, name).member, direct(s))
                for name, sentence in EQUIVALENT_SENTENCES.items():
                    compare(
                        s,
                        f"{name} by sentence",
                        checker.check(s, name).member,
                        Evaluator(s, self.config, self.logger).evaluate(sentence),
                    )
                for (op, inner), spec in zip(operators, derived):
                    compare(
                        s,
                        spec.name,
                        checker.check(s, spec).member,
                        operator_oracle(op, inner, s, self.config),
                    )
                for name in CONGRUENCES:
                    try:
                        partition = congruence_partition(s, name, self.config)
                        compatible = verify_congruence(s, partition) is None
                    except NotACongruence:
                        compatible = False
                    compare(s, f"congruence {name}", True, compatible)
            self.logger.info(f"Order {order} done, {counts['semigroups']} semigroups so far")

        payload = {"order": self.args.order, **counts, "disagreements": disagreements}
        lines = [
            f"{counts['semigroups']} semigroups, {counts['checks']} checks, "
            f"{len(disagreements)} disagreements"
        ]
        lines.extend(f"  {d['check']} on {d['semigroup']}: {d['table']}" for d in disagreements)
        self.emit(payload, lines)
        return EXIT_MEMBER if not disagreements else EXIT_NOT_MEMBER


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, execute the verb and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    logger = configure_logging(args.verbose)
    try:
        return CommandRunner(args, logger).run()
    except SemigroupToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
