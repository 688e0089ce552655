"""Command line front end: scenario runs, meadow tools and budget checks.

Results go to stdout, diagnostics to stderr. Exit codes depend only on the
outcome class.
"""
import argparse
import sys
from pathlib import Path

from .catalog import all_rewrites_guarded, catalog_report
from .config import Config
from .engine import Simulator
from .errors import BudgetError, ConfigError, EvaluationError, ExpressionSyntaxError, PromiseCalcError, ScenarioSyntaxError
from .expr import parse_expr, parse_proposition
from .log import LOG_DEBUG, LogManager, Logger
from .meadow import (
    Semantics, check_simplification, detect_mvl_creep, eval_arith, eval_bool, is_boolean, parse_rational,
    render_rational, render_set, solution_set,
)
from .report import report
from .scenario import parse_scenario
from .tuplix import conforms, instantiate, net_result, parse_account, parse_substitution, parse_tuplix

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2

log = Logger("Cli")


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None


def _binding(text):
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected X=p/q, got {text!r}")
    return name.strip(), _rational(value)


def build_parser():
    parser = argparse.ArgumentParser(prog="promisecalc", description="Promise and decision calculus engine")
    parser.add_argument("--log-level", type=int, choices=range(LOG_DEBUG + 1), help="0 critical .. 4 debug")
    parser.add_argument("--config", help="JSON configuration file")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario and export its trace")
    run.add_argument("scenario")
    run.add_argument("--public", action="store_true", help="export public records only")
    run.add_argument("--out", help="write the trace here and print the summary")
    run.add_argument("--alpha", type=_rational)
    run.add_argument("--beta", type=_rational)
    run.add_argument("--seed", type=int)
    run.add_argument("--strict", action="store_true", help="fail when the trace holds error records")

    meadow = commands.add_parser("meadow", help="evaluate and analyse meadow expressions")
    tools = meadow.add_subparsers(dest="tool", required=True)
    evaluate = tools.add_parser("eval")
    evaluate.add_argument("expr")
    evaluate.add_argument("--env", type=_binding, action="append", default=[])
    evaluate.add_argument("--semantics", choices=[s.value for s in Semantics], default=Semantics.MEADOW_TOTAL.value)
    solve = tools.add_parser("solve")
    solve.add_argument("expr")
    solve.add_argument("--var", required=True)
    solve.add_argument("--bound", type=int)
    creep = tools.add_parser("creep")
    creep.add_argument("expr")
    creep.add_argument("--bound", type=int)
    check = tools.add_parser("check")
    check.add_argument("expr")
    check.add_argument("simplified")
    check.add_argument("--bound", type=int)
    catalog = tools.add_parser("catalog")
    catalog.add_argument("--bound", type=int)

    budget = commands.add_parser("budget", help="check an account against a budget")
    budget.add_argument("budget")
    budget.add_argument("account")
    budget.add_argument("--shortfall", type=_rational, default=_rational("0"))
    budget.add_argument("--subst", action="append", default=[], help="bindings such as 'f=40, c=25'")
    return parser


def _print(lines):
    for line in lines:
        print(line)


def cmd_run(args, config):
    try:
        path = Path(args.scenario)
        scenario = parse_scenario(path.read_text(), path.stem)
    except OSError as e:
        log.error("Cannot read %s: %s", args.scenario, e)
        return EXIT_PARSE
    except ScenarioSyntaxError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return EXIT_PARSE
    overrides = {k: getattr(args, k) for k in ("alpha", "beta", "seed") if getattr(args, k) is not None}
    try:
        simulator = Simulator(scenario, config, overrides)
        trace = simulator.run()
    except ConfigError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return EXIT_PARSE
    export = trace.export(public_only=args.public)
    summary = report(trace, config.meadow_bound, include_private=not args.public)
    if args.out:
        Path(args.out).write_text(export)
        _print(summary.render())
    else:
        sys.stdout.write(export)
    if args.strict and summary.errors:
        print(f"{summary.errors} error records", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _meadow_eval(args):
    expr = parse_expr(args.expr)
    env = dict(args.env)
    if is_boolean(expr):
        print(eval_bool(expr, env, Semantics(args.semantics)).value)
    else:
        print(render_rational(eval_arith(expr, env)))
    return EXIT_OK


def cmd_meadow(args, config):
    bound = getattr(args, "bound", None) or config.meadow_bound
    try:
        if args.tool == "eval":
            return _meadow_eval(args)
        if args.tool == "solve":
            print(render_set(solution_set(parse_proposition(args.expr), args.var, bound)))
            return EXIT_OK
        if args.tool == "creep":
            _print(detect_mvl_creep(parse_proposition(args.expr), bound).lines())
            return EXIT_OK
        if args.tool == "check":
            result = check_simplification(parse_proposition(args.expr), parse_proposition(args.simplified), bound)
            if result.equivalent:
                print(f"equivalent at bound {bound}")
                return EXIT_OK
            print(f"not equivalent at bound {bound}, counterexamples {render_set(result.counterexamples)}")
            return EXIT_FAILURE
        results = catalog_report(bound)
        for result in results:
            _print(result.lines())
        print("guarded rewrites: " + ("all creep-free" if all_rewrites_guarded(results) else "creep remains"))
        return EXIT_OK
    except ExpressionSyntaxError as e:
        print(f"column {e.col}: {e}", file=sys.stderr)
        return EXIT_PARSE
    except EvaluationError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FAILURE


def cmd_budget(args, config):
    try:
        budget = parse_tuplix(Path(args.budget).read_text())
        account = parse_account(Path(args.account).read_text())
        substitutions = [parse_substitution(text) for text in args.subst]
    except (OSError, BudgetError) as e:
        print(str(e), file=sys.stderr)
        return EXIT_PARSE
    try:
        for sigma in substitutions:
            budget = instantiate(budget, sigma)
        for label, text in budget.describe().items():
            print(f"{label}: {text}")
        print(f"budget net result: {render_rational(net_result(budget))}")
        print(f"account net result: {render_rational(net_result(account))}")
        ok = conforms(account, budget, args.shortfall)
    except BudgetError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FAILURE
    print(f"{'conforms' if ok else 'does not conform'} with shortfall {render_rational(args.shortfall)}")
    return EXIT_OK if ok else EXIT_FAILURE


COMMANDS = {
    "run": cmd_run,
    "meadow": cmd_meadow,
    "budget": cmd_budget,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = Config(args.config)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_PARSE
    if args.log_level is not None:
        config.loglevel = args.log_level
    LogManager.get_instance().level = config.loglevel
    try:
        return COMMANDS[args.command](args, config)
    except PromiseCalcError as e:
        log.exc(e, "Command failed")
        return EXIT_FAILURE
