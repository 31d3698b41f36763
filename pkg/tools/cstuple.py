#!/usr/bin/env python3
"""Command-line entry point: check, run, compute, compile-otm, simulate-otm.

Every command prints a `cstuple-format 1` header followed by `key value`
lines on stdout. Logs go to stderr.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from rich.console import Console
from rich.table import Table

from src.config import MAX_STEPS, ORACLE_DEFAULT, PARALLEL_JOBS, SAMPLE_BUDGET, SEED, get_output_prefix
from src.csexpr import CsExprError
from src.graph import GraphError, from_graph, normalize_graph, to_graph
from src.interp import (
    Falsified,
    InterpError,
    SystemReport,
    check_monotonicity,
    check_poly_bounded,
    check_system,
    format_verdict,
    load_interp,
)
from src.logging_config import get_logger, setup_logging
from src.monitor import MonitorError, monitor_bounds
from src.otm import OtmError, load_otm, otm_run
from src.otm_compile import CompileError, parse_running_time, write_compiled
from src.rewrite import BudgetExhausted, NonWordResult, RewriteError, compute_type2, format_trace, normalize
from src.sopoly import OracleTable, SopolyError, format_bits, format_poly, load_otab
from src.strs import StrsError, load_strs, parse_term, with_oracle
from src.terms import Arrow, TermError, format_term

logger = get_logger(__name__)

FORMAT_HEADER = 'cstuple-format 1'

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

INPUT_ERRORS = (
    StrsError, TermError, CsExprError, InterpError, SopolyError,
    RewriteError, GraphError, OtmError, CompileError, MonitorError,
)


def emit(lines: Sequence[str]) -> None:
    print(FORMAT_HEADER)
    for line in lines:
        print(line)


def load_oracle(path: Optional[str], default: Optional[str]) -> Optional[OracleTable]:
    if path is None and default is None:
        return None
    table = load_otab(Path(path)) if path is not None else OracleTable()
    if default is not None:
        answer = '' if default == '_' else default
        if set(answer) - {'0', '1'}:
            raise SopolyError(f"oracle default is not a word: {default!r}")
        table = table.with_default(answer)
    return table


def _verdict_table(report: SystemReport) -> Table:
    table = Table(title="Rule verdicts")
    table.add_column("Rule", justify="right")
    table.add_column("Verdict")
    for number, verdict in enumerate(report.verdicts, start=1):
        style = "red bold" if isinstance(verdict, Falsified) else ""
        table.add_row(str(number), format_verdict(verdict), style=style)
    return table


# ── Commands ──

def cmd_check(args: argparse.Namespace) -> int:
    strs = load_strs(Path(args.strs))
    interp = load_interp(Path(args.csi), strs)
    report = check_system(interp, strs, mode=args.mode, budget=args.budget, seed=args.seed, jobs=args.jobs)
    lines = [f"rule {number} {format_verdict(verdict)}" for number, verdict in enumerate(report.verdicts, start=1)]
    lines.append(f"overall {format_verdict(report.overall)}")
    lines.extend(f"warning {warning}" for warning in check_monotonicity(interp, strs, seed=args.seed))
    code = EXIT_FAILED if isinstance(report.overall, Falsified) else EXIT_OK

    if args.main is not None:
        bounded = check_poly_bounded(interp, strs, args.main)
        if bounded.ok:
            assert bounded.poly is not None
            lines.extend([
                "poly-bounded yes",
                f"mu {bounded.mu}",
                f"nu {bounded.nu}",
                f"poly {format_poly(bounded.poly)}",
            ])
        else:
            lines.append("poly-bounded no")
            lines.extend(f"reason {failure}" for failure in bounded.failures)
            code = EXIT_FAILED

    if args.table:
        Console(stderr=True).print(_verdict_table(report))
    emit(lines)
    return code


def cmd_run(args: argparse.Namespace) -> int:
    strs = load_strs(Path(args.strs))
    oracle = load_oracle(args.oracle, args.oracle_default)
    if oracle is not None:
        strs, _ = with_oracle(strs)
    term = parse_term(args.term, strs.signature)
    if isinstance(term.type, Arrow):
        raise TermError(f"term has arrow type {term.type}")

    if args.strategy == 'graph':
        graph, graph_stats = normalize_graph(strs, oracle, to_graph(term), args.max_steps)
        lines = [
            f"normal-form {format_term(from_graph(graph))}",
            f"steps {graph_stats.steps}",
            f"max-nodes {graph_stats.max_nodes}",
        ]
        emit(lines)
        return EXIT_OK if graph_stats.normal_form else EXIT_BUDGET

    result, trace, stats = normalize(strs, oracle, term, args.max_steps, trace=args.trace)
    lines = [
        f"normal-form {format_term(result)}",
        f"steps {stats.steps}",
        f"max-nodes {stats.max_nodes}",
    ]
    lines.extend(f"trace {line}" for line in format_trace(trace))
    emit(lines)
    return EXIT_OK if stats.normal_form else EXIT_BUDGET


def cmd_compute(args: argparse.Namespace) -> int:
    strs = load_strs(Path(args.strs))
    oracle = load_oracle(args.oracle, args.oracle_default)
    output, stats = compute_type2(strs, args.main, oracle, args.input, args.max_steps)
    lines = [
        f"output {format_bits(output)}",
        f"steps {stats.steps}",
        f"oracle-calls {stats.oracle_calls}",
        f"max-query {stats.max_query_len}",
    ]
    code = EXIT_OK
    if args.monitor is not None:
        report = monitor_bounds(strs, load_interp(Path(args.monitor), strs), args.main,
                                oracle, args.input, args.max_steps)
        lines.extend([
            f"d-poly {report.d_poly}",
            f"d {report.d_value}",
            f"b-poly {report.b_poly}",
            f"b {report.b_value}",
            f"monitor {'ok' if report.ok else 'violated'}",
        ])
        if not report.ok:
            code = EXIT_FAILED
    emit(lines)
    return code


def cmd_compile_otm(args: argparse.Namespace) -> int:
    otm_path = Path(args.otm)
    spec = load_otm(otm_path)
    running_time = parse_running_time(args.poly)
    prefix = Path(args.out) if args.out is not None else get_output_prefix(otm_path)
    strs_path, csi_path = write_compiled(spec, running_time, prefix)
    emit([f"strs {strs_path}", f"csi {csi_path}", f"states {len(spec.states)}"])
    return EXIT_OK


def cmd_simulate_otm(args: argparse.Namespace) -> int:
    spec = load_otm(Path(args.otm))
    oracle = load_oracle(args.oracle, args.oracle_default)
    run = otm_run(spec, oracle, args.input, args.max_steps)
    emit([f"output {format_bits(run.output)}", f"steps {run.steps}", f"queries {len(run.queries)}"])
    return EXIT_OK


# ── Argument parsing ──

def _add_oracle_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--oracle", type=str, default=None, help="Oracle table (.otab)")
    parser.add_argument("--oracle-default", type=str, default=ORACLE_DEFAULT,
                        help="Answer for queries missing from the table ('_' is the empty word)")


def _input_word(text: str) -> str:
    word = '' if text == '_' else text
    if set(word) - {'0', '1'}:
        raise argparse.ArgumentTypeError(f"not a binary word: {text!r}")
    return word


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstuple", description="Cost-size interpretation workbench")
    parser.add_argument("--log-level", type=str, default="WARNING", help="Logging level for stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="Check an interpretation against every rule")
    check.add_argument("strs", type=str)
    check.add_argument("csi", type=str)
    check.add_argument("--mode", choices=("falsify", "certify"), default="falsify")
    check.add_argument("--budget", type=int, default=SAMPLE_BUDGET, help="Samples per rule")
    check.add_argument("--seed", type=int, default=SEED)
    check.add_argument("--main", type=str, default=None, help="Also check polynomial boundedness for this symbol")
    check.add_argument("--jobs", type=int, default=PARALLEL_JOBS)
    check.add_argument("--table", action="store_true", help="Render a verdict table on stderr")
    check.set_defaults(handler=cmd_check)

    run = commands.add_parser("run", help="Normalize a ground term")
    run.add_argument("strs", type=str)
    run.add_argument("term", type=str)
    run.add_argument("--strategy", choices=("term", "graph"), default="term")
    run.add_argument("--trace", action="store_true")
    run.add_argument("--max-steps", type=int, default=MAX_STEPS)
    _add_oracle_flags(run)
    run.set_defaults(handler=cmd_run)

    compute = commands.add_parser("compute", help="Compute main S_f <input>")
    compute.add_argument("strs", type=str)
    compute.add_argument("--main", type=str, default="F")
    compute.add_argument("--input", type=_input_word, required=True)
    compute.add_argument("--monitor", type=str, default=None, help="Interpretation (.csi) to monitor D and B")
    compute.add_argument("--max-steps", type=int, default=MAX_STEPS)
    _add_oracle_flags(compute)
    compute.set_defaults(handler=cmd_compute)

    compile_otm = commands.add_parser("compile-otm", help="Compile a machine into .strs and .csi")
    compile_otm.add_argument("otm", type=str)
    compile_otm.add_argument("--poly", type=str, required=True, help="Running time over x and F")
    compile_otm.add_argument("--out", type=str, default=None, help="Output prefix")
    compile_otm.set_defaults(handler=cmd_compile_otm)

    simulate = commands.add_parser("simulate-otm", help="Run a machine directly")
    simulate.add_argument("otm", type=str)
    simulate.add_argument("--input", type=_input_word, required=True)
    simulate.add_argument("--max-steps", type=int, default=MAX_STEPS)
    _add_oracle_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate_otm)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except BudgetExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except NonWordResult as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
