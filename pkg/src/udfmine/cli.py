"""Command-line driver: ingest, measure, slice, discover, export.

Commands
    validate   check a log and report every violation
    bgraph     behavior graph of one trace as DOT
    udfg       annotated directly-follows graph (DOT or text table)
    slice      filtered graph as DOT
    discover   mine a model (tree text, DOT or PNML)
    oracle     realization bounds for chosen activities and pairs

Exit codes: 0 success, 1 parse error, 2 validation failure, 3 bad flags,
4 enumeration cap exceeded. Identical inputs and flags produce identical
bytes.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from . import export, logio, oracle
from .bgraph import build_behavior_graph
from .discovery import discover_tree
from .model import UncertainLog, UncertainTrace, validate
from .petri import tree_to_petri
from .udfg import SliceParams, build_udfg, mining_view, slice_udfg

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_USAGE = 3
EXIT_CAP = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with our exit code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(message, EXIT_USAGE)


def _ratio(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"{text!r} is not a decimal or fraction like 0.6 or 3/5"
        ) from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{text!r} is outside [0, 1]")
    return value


def _pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
        raise argparse.ArgumentTypeError(
            f"{text!r} is not an activity pair like a,b"
        )
    return parts[0].strip(), parts[1].strip()


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-i", "--input", required=True, help="log file to read")
    parser.add_argument(
        "-f",
        "--format",
        choices=("json", "compact"),
        help="input format (default: by extension, *.json is JSON)",
    )


def _add_output_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--output", help="write here instead of stdout")


def _add_slice_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--act-min", type=_ratio, default=Fraction(0))
    parser.add_argument("--act-max", type=_ratio, default=Fraction(1))
    parser.add_argument("--rel-min", type=_ratio, default=Fraction(0))
    parser.add_argument("--rel-max", type=_ratio, default=Fraction(1))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="udfmine", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    validate_cmd = commands.add_parser("validate", help="report invariant violations")
    _add_input_flags(validate_cmd)

    bgraph_cmd = commands.add_parser("bgraph", help="behavior graph as DOT")
    _add_input_flags(bgraph_cmd)
    _add_output_flag(bgraph_cmd)
    bgraph_cmd.add_argument("--case", required=True, help="case id of the trace")

    udfg_cmd = commands.add_parser("udfg", help="uncertain DFG with min/max counts")
    _add_input_flags(udfg_cmd)
    _add_output_flag(udfg_cmd)
    udfg_cmd.add_argument(
        "--table", action="store_true", help="text table instead of DOT"
    )

    slice_cmd = commands.add_parser("slice", help="filtered DFG as DOT")
    _add_input_flags(slice_cmd)
    _add_output_flag(slice_cmd)
    _add_slice_flags(slice_cmd)

    discover_cmd = commands.add_parser("discover", help="mine a process model")
    _add_input_flags(discover_cmd)
    _add_output_flag(discover_cmd)
    _add_slice_flags(discover_cmd)
    discover_cmd.add_argument(
        "--to",
        choices=("tree", "dot", "pnml"),
        default="tree",
        help="output form of the mined model (default: tree text)",
    )

    oracle_cmd = commands.add_parser(
        "oracle", help="realization bounds by brute-force enumeration"
    )
    _add_input_flags(oracle_cmd)
    _add_output_flag(oracle_cmd)
    oracle_cmd.add_argument("--case", required=True, help="case id of the trace")
    oracle_cmd.add_argument(
        "--activity",
        action="append",
        default=[],
        metavar="A",
        help="activity to bound (repeatable)",
    )
    oracle_cmd.add_argument(
        "--pair",
        action="append",
        default=[],
        type=_pair,
        metavar="A,B",
        help="directly-follows pair to bound (repeatable)",
    )
    oracle_cmd.add_argument(
        "--cap",
        type=int,
        default=oracle.DEFAULT_REALIZATION_CAP,
        help="maximum trace size for enumeration",
    )
    return parser


def _load(args: argparse.Namespace, *, check: bool = True) -> UncertainLog:
    try:
        return logio.load_log(args.input, args.format, check=check)
    except logio.LogValidationError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    except logio.LogFormatError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}", EXIT_USAGE) from None


def _select_trace(log: UncertainLog, case_id: str) -> UncertainTrace:
    for trace in log.traces:
        if trace.case_id == case_id:
            return trace
    raise CliError(f"no trace with case id {case_id!r}", EXIT_USAGE)


def _slice_params(args: argparse.Namespace) -> SliceParams:
    try:
        return SliceParams(
            act_min=args.act_min,
            act_max=args.act_max,
            rel_min=args.rel_min,
            rel_max=args.rel_max,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _udfg_table(log: UncertainLog) -> str:
    udfg = build_udfg(log)
    lines = ["nodes:"]
    for activity in sorted(udfg.nodes):
        lo, hi = udfg.nodes[activity]
        lines.append(f"  {activity} {lo}/{hi}")
    lines.append("arcs:")
    for a, b in sorted(udfg.arcs):
        lo, hi = udfg.arcs[(a, b)]
        lines.append(f"  {a} -> {b} {lo}/{hi}")
    lines.append("start:")
    for activity in sorted(udfg.start_acts):
        lo, hi = udfg.start_acts[activity]
        lines.append(f"  {activity} {lo}/{hi}")
    lines.append("end:")
    for activity in sorted(udfg.end_acts):
        lo, hi = udfg.end_acts[activity]
        lines.append(f"  {activity} {lo}/{hi}")
    return "\n".join(lines) + "\n"


def _run_validate(args: argparse.Namespace) -> int:
    log = _load(args, check=False)
    violations = validate(log)
    if not violations:
        sys.stdout.write(f"OK: {len(log.traces)} traces valid\n")
        return EXIT_OK
    for violation in violations:
        sys.stdout.write(f"{violation}\n")
    return EXIT_INVALID


def _run_bgraph(args: argparse.Namespace) -> int:
    trace = _select_trace(_load(args), args.case)
    _emit(args, export.behavior_graph_to_dot(build_behavior_graph(trace)))
    return EXIT_OK


def _run_udfg(args: argparse.Namespace) -> int:
    log = _load(args)
    if args.table:
        _emit(args, _udfg_table(log))
    else:
        _emit(args, export.udfg_to_dot(build_udfg(log), annotate=True))
    return EXIT_OK


def _run_slice(args: argparse.Namespace) -> int:
    log = _load(args)
    view = slice_udfg(build_udfg(log), _slice_params(args))
    _emit(args, export.view_to_dot(view))
    return EXIT_OK


def _run_discover(args: argparse.Namespace) -> int:
    log = _load(args)
    view = mining_view(build_udfg(log), _slice_params(args))
    tree = discover_tree(view)
    if args.to == "tree":
        _emit(args, export.tree_to_text(tree) + "\n")
    elif args.to == "dot":
        _emit(args, export.tree_to_dot(tree))
    else:
        _emit(args, export.to_pnml(tree_to_petri(tree)))
    return EXIT_OK


def _run_oracle(args: argparse.Namespace) -> int:
    trace = _select_trace(_load(args), args.case)
    if not args.activity and not args.pair:
        raise CliError("give at least one --activity or --pair", EXIT_USAGE)
    lines = []
    try:
        for activity in args.activity:
            lo, hi = oracle.activity_bounds(trace, activity, cap=args.cap)
            lines.append(f"activity {activity}: count in [{lo}, {hi}]")
        for a, b in args.pair:
            lo, hi = oracle.df_bounds(trace, a, b, cap=args.cap)
            lines.append(f"pair ({a}, {b}): directly-follows in [{lo}, {hi}]")
    except oracle.CapExceeded as exc:
        raise CliError(str(exc), EXIT_CAP) from None
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "validate": _run_validate,
    "bgraph": _run_bgraph,
    "udfg": _run_udfg,
    "slice": _run_slice,
    "discover": _run_discover,
    "oracle": _run_oracle,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"udfmine: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
