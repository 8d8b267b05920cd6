"""Command-line entry point: ``ktbt run``, ``ktbt experiment`` and ``ktbt bt``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bt import TreeStructureError, outline
from .config import ConfigError, load_config
from .experiment import run_experiment
from .sar.world import ConfigurationError
from .stringbt import (
    StringBtError,
    canonical,
    find_knowledge,
    merge_knowledge,
    parse,
    parse_sequence,
    serialize,
)


def _read_doc(arg: str) -> str:
    """A literal document when ``arg`` starts with '<', '-' for stdin, else a file path."""
    if arg.lstrip().startswith("<"):
        return arg
    if arg == "-":
        return sys.stdin.read()
    return Path(arg).read_text()


def _read_seq(arg: str):
    text = arg.strip()
    if text.startswith("<"):
        return parse_sequence(text)
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple((t[1:], True) if t.startswith("!") else (t, False) for t in items)


def _cmd_bt(args) -> int:
    if args.bt_command == "parse":
        print(outline(parse(_read_doc(args.doc))))
    elif args.bt_command == "fmt":
        print(canonical(_read_doc(args.doc)))
    elif args.bt_command == "merge":
        control = parse(_read_doc(args.control))
        sub = parse(_read_doc(args.subtree))
        print(serialize(merge_knowledge(control, _read_seq(args.seq), sub)))
    elif args.bt_command == "query":
        found = find_knowledge(parse(_read_doc(args.control)), _read_seq(args.seq))
        print("NONE" if found is None else serialize(found))
    return 0


def _cmd_run(args, study: bool) -> int:
    spec = load_config(args.config)
    if not study:
        spec.study = None
        spec.study_values = ()
    if args.output_dir is not None:
        spec.output_dir = Path(args.output_dir)
    report = run_experiment(spec, workers=args.workers)
    sys.stdout.write(report.summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ktbt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "run the trials of one configuration"),
        ("experiment", "run every variant of the configured study"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="key=value configuration file")
        p.add_argument("--output-dir", help="override output_dir from the config")
        p.add_argument("--workers", type=int, help="worker processes (default: KTBT_THREADS or CPU count)")

    bt = sub.add_parser("bt", help="stringBT tools")
    bt_sub = bt.add_subparsers(dest="bt_command", required=True)
    p = bt_sub.add_parser("parse", help="validate a document and print its outline")
    p.add_argument("doc", help="document, file path, or - for stdin")
    p = bt_sub.add_parser("fmt", help="print the canonical form of a document")
    p.add_argument("doc", help="document, file path, or - for stdin")
    p = bt_sub.add_parser("merge", help="merge a knowledge sub-tree into a control tree")
    p.add_argument("control", help="control tree document or file")
    p.add_argument("seq", help="condition sequence: <c>(a)<c>(!b) or a,!b")
    p.add_argument("subtree", help="action sub-tree document or file")
    p = bt_sub.add_parser("query", help="print the sub-tree stored for a condition sequence, or NONE")
    p.add_argument("control", help="control tree document or file")
    p.add_argument("seq", help="condition sequence: <c>(a)<c>(!b) or a,!b")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bt":
            return _cmd_bt(args)
        return _cmd_run(args, study=args.command == "experiment")
    except StringBtError as exc:
        print(f"ktbt: parse error at byte {exc.offset}: {exc.message}", file=sys.stderr)
        return 2
    except (ConfigError, ConfigurationError, TreeStructureError, ValueError, OSError) as exc:
        print(f"ktbt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
