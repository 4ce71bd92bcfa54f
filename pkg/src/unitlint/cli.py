"""Command-line interface.

Exit codes: 0 success (no diagnostics), 1 diagnostics reported, 2 bad input.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from unitlint.config import FORMATS, Config, ConfigError, load_config
from unitlint.deduction import TypeDatabase, build_type_db
from unitlint.deduction.mining import DatabaseFormatError
from unitlint.frontend import IncludeError, LexError, ParseError, UnresolvedName, canonicalize, load_unit
from unitlint.inference import DEFAULT_IGNORE, GenOptions, analyze_file, check_files, dump_constraints
from unitlint.protocol import MalformedProtocol, load_protocol
from unitlint.runtime import (
    RuntimeFault,
    ScenarioError,
    TraceFormatError,
    enum_var_ids,
    interpret,
    load_qoi_decls,
    load_scenario,
    read_trace,
    write_trace,
)
from unitlint.runtime.trace import read_sidecars, write_sidecars
from unitlint.units import UnitError

INPUT_ERRORS = (
    ConfigError,
    DatabaseFormatError,
    IncludeError,
    LexError,
    MalformedProtocol,
    ParseError,
    RuntimeFault,
    ScenarioError,
    TraceFormatError,
    UnitError,
    UnresolvedName,
    OSError,
)


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file (default: $UNITLINT_CONFIG)")
    common.add_argument("--protocol", help="protocol definition XML")

    parser = argparse.ArgumentParser(prog="unitlint", description="Find unit and frame errors in mini-language programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="interpret a program under a scenario and record a trace")
    run.add_argument("program")
    run.add_argument("--scenario", required=True)
    run.add_argument("--out", required=True, help="trace CSV to write (sidecars are written next to it)")

    deduce = sub.add_parser("deduce", parents=[common], help="mine a type database from a trace")
    deduce.add_argument("trace")
    deduce.add_argument("--qoi", help="QOI declarations (default: the shipped set)")
    deduce.add_argument("--out", help="type database JSON to write (default: stdout)")
    deduce.add_argument("--eps-approx", type=float)

    for name, text in (("check", "type-check programs"), ("dump-constraints", "print the constraint set")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("programs", nargs="+")
        p.add_argument("--db", help="type database JSON")
        p.add_argument("--ignore-fn", action="append", default=[], metavar="NAME",
                       help="skip argument inference for calls to NAME (repeatable)")
        if name == "check":
            p.add_argument("--format", choices=FORMATS)
            p.add_argument("--explain", action="store_true", default=None, help="print the constraint chain")
            p.add_argument("--no-dedup", dest="dedup", action="store_false", default=None)
        else:
            p.add_argument("--out", help="file to write (default: stdout)")
    return parser


def resolve_config(args) -> Config:
    path = args.config or os.environ.get("UNITLINT_CONFIG")
    cfg = load_config(path) if path else Config()
    for key in ("protocol", "qoi", "db"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, Path(value))
    if getattr(args, "format", None):
        cfg.format = args.format
    if getattr(args, "dedup", None) is not None:
        cfg.dedup = args.dedup
    if getattr(args, "explain", None):
        cfg.explain = True
    if getattr(args, "eps_approx", None) is not None:
        try:
            cfg.mining = dataclasses.replace(cfg.mining, eps_approx=args.eps_approx)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    cfg.ignore = tuple(cfg.ignore) + tuple(getattr(args, "ignore_fn", ()))
    return cfg


def _require(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise InputError(f"{p}: no such file")


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_run(args, cfg: Config) -> int:
    _require(args.program, args.scenario, cfg.protocol)
    protocol = load_protocol(cfg.protocol) if cfg.protocol else None
    scenario = load_scenario(args.scenario)
    program, registry, info = canonicalize(load_unit(args.program), protocol=protocol)
    trace = interpret(program, scenario, registry, cfg.sample_rate_hz, info)
    write_trace(trace, args.out)
    write_sidecars(args.out, registry, enum_var_ids(info, registry))
    print(f"wrote {len(trace)} observations to {args.out}")
    return 0


def cmd_deduce(args, cfg: Config) -> int:
    _require(args.trace, cfg.qoi)
    trace = read_trace(args.trace)
    names, enum_ids = read_sidecars(args.trace)
    decls = load_qoi_decls(cfg.qoi)
    db = build_type_db(trace, decls, cfg.mining, enum_ids, names)
    _write(db.to_json(), args.out)
    if args.out is not None:
        print(f"wrote {len(db)} entries to {args.out}")
    return 0


def _analysis_inputs(args, cfg: Config):
    _require(*args.programs, cfg.protocol, cfg.db)
    protocol = load_protocol(cfg.protocol) if cfg.protocol else None
    db = TypeDatabase.load(cfg.db) if cfg.db else None
    options = GenOptions(ignore=DEFAULT_IGNORE | frozenset(cfg.ignore), conversions=dict(cfg.conversions))
    return protocol, db, options


def cmd_check(args, cfg: Config) -> int:
    protocol, db, options = _analysis_inputs(args, cfg)
    result = check_files(args.programs, protocol, db, options, dedup_diagnostics=cfg.dedup)
    if cfg.format == "json":
        sys.stdout.write(result.to_json())
    else:
        sys.stdout.write(result.to_text(explain=cfg.explain))
    return 1 if any(d.severity == "error" for d in result.diagnostics) else 0


def cmd_dump(args, cfg: Config) -> int:
    protocol, db, options = _analysis_inputs(args, cfg)
    text = "".join(dump_constraints(analyze_file(p, protocol, db, options).constraints) for p in args.programs)
    _write(text, args.out)
    return 0


COMMANDS = {"run": cmd_run, "deduce": cmd_deduce, "check": cmd_check, "dump-constraints": cmd_dump}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return 0 if exc.code in (0, None) else 2
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except (InputError,) + INPUT_ERRORS as exc:
        print(f"unitlint: error: {exc}", file=sys.stderr)
    except Exception as exc:  # noqa: BLE001 - keep the exit-code contract total
        print(f"unitlint: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
