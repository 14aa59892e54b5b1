"""Command-line entry point.

Exit codes: 0 ok, 1 usage, 2 input error, 3 solver error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .bench import BenchConfig, bench_directory, rows_to_csv, rows_to_json, BenchReportRow
from .decode import compression_rate, dumps_report, read_header, report, verify_program
from .encoder import EncodingError, encode
from .engine import VerificationError, refactor
from .generate import generate
from .hardness import GraphError, k_bound
from .logic import ArityError, ParseError, Program, format_program, parse_program
from .oracle import OracleBoundsError, OracleConfig, oracle_optimum
from .solver import SolverError

log = logging.getLogger("maxrefactor")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class InputError(Exception):
    pass


def _read_program(path: str) -> tuple[Program, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        prog = parse_program(text)
    for w in caught:
        log.warning("%s: %s", path, w.message)
    if len(prog) == 0:
        raise InputError(f"{path}: empty program")
    return prog, text


def _resolve_k(value: str, program: Program) -> int:
    if value == "auto":
        s = max(r.size for r in program)
        k = k_bound(len(program), max(2, s))
        log.warning("--k auto uses the worst-case bound K=%d; solving may be slow", k)
        return k
    try:
        k = int(value)
    except ValueError:
        raise InputError(f"--k expects an integer or 'auto', got {value!r}") from None
    if k < 0:
        raise InputError("--k must be non-negative")
    return k


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    program, _ = _read_program(args.input)
    k = _resolve_k(args.k, program)
    out = refactor(
        program,
        k=k,
        timeout=args.timeout,
        backend=args.backend,
        seed=args.seed,
        workers=args.workers,
        symmetry=args.symmetry == "on",
        solver_cmd=args.solver_cmd,
        wcnf_2022=args.wcnf_2022,
    )
    sol = out.solution
    if args.out:
        Path(args.out).write_text(sol.to_text(), encoding="utf-8")
    if args.format == "text":
        if not args.out:
            sys.stdout.write(sol.to_text())
        else:
            print(f"{out.status} size {sol.output_size} (input {sol.input_size}, cr {float(sol.cr):.6f})")
    elif args.format == "json":
        extra = None if args.no_timing else {"wall_time": round(out.result.wall_time, 6)}
        rep = report(sol, out.status, trace=None if args.no_timing else out.trace, extra=extra)
        rep["k"] = k
        sys.stdout.write(dumps_report(rep) + "\n")
    else:
        row = BenchReportRow(Path(args.input).stem, sol.input_size, sol.output_size, float(sol.cr),
                             out.status, round(out.result.wall_time, 3), out.trace)
        sys.stdout.write(rows_to_csv([row], with_timing=not args.no_timing))
    return EXIT_OK


def cmd_verify(args) -> int:
    program, _ = _read_program(args.input)
    solution, text = _read_program(args.solution)
    verdict = verify_program(program, solution, read_header(text))
    if not verdict:
        print(f"FAIL: {verdict.message}")
        return EXIT_VERIFY
    size_in, size_out = program.size, solution.size
    print(f"OK: input {size_in}, output {size_out}, cr {float(compression_rate(size_in, size_out)):.6f}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    program, _ = _read_program(args.input)
    cfg = OracleConfig(
        max_rules=args.max_rules,
        max_body=args.max_body,
        max_predicates=args.max_predicates,
        k=max(1, _resolve_k(args.k, program)),
        max_aux_body_size=args.max_aux_body_size,
        space=args.space,
    )
    res = oracle_optimum(program, cfg)
    if args.format == "text":
        _emit(res.witness.to_text(), args.out)
    else:
        _emit(dumps_report(res.to_dict()) + "\n", args.out)
    return EXIT_OK


def _param(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    for cast in (int, float):
        try:
            return key, cast(value)
        except ValueError:
            pass
    return key, value


def cmd_gen(args) -> int:
    try:
        prog = generate(args.kind, seed=args.seed, **dict(args.param))
    except TypeError as exc:
        raise InputError(str(exc)) from None
    _emit(format_program(prog), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig()
    if args.config:
        try:
            cfg = BenchConfig.from_text(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read {args.config}: {exc.strerror}") from None
    # flags given on the command line win over the config file
    for name in ("k", "timeout", "seed", "workers", "backend", "solver_cmd", "sample_size"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, int(value) if name == "k" else value)
    if args.symmetry is not None:
        cfg.symmetry = args.symmetry == "on"
    try:
        rows = bench_directory(args.dir, cfg)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from None
    text = rows_to_csv(rows, not args.no_timing) if args.format == "csv" else rows_to_json(rows, not args.no_timing) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_wcnf(args) -> int:
    program, _ = _read_program(args.input)
    k = _resolve_k(args.k, program)
    if k < 1:
        raise InputError("wcnf export needs --k >= 1")
    enc = encode(program, k, symmetry=args.symmetry == "on")
    _emit(enc.formula.to_dimacs(wcnf_2022=args.wcnf_2022), args.out)
    log.info("objective offset %d", enc.formula.objective_offset)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maxrefactor", description="Optimal refactoring of definite logic programs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solving(p, k_default="2"):
        p.add_argument("--k", default=k_default, help="max invented rules, or 'auto'")
        p.add_argument("--symmetry", choices=("on", "off"), default="on")
        p.add_argument("--wcnf-2022", action="store_true")

    p = sub.add_parser("solve", help="refactor a program")
    p.add_argument("input")
    solving(p)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("builtin", "external"), default="builtin")
    p.add_argument("--solver-cmd")
    p.add_argument("--out", help="write the solution program here")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields from reports")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against its input")
    p.add_argument("input")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive optimum for tiny programs")
    p.add_argument("input")
    p.add_argument("--k", default="1")
    p.add_argument("--space", choices=("linear", "general"), default="linear")
    p.add_argument("--max-rules", type=int, default=3)
    p.add_argument("--max-body", type=int, default=4)
    p.add_argument("--max-predicates", type=int, default=3)
    p.add_argument("--max-aux-body-size", type=int, default=4)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a synthetic program")
    p.add_argument("kind", choices=("random", "motif", "bibd", "induced"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="solve every .pl file in a directory")
    p.add_argument("dir")
    p.add_argument("--config", help="key = value settings file; flags win")
    p.add_argument("--k", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--backend", choices=("builtin", "external"))
    p.add_argument("--solver-cmd")
    p.add_argument("--symmetry", choices=("on", "off"))
    p.add_argument("--sample-size", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("wcnf", help="export the MaxSAT encoding")
    p.add_argument("input")
    solving(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_wcnf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ParseError, ArityError, GraphError, OracleBoundsError, EncodingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # engine and generators report bad arguments as ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
