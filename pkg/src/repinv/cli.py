"""Command-line interface: ``repinv infer | bench | check``."""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from .cegis import (
    INVARIANT,
    MODES,
    REJECTED,
    SPEC_VIOLATION,
    SYNTH_FAILURE,
    TIMEOUT,
    Engine,
    Options,
    UnsupportedMode,
    infer,
)
from .enumerate import FnGrammar
from .frontend.diagnostics import DiagnosticError
from .frontend.elaborate import load
from .induct import CheckBudget
from .lang.evaluator import DEFAULT_FUEL
from .lang.pretty import pretty_expr
from .lang.values import show
from .stats import CSV_HEADER, RunStats, average_rows, format_row
from .synth import make_predicate
from .verify import MULTI, SINGLE, VerifBudget

EXIT = {INVARIANT: 0, SPEC_VIOLATION: 2, SYNTH_FAILURE: 3, REJECTED: 3, TIMEOUT: 4}
EXIT_USAGE = 1

# flag name, default, help
BUDGET_FLAGS = (
    ("single-nodes", SINGLE.max_nodes, "value size bound, single-quantifier specs"),
    ("single-per", SINGLE.per_quantifier, "values per quantifier, single-quantifier specs"),
    ("single-total", SINGLE.total, "tuples per query, single-quantifier specs"),
    ("multi-nodes", MULTI.max_nodes, "value size bound, multi-quantifier specs"),
    ("multi-per", MULTI.per_quantifier, "values per quantifier, multi-quantifier specs"),
    ("multi-total", MULTI.total, "tuples per query, multi-quantifier specs"),
    ("base-nodes", CheckBudget.base_nodes, "size bound for non-abstract operation arguments"),
    ("base-count", CheckBudget.base_count, "values per non-abstract argument"),
    ("alpha-nodes", CheckBudget.alpha_nodes, "size bound when drawing abstract arguments from a predicate"),
    ("alpha-count", CheckBudget.alpha_count, "values scanned when drawing abstract arguments"),
    ("per-op", CheckBudget.per_op, "argument tuples tried per operation"),
    ("fn-depth", FnGrammar.depth, "term depth of enumerated client functions"),
    ("fn-count", FnGrammar.max_count, "client functions per function type"),
    ("synth-size", 40, "largest candidate invariant, in AST nodes"),
    ("fuel", DEFAULT_FUEL, "evaluation steps per call"),
)


def corpus_dir() -> str:
    return str(resources.files("repinv") / "corpus")


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _common(p: argparse.ArgumentParser, repeat_default: int) -> None:
    p.add_argument("--timeout", type=float, default=1800.0, help="seconds per run (default 1800)")
    p.add_argument("--repeat", type=_positive, default=repeat_default, help=f"runs per benchmark (default {repeat_default})")
    p.add_argument("--no-synth-cache", action="store_true", help="disable reuse of earlier synthesis results")
    p.add_argument("--no-cexlist-cache", action="store_true", help="reset negatives on every new positive")
    p.add_argument("--ho", action="store_true", default=None, help="allow operations over functions on the abstract type")
    p.add_argument("--debug-rank", action="store_true", help="assert that the example-set rank decreases")
    p.add_argument("--csv", metavar="PATH", help="write statistics as CSV")
    for name, default, text in BUDGET_FLAGS:
        p.add_argument(f"--budget-{name}", type=_positive, default=default, help=f"{text} (default {default})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repinv", description="Infer sufficient representation invariants of modules.")
    sub = p.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("infer", help="infer an invariant for one benchmark file")
    pi.add_argument("file")
    pi.add_argument("--mode", choices=MODES, default="hanoi")
    _common(pi, 1)

    pb = sub.add_parser("bench", help="run a benchmark sweep and emit CSV")
    pb.add_argument("paths", nargs="*", help="files or directories (default: bundled corpus)")
    pb.add_argument("--mode", action="append", choices=MODES, help="mode to run (repeatable; default hanoi)")
    pb.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    _common(pb, 10)

    pc = sub.add_parser("check", help="check a hand-written invariant")
    pc.add_argument("file")
    pc.add_argument("invariant", help="object-language function, e.g. 'fun (s : t) -> true'")
    _common(pc, 1)
    return p


def options_from(args) -> Options:
    b = lambda n: getattr(args, "budget_" + n.replace("-", "_"))  # noqa: E731
    return Options(
        timeout=args.timeout,
        synth_cache=not args.no_synth_cache,
        cexlist_cache=not args.no_cexlist_cache,
        debug_rank=args.debug_rank,
        single_budget=VerifBudget(b("single-nodes"), b("single-per"), b("single-total")),
        multi_budget=VerifBudget(b("multi-nodes"), b("multi-per"), b("multi-total")),
        check_budget=CheckBudget(
            base_nodes=b("base-nodes"),
            base_count=b("base-count"),
            alpha_nodes=b("alpha-nodes"),
            alpha_count=b("alpha-count"),
            per_op=b("per-op"),
            grammar=FnGrammar(depth=b("fn-depth"), max_count=b("fn-count")),
        ),
        synth_max_size=b("synth-size"),
    )


def flags_of(args) -> tuple[str, ...]:
    out = []
    if args.no_synth_cache:
        out.append("no-synth-cache")
    if args.no_cexlist_cache:
        out.append("no-cexlist-cache")
    if args.ho:
        out.append("ho")
    return tuple(out)


def _load(path: str, args):
    return load(path, higher_order=args.ho, fuel=args.budget_fuel)


def write_csv(rows: list[dict], path: str | None, out=None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(format_row(row))
    if path is None or path == "-":
        (out or sys.stdout).write(buf.getvalue())
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


# ---------------------------------------------------------------- infer


def cmd_infer(args, out=sys.stdout, err=sys.stderr) -> int:
    try:
        program = _load(args.file, args)
    except DiagnosticError as e:
        err.write(e.render(args.file) + "\n")
        return EXIT_USAGE
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    opts = options_from(args)
    runs: list[RunStats] = []
    outcome = None
    for _ in range(args.repeat):
        try:
            outcome = infer(program, args.mode, opts, flags=flags_of(args))
        except UnsupportedMode as e:
            err.write(f"UnsupportedMode: {e}\n")
            return EXIT_USAGE
        runs.append(outcome.stats)
    report(outcome, program, out)
    if args.csv:
        write_csv([average_rows(runs)], args.csv, out)
    return EXIT[outcome.kind]


def report(outcome, program, out) -> None:
    dts = program.dts
    if outcome.kind == INVARIANT:
        out.write(pretty_expr(outcome.invariant.expr) + "\n")
    elif outcome.kind == SPEC_VIOLATION:
        vals = ", ".join(show(v, dts) for v in outcome.violation) or "(no abstract values)"
        out.write(f"Counterexample: {vals}\n")
        for line in outcome.replays:
            out.write(f"  {line}\n")
    elif outcome.kind == REJECTED:
        out.write(f"Rejected: {pretty_expr(outcome.invariant.expr)}\n")
    else:
        out.write(f"{outcome.kind}: {outcome.message}\n")


# ---------------------------------------------------------------- bench


def bench_files(paths: list[str]) -> list[str]:
    if not paths:
        paths = [corpus_dir()]
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(os.path.join(p, f) for f in sorted(os.listdir(p)) if f.endswith(".inv"))
        else:
            files.append(p)
    return files


def _bench_one(task) -> dict:
    path, mode, args = task
    name = os.path.splitext(os.path.basename(path))[0]
    blank = {k: "" for k in CSV_HEADER}
    blank.update(Name=name, Mode=mode)
    try:
        program = _load(path, args)
    except (DiagnosticError, OSError) as e:
        blank["Outcome"] = "Error: " + str(e).splitlines()[0] if str(e) else "Error"
        return blank
    opts = options_from(args)
    runs = []
    for _ in range(args.repeat):
        try:
            o = infer(program, mode, opts, flags=flags_of(args))
        except UnsupportedMode:
            blank["Outcome"] = "UnsupportedMode"
            return blank
        except Exception as e:  # a single failing benchmark must not abort the sweep
            blank["Outcome"] = f"Error: {type(e).__name__}"
            return blank
        runs.append(o.stats)
    return average_rows(runs)


def cmd_bench(args, out=sys.stdout, err=sys.stderr) -> int:
    modes = args.mode or ["hanoi"]
    tasks = [(f, m, args) for f in bench_files(args.paths) for m in modes]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    write_csv(rows, args.csv, out)
    return 0


# ---------------------------------------------------------------- check


def cmd_check(args, out=sys.stdout, err=sys.stderr) -> int:
    try:
        program = _load(args.file, args)
        expr = program.parse_predicate(args.invariant)
    except DiagnosticError as e:
        err.write(e.render(args.file) + "\n")
        return EXIT_USAGE
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    engine = Engine(program, options_from(args))
    pred = make_predicate(program, expr)
    suff = engine.sufficiency.check(pred)
    if not suff.valid:
        vals = ", ".join(show(v, program.dts) for v in suff.counterexample)
        out.write(f"not sufficient: the specification fails on {vals}\n")
        return 2
    full = engine.checker.check(pred, pred)
    if not full.valid:
        out.write(f"not inductive: {full.witness.describe(program.dts)} = {show(full.value, program.dts)} is rejected\n")
        return 2
    base = engine.closed_positives((), pred)
    if not base.valid:
        out.write(f"rejects a constant: {show(base.value, program.dts)}\n")
        return 2
    out.write("ok\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    handler = {"infer": cmd_infer, "bench": cmd_bench, "check": cmd_check}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
