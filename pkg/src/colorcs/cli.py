"""Command line front end.

Selects contexts and cases, runs the identity suite, and emits a text
or structured report.  The structured form is a versioned JSON schema
whose content is deterministic for a fixed configuration and seed,
timing fields aside.

Exit codes: 0 every selected case matched the expected manifest;
1 at least one deviation (with a diff summary); 2 usage error;
3 a term budget was exceeded (the offending cases are named).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources

from .errors import CapExceededError, UnknownNameError
from .models import ModelWorkspace
from .verify import (
    CASES,
    DEFAULT_CONTEXTS,
    DEFAULT_SEED,
    RunConfig,
    case_ids,
    compare_to_manifest,
    run_suite,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_DEVIATION = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _build_parser():
    p = argparse.ArgumentParser(
        prog="colorcs",
        description="verify the operator identities of the graded "
                    "Calogero-Sutherland models",
    )
    ctx = p.add_argument_group("context selection")
    ctx.add_argument("--n", type=int, help="number of even colors")
    ctx.add_argument("--m", type=int, help="number of odd colors")
    ctx.add_argument("--N", type=int, help="number of sites")
    ctx.add_argument(
        "--contexts", default=None,
        help="semicolon-separated n,m,N triples, or 'default' for "
             "2,0,2;1,1,2;2,1,2;1,1,3 (ignored when --n/--m/--N are given)")

    run = p.add_argument_group("run selection")
    run.add_argument("--cases", default="all",
                     help="comma-separated case ids, or 'all'")
    run.add_argument("--list-cases", action="store_true",
                     help="print the case catalog and exit")
    run.add_argument("--lambda", dest="lam", default="symbolic",
                     help="coupling: 'symbolic' or a rational like 3/2")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help="seed for sampled quantifiers and oracle picks")
    run.add_argument("--oracle-degree", type=int, default=None,
                     help="override the oracle probe degree")
    run.add_argument("--max-spin", type=int, default=3,
                     help="spin cap for the higher-spin cases (>= 1)")
    run.add_argument("--max-degree", type=int, default=2,
                     help="degree cap for the higher-spin cases (>= 0)")
    run.add_argument("--term-budget", type=int, default=None,
                     help="abort any product growing past this many terms")
    run.add_argument("--workers", type=int, default=None,
                     help="context-parallel worker count "
                          "(default $COLORCS_WORKERS or 1)")

    out = p.add_argument_group("output")
    out.add_argument("--format", choices=("text", "structured"),
                     default="text")
    out.add_argument("--output", default=None,
                     help="write the report here instead of stdout")
    out.add_argument("--dump-residual", action="store_true",
                     help="include residual terms of failing instances")
    out.add_argument("--manifest", default=None,
                     help="expected-verdict manifest path "
                          "(default: the packaged one)")
    out.add_argument("--print-operator", metavar="NAME", default=None,
                     help="print a named operator (e.g. 'H_s', 'T[1,1,2]') "
                          "at --n/--m/--N and exit")
    return p


def _parse_contexts(args, parser):
    explicit = [v is not None for v in (args.n, args.m, args.N)]
    if any(explicit):
        if not all(explicit):
            parser.error("--n, --m and --N must be given together")
        return ((args.n, args.m, args.N),)
    if args.contexts is None or args.contexts == "default":
        return DEFAULT_CONTEXTS
    out = []
    for chunk in args.contexts.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 3:
            parser.error(f"bad context {chunk!r}, expected n,m,N")
        try:
            out.append(tuple(int(x) for x in parts))
        except ValueError:
            parser.error(f"bad context {chunk!r}, expected integers")
    if not out:
        parser.error("no contexts selected")
    return tuple(out)


def _validate_contexts(contexts, parser):
    for n, m, N in contexts:
        if n < 0 or m < 0 or n + m < 1:
            parser.error(f"invalid colors n={n}, m={m}: need n+m >= 1")
        if N < 1:
            parser.error(f"invalid site count N={N}")


def _parse_cases(arg, parser):
    if arg == "all":
        return None
    picked = tuple(dict.fromkeys(
        c.strip() for c in arg.split(",") if c.strip()))
    known = set(case_ids())
    bad = [c for c in picked if c not in known]
    if bad:
        parser.error(f"unknown case ids: {', '.join(bad)}")
    if not picked:
        parser.error("no cases selected")
    return picked


def _parse_lambda(arg, parser):
    if arg == "symbolic":
        return None
    try:
        return Fraction(arg)
    except (ValueError, ZeroDivisionError):
        parser.error(f"bad coupling {arg!r}: expected a rational or "
                     f"'symbolic'")


def _workers(args, parser):
    if args.workers is None:
        raw = os.environ.get("COLORCS_WORKERS", "1")
        try:
            args.workers = int(raw)
        except ValueError:
            parser.error(f"bad COLORCS_WORKERS value {raw!r}")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    return args.workers


def load_manifest(path=None):
    if path is None:
        ref = resources.files("colorcs").joinpath(
            "data/expected_manifest.json")
        return json.loads(ref.read_text())
    with open(path) as fh:
        return json.load(fh)


def _print_operator(args, parser):
    if args.n is None or args.m is None or args.N is None:
        parser.error("--print-operator needs --n, --m and --N")
    _validate_contexts(((args.n, args.m, args.N),), parser)
    ws = ModelWorkspace(args.n, args.m, args.N)
    try:
        op = ws.build(args.print_operator)
    except UnknownNameError as exc:
        parser.error(str(exc))
    except (ValueError, CapExceededError) as exc:
        parser.error(f"cannot build {args.print_operator!r}: {exc}")
    print(op.to_str())
    return EXIT_OK


def _text_report(reports, deviations, cfg):
    lines = []
    header = (f"{'case':<18} {'suite':<14} {'context':<9} {'verdict':<17} "
              f"{'inst':>5} {'fail':>5} {'resid':>6} {'ms':>7}")
    lines.append(header)
    lines.append("-" * len(header))
    for r in reports:
        ctx = f"({r.n},{r.m},{r.N})"
        lines.append(
            f"{r.id:<18} {r.suite:<14} {ctx:<9} {r.verdict:<17} "
            f"{r.instances:>5} {r.failed:>5} {r.residual_term_count:>6} "
            f"{r.millis:>7}")
        if not r.oracle_agrees:
            lines.append(f"  !! double-entry oracle disagrees: {r.note}")
        elif r.note:
            lines.append(f"  note: {r.note}")
        for entry in r.residuals:
            lines.append(f"  residual at {entry['instance']}:")
            for t in entry["terms"][:8]:
                word = "".join(f"e({s},{a},{b})" for s, a, b in t["word"])
                lines.append(f"    ({t['num']})/({t['den']}) {word} "
                             f"D{t['deriv']}")
            if len(entry["terms"]) > 8:
                lines.append(f"    ... {len(entry['terms']) - 8} more terms")
    counts = {}
    for r in reports:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    lines.append("")
    lines.append(f"{len(reports)} reports: {summary}; "
                 f"seed {cfg.seed}, coupling "
                 f"{'symbolic' if cfg.lam is None else cfg.lam}")
    if deviations:
        lines.append("")
        lines.append("deviations from the expected manifest:")
        lines.extend(f"  {d}" for d in deviations)
    else:
        lines.append("all verdicts match the expected manifest")
    return "\n".join(lines) + "\n"


def _structured_report(reports, deviations, cfg, contexts):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "coupling": "symbolic" if cfg.lam is None else str(cfg.lam),
        "contexts": [list(c) for c in contexts],
        "cases": sorted(cfg.cases) if cfg.cases else sorted(case_ids()),
        "max_spin": cfg.max_spin,
        "max_degree": cfg.max_degree,
        "reports": [r.as_dict() for r in reports],
        "deviations": deviations,
    }
    return json.dumps(doc, indent=2) + "\n"


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.list_cases:
        for cid in sorted(case_ids()):
            case = CASES[cid]
            print(f"{cid:<18} {case.suite:<14} {case.title}")
        return EXIT_OK

    if args.print_operator is not None:
        return _print_operator(args, parser)

    contexts = _parse_contexts(args, parser)
    _validate_contexts(contexts, parser)
    cases = _parse_cases(args.cases, parser)
    lam = _parse_lambda(args.lam, parser)
    workers = _workers(args, parser)
    if args.max_spin < 1:
        parser.error("--max-spin must be >= 1")
    if args.max_degree < 0:
        parser.error("--max-degree must be >= 0")
    if args.term_budget is not None and args.term_budget < 1:
        parser.error("--term-budget must be >= 1")
    if args.oracle_degree is not None and args.oracle_degree < 1:
        parser.error("--oracle-degree must be >= 1")

    try:
        manifest = load_manifest(args.manifest)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read manifest: {exc}")

    cfg = RunConfig(
        contexts=contexts, cases=cases, lam=lam, seed=args.seed,
        oracle_degree=args.oracle_degree, max_spin=args.max_spin,
        max_degree=args.max_degree, term_budget=args.term_budget,
        workers=workers, dump_residual=args.dump_residual,
    )
    reports = run_suite(cfg)
    deviations = compare_to_manifest(reports, manifest, cfg)

    if args.format == "structured":
        payload = _structured_report(reports, deviations, cfg, contexts)
    else:
        payload = _text_report(reports, deviations, cfg)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)

    truncated = sorted({r.id for r in reports if r.verdict == "truncated"})
    if truncated:
        print(f"term budget exceeded in: {', '.join(truncated)}",
              file=sys.stderr)
        return EXIT_CAP
    if deviations:
        print(f"{len(deviations)} deviation(s) from the expected manifest",
              file=sys.stderr)
        return EXIT_DEVIATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
