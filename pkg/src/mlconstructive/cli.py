"""Command-line entry point.

Subcommands: solve, benchmark, stats, gen, render.  Flags take precedence
over the MLC_WEIGHTS / MLC_MANIFEST environment variables, which take
precedence over built-in defaults.  Exit codes: 2 parse error, 3 missing
weights or optimal tour, 4 infeasible internal state.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, network, render, solvers
from .candidates import build_candidate_lists
from .instance import (
    TsplibError,
    parse_opt_tour,
    parse_tsplib,
    percentage_error,
    to_tsplib,
    write_tour,
)
from .policies import DEFAULT_THRESHOLD
from .weights import WeightFormatError, load_bundle_file

EXIT_PARSE_ERROR = 2
EXIT_MISSING_INPUT = 3
EXIT_INTERNAL = 4


def _load_instance(path):
    try:
        return parse_tsplib(Path(path).read_text())
    except (OSError, TsplibError) as exc:
        print(f"error: cannot read instance {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR)


def _solver_kwargs(args):
    kwargs = dict(seed=args.seed, k=args.k, m=args.m, threshold=args.threshold)
    if args.policy == "ml-c":
        weights = args.weights or os.environ.get("MLC_WEIGHTS")
        if not weights:
            print("error: ml-c needs --weights (or MLC_WEIGHTS)", file=sys.stderr)
            raise SystemExit(EXIT_MISSING_INPUT)
        try:
            kwargs["bundle"] = network.load_weights(Path(weights).read_bytes())
        except (OSError, WeightFormatError) as exc:
            print(f"error: cannot load weights {weights}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_MISSING_INPUT)
    if args.policy == "ml-sc":
        if not args.opt_tour:
            print("error: ml-sc needs --opt-tour", file=sys.stderr)
            raise SystemExit(EXIT_MISSING_INPUT)
    return kwargs


def cmd_solve(args):
    inst = _load_instance(args.instance)
    kwargs = _solver_kwargs(args)
    if args.policy == "ml-sc":
        try:
            order = parse_opt_tour(Path(args.opt_tour).read_text())
        except (OSError, TsplibError) as exc:
            print(f"error: cannot read opt tour: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_MISSING_INPUT)
        kwargs["opt_tours"] = {inst.name: order}
    try:
        solve = solvers.make_solver(args.policy, **kwargs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR)
    t0 = time.perf_counter()
    try:
        result = solve(inst)
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INTERNAL)
    elapsed = time.perf_counter() - t0
    if args.output:
        Path(args.output).write_text(write_tour(inst.name, result.order))
    line = f"{inst.name} policy={args.policy} length={result.length}"
    optimum = _lookup_optimum(args, inst.name)
    if optimum:
        line += f" gap={percentage_error(result.length, optimum):.3f}"
    line += f" seconds={elapsed:.3f}"
    print(line)


def _lookup_optimum(args, name):
    manifest = getattr(args, "manifest", None) or os.environ.get("MLC_MANIFEST")
    if manifest and Path(manifest).exists():
        return analysis.load_optima_table(manifest).get(name)
    return None


def cmd_benchmark(args):
    manifest = args.manifest or os.environ.get("MLC_MANIFEST")
    if not manifest:
        print("error: benchmark needs --manifest (or MLC_MANIFEST)", file=sys.stderr)
        raise SystemExit(EXIT_MISSING_INPUT)
    optima = analysis.load_optima_table(manifest)
    instances = [_load_instance(p) for p in args.instances]
    policies = {}
    for name in args.policies.split(","):
        name = name.strip()
        args.policy = name
        policies[name] = solvers.make_solver(name, **_solver_kwargs(args))
    rows = analysis.run_benchmark(instances, policies, optima)
    csv = analysis.benchmark_csv(rows)
    if args.output:
        Path(args.output).write_text(csv)
    else:
        print(csv, end="")
    summary = analysis.benchmark_summary(rows)
    print(json.dumps(summary, indent=2))


def cmd_stats(args):
    ds = analysis.generate_dataset(args.count, args.n_min, args.n_max, args.seed)
    pdf, rate = analysis.optimal_position_pdf(ds)
    lines = ["position,pdf,optimal_rate"]
    for b in sorted(pdf):
        label = str(b) if b <= 5 else ">5"
        lines.append(f"{label},{pdf[b]:.4f},{rate[b]:.4f}")
    out = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        print(out, end="")


def cmd_gen(args):
    ds = analysis.generate_dataset(args.count, args.n, args.n,
                                   args.seed, exact=args.exact)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for inst, opt in zip(ds.instances, ds.optima):
        (outdir / f"{inst.name}.tsp").write_text(to_tsplib(inst))
        (outdir / f"{inst.name}.tour").write_text(write_tour(inst.name, opt.order))
    table = "\n".join(
        json.dumps({"name": i.name, "optimum": o.length})
        for i, o in zip(ds.instances, ds.optima)
    )
    (outdir / "optima.jsonl").write_text(table + "\n")
    print(f"wrote {len(ds.instances)} instances to {outdir}")


def cmd_render(args):
    inst = _load_instance(args.instance)
    try:
        i, j = (int(v) for v in args.edge.split(","))
    except ValueError:
        print("error: --edge must be i,j", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR)
    cls = build_candidate_lists(inst, args.k)
    img = render.render_context(inst, cls, None, i, j)
    out = Path(args.output)
    if args.format == "ppm":
        out.write_bytes(render.to_ppm(img))
    else:
        out.write_bytes(render.to_blob(img))
    print(f"wrote {out} ({args.format})")


def build_parser():
    p = argparse.ArgumentParser(prog="mlconstructive")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--m", type=int, default=2)
        sp.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--weights", default=None)

    sp = sub.add_parser("solve", help="construct one tour")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--policy", required=True)
    sp.add_argument("--opt-tour", default=None)
    sp.add_argument("--output", default=None)
    sp.add_argument("--manifest", default=None)
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("benchmark", help="gap matrix over instances x policies")
    sp.add_argument("--instances", nargs="+", required=True)
    sp.add_argument("--policies", required=True)
    sp.add_argument("--manifest", default=None)
    sp.add_argument("--output", default=None)
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_benchmark, opt_tour=None)

    sp = sub.add_parser("stats", help="optimal-edge position statistics")
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--n-min", type=int, default=12)
    sp.add_argument("--n-max", type=int, default=18)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("gen", help="generate instances with reference optima")
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--output", default="generated")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("render", help="dump one context image")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--edge", required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--format", choices=("ppm", "blob"), default="blob")
    sp.add_argument("--output", default="context.out")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
