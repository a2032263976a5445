"""Command-line entry point: build-data, train, evaluate."""

from __future__ import annotations

import argparse
import json
import sys

from . import data as data_mod
from .evaluate import evaluate
from .model import ResNet10, load_records_into
from .train import TrainingDiverged, train


def cmd_build_data(args):
    samples, _ = data_mod.build_dataset(
        args.count, args.n_min, args.n_max, args.seed
    )
    data_mod.save_samples(args.output, samples)
    positives = sum(s.label for s in samples)
    print(f"wrote {len(samples)} samples ({positives} positive) to {args.output}")


def cmd_train(args):
    if args.data:
        samples = data_mod.load_samples(args.data)
        rollouts = None
        if args.rl_iters > 0:
            print("error: --rl-iters needs generated instances; use "
                  "--generate with --count/--n-min/--n-max", file=sys.stderr)
            raise SystemExit(2)
    else:
        samples, ds = data_mod.build_dataset(
            args.count, args.n_min, args.n_max, args.seed
        )
        rollouts = [(i, o.edges()) for i, o in zip(ds.instances, ds.optima)]
    try:
        state = train(
            samples, rollouts=rollouts, ce_iters=args.ce_iters,
            rl_iters=args.rl_iters, batch_size=args.batch_size, lr=args.lr,
            seed=args.seed, out_path=args.output, log_path=args.log,
        )
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1)
    print(f"trained: ce_iters={state.ce_iters_done} "
          f"rl_iters={state.rl_iters_done} "
          f"final loss1={state.loss1_history[-1]:.4f} -> {args.output}")


def cmd_evaluate(args):
    from mlconstructive.network import load_weights
    from pathlib import Path

    model = ResNet10()
    load_records_into(model, load_weights(Path(args.weights).read_bytes()))
    samples = data_mod.load_samples(args.data)
    table = evaluate(model, samples, threshold=args.threshold)
    print(json.dumps(table, indent=2))


def build_parser():
    p = argparse.ArgumentParser(prog="mlc-trainer")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("build-data", help="render a training dataset")
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--n-min", type=int, default=12)
    sp.add_argument("--n-max", type=int, default=18)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_build_data)

    sp = sub.add_parser("train", help="two-phase training run")
    sp.add_argument("--data", default=None,
                    help="pre-rendered sample directory (CE phase only)")
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--n-min", type=int, default=12)
    sp.add_argument("--n-max", type=int, default=18)
    sp.add_argument("--ce-iters", type=int, default=3000)
    sp.add_argument("--rl-iters", type=int, default=30)
    sp.add_argument("--batch-size", type=int, default=16)
    sp.add_argument("--lr", type=float, default=1e-4,
                    help="phase-B learning rate (phase A is self-contained)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--log", default=None)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_train, generate=True)

    sp = sub.add_parser("evaluate", help="held-out metric table")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
