"""Command line: ``run``, ``verify`` and ``replay``.

Exit status is 0 exactly when every assertion of the command passed.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from . import suites
from .adversaries import (
    AdaptiveMatchedDeleter,
    AdaptiveSparsifierEraser,
    RandomOblivious,
    SlidingWindow,
)
from .errors import DynMatchError
from .framework import FrameworkConfig, StaticMatcherKind, WorkMode
from .graph import read_stream
from .harness import ExperimentConfig, run_experiment
from .sparsifier import SampleCountPolicy


def _adversary(args: argparse.Namespace):
    if args.adversary == "random":
        return RandomOblivious(args.p_insert, args.vertex_sampler)
    if args.adversary == "window":
        return SlidingWindow(args.window)
    if args.adversary == "matched":
        return AdaptiveMatchedDeleter(args.refill_rate)
    return AdaptiveSparsifierEraser(args.refill_rate)


def _framework(args: argparse.Namespace) -> FrameworkConfig:
    return FrameworkConfig(
        eps=args.eps,
        d=args.d,
        gamma=args.gamma,
        policy=SampleCountPolicy(args.policy),
        work_mode=WorkMode(args.work_mode),
        static_matcher=StaticMatcherKind(args.matcher),
        seed=args.seed,
    )


def _add_algo_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=("framework", "det"), default="framework")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--d", type=float, default=1199.0)
    p.add_argument("--gamma", type=int, choices=(2, 3), default=2)
    p.add_argument("--policy", choices=("alg1", "proof"), default="proof")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--work-mode", choices=("batch", "stepped"), default="batch")
    p.add_argument("--matcher", choices=("exact", "bounded"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-period", type=int, default=None)
    p.add_argument("--record-wall-time", action="store_true", help="fill the wall_ns column (not reproducible)")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write per-update metrics CSV")
    _add_algo_flags(run)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--updates", type=int, required=True)
    run.add_argument("--adversary", choices=("random", "window", "matched", "eraser"), default="random")
    run.add_argument("--p-insert", type=float, default=0.5)
    run.add_argument("--vertex-sampler", choices=("uniform", "planted"), default="uniform")
    run.add_argument("--window", type=int, default=1000)
    run.add_argument("--refill-rate", type=float, default=0.6)

    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("--suite", choices=("coloring", "probs", "kernel", "fractional", "endtoend"), required=True)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--full", action="store_true", help="use acceptance-size parameters (endtoend takes about an hour)")

    rep = sub.add_parser("replay", help="run an algorithm over a stream file (a/d/q lines)")
    _add_algo_flags(rep)
    rep.add_argument("--stream", required=True)
    rep.add_argument("--n", type=int, default=None, help="vertex count (default: largest index + 1)")
    return parser


def _write(cfg: ExperimentConfig, out: str):
    if out == "-":
        return run_experiment(cfg, sys.stdout)
    cfg.out = out
    return run_experiment(cfg)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig(
        n=args.n,
        update_count=args.updates,
        seed=args.seed,
        framework=_framework(args),
        adversary=_adversary(args),
        algo=args.algo,
        K=args.K,
        oracle_period=args.oracle_period,
        record_wall_time=args.record_wall_time,
    )
    res = _write(cfg, args.out)
    print(
        f"updates={res.updates} oracle_points={res.oracle_points} max_ratio={res.max_ratio:.4f} "
        f"mean_ops={res.mean_ops:.1f} ok={res.ok}",
        file=sys.stderr,
    )
    return 0 if res.ok else 1


def cmd_replay(args: argparse.Namespace) -> int:
    with open(args.stream) as fh:
        events = list(read_stream(fh))
    n = args.n
    if n is None:
        n = 1 + max((max(ev.edge) for ev in events if ev.edge is not None), default=1)
    cfg = ExperimentConfig(
        n=max(n, 2),
        update_count=len(events),
        seed=args.seed,
        framework=_framework(args),
        algo=args.algo,
        K=args.K,
        oracle_period=args.oracle_period,
        record_wall_time=args.record_wall_time,
        stream=events,
    )
    res = _write(cfg, args.out)
    print(f"events={res.updates} oracle_points={res.oracle_points} max_ratio={res.max_ratio:.4f} ok={res.ok}", file=sys.stderr)
    return 0 if res.ok else 1


def _suite_results(name: str, full: bool, seed: int) -> list[suites.CriterionResult]:
    if name == "coloring":
        return [suites.coloring_suite(seed=seed) if full else suites.coloring_suite(sequences=10, ops=20_000, seed=seed)]
    if name == "probs":
        trials = 100_000 if full else 20_000
        return list(suites.sampling_suite(trials=trials, seed=seed))
    if name == "fractional":
        setup = suites.SamplingSetup.build(seed=seed)
        trials = 100_000 if full else 20_000
        return [
            suites.fractional_sparsifier_suite(trials=trials, seed=seed, setup=setup),
            suites.fractional_matcher_suite(updates=3000 if full else 500, seed=seed),
        ]
    if name == "kernel":
        whp_res, whp = suites.kernel_suite_whp(seed=seed)
        return [
            whp_res,
            suites.kernel_suite_trimmed(seed=seed),
            suites.kernel_matching_suite(trials=1000 if full else 200, seed=seed, whp=whp),
        ]
    out = []
    baseline = []
    seeds, updates = (20, 50_000) if full else (2, 5_000)
    for adversary in ("matched", "eraser"):
        for n in (100, 300):
            res, runs = suites.adaptive_suite(n, adversary, seeds=seeds, updates=updates)
            out.append(res)
            baseline.append(runs[0])
    res8, runs8 = suites.det_suite(seeds=3 if full else 1, updates=20_000 if full else 4_000)
    res9, runs9 = suites.scaling_suite(sizes=(128, 256, 512, 1024) if full else (64, 128, 256))
    out += [res8, res9, suites.determinism_suite(baseline + runs8 + runs9)]
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    results = _suite_results(args.suite, args.full, args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "replay":
            return cmd_replay(args)
        return cmd_verify(args)
    except (DynMatchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
