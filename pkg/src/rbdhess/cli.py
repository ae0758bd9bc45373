"""Command-line entry point: ``gen``, ``verify`` and ``bench``.

Exit codes: 0 success, 1 a tolerance breach, 2 bad input or flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import verify as vf
from .derivatives_fo import id_fo_derivatives
from .derivatives_so import id_so_derivatives
from .dynamics import rnea
from .model import (
    JOINT_KINDS,
    KinematicModel,
    ModelError,
    branched_chain,
    dump_model,
    load_model_file,
    quadruped,
    random_state,
    serial_chain,
)

ALGORITHMS = {"rnea": rnea, "fo": id_fo_derivatives, "so": id_so_derivatives}
CSV_HEADER = ("algorithm", "chain", "bf", "joint", "N", "n", "d", "median_ns", "p10_ns", "p90_ns", "seed")


class UsageError(Exception):
    """Bad flags or parameters; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _joint_arg(text: str):
    kinds = tuple(k.strip() for k in text.split(","))
    for k in kinds:
        if k not in JOINT_KINDS:
            raise UsageError(f"unknown joint type {k!r} (choose from {', '.join(JOINT_KINDS)})")
    return kinds[0] if len(kinds) == 1 else kinds


def _joint_label(joint) -> str:
    return joint if isinstance(joint, str) else ",".join(joint)


def _check_size(N: int, bf: int | None = None):
    if N < 1:
        raise UsageError("N must be ≥ 1")
    if bf is not None and bf < 2:
        raise UsageError("bf must be ≥ 2")


def _add_generator_flags(p, required: bool):
    shape = p.add_mutually_exclusive_group(required=required)
    shape.add_argument("--serial", type=int, metavar="N", help="serial chain of N bodies")
    shape.add_argument("--branched", type=int, metavar="N", help="complete bf-ary tree of N bodies")
    shape.add_argument("--quadruped", action="store_true", help="18-DoF floating-base quadruped")
    p.add_argument("--bf", type=int, default=2, help="branching factor for --branched")
    p.add_argument("--joint", default="revolute", help="joint type, or a comma-separated cycle")
    p.add_argument("--floating", action="store_true", help="replace the root joint by a free joint")
    p.add_argument("--seed", type=int, default=0)


def _generated(args) -> KinematicModel | None:
    joint = _joint_arg(args.joint)
    if args.quadruped:
        return quadruped(args.seed)
    if args.serial is not None:
        _check_size(args.serial)
        return serial_chain(args.serial, joint, args.seed, args.floating)
    if args.branched is not None:
        _check_size(args.branched, args.bf)
        return branched_chain(args.branched, args.bf, joint, args.seed, args.floating)
    return None


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    model = _generated(args)
    text = dump_model(model)
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return 0
    try:
        with open(args.output, "w") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return 2
    print(f"wrote {args.output} ({model.N} bodies, {model.n} DoFs)", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# verify


def _models_for_verify(args) -> list[KinematicModel]:
    models = [load_model_file(path) for path in args.models]
    generated = _generated(args)
    if generated is not None:
        models.append(generated)
    if not models:
        raise UsageError("give a model file or generator flags (--serial/--branched/--quadruped)")
    return models


def _parse_checks(text: str | None):
    if text is None:
        return vf.CHECKS
    checks = tuple(c.strip() for c in text.split(","))
    for c in checks:
        if c not in vf.CHECKS:
            raise UsageError(f"unknown check {c!r} (choose from {', '.join(vf.CHECKS)})")
    return checks


def _report(rows, fmt: str, out):
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("model", "check", "max_rel_error", "tolerance", "passed"))
        for model_name, r in rows:
            w.writerow((model_name, r.name, f"{r.error:.3e}", f"{r.tolerance:.0e}", int(r.passed)))
        return
    width = max((len(r.name) for _, r in rows), default=10)
    for model_name, r in rows:
        status = "ok" if r.passed else "FAIL"
        out.write(f"{model_name:<16} {r.name:<{width}}  {r.error:10.3e} <= {r.tolerance:7.0e}  {status}\n")


def cmd_verify(args) -> int:
    checks = _parse_checks(args.checks)
    models = _models_for_verify(args)
    rows = []
    if "identities-m" in checks:
        rows += [("-", r) for r in vf.verify_identities_m(args.instances, args.seed)]
    for model in models:
        results = []
        for s in range(args.states):
            state = random_state(model, args.seed + s)
            results += vf.verify_state(model, state, checks)
        rows += [(model.name, r) for r in vf.worst_by_check(results)]
    _report(rows, args.format, sys.stdout)
    failed = [f"{name}:{r.name}" for name, r in rows if not r.passed]
    if failed:
        print("tolerance breached: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# bench


@dataclass
class BenchConfig:
    chain: str = "serial"
    bf: int = 0
    N_list: list[int] = field(default_factory=lambda: [8, 16, 32, 64])
    joint: object = "revolute"
    trials: int = 100
    warmup: int = 10
    seed: int = 0
    output: str | None = None
    algorithms: tuple[str, ...] = ("rnea", "fo", "so")

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be ≥ 1")
        if self.warmup < 0:
            raise UsageError("warmup must be ≥ 0")
        if not self.N_list:
            raise UsageError("N list must be non-empty")
        for N in self.N_list:
            _check_size(N, self.bf if self.chain == "branched" else None)
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {a!r}")

    def model(self, N: int) -> KinematicModel:
        if self.chain == "serial":
            return serial_chain(N, self.joint, self.seed)
        return branched_chain(N, self.bf, self.joint, self.seed)


@dataclass
class BenchRecord:
    algorithm: str
    chain: str
    bf: int
    joint: str
    N: int
    n: int
    d: int
    median_ns: int
    p10_ns: int
    p90_ns: int
    seed: int

    def row(self):
        return tuple(getattr(self, k) for k in CSV_HEADER)


def time_call(fn, trials: int, warmup: int):
    """Nanosecond timings of ``trials`` calls after ``warmup`` untimed ones."""
    for _ in range(warmup):
        fn()
    out = np.empty(trials, dtype=np.int64)
    clock = time.perf_counter_ns
    for t in range(trials):
        start = clock()
        fn()
        out[t] = clock() - start
    return out


def run_bench(cfg: BenchConfig) -> list[BenchRecord]:
    records = []
    for N in sorted(cfg.N_list):
        model = cfg.model(N)
        state = random_state(model, cfg.seed)
        for alg in cfg.algorithms:
            fn = ALGORITHMS[alg]
            ns = time_call(lambda: fn(model, state), cfg.trials, cfg.warmup)
            p10, med, p90 = (int(round(x)) for x in np.percentile(ns, [10, 50, 90]))
            records.append(BenchRecord(
                alg, cfg.chain, cfg.bf, _joint_label(cfg.joint), N, model.n, model.depth,
                med, p10, p90, cfg.seed,
            ))
    order = {a: k for k, a in enumerate(ALGORITHMS)}
    records.sort(key=lambda r: (order[r.algorithm], r.N))
    return records


def write_csv(records, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())


def read_csv(text: str) -> list[BenchRecord]:
    ints = {"bf", "N", "n", "d", "median_ns", "p10_ns", "p90_ns", "seed"}
    rows = csv.DictReader(io.StringIO(text))
    return [BenchRecord(**{k: int(v) if k in ints else v for k, v in row.items()}) for row in rows]


def scaling_exponent(sizes, times) -> float:
    """Least-squares slope of ``log(times)`` against ``log(sizes)``."""
    return float(np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(times, float)), 1)[0])


def _bench_text(records, out):
    out.write(f"{'algorithm':<6} {'N':>4} {'n':>4} {'d':>4} {'median_us':>11} {'p10_us':>9} {'p90_us':>9}\n")
    for r in records:
        out.write(
            f"{r.algorithm:<6} {r.N:>4} {r.n:>4} {r.d:>4} "
            f"{r.median_ns / 1e3:11.1f} {r.p10_ns / 1e3:9.1f} {r.p90_ns / 1e3:9.1f}\n"
        )


def cmd_bench(args) -> int:
    if args.chain == "serial":
        bf = 0
    else:
        bf = args.bf
    cfg = BenchConfig(
        chain=args.chain, bf=bf, N_list=args.N, joint=_joint_arg(args.joint),
        trials=args.trials, warmup=args.warmup, seed=args.seed, output=args.output,
        algorithms=tuple(a.strip() for a in args.algorithms.split(",")),
    )
    records = run_bench(cfg)
    buf = io.StringIO()
    if args.format == "csv":
        write_csv(records, buf)
    else:
        _bench_text(records, buf)
    if cfg.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
        return 0
    try:
        with open(cfg.output, "w") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rbdhess", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a generated model as JSON")
    _add_generator_flags(gen, required=True)
    gen.add_argument("-o", "--output", help="output path (stdout if omitted)")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="check derivatives against the oracles")
    ver.add_argument("models", nargs="*", help="model JSON files")
    _add_generator_flags(ver, required=False)
    ver.add_argument("--checks", help=f"comma-separated subset of: {', '.join(vf.CHECKS)}")
    ver.add_argument("--states", type=int, default=3, help="random states per model")
    ver.add_argument("--instances", type=int, default=200, help="random instances per M-identity")
    ver.add_argument("--format", choices=("text", "csv"), default="text")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="time rnea, fo and so over a range of sizes")
    bench.add_argument("--chain", choices=("serial", "branched"), default="serial")
    bench.add_argument("--bf", type=int, default=2)
    bench.add_argument("--N", type=int, nargs="+", default=[8, 16, 32, 64])
    bench.add_argument("--joint", default="revolute")
    bench.add_argument("--trials", type=int, default=100)
    bench.add_argument("--warmup", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--algorithms", default="rnea,fo,so")
    bench.add_argument("--format", choices=("text", "csv"), default="csv")
    bench.add_argument("-o", "--output")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
