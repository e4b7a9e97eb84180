"""Command line entry point: ``sfrf extract|optimize|predict|synth``.

Exit codes: 0 success, 2 configuration/usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from . import config as cfgmod
from .bearing import FAULT_MODES
from .masks import MaskError
from .metrics import ObjectiveEvaluator
from .moea import EvolutionError, evolve, select_best_rul
from .pipeline import FEATURE_NAMES, IndicatorTrajectory, PipelineError, buffered_matrix, compute_trajectory
from .regressor import RegressorError, fit_bagging, order_sweep_trajectory
from .signals import SignalError, load_run
from .synthetic import parse_stage_spec, synth_run, write_run

log = logging.getLogger("sfrf")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_config(args) -> cfgmod.RunConfig:
    try:
        cfg = cfgmod.load(*args.config) if args.config else cfgmod.default_config()
    except cfgmod.ConfigError as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from None
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2**64:
            raise CliError("--seed must be an unsigned 64-bit integer", EXIT_CONFIG)
        cfg.seed = args.seed
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise CliError("--threads must be >= 1", EXIT_CONFIG)
        cfg.threads = args.threads
    return cfg


def _require_seed(cfg):
    if cfg.seed is None:
        raise CliError("a seed is required: pass --seed or set [run] seed", EXIT_CONFIG)
    return cfg.seed


def _load_record(cfg, data_dir):
    try:
        return load_run(data_dir, cfg.operating)
    except (SignalError, OSError) as exc:
        raise CliError(f"data error: {exc}", EXIT_DATA) from None


def cmd_extract(cfg, data_dir, out_csv) -> int:
    record = _load_record(cfg, data_dir)
    try:
        traj = compute_trajectory(record, cfg.receptive_field, cfg.expansion, cfg.bearing, cfg.window)
    except (MaskError, PipelineError) as exc:
        raise CliError(f"data error: {exc}", EXIT_DATA) from None
    out = Path(out_csv)
    out.parent.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out)
    print(f"{record.bearing_id}: K={len(traj)} snapshots, F={traj.matrix.shape[1]} SFRFs -> {out}")
    for name, lo, hi in zip(FEATURE_NAMES, traj.matrix.min(axis=0), traj.matrix.max(axis=0)):
        print(f"  {name:8s} min={lo:.6g} max={hi:.6g}")
    return EXIT_OK


def _archive_rows(archive, maximize_smoothness):
    for ind in archive:
        rul, neg_mono, smooth = ind.objectives
        mad = -smooth if maximize_smoothness else smooth
        yield [*ind.genome.tolist(), rul, -neg_mono, mad, ind.rank, ind.crowding]


def _write_archive(path, archive, maximize_smoothness):
    with open(path, "w") as fh:
        fh.write("kappa_c,kappa_s,kappa_h,rul_mse,monotonicity,smoothness_mad,rank,crowding\n")
        for row in _archive_rows(archive, maximize_smoothness):
            *vals, rank, crowd = row
            c = "inf" if math.isinf(crowd) else repr(float(crowd))
            fh.write(",".join([repr(float(v)) for v in vals] + [str(rank), c]) + "\n")


def _optimize_one(cfg, record, out_dir: Path, suffix: str, columns=None, seed_offset=0):
    evaluator = ObjectiveEvaluator(record, cfg.surrogate, cfg.receptive_field, cfg.bearing, columns)
    ga = dataclasses.replace(cfg.ga, seed=(cfg.seed + seed_offset) % 2**64, threads=cfg.threads)
    try:
        result = evolve(evaluator, ga)
    except EvolutionError as exc:
        if exc.archive is not None:
            _write_archive(out_dir / f"archive{suffix}.partial.csv", exc.archive, cfg.maximize_smoothness)
        raise CliError(f"data error: {exc}", EXIT_DATA) from None
    _write_archive(out_dir / f"archive{suffix}.csv", result.archive, cfg.maximize_smoothness)
    with open(out_dir / f"history{suffix}.jsonl", "w") as fh:
        for entry in result.history:
            fh.write(json.dumps(entry) + "\n")
    best = select_best_rul(result.archive)
    params = cfg.receptive_field.with_kappas(*best.genome)
    rul, neg_mono, smooth = best.objectives
    fragment = cfgmod.best_member_fragment(
        params,
        best.eval_seed,
        {
            "rul_mse": rul,
            "monotonicity": -neg_mono,
            "smoothness_mad": -smooth if cfg.maximize_smoothness else smooth,
        },
    )
    (out_dir / f"best{suffix}.ini").write_text(fragment)
    print(
        f"archive{suffix}: {len(result.archive)} members after {result.generations} generations"
        f"{' (converged)' if result.converged else ''}; best RUL member kappa=({', '.join(f'{g:.4f}' for g in best.genome)})"
        f" rul_mse={rul:.6g}"
    )
    return result


def cmd_optimize(cfg, data_dir, out_dir) -> int:
    _require_seed(cfg)
    record = _load_record(cfg, data_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if len(record) < max(3, 2 * cfg.regressor.stride):
        raise CliError(f"data error: {len(record)} snapshots are too few to optimise on", EXIT_DATA)
    if cfg.per_mode:
        for j, mode in enumerate(FAULT_MODES):
            _optimize_one(cfg, record, out, f"_{mode.value}", columns=(j, j + 4), seed_offset=j)
    else:
        _optimize_one(cfg, record, out, "")
    return EXIT_OK


def cmd_predict(cfg, trajectory_csv, orders, repeats, out_dir) -> int:
    seed = _require_seed(cfg)
    try:
        traj = IndicatorTrajectory.from_csv(trajectory_csv)
    except (PipelineError, OSError) as exc:
        raise CliError(f"data error: {exc}", EXIT_DATA) from None
    if repeats < 1:
        raise CliError("--repeats must be >= 1", EXIT_CONFIG)
    if max(orders) >= len(traj) or min(orders) < 0:
        raise CliError(
            f"orders must lie in [0, {len(traj) - 1}]: an order-n buffer needs n earlier snapshots"
            f" and the trajectory has {len(traj)}",
            EXIT_CONFIG,
        )
    try:
        sweep = order_sweep_trajectory(traj, orders, repeats, seed, cfg.regressor)
    except RegressorError as exc:
        raise CliError(f"data error: {exc}", EXIT_DATA) from None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sweep.to_csv(out / "order_sweep.csv")
    best_order = min(orders, key=lambda o: (sweep.median(o), o))
    X = buffered_matrix(traj.matrix, best_order)
    model = fit_bagging(X[:: cfg.regressor.stride], traj.rul_labels[:: cfg.regressor.stride], cfg.regressor, seed)
    pred = model.predict(X)
    with open(out / "predictions.csv", "w") as fh:
        fh.write("snapshot,rul_true,rul_pred\n")
        for idx, y, p in zip(traj.snapshot_indices.tolist(), traj.rul_labels.tolist(), pred.tolist()):
            fh.write(f"{idx},{y!r},{p!r}\n")
    (out / "model.json").write_text(model.to_json())
    for o, (mn, q1, med, q3, mx) in sweep.summary().items():
        print(f"order {o:3d}: min={mn:.6g} q1={q1:.6g} median={med:.6g} q3={q3:.6g} max={mx:.6g}")
    print(f"best order {best_order}; predictions -> {out / 'predictions.csv'}")
    return EXIT_OK


def cmd_synth(cfg, stage_spec, out_dir) -> int:
    seed = _require_seed(cfg)
    try:
        stages = parse_stage_spec(stage_spec, cfg.synth_peak)
        record = synth_run(stages, cfg.operating, seed, cfg.synth_n_samples, cfg.synth_noise_std, cfg.bearing)
    except ValueError as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from None
    paths = write_run(record, out_dir)
    print(f"wrote {len(paths)} snapshots to {out_dir}")
    return EXIT_OK


def _parse_orders(text):
    try:
        orders = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}") from None
    if not orders:
        raise argparse.ArgumentTypeError("empty order list")
    return orders


def build_parser() -> argparse.ArgumentParser:
    def common_options(suppress):
        # subcommands must not overwrite options already given before the command name
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--config", action="append", metavar="PATH", help="config file (repeatable; later files win)", **kw)
        c.add_argument("--seed", type=int, metavar="U64", **kw)
        c.add_argument("--threads", type=int, metavar="N", **kw)
        c.add_argument("-v", "--verbose", action="store_true", **kw)
        return c

    common = common_options(True)
    p = argparse.ArgumentParser(prog="sfrf", description=__doc__.splitlines()[0], parents=[common_options(False)])
    p.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    sub = p.add_subparsers(dest="command")

    e = sub.add_parser("extract", parents=[common], help="compute the SFRF trajectory of a run directory")
    e.add_argument("data_dir")
    e.add_argument("--out", required=True, metavar="CSV")

    o = sub.add_parser("optimize", parents=[common], help="NSGA-II search over (kappa_C, kappa_S, kappa_H)")
    o.add_argument("data_dir")
    o.add_argument("--out", required=True, metavar="DIR")

    r = sub.add_parser("predict", parents=[common], help="bagging RUL regression over buffer orders")
    r.add_argument("trajectory_csv")
    r.add_argument("--orders", type=_parse_orders, default=[0, 1, 2, 5, 10])
    r.add_argument("--repeats", type=int, default=30)
    r.add_argument("--out", required=True, metavar="DIR")

    s = sub.add_parser("synth", parents=[common], help="write a synthetic run in the XJTU-SY layout")
    s.add_argument("stages", help="e.g. '10 healthy,10 outer'")
    s.add_argument("--out", required=True, metavar="DIR")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args)
        if args.dump_config:
            sys.stdout.write(cfg.dumps())
            return EXIT_OK
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_CONFIG
        if args.command == "extract":
            return cmd_extract(cfg, args.data_dir, args.out)
        if args.command == "optimize":
            return cmd_optimize(cfg, args.data_dir, args.out)
        if args.command == "predict":
            return cmd_predict(cfg, args.trajectory_csv, args.orders, args.repeats, args.out)
        return cmd_synth(cfg, args.stages, args.out)
    except CliError as exc:
        print(f"sfrf: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
