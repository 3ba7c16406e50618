"""Command-line interface.

Subcommands cover the two random-matrix studies, the four experiments and
synthetic data generation. Every run is a pure function of the config file
(or per-task defaults) plus the CLI overrides, and writes machine-readable
output; errors leave a JSON error object on stderr and a category-specific
exit code.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .errors import ArgumentError, DataFormatError, IOFailure, QReservoirError
from .experiments import (
    config_from_dict,
    default_config,
    emit_report,
    run_interpolation,
    run_open_loop,
    run_scan,
)
from .randmat import measurement_statistics_study, spectrum_study
from .rng import derive_seed
from .tasks import (
    gen_cosine,
    gen_mackey_glass,
    gen_random_walk,
    series_to_csv,
    subsample,
)

SMOKE_SCAN = {
    "couplings": (0.1, 2.0, 10.0),
    "state_dims": (1, 20, 100),
    "horizon_fractions": (0.05, 1.0, 5.0),
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file mirroring ExperimentConfig")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--out", required=True, help="output file path")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--threads", type=int, default=1, help="worker processes for scans")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qreservoir",
        description="Spin-chain reservoir computing with random-matrix measurements",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectra", help="eigenvalue spectra of random Hermitian draws")
    _add_common(p)
    p.add_argument("--dims", default="2,8,32,128,512", help="comma list of dimensions")
    p.add_argument("--densities", default="0.25,0.5,1.0", help="comma list of densities")
    p.add_argument("--samples", type=int, default=50, help="draws per (dim, density) cell")

    p = sub.add_parser(
        "measure-stats", help="expectation statistics of random observables"
    )
    _add_common(p)
    p.add_argument("--full-spins", type=int, default=9)
    p.add_argument("--obs-dims", default="2,8,32,128,512")
    p.add_argument("--samples", type=int, default=200, help="draws per observable dimension")
    p.add_argument("--density", type=float, default=1.0)

    for task, help_text in (
        ("cosine", "open-loop cosine prediction"),
        ("mackey-glass", "open-loop Mackey-Glass prediction"),
        ("interpolate", "shuffled-split series interpolation with spline baselines"),
        ("scan", "coupling x state-dimension x horizon scan"),
    ):
        p = sub.add_parser(task, help=help_text)
        _add_common(p)
        if task == "interpolate":
            p.add_argument("--csv", help="price CSV (date,close); default synthetic walk")
            p.add_argument("--train-fraction", type=float, help="main split fraction")
        if task == "scan":
            p.add_argument(
                "--smoke", action="store_true", help="reduced 3x3x3 grid for smoke runs"
            )

    p = sub.add_parser("gen-data", help="write a benchmark series as CSV (t,value)")
    _add_common(p)
    p.add_argument(
        "--task",
        choices=("cosine", "mackey-glass", "random-walk"),
        default="cosine",
    )
    p.add_argument("--n", type=int, default=500, help="points (cosine / random-walk)")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--period", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--stride", type=int, default=20, help="Mackey-Glass subsampling")
    p.add_argument("--step-std", type=float, default=1.0, help="random-walk step size")
    return parser


def _load_config(args, task: str):
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IOFailure(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON in {args.config}: {exc}") from exc
        doc.setdefault("task", task)
        if doc["task"] != task:
            raise ArgumentError(
                f"config task {doc['task']!r} does not match subcommand {task!r}"
            )
        config = config_from_dict(doc)
    else:
        config = default_config(task)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ArgumentError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ArgumentError(f"expected comma-separated numbers, got {text!r}") from exc


def _write_table(table, path, format: str) -> None:
    try:
        if format == "csv":
            table.to_csv(path)
            return
        with open(path, "w", encoding="utf-8", newline="") as fh:
            doc = {"columns": list(table.header), "rows": [list(r) for r in table.rows]}
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def _run(args) -> None:
    command = args.command
    if command == "spectra":
        table = spectrum_study(
            _parse_int_list(args.dims),
            _parse_float_list(args.densities),
            args.samples,
            args.seed if args.seed is not None else 0,
        )
        _write_table(table, args.out, args.format)
    elif command == "measure-stats":
        table = measurement_statistics_study(
            full_spins=args.full_spins,
            obs_dims=_parse_int_list(args.obs_dims),
            samples=args.samples,
            seed=args.seed if args.seed is not None else 0,
            density=args.density,
        )
        _write_table(table, args.out, args.format)
    elif command in ("cosine", "mackey-glass"):
        config = _load_config(args, command.replace("-", "_"))
        emit_report(run_open_loop(config), args.out, args.format)
    elif command == "interpolate":
        config = _load_config(args, "interpolation")
        if args.csv is not None:
            config = replace(
                config, interpolation=replace(config.interpolation, csv_path=args.csv)
            )
        if args.train_fraction is not None:
            config = replace(
                config, split=replace(config.split, train_fraction=args.train_fraction)
            )
        emit_report(run_interpolation(config), args.out, args.format)
    elif command == "scan":
        config = _load_config(args, "scan")
        if args.smoke:
            config = replace(config, scan=replace(config.scan, **SMOKE_SCAN))
        emit_report(run_scan(config, threads=args.threads), args.out, args.format)
    elif command == "gen-data":
        seed = args.seed if args.seed is not None else 0
        if args.task == "cosine":
            series = gen_cosine(args.amplitude, args.period, args.n, args.dt)
        elif args.task == "mackey-glass":
            series = subsample(
                gen_mackey_glass(dt=args.dt, n_steps=args.n * args.stride + 2000),
                args.stride,
            )
        else:
            series = gen_random_walk(args.n, args.step_std, derive_seed(seed, 3))
        try:
            series_to_csv(series, args.out)
        except OSError as exc:
            raise IOFailure(f"cannot write {args.out}: {exc}") from exc
    else:  # pragma: no cover - argparse enforces the choices
        raise ArgumentError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except QReservoirError as exc:
        json.dump(
            {"error": {"category": exc.category, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
