"""Command-line interface.

Subcommands:

* ``synth``        generate a test matrix with a prescribed spectrum
* ``analyze``      sweep decomposition accuracy over ranks and iteration counts
* ``compress``     factorize every layer of a model manifest
* ``plan``         parameter accounting only, no decomposition
* ``bound-check``  evaluate the softmax deviation certificate on real features

Exit codes: 0 on success, 2 for input or parameter problems, 3 when the
numerics fail (non-convergence, rank deficiency, violated certificate).
Every command is deterministic for fixed flags, timings aside.
"""

from __future__ import annotations

import argparse
import csv
import shutil
import sys
import time
from pathlib import Path

from .decomposition import LowRankFactors, RsiConfig, rsi, split_factors
from .errors import (
    ContractError,
    LowRankError,
    NumericalFailureError,
    ParameterError,
)
from .matrix import exact_svd
from .planner import plan_model
from .softmax import empirical_deviation
from .spectra import PROFILES, SpectrumSpec, make_spectrum, synth_matrix
from .sweep import SweepConfig, run_sweep
from .tensor_io import read_manifest, read_npy, write_json, write_npy

_CSV_COLUMNS = (
    "k",
    "q",
    "mean_normalized_error",
    "std_normalized_error",
    "mean_wall_time_s",
    "metric",
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except (NumericalFailureError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except LowRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowrank",
        description="Randomized low-rank factorization of weight matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a matrix with a prescribed spectrum")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--profile", choices=PROFILES, default="knee")
    p.add_argument("--length", type=int, default=None,
                   help="spectrum length (default: min(rows, cols))")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--head-count", type=int, default=32,
                   help="knee: values in the fast-decay head")
    p.add_argument("--head-decay-rate", type=float, default=0.2,
                   help="knee: exponential rate of the head")
    p.add_argument("--tail-exponent", type=float, default=0.5,
                   help="knee: power-law exponent of the tail")
    p.add_argument("--exponent", type=float, default=1.0, help="power_law exponent")
    p.add_argument("--rate", type=float, default=0.5, help="exponential decay rate")
    p.add_argument("--value", type=float, default=1.0, help="flat spectrum value")
    p.add_argument("--values", type=_float_list, default=None,
                   help="explicit spectrum, comma-separated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output NPY path")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("analyze", help="sweep accuracy over ranks and iteration counts")
    p.add_argument("matrix", help="input NPY matrix")
    p.add_argument("--ranks", type=_int_list, required=True, help="comma-separated ranks")
    p.add_argument("--qs", type=_int_list, required=True,
                   help="comma-separated iteration counts")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=float, default=1e-6,
                   help="relative tolerance of the spectral-norm estimate")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("compress", help="factorize every layer of a model manifest")
    p.add_argument("manifest", help="model manifest JSON")
    p.add_argument("--alpha", type=float, required=True,
                   help="rank fraction of min(rows, cols), in (0, 1)")
    p.add_argument("--iterations", "-q", type=int, default=1,
                   help="subspace iteration count per layer")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-if-larger", action="store_true",
                   help="keep layers whose factors would not save parameters")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_compress)

    p = sub.add_parser("plan", help="parameter accounting without decomposition")
    p.add_argument("manifest", help="model manifest JSON")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--skip-if-larger", action="store_true")
    p.add_argument("--out", default=None, help="plan JSON path (default: stdout)")
    p.set_defaults(handler=_cmd_plan)

    p = sub.add_parser("bound-check",
                       help="evaluate the softmax deviation certificate")
    p.add_argument("weights", help="original weight matrix, NPY")
    p.add_argument("left", help="left factor A, NPY")
    p.add_argument("right", help="right factor B, NPY")
    p.add_argument("features", help="feature rows, NPY")
    p.add_argument("--bias", default=None, help="bias vector, NPY")
    p.add_argument("--radius", type=float, default=None,
                   help="feature-norm radius (default: largest feature norm)")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="report JSON path (default: stdout)")
    p.set_defaults(handler=_cmd_bound_check)

    return parser


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _cmd_synth(args) -> None:
    length = args.length
    if length is None:
        length = (
            len(args.values) if args.profile == "explicit" and args.values
            else min(args.rows, args.cols)
        )
    if args.profile == "knee":
        params = {
            "head_count": args.head_count,
            "head_decay_rate": args.head_decay_rate,
            "tail_exponent": args.tail_exponent,
        }
    elif args.profile == "power_law":
        params = {"exponent": args.exponent}
    elif args.profile == "exponential":
        params = {"rate": args.rate}
    elif args.profile == "flat":
        params = {"value": args.value}
    else:
        if not args.values:
            raise ParameterError("explicit profile needs --values")
        params = {"values": args.values}
    spec = SpectrumSpec(profile=args.profile, length=length, scale=args.scale,
                        params=params)
    spectrum = make_spectrum(spec)
    w, _ = synth_matrix(spectrum, args.rows, args.cols, args.seed)
    out = Path(args.out)
    write_npy(w, out)
    sidecar = {
        "profile": spec.profile,
        "length": spec.length,
        "scale": spec.scale,
        "params": {key: _jsonable(value) for key, value in spec.params.items()},
        "rows": args.rows,
        "cols": args.cols,
        "seed": args.seed,
        "spectrum": [float(v) for v in spectrum],
    }
    write_json(sidecar, out.with_suffix(".json"))
    print(f"wrote {out} and {out.with_suffix('.json')}")


def _jsonable(value):
    return list(value) if isinstance(value, tuple) else value


def _cmd_analyze(args) -> None:
    w = read_npy(args.matrix)
    if w.ndim != 2:
        raise ParameterError(f"{args.matrix}: expected a 2-D matrix, got {w.ndim}-D")
    config = SweepConfig(
        ranks=args.ranks,
        iteration_counts=args.qs,
        trials=args.trials,
        seed=args.seed,
        rel_tol=args.rel_tol,
    )
    limit = min(w.shape)
    for rank in config.ranks:
        if rank > limit:
            raise ParameterError(f"rank {rank} exceeds min(rows, cols) = {limit}")
    start = time.perf_counter()
    reference = exact_svd(w)
    print(f"exact SVD reference computed in {time.perf_counter() - start:.3f}s",
          file=sys.stderr)
    rows = run_sweep(w, config, reference)
    if args.out is None:
        _write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as handle:
            _write_csv(rows, handle)


def _write_csv(rows, handle) -> None:
    writer = csv.writer(handle)
    writer.writerow(_CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.rank,
            row.iterations,
            repr(row.mean_error),
            repr(row.std_error),
            repr(row.mean_wall_time),
            row.metric,
        ])


def _cmd_compress(args) -> None:
    manifest = read_manifest(args.manifest)
    if args.iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {args.iterations}")
    plan = plan_model(manifest, args.alpha, skip_if_larger=args.skip_if_larger)
    out_dir = Path(args.out)
    out_dir_existed = out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    created_dirs = []
    layer_seconds = {}
    current = None
    try:
        for index, (layer, entry) in enumerate(zip(manifest.layers, plan.layers)):
            current = layer.name
            if entry.skipped:
                layer_seconds[layer.name] = 0.0
                continue
            _check_layer_name(layer.name)
            if layer.weight_path is None:
                raise ParameterError(f"layer {layer.name!r} has no weight_path")
            w = read_npy(layer.weight_path)
            if w.ndim != 2 or w.shape != (layer.rows, layer.cols):
                raise ParameterError(
                    f"layer {layer.name!r}: weight file has shape "
                    f"{tuple(w.shape)}, manifest says ({layer.rows}, {layer.cols})"
                )
            config = RsiConfig(rank=entry.rank, iterations=args.iterations,
                               seed=args.seed ^ index)
            start = time.perf_counter()
            factors = rsi(w, config)
            layer_seconds[layer.name] = time.perf_counter() - start
            pair = split_factors(factors)
            layer_dir = out_dir / layer.name
            layer_dir.mkdir(exist_ok=True)
            created_dirs.append(layer_dir)
            write_npy(pair.a, layer_dir / "a.npy")
            write_npy(pair.b, layer_dir / "b.npy")
    except LowRankError as exc:
        for layer_dir in created_dirs:
            shutil.rmtree(layer_dir, ignore_errors=True)
        if not out_dir_existed and not any(out_dir.iterdir()):
            out_dir.rmdir()
        message = str(exc) if current is None else f"layer {current!r}: {exc}"
        if isinstance(exc, NumericalFailureError):
            raise NumericalFailureError(message) from exc
        raise ParameterError(message) from exc
    document = {
        "model_name": manifest.model_name,
        "alpha": args.alpha,
        "iterations": args.iterations,
        "seed": args.seed,
        "skip_if_larger": args.skip_if_larger,
    }
    document.update(plan.to_dict())
    for entry in document["layers"]:
        entry["wall_time_s"] = layer_seconds[entry["name"]]
    document["total_wall_time_s"] = sum(layer_seconds.values())
    write_json(document, out_dir / "plan.json")
    done = sum(1 for entry in plan.layers if not entry.skipped)
    print(f"factorized {done} of {len(plan.layers)} layers, "
          f"ratio {plan.ratio:.4f}, wrote {out_dir / 'plan.json'}")


def _check_layer_name(name: str) -> None:
    if "/" in name or "\\" in name or name in (".", ".."):
        raise ParameterError(
            f"layer name {name!r} cannot be used as a directory name"
        )


def _cmd_plan(args) -> None:
    manifest = read_manifest(args.manifest)
    plan = plan_model(manifest, args.alpha, skip_if_larger=args.skip_if_larger)
    document = {
        "model_name": manifest.model_name,
        "alpha": args.alpha,
        "skip_if_larger": args.skip_if_larger,
    }
    document.update(plan.to_dict())
    if args.out is None:
        write_json(document, sys.stdout)
    else:
        write_json(document, args.out)


def _cmd_bound_check(args) -> None:
    w = read_npy(args.weights)
    pair = LowRankFactors(a=read_npy(args.left), b=read_npy(args.right))
    features = read_npy(args.features)
    bias = read_npy(args.bias) if args.bias is not None else None
    report = empirical_deviation(
        w, pair, bias, features, radius=args.radius, rel_tol=args.rel_tol
    )
    if args.out is None:
        write_json(report.to_dict(), sys.stdout)
    else:
        write_json(report.to_dict(), args.out)


if __name__ == "__main__":
    sys.exit(main())
