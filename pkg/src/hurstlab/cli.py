"""Command-line front end: synth, estimate, bench, converge, scan.

Every run writes a JSON manifest alongside its outputs (embedded in the
report for stdout-only runs).  Exit codes: 0 success, 2 usage/validation,
3 runtime or numeric failure.  The base seed comes from --seed, the
HURSTLAB_SEED environment variable, or 0, in that order.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

from . import __version__
from .estimators import (
    DegenerateSeries,
    EstimatorConfig,
    Method,
    NoConvergence,
    estimate,
)
from .evalharness import (
    ExperimentGrid,
    find_nmin,
    mean_convergence_curve,
    run_grid,
    write_convergence_csv,
    write_replicates_csv,
    write_summary_csv,
)
from .fgn import EmbeddingNotPSD, FgnSpec, synthesize_fgn
from .series import read_series_csv, write_series_csv
from .traces import (
    EmptyCapture,
    ParseError,
    Unit,
    bin_to_series,
    parse_capture_csv,
    sliding_window_scan,
    write_window_scan_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    """Invalid flag value; message names the offending flag."""


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _base_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("HURSTLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"HURSTLAB_SEED: not an integer: {env!r}") from exc
    return 0


def _manifest(command: str, args, base_seed: int, started: str, status: str) -> dict:
    parameters = {
        key: str(value)
        for key, value in sorted(vars(args).items())
        if key not in ("command", "handler") and value is not None
    }
    return {
        "command": command,
        "parameters": parameters,
        "base_seed": base_seed,
        "toolkit_version": __version__,
        "started": started,
        "finished": _now(),
        "status": status,
    }


def _write_manifest(path: Path, manifest: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    """Comma list of integers; "A..B" expands to the powers of two from A to B."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if lo < 1:
                raise UsageError(f"{flag}: range must start at 1 or above")
            values = []
            n = lo
            while n <= hi:
                values.append(n)
                n *= 2
            return tuple(values)
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag}: expected integers, got {text!r}") from exc


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag}: expected numbers, got {text!r}") from exc


def _methods_from(args, default=tuple(Method)) -> tuple[Method, ...]:
    if not args.method:
        return tuple(default)
    try:
        return tuple(dict.fromkeys(Method(name) for name in args.method))
    except ValueError as exc:
        choices = ", ".join(m.value for m in Method)
        raise UsageError(f"--method: must be one of {choices}") from exc


def _config_from(args) -> EstimatorConfig:
    fraction = getattr(args, "low_fraction", None)
    if fraction is None:
        return EstimatorConfig()
    try:
        return EstimatorConfig(pgram_low_fraction=fraction)
    except ValueError as exc:
        raise UsageError(f"--low-fraction: {exc}") from exc


def cmd_synth(args) -> int:
    base_seed = _base_seed(args)
    try:
        spec = FgnSpec(hurst=args.hurst, length=args.length, variance=args.variance, seed=base_seed)
    except ValueError as exc:
        flag = next(
            (f"--{name}" for name in ("hurst", "variance", "length", "seed") if name in str(exc)),
            "--seed",
        )
        raise UsageError(f"{flag}: {exc}") from exc
    out = Path(args.out)
    started = _now()
    status = "ok"
    try:
        series = synthesize_fgn(spec)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_series_csv(out, series)
        return EXIT_OK
    except EmbeddingNotPSD as exc:
        status = f"error:{exc}"
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        _write_manifest(out.with_name(out.name + ".manifest.json"), _manifest("synth", args, base_seed, started, status))


def cmd_estimate(args) -> int:
    base_seed = _base_seed(args)
    try:
        series = read_series_csv(args.path)
    except OSError as exc:
        raise UsageError(f"path: cannot read {args.path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"path: {exc}") from exc
    if series.length < 64:
        raise UsageError(f"path: series has {series.length} points; at least 64 are required")
    methods = _methods_from(args)
    config = _config_from(args)

    started = _now()
    entries = []
    failed = False
    for method in methods:
        try:
            result = estimate(series, method, config)
            entries.append(
                {
                    "method": method.value,
                    "H": result.value,
                    "ci_low": result.ci_low,
                    "ci_high": result.ci_high,
                    "diagnostics": dict(result.diagnostics),
                }
            )
        except (DegenerateSeries, NoConvergence, ValueError) as exc:
            failed = True
            entries.append({"method": method.value, "error": f"{type(exc).__name__}: {exc}"})
    status = "ok" if not failed else "error:estimator failure"
    report = {
        "manifest": _manifest("estimate", args, base_seed, started, status),
        "estimates": entries,
    }
    text = json.dumps(report, indent=2)
    print(text)
    if args.out is not None:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        _write_manifest(out.with_name(out.name + ".manifest.json"), report["manifest"])
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_bench(args) -> int:
    base_seed = _base_seed(args)
    try:
        grid = ExperimentGrid(
            hursts=_parse_float_list(args.hursts, "--hursts"),
            lengths=_parse_int_list(args.lengths, "--lengths"),
            replicates=args.replicates,
            methods=_methods_from(args),
            base_seed=base_seed,
        )
    except ValueError as exc:
        raise UsageError(f"--hursts/--lengths/--replicates: {exc}") from exc
    config = _config_from(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    status = "ok"
    try:
        result = run_grid(grid, config, threads=args.threads)
        write_summary_csv(out_dir / "summary.csv", result.summaries)
        write_replicates_csv(out_dir / "replicates.csv", result.records)
        for method in grid.methods:
            for hurst in grid.hursts:
                nmin = find_nmin(result.summaries, method, hurst)
                shown = nmin if nmin is not None else "none"
                print(f"N_min method={method.value} H={hurst:g}: {shown}")
        if result.flagged:
            status = "error:flagged cells"
            for method, hurst, length in result.flagged:
                print(
                    f"warning: >10% replicate failures for method={method.value} "
                    f"H={hurst:g} N={length}",
                    file=sys.stderr,
                )
            return EXIT_RUNTIME
        return EXIT_OK
    finally:
        _write_manifest(out_dir / "manifest.json", _manifest("bench", args, base_seed, started, status))


def cmd_converge(args) -> int:
    base_seed = _base_seed(args)
    methods = _methods_from(args, default=(Method.WHITTLE,))
    if len(methods) != 1:
        raise UsageError("--method: converge takes exactly one method")
    if not 0.0 < args.hurst < 1.0:
        raise UsageError("--hurst: hurst must be in (0,1)")
    if args.t0 < 64:
        raise UsageError("--t0: must be at least 64")
    if args.max_length < args.t0:
        raise UsageError("--max-length: must be at least --t0")
    if args.tu < 1:
        raise UsageError("--tu: must be positive")
    if args.series_count < 1:
        raise UsageError("--series-count: must be positive")
    out = Path(args.out)
    started = _now()
    status = "ok"
    try:
        curve = mean_convergence_curve(
            method=methods[0],
            hurst=args.hurst,
            series_count=args.series_count,
            max_length=args.max_length,
            t0=args.t0,
            tu=args.tu,
            config=_config_from(args),
            base_seed=base_seed,
            threads=args.threads,
        )
        out.parent.mkdir(parents=True, exist_ok=True)
        write_convergence_csv(out, curve)
        return EXIT_OK
    finally:
        _write_manifest(out.with_name(out.name + ".manifest.json"), _manifest("converge", args, base_seed, started, status))


def _load_scan_input(path: str, args):
    """A scan input is a capture CSV (by header) or a plain series file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = ""
            for line in fh:
                if line.strip():
                    first = line.strip()
                    break
    except OSError as exc:
        raise UsageError(f"path: cannot read {path}: {exc}") from exc
    if first.lower() == "timestamp,bytes":
        try:
            records = parse_capture_csv(path)
            binned = bin_to_series(records, bin_width=args.bin_width, unit=Unit(args.unit))
        except (ParseError, EmptyCapture, ValueError) as exc:
            raise UsageError(f"path: {exc}") from exc
        return binned.values, binned.bin_width, binned.origin
    try:
        series = read_series_csv(path)
    except ValueError as exc:
        raise UsageError(f"path: {exc}") from exc
    return series.values, 1.0, 0.0


def cmd_scan(args) -> int:
    base_seed = _base_seed(args)
    if args.bin_width <= 0:
        raise UsageError("--bin-width: must be positive")
    methods = _methods_from(args, default=(Method.WHITTLE,))
    if len(methods) != 1:
        raise UsageError("--method: scan takes exactly one method")
    values, bin_width, origin = _load_scan_input(args.path, args)
    stride = args.stride if args.stride is not None else args.window // 2
    if stride >= args.window:
        raise UsageError("--stride: must be smaller than --window (inter-window gap below the window length)")
    if stride < 1:
        raise UsageError("--stride: must be at least 1")
    if args.window > values.size:
        raise UsageError(f"--window: exceeds series length {values.size}")

    out = Path(args.out)
    started = _now()
    status = "ok"
    try:
        scan = sliding_window_scan(values, args.window, stride, methods[0], _config_from(args))
        out.parent.mkdir(parents=True, exist_ok=True)
        write_window_scan_csv(out, scan, bin_width=bin_width, origin=origin)
        return EXIT_OK
    finally:
        _write_manifest(out.with_name(out.name + ".manifest.json"), _manifest("scan", args, base_seed, started, status))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurstlab",
        description="Fractional Gaussian noise synthesis, Hurst estimation, and benchmarking.",
    )
    parser.add_argument("--version", action="version", version=f"hurstlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="write a synthetic fGn series as CSV")
    synth.add_argument("--hurst", type=float, required=True)
    synth.add_argument("--length", type=int, required=True)
    synth.add_argument("--variance", type=float, default=1.0)
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--out", required=True)
    synth.set_defaults(handler=cmd_synth)

    est = sub.add_parser("estimate", help="estimate H for a series file, JSON to stdout")
    est.add_argument("path")
    est.add_argument("--method", action="append", choices=[m.value for m in Method])
    est.add_argument("--low-fraction", dest="low_fraction", type=float, default=None)
    est.add_argument("--seed", type=int, default=None)
    est.add_argument("--out", default=None)
    est.set_defaults(handler=cmd_estimate)

    bench = sub.add_parser("bench", help="Monte-Carlo bias/sigma/MSE grid with N_min report")
    bench.add_argument("--hursts", default="0.5,0.6,0.7,0.8,0.9")
    bench.add_argument("--lengths", default="64..65536")
    bench.add_argument("--replicates", type=int, default=200)
    bench.add_argument("--method", action="append", choices=[m.value for m in Method])
    bench.add_argument("--low-fraction", dest="low_fraction", type=float, default=None)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(handler=cmd_bench)

    conv = sub.add_parser("converge", help="mean convergence curve over prefix lengths")
    conv.add_argument("--method", action="append", choices=[m.value for m in Method])
    conv.add_argument("--hurst", type=float, required=True)
    conv.add_argument("--series-count", dest="series_count", type=int, default=200)
    conv.add_argument("--max-length", dest="max_length", type=int, default=2**16)
    conv.add_argument("--t0", type=int, default=2**6)
    conv.add_argument("--tu", type=int, default=200)
    conv.add_argument("--low-fraction", dest="low_fraction", type=float, default=None)
    conv.add_argument("--seed", type=int, default=None)
    conv.add_argument("--threads", type=int, default=1)
    conv.add_argument("--out", required=True)
    conv.set_defaults(handler=cmd_converge)

    scan = sub.add_parser("scan", help="sliding-window H estimates over a long series or capture")
    scan.add_argument("path")
    scan.add_argument("--window", type=int, required=True)
    scan.add_argument("--stride", type=int, default=None)
    scan.add_argument("--method", action="append", choices=[m.value for m in Method])
    scan.add_argument("--bin-width", dest="bin_width", type=float, default=0.01)
    scan.add_argument("--unit", choices=[u.value for u in Unit], default="bytes")
    scan.add_argument("--low-fraction", dest="low_fraction", type=float, default=None)
    scan.add_argument("--seed", type=int, default=None)
    scan.add_argument("--threads", type=int, default=1)
    scan.add_argument("--out", required=True)
    scan.set_defaults(handler=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateSeries, NoConvergence, EmbeddingNotPSD) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
