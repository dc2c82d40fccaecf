"""Batch command-line pipeline.

Subcommands: ``analyze`` (multiscale causality of a CSV dataset, with
optional preprocessing and surrogate testing), ``simulate`` (write a
benchmark realization), ``design-filter`` (dump filter taps),
``reproduce fig2|fig3|fig4`` (benchmark studies), and ``surrogate-test``
(analyze with mandatory surrogate bands).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .granger import MultiscaleGcResult, multiscale_gc_estimated, multiscale_gc_naive
from .preprocess import detrend_l1, load_csv, load_csv_with_time, normalize, resample_uniform
from .rescale import design_fir_hamming
from .reproduce import reproduce_fig2, reproduce_fig3, reproduce_fig4
from .surrogate import SignificanceBands, SurrogateConfig, significance_bands
from .var_model import (
    TimeSeriesSet,
    bi_config,
    check_stability,
    estimate_var,
    mix_config,
    simulate_benchmark,
    uni_config,
)

__all__ = ["AnalysisConfig", "RunReport", "run", "main"]

_MODES = ("exact", "ss-estimated", "naive")


@dataclass(frozen=True)
class AnalysisConfig:
    """Resolved settings of one ``analyze`` run."""

    input_path: str
    scales: tuple[int, ...]
    q: int = 6
    p_max: int = 20
    mode: str = "ss-estimated"
    channels: tuple[str, ...] | None = None
    time_column: bool = False
    n_surrogates: int = 0
    surrogate_iterations: int = 1000
    percentiles: tuple[float, ...] = (5.0, 50.0, 95.0)
    detrend_lambda: float | str | None = None
    normalize: bool = False
    resample_dt: float | None = None
    out_dir: str = "."
    seed: int = 0

    def __post_init__(self):
        scales = tuple(int(t) for t in self.scales)
        if not scales:
            raise ValueError("scales must not be empty")
        if any(t < 1 for t in scales):
            raise ValueError("scales must be positive")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if self.q < 0:
            raise ValueError("filter order must be >= 0")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.n_surrogates < 0:
            raise ValueError("n_surrogates must be >= 0")
        object.__setattr__(self, "scales", scales)


@dataclass
class RunReport:
    """Everything a finished run reports: the echoed config, model
    diagnostics, the per-scale causality table, optional surrogate bands,
    warnings, and wall-clock timings."""

    config: AnalysisConfig
    labels: tuple[str, ...]
    n_samples: int
    preprocessing: list[str] = field(default_factory=list)
    selected_order: int | None = None
    spectral_radius: float | None = None
    result: MultiscaleGcResult | None = None
    bands: SignificanceBands | None = None
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def render(self) -> str:
        lines = ["multiscale causality run", "=" * 40, ""]
        lines.append("configuration:")
        cfg = self.config
        lines.append(f"  input:          {cfg.input_path}")
        lines.append(f"  channels:       {', '.join(self.labels)} (N={self.n_samples})")
        lines.append(f"  scales:         {list(cfg.scales)}")
        lines.append(f"  filter order:   {cfg.q}")
        lines.append(f"  p_max:          {cfg.p_max}")
        lines.append(f"  mode:           {cfg.mode}")
        lines.append(f"  surrogates:     {cfg.n_surrogates}")
        lines.append(f"  seed:           {cfg.seed}")
        lines.append("")
        lines.append("preprocessing (applied in order):")
        if self.preprocessing:
            for step in self.preprocessing:
                lines.append(f"  - {step}")
        else:
            lines.append("  - none")
        lines.append("")
        if self.selected_order is not None:
            lines.append(f"selected model order: {self.selected_order}")
        if self.spectral_radius is not None:
            lines.append(f"companion spectral radius: {self.spectral_radius:.6f}")
        lines.append("")
        if self.result is not None:
            header = "  tau  source -> target        gc"
            if self.bands is not None:
                header += "".join(f"   p{int(p):02d}" for p in self.bands.percentiles)
                header += "   significant"
            lines.append("per-scale causality:")
            lines.append(header)
            for tau in self.result.scales:
                if tau in self.result.skipped:
                    lines.append(f"  {tau:3d}  skipped: {self.result.skipped[tau]}")
                    continue
                for v in self.result.values[tau]:
                    row = (f"  {tau:3d}  {self.labels[v.source]:>6s} -> "
                           f"{self.labels[v.target]:<6s}  {v.F:10.6f}")
                    if self.bands is not None:
                        for level in self.bands.band(tau, v.source, v.target):
                            row += f"  {level:6.3f}"
                        row += "   yes" if self.bands.is_significant(
                            tau, v.source, v.target) else "   no"
                    lines.append(row)
            lines.append("")
        if self.bands is not None and self.bands.n_failed:
            lines.append(f"surrogates skipped after analysis failures: {self.bands.n_failed}")
        if self.warnings:
            lines.append("warnings:")
            for w in self.warnings:
                lines.append(f"  - {w}")
            lines.append("")
        lines.append("timings (seconds):")
        for name, seconds in self.timings.items():
            lines.append(f"  {name:<14s} {seconds:8.3f}")
        lines.append("")
        return "\n".join(lines)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_gc_csv(path, report: RunReport) -> None:
    labels = report.labels
    bands = report.bands
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["tau", "source", "target", "gc", "lambda_full", "lambda_restricted"]
        if bands is not None:
            header += [f"surr_p{int(p):02d}" for p in bands.percentiles]
            header += ["significant"]
        writer.writerow(header)
        result = report.result
        for tau in result.scales:
            if tau not in result.values:
                continue
            for v in result.values[tau]:
                row = [tau, labels[v.source], labels[v.target],
                       _fmt(v.F), _fmt(v.lambda_full), _fmt(v.lambda_restricted)]
                if bands is not None:
                    row += [_fmt(level) for level in bands.band(tau, v.source, v.target)]
                    row += [int(bands.is_significant(tau, v.source, v.target))]
                writer.writerow(row)


def run(config: AnalysisConfig, out_dir=None) -> RunReport:
    """Execute ingestion, preprocessing, the chosen causality mode and the
    optional surrogate test; write ``gc.csv`` and ``report.txt``."""
    from pathlib import Path

    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}
    t0 = time.perf_counter()

    times = None
    if config.time_column:
        times, data = load_csv_with_time(config.input_path)
    else:
        data = load_csv(config.input_path)
    if config.channels:
        data = data.select(config.channels)
    report = RunReport(config=config, labels=data.labels, n_samples=data.n_samples,
                       timings=timings)

    # fixed preprocessing order: detrend -> resample -> normalize
    if config.detrend_lambda is not None:
        lam = (10.0 * data.n_samples if config.detrend_lambda == "auto"
               else float(config.detrend_lambda))
        detrended = np.column_stack(
            [detrend_l1(data.values[:, c], lam) for c in range(data.n_channels)]
        )
        data = TimeSeriesSet(detrended, data.labels, data.dt)
        report.preprocessing.append(f"detrend (l1 trend filter, lambda={_fmt(lam)})")
    if config.resample_dt is not None:
        if times is None:
            raise ValueError("--resample-dt requires --time-column")
        data = resample_uniform(times, data.values, config.resample_dt, data.labels)
        times = None
        report.preprocessing.append(
            f"resample (dt={_fmt(config.resample_dt)}, N={data.n_samples})"
        )
    if config.normalize:
        data = normalize(data)
        report.preprocessing.append("normalize (zero mean, unit variance)")
    report.n_samples = data.n_samples
    timings["preprocess"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    if config.mode == "exact":
        raise ValueError(
            "exact mode needs known model parameters; use the library API or "
            "'reproduce' for benchmarks, or one of ss-estimated/naive here"
        )
    if config.n_surrogates > 0:
        if config.mode != "ss-estimated":
            raise ValueError("surrogate bands are defined for the ss-estimated mode")
        bands = significance_bands(
            data, config.q, config.scales, config.p_max,
            SurrogateConfig(
                n_surrogates=config.n_surrogates,
                max_iterations=config.surrogate_iterations,
                seed=config.seed,
                percentiles=config.percentiles,
            ),
        )
        report.bands = bands
        report.result = bands.original_result
        report.selected_order = bands.original_result.order
    elif config.mode == "ss-estimated":
        report.result = multiscale_gc_estimated(data, config.q, config.scales, config.p_max)
        report.selected_order = report.result.order
    else:
        report.result = multiscale_gc_naive(data, config.q, config.scales, config.p_max)
        report.warnings.extend(
            f"scale {tau} skipped: {msg}" for tau, msg in report.result.skipped.items()
        )
    if report.selected_order is not None:
        model = estimate_var(data, report.selected_order)
        report.spectral_radius = check_stability(model)
    timings["analysis"] = time.perf_counter() - t1

    _write_gc_csv(out / "gc.csv", report)
    timings["total"] = time.perf_counter() - t0
    (out / "report.txt").write_text(report.render(), encoding="utf-8")
    return report


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _parse_scales(spec: str):
    scales = []
    for token in spec.split(","):
        token = token.strip()
        if ":" in token:
            lo, hi = token.split(":")
            scales.extend(range(int(lo), int(hi) + 1))
        elif token:
            scales.append(int(token))
    return tuple(sorted(set(scales)))


def _add_common_analysis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input CSV (UTF-8, header row)")
    p.add_argument("--time-column", action="store_true",
                   help="treat the first column as the time axis")
    p.add_argument("--channels", default=None,
                   help="comma-separated channel names to analyze")
    p.add_argument("--scales", default="1:10",
                   help="scales, e.g. '1:20' or '1,2,4,8' (default 1:10)")
    p.add_argument("--filter-order", type=int, default=6, metavar="Q",
                   help="anti-alias FIR order (default 6)")
    p.add_argument("--pmax", type=int, default=20,
                   help="maximum VAR order scanned by BIC (default 20)")
    p.add_argument("--detrend-lambda", default=None, metavar="LAMBDA",
                   help="l1 trend-filter penalty; 'auto' uses 10*N")
    p.add_argument("--resample-dt", type=float, default=None,
                   help="resample to this uniform spacing (needs --time-column)")
    p.add_argument("--normalize", action="store_true",
                   help="z-score each channel after detrending/resampling")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msgc",
        description="Multiscale Granger causality for multivariate time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="multiscale causality of a CSV dataset")
    _add_common_analysis_args(p)
    p.add_argument("--mode", choices=("ss-estimated", "naive"), default="ss-estimated")
    p.add_argument("--surrogates", type=int, default=0,
                   help="number of surrogate sets (0 disables the test)")

    p = sub.add_parser("surrogate-test", help="analyze with mandatory surrogate bands")
    _add_common_analysis_args(p)
    p.add_argument("--surrogates", type=int, default=100)

    p = sub.add_parser("simulate", help="write a benchmark realization as CSV")
    p.add_argument("--benchmark", choices=("uni", "bi", "mix"), required=True)
    p.add_argument("--n", type=int, default=500, help="realization length")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="simulated.csv", help="output CSV path")

    p = sub.add_parser("design-filter", help="dump anti-alias filter taps as CSV")
    p.add_argument("--filter-order", type=int, default=6, metavar="Q")
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--out", default="filter.csv")

    p = sub.add_parser("reproduce", help="benchmark study tables")
    p.add_argument("figure", choices=("fig2", "fig3", "fig4"))
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")

    return parser


def _cmd_analyze(args, require_surrogates=False) -> int:
    n_surr = getattr(args, "surrogates", 0)
    if require_surrogates and n_surr < 1:
        raise ValueError("surrogate-test needs --surrogates >= 1")
    config = AnalysisConfig(
        input_path=args.input,
        scales=_parse_scales(args.scales),
        q=args.filter_order,
        p_max=args.pmax,
        mode=getattr(args, "mode", "ss-estimated"),
        channels=tuple(args.channels.split(",")) if args.channels else None,
        time_column=args.time_column,
        n_surrogates=n_surr,
        detrend_lambda=args.detrend_lambda,
        normalize=args.normalize,
        resample_dt=args.resample_dt,
        out_dir=args.out,
        seed=args.seed,
    )
    report = run(config)
    print(report.render())
    return 0


def _cmd_simulate(args) -> int:
    factory = {"uni": uni_config, "bi": bi_config, "mix": mix_config}[args.benchmark]
    data = simulate_benchmark(factory(n_samples=args.n, burn_in=args.burn_in,
                                      seed=args.seed))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.labels)
        for row in data.values:
            writer.writerow([_fmt(v) for v in row])
    print(f"wrote {data.n_samples} x {data.n_channels} samples to {args.out}")
    return 0


def _cmd_design_filter(args) -> int:
    filt = design_fir_hamming(args.filter_order, args.tau)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["l", "b"])
        for lag, coeff in enumerate(filt.b):
            writer.writerow([lag, _fmt(coeff)])
    print(f"order {filt.q} lowpass, cutoff {filt.cutoff:g}; taps written to {args.out}")
    return 0


def _cmd_reproduce(args) -> int:
    from pathlib import Path

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    recipe = {"fig2": reproduce_fig2, "fig3": reproduce_fig3, "fig4": reproduce_fig4}
    study = recipe[args.figure](n_realizations=args.realizations, seed=args.seed)
    path = out / f"{args.figure}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "realization", "tau", "source", "target", "gc"])
        for mode, r, tau, i, j, F in study.iter_rows():
            writer.writerow([mode, r, tau, f"y{i + 1}", f"y{j + 1}", _fmt(F)])
    failures = {m: n for m, n in study.failures.items() if n}
    print(f"{args.figure}: {study.benchmark} benchmark, "
          f"{args.realizations} realizations of N={study.n_samples} -> {path}")
    if failures:
        print(f"skipped realizations: {failures}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "surrogate-test":
            return _cmd_analyze(args, require_surrogates=True)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "design-filter":
            return _cmd_design_filter(args)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:  # surface module context, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
