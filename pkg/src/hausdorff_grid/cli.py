"""Command-line interface.

Data-producing subcommands write delimited records (and JSON reports);
report paths that carry figures render PNGs next to the data files unless
``--no-figures`` is passed.  Exit codes: 0 on success, 2 for configuration
or usage errors, 1 for runtime failures.  Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    certify_external,
    check_suitable,
    compute_delta,
    delta_closed_form,
    external_bound,
    suitable_bound,
    worst_case_bound,
)
from .config import ConfigError, RunConfig, load_config
from .experiments import (
    DEFAULT_DISPLACEMENT_NORM,
    DEFAULT_RUNS,
    default_h_list,
    fit_order,
    randomized_ensemble,
    sweep_displacement,
    sweep_h,
    write_records_csv,
)
from .hausdorff import dh_approx, dh_oracle
from .redistance import (
    fast_march,
    positive_part,
    sample_exact_sd,
    sample_levelset,
    write_field_binary,
    write_field_csv,
)
from .stochastic import (
    analyze_iterates,
    expected_min_distance,
    simulate_min_distance,
    uniformity_histogram,
)

THREADS_ENV = "HAUSDORFF_GRID_THREADS"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit_text(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _float_list(raw: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated number list, got {raw!r}") from exc


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        value = args.threads
    else:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError("thread count must be at least 1")
    return value


def _require_grid(cfg: RunConfig):
    if cfg.grid is None:
        raise ConfigError("config rejected: this operation needs a grid")
    return cfg.grid


def _check_operation(cfg: RunConfig, expected: str) -> None:
    if cfg.operation is not None and cfg.operation != expected:
        raise ConfigError(
            f"config rejected: operation is {cfg.operation!r}, command is {expected!r}"
        )


def _exact_fields(cfg: RunConfig):
    g = _require_grid(cfg)
    try:
        sd_a = sample_exact_sd(g, cfg.shape_a)
        sd_b = sample_exact_sd(g, cfg.shape_b)
    except ValueError as exc:
        raise ConfigError(f"config rejected: {exc}") from exc
    return g, sd_a, sd_b


def _figure_flag(parser) -> None:
    parser.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="render PNG figures next to the data files",
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _records_name(fmt: str) -> str:
    return "records.dat" if fmt == "gnuplot" else "records.csv"


def cmd_compute(args) -> int:
    cfg = load_config(args.config)
    _check_operation(cfg, "compute")
    _, sd_a, sd_b = _exact_fields(cfg)
    report = dh_approx(positive_part(sd_a), positive_part(sd_b))
    if cfg.oracle_gap is not None:
        report = report.with_oracle(dh_oracle(cfg.shape_a, cfg.shape_b, cfg.oracle_gap))
    _emit_text(_json_text(report.to_json_dict()), args.out or cfg.output.get("report"))
    return 0


def cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    _check_operation(cfg, "bounds")
    g, sd_a, sd_b = _exact_fields(cfg)
    report = dh_approx(positive_part(sd_a), positive_part(sd_b))
    if cfg.oracle_gap is not None:
        report = report.with_oracle(dh_oracle(cfg.shape_a, cfg.shape_b, cfg.oracle_gap))
    best_kind, best_val = "worst_case", worst_case_bound(report, g)
    if cfg.suitable_gap is not None:
        ok = check_suitable(g, cfg.shape_a, cfg.suitable_gap) and check_suitable(
            g, cfg.shape_b, cfg.suitable_gap
        )
        sb = suitable_bound(report, g, ok)
        if sb is not None and sb < best_val:
            best_kind, best_val = "suitable", sb
    if cfg.certify_radius is not None:
        if report.oracle is None:
            raise ConfigError(
                "config rejected: certify_radius needs parameters.oracle_gap"
            )
        orc = report.oracle
        # The witness must realize the directed distance attaining d_H; swap
        # the roles when the second one-sided distance dominates.
        pair = (cfg.shape_a, cfg.shape_b)
        if orc.one_sided_ba > orc.one_sided_ab:
            pair = (cfg.shape_b, cfg.shape_a)
        cert = certify_external(
            pair[0], pair[1], orc.witness, cfg.certify_radius, cfg.oracle_gap
        )
        if cert.admissible:
            val = external_bound(cert, g, report.d_tilde)
            if val < best_val:
                best_kind, best_val = "external", val
    report = report.with_bound(best_kind, best_val)
    _emit_text(_json_text(report.to_json_dict()), args.out or cfg.output.get("report"))
    return 0


def cmd_certify(args) -> int:
    cfg = load_config(args.config)
    _check_operation(cfg, "certify")
    if cfg.certify_radius is None or cfg.oracle_gap is None:
        raise ConfigError(
            "config rejected: certify needs parameters.oracle_gap and certify_radius"
        )
    orc = dh_oracle(cfg.shape_a, cfg.shape_b, cfg.oracle_gap)
    pair = (cfg.shape_a, cfg.shape_b)
    if orc.one_sided_ba > orc.one_sided_ab:
        pair = (cfg.shape_b, cfg.shape_a)
    cert = certify_external(
        pair[0], pair[1], orc.witness, cfg.certify_radius, cfg.oracle_gap
    )
    payload = {
        "x": list(cert.x),
        "y": list(cert.y),
        "direction": list(cert.direction),
        "r": cert.r,
        "c": list(cert.c),
        "R": cert.big_r,
        "admissible": cert.admissible,
        "slack": cert.slack,
        "oracle": orc.to_json_dict(),
    }
    _emit_text(_json_text(payload), args.out or cfg.output.get("report"))
    return 0


def cmd_redistance(args) -> int:
    cfg = load_config(args.config)
    _check_operation(cfg, "redistance")
    g = _require_grid(cfg)
    phi = sample_levelset(g, cfg.shape_a)
    field = fast_march(phi)
    csv_target = args.out or cfg.output.get("field_csv")
    if csv_target is not None:
        write_field_csv(field, csv_target)
    binary_target = cfg.output.get("field_binary")
    if binary_target is not None:
        write_field_binary(field, binary_target)
    if csv_target is None and binary_target is None:
        raise ConfigError(
            "config rejected: redistance needs --out or output.field_csv/field_binary"
        )
    return 0


def cmd_constants(args) -> int:
    rows = []
    for n in (1, 2, 3):
        dc = compute_delta(n)
        closed = delta_closed_form(n)
        rows.append([str(n), repr(dc.value), repr(closed), repr(abs(dc.value - closed))])
    header = ["dim", "value", "closed_form", "abs_diff"]
    if args.format == "gnuplot":
        text = "# " + " ".join(header) + "\n"
        text += "".join(" ".join(r) + "\n" for r in rows)
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue()
    _emit_text(text, args.out)
    return 0


def cmd_sweep_h(args) -> int:
    disp = _float_list(args.displacement)
    if len(disp) == 1:
        disp = disp + [0.0] * (args.dim - 1)
    if len(disp) != args.dim:
        raise ConfigError("displacement must be a magnitude or a dim-length vector")
    h_list = _float_list(args.h_list) if args.h_list else list(default_h_list(args.dim))
    records, fit = sweep_h(args.dim, tuple(disp), h_list, source=args.source)
    out = _out_dir(args)
    write_records_csv(records, out / _records_name(args.format), fmt=args.format)
    fit_payload = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "dropped": fit.dropped,
        "points": [list(p) for p in fit.points],
    }
    (out / "fit.json").write_text(_json_text(fit_payload))
    if args.figures:
        from . import plots

        plots.plot_sweep_h(records, fit, out / "sweep_h.png")
    return 0


def cmd_sweep_displacement(args) -> int:
    mags = _float_list(args.magnitudes)
    if not mags:
        raise ConfigError("need at least one displacement magnitude")
    records = sweep_displacement(args.dim, args.h, mags, source=args.source)
    out = _out_dir(args)
    write_records_csv(records, out / _records_name(args.format), fmt=args.format)
    if args.figures:
        from . import plots

        plots.plot_sweep_displacement(records, out / "sweep_displacement.png")
    return 0


def cmd_randomized(args) -> int:
    threads = _resolve_threads(args)
    h_list = _float_list(args.h_list) if args.h_list else None
    records, fits, (edges, counts) = randomized_ensemble(
        args.dim,
        args.runs,
        seed=args.seed,
        h_list=h_list,
        displacement_norm=args.displacement_norm,
        threads=threads,
    )
    out = _out_dir(args)
    write_records_csv(records, out / _records_name(args.format), fmt=args.format)
    with open(out / "fits.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_id", "slope", "intercept", "dropped"])
        for i, f in enumerate(fits):
            writer.writerow([str(i), repr(f.slope), repr(f.intercept), str(f.dropped)])
    with open(out / "order_histogram.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), str(int(c))])
    if args.figures:
        from . import plots

        plots.plot_ensemble_runs(records, out / "ensemble.png")
        plots.plot_order_histogram(edges, counts, out / "order_histogram.png")
    return 0


def cmd_sequence_analysis(args) -> int:
    analysis = analyze_iterates(args.x0, args.stride, args.steps)
    hist = uniformity_histogram(args.x0, args.stride, args.count, args.bins)
    out = _out_dir(args)
    (out / "analysis.json").write_text(_json_text(analysis.to_json_dict()))
    with open(out / "histogram.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), str(int(c))])
    chi = {"chi_square": hist.chi_square, "bins": args.bins, "count": args.count}
    (out / "uniformity.json").write_text(_json_text(chi))
    if args.figures:
        from . import plots

        plots.plot_uniformity(hist, out / "uniformity.png")
    return 0


def cmd_mc_mindist(args) -> int:
    draws = [int(v) for v in _float_list(args.draws)]
    if any(v < 1 for v in draws):
        raise ConfigError("draw counts must be positive")
    table = []
    for big_n in draws:
        expected = expected_min_distance(args.sector_dim, big_n)
        mean, stderr = simulate_min_distance(
            args.sector_dim, big_n, trials=args.trials, seed=args.seed
        )
        table.append(
            {
                "sector_dim": args.sector_dim,
                "draws": big_n,
                "trials": args.trials,
                "expected": expected,
                "mc_mean": mean,
                "mc_stderr": stderr,
            }
        )
    out = _out_dir(args)
    with open(out / "mindist.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["sector_dim", "draws", "trials", "expected", "mc_mean", "mc_stderr"]
        )
        for row in table:
            writer.writerow(
                [
                    str(row["sector_dim"]),
                    str(row["draws"]),
                    str(row["trials"]),
                    repr(row["expected"]),
                    repr(row["mc_mean"]),
                    repr(row["mc_stderr"]),
                ]
            )
    if args.figures:
        from . import plots

        plots.plot_min_distance(table, out / "mindist.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hausdorff-grid",
        description=(
            "Hausdorff distances from signed distance fields on uniform grids: "
            "node-scan lower bounds, certified error bounds, and the "
            "randomized-grid experiment harness."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("compute", cmd_compute, "node-scan lower bound for a configured scene")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["json"], default="json", help="report format")

    p = add("bounds", cmd_bounds, "lower bound plus the best certified upper bound")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["json"], default="json", help="report format")

    p = add("certify", cmd_certify, "check a witness clearance radius")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", help="certificate path (default: stdout)")
    p.add_argument("--format", choices=["json"], default="json", help="report format")

    p = add("redistance", cmd_redistance, "rebuild signed distances by fast marching")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", help="field CSV path")

    p = add("constants", cmd_constants, "table of the suitable-grid constants")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "gnuplot"], default="csv")

    p = add("sweep-h", cmd_sweep_h, "error against grid spacing for one scene")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--displacement", default="0", help="magnitude or comma vector")
    p.add_argument("--h-list", help="comma-separated spacings (default preset)")
    p.add_argument("--source", choices=["exact_sd", "fmm"], default="exact_sd")
    p.add_argument("--seed", type=int, default=0, help="recorded in the output")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["csv", "gnuplot"], default="csv")
    _figure_flag(p)

    p = add(
        "sweep-displacement",
        cmd_sweep_displacement,
        "error against displacement at fixed spacing",
    )
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument(
        "--magnitudes",
        default=",".join(str(round(v, 3)) for v in np.arange(0.0, 6.01, 0.25)),
        help="comma-separated displacement magnitudes",
    )
    p.add_argument("--source", choices=["exact_sd", "fmm"], default="exact_sd")
    p.add_argument("--seed", type=int, default=0, help="recorded in the output")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["csv", "gnuplot"], default="csv")
    _figure_flag(p)

    p = add("randomized", cmd_randomized, "randomized-scene convergence ensemble")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h-list", help="comma-separated spacings (default preset)")
    p.add_argument(
        "--displacement-norm", type=float, default=DEFAULT_DISPLACEMENT_NORM
    )
    p.add_argument("--threads", type=int, help=f"worker cap (or {THREADS_ENV})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["csv", "gnuplot"], default="csv")
    _figure_flag(p)

    p = add(
        "sequence-analysis",
        cmd_sequence_analysis,
        "closest-pair and small-iterate data for a fractional sequence",
    )
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--stride", type=float, required=True)
    p.add_argument("--steps", type=int, default=10, help="index range of the pair scan")
    p.add_argument("--count", type=int, default=1000, help="iterates in the histogram")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", required=True, help="output directory")
    _figure_flag(p)

    p = add("mc-mindist", cmd_mc_mindist, "sector minimum distance: model vs Monte Carlo")
    p.add_argument("--sector-dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--draws", default="10,100,1000", help="comma-separated draw counts")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    _figure_flag(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
