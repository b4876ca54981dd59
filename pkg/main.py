#!/usr/bin/env python3
# python main.py spectrum --config configs/fig2b.cfg --svg fig2b.svg
# python main.py map --config configs/fig3.cfg --svg fig3.svg --threads 8

import argparse
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

# Load environment variables from .env file
load_dotenv()

from api.csv_tables import read_table, write_csv
from api.json_reports import build_report, dumps
from api.svg_plotter import heatmap_svg, render_png, spectrum_svg
from processors.errors import ConfigError, CsvSchemaError, WgmScatterError
from processors.oracle_solver import verify_random
from processors.spectra_analysis import (
    OPPOSITE,
    classify_regime,
    contrast_metrics,
    dip_correspondence,
    find_dips,
    regime_window,
    unidirectional_dips,
)
from processors.sweep_engine import AxisSpec, Provenance, SpectrumTable, sweep1d, sweep2d
from utils.config_manager import RunConfig, config_manager, load_run_config
from utils.console import log_error, log_info, log_ok, log_warn, print_banner, print_table, set_quiet

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI run configuration")
    common.add_argument("--svg", help="write an SVG plot to this path")
    common.add_argument("--png", help="also render the plot to PNG (cairosvg)")
    common.add_argument("--threads", type=int, default=None,
                        help="sweep worker threads (default: $WGM_SCATTER_THREADS or CPU count)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value, e.g. --set system.eta=3.8 or --set eta=3.8")
    common.add_argument("--out", help="output CSV/JSON path (overrides [output])")
    common.add_argument("--stamp", action="store_true", help="add a wall-clock timestamp to outputs")
    common.add_argument("--quiet", action="store_true", help="only print warnings and errors")

    parser = argparse.ArgumentParser(
        prog=config_manager.get_tool_name(),
        description=config_manager.get_app_config().get("description"),
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {config_manager.get_version()}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("spectrum", parents=[common], help="1D sweep to CSV (+ line plot)")
    commands.add_parser("map", parents=[common], help="2D sweep of one quantity to CSV (+ heatmap)")
    commands.add_parser("verify", parents=[common], help="closed forms vs linear-system oracle")
    analyze = commands.add_parser("analyze", parents=[common], help="dips, regime and correspondence of a CSV")
    analyze.add_argument("--input", help="spectrum CSV to analyze (overrides [analysis] input)")
    commands.add_parser("window", parents=[common], help="parameter range where UR and UT coexist")
    return parser


def make_axis(name, start, stop, count, key: str) -> AxisSpec:
    try:
        return AxisSpec(name=name, start=start, stop=stop, count=count)
    except ValidationError as e:
        raise ConfigError(f"[{key}] invalid axis: {e.errors()[0].get('msg')}", key=key)


def _write(data: bytes, path: Optional[str], label: str) -> None:
    if not path:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    log_ok(f"{label} written: {path} ({len(data):,} bytes)")


def _emit_plot(svg: bytes, args, cfg: RunConfig) -> None:
    svg_path = args.svg or cfg.output.svg
    png_path = args.png or cfg.output.png
    if svg_path:
        _write(svg, svg_path, "SVG")
    if png_path:
        render_png(svg, png_path)
        log_ok(f"PNG written: {png_path}")


def _stamp(args, cfg: RunConfig) -> bool:
    return bool(args.stamp or cfg.output.stamp)


def cmd_spectrum(cfg: RunConfig, args) -> int:
    base = cfg.require_system()
    s = cfg.sweep
    axis = make_axis(s.axis, s.start, s.stop, s.count, "sweep")
    log_info(f"Sweeping {axis.name} over [{axis.start:g}, {axis.stop:g}] with {axis.count} points")

    table = sweep1d(base, axis, delta=s.delta, threads=args.threads, stamp=_stamp(args, cfg))
    metrics = contrast_metrics(table)
    print_table([
        ("points", len(table)),
        ("max contrast |R_f - R_b|", metrics.max_contrast_R),
        ("max contrast |T_f - T_b|", metrics.max_contrast_T),
    ])

    _write(write_csv(table), args.out or cfg.output.csv, "CSV")
    if args.svg or args.png or cfg.output.svg or cfg.output.png:
        _emit_plot(spectrum_svg(table, title=f"eta = {base.eta:g} GHz, theta = {base.theta:.4g} rad"), args, cfg)
    return EXIT_OK


def cmd_map(cfg: RunConfig, args) -> int:
    base = cfg.require_system()
    s = cfg.sweep
    if s.axis2 is None or s.start2 is None or s.stop2 is None:
        missing = next(k for k in ("axis2", "start2", "stop2") if getattr(s, k) is None)
        raise ConfigError(f"map needs [sweep] {missing}", key=missing)
    axis1 = make_axis(s.axis, s.start, s.stop, s.count, "sweep")
    axis2 = make_axis(s.axis2, s.start2, s.stop2, s.count2, "sweep")
    log_info(f"Mapping {s.quantity} over {axis1.name} x {axis2.name} ({axis1.count} x {axis2.count} cells)")

    table = sweep2d(base, axis1, axis2, s.quantity, delta=s.delta, threads=args.threads, stamp=_stamp(args, cfg))
    print_table([
        ("cells", table.cells),
        (f"min {table.quantity}", float(table.data.min())),
        (f"max {table.quantity}", float(table.data.max())),
    ])

    _write(write_csv(table), args.out or cfg.output.csv, "CSV")
    if args.svg or args.png or cfg.output.svg or cfg.output.png:
        _emit_plot(heatmap_svg(table), args, cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    if cfg.verify is None:
        raise ConfigError("verify needs a [verify] section with draws and seed", key="verify")
    draws, seed = cfg.verify.draws, cfg.verify.seed
    log_info(f"Cross-checking closed forms against the oracle: {draws} draws, seed {seed}")

    result = verify_random(draws, seed)
    print_table([
        ("draws", result.draws),
        ("max relative error", result.max_rel_err),
        ("max absolute error", result.max_abs_err),
        ("max residual", result.max_residual),
    ])
    report = build_report("verify", result.to_dict(), Provenance.create(_stamp(args, cfg)))
    _write(dumps(report), args.out or cfg.output.json_path, "Report")

    if not result.passed:
        log_error(f"Verification failed: max relative error {result.max_rel_err:.3e}")
        return EXIT_VERIFY_FAILED
    log_ok("Closed forms agree with the oracle")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig, args) -> int:
    a = cfg.analysis
    path = args.input or a.input
    if not path:
        raise ConfigError("analyze needs [analysis] input or --input", key="input")
    try:
        table = read_table(path)
    except OSError as e:
        raise ConfigError(f"Cannot read '{path}': {e}", key="input")
    if not isinstance(table, SpectrumTable):
        raise CsvSchemaError(f"'{path}' holds a 2D grid; analyze expects a spectrum")
    log_info(f"Analyzing {path} ({len(table)} rows, axis {table.axis.name})")

    base = table.base
    dips = {q: find_dips(table, q, a.min_prominence) for q in OPPOSITE}
    unidirectional = {q: unidirectional_dips(table, q, a.min_prominence) for q in OPPOSITE}
    regime = classify_regime(base, a.band, a.resolution, a.tau_R, a.tau_T, threads=args.threads)

    body = {
        "input": path,
        "axis": table.axis.label,
        "params": base.model_dump(),
        "contrast": contrast_metrics(table).to_dict(),
        "regime": regime.to_dict(),
        "dips": {q: [d.to_dict() for d in found] for q, found in dips.items()},
        "unidirectional_dips": {q: [d.to_dict() for d in found] for q, found in unidirectional.items()},
    }
    if table.axis.name == "delta":
        body["correspondence"] = {
            q: dip_correspondence(dips[q], base.omega1, base.omega2, a.tolerance, quantity=q).to_dict()
            for q in OPPOSITE
        }
    else:
        log_warn("Dip correspondence needs a delta axis; skipped")

    print_table([("regime", regime.regime.value)] + [(f"{q} dips", len(found)) for q, found in dips.items()])
    report = build_report("analyze", body, Provenance.create(_stamp(args, cfg)))
    _write(dumps(report), args.out or cfg.output.json_path, "Report")
    return EXIT_OK


def cmd_window(cfg: RunConfig, args) -> int:
    if cfg.window is None:
        raise ConfigError("window needs a [window] section", key="window")
    w, a = cfg.window, cfg.analysis
    base = cfg.require_system()
    scan = make_axis(w.parameter, w.start, w.stop, w.count, "window")
    log_info(f"Scanning {scan.name} over [{scan.start:g}, {scan.stop:g}] for the UR and UT window")

    result = regime_window(base, scan.name, scan.values(), a.band, a.resolution, a.tau_R, a.tau_T,
                           threads=args.threads)
    rows = [(f"{scan.name} window", f"{lo:.4g} .. {hi:.4g}") for lo, hi in result.intervals]
    print_table(rows or [(f"{scan.name} window", "none")])

    report = build_report("window", result.to_dict(), Provenance.create(_stamp(args, cfg)))
    _write(dumps(report), args.out or cfg.output.json_path, "Report")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "map": cmd_map,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "window": cmd_window,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(e.code or 0)
    set_quiet(args.quiet)

    print_banner(f"{config_manager.get_tool_name()} {args.command}")
    try:
        cfg = load_run_config(args.config, args.overrides)
        return COMMANDS[args.command](cfg, args)
    except WgmScatterError as e:
        log_error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        log_error(f"Invalid parameters: {e}")
        return EXIT_CONFIG
    except OSError as e:
        # unwritable --out, --svg or --png path
        log_error(f"Cannot write output: {e}")
        return EXIT_CONFIG
    except ValueError as e:
        # json.dumps refuses NaN/inf
        log_error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
