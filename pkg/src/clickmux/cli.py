"""Parameter-sweep command line: emits figure-ready tables as CSV or JSON.

Subcommands
    quantum-sweep    closed-form Q_B / CP of a coherent input over depths
    classical-sweep  closed-form classical Q_B / CP over depths
    montecarlo       rejection-sampled estimates vs closed forms
    appendix-a       N*Pr(on|N) and CP decay of a classical source

Exit codes: 0 success, 1 validation error, 2 numerical error, 3 I/O error.
Floats are printed with 17 significant digits so CSV cells re-parse to the
exact doubles the library computed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import classical, montecarlo, quantum
from .stats import (
    MultiplexerConfig,
    ZeroAcceptance,
    cp_from_odds,
    post_selected_from_odds,
    qb_from_odds,
)

OUTPUT_DIR_ENV = "CLICKMUX_OUT_DIR"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

QUANTUM_COLUMNS = ("alpha", "m", "N", "C", "Q_B", "CP", "Q_B_inf", "CP_inf")
CLASSICAL_COLUMNS = ("source", "beta", "m", "N", "p_click", "C", "Q_B", "CP")
MONTECARLO_COLUMNS = (
    "model", "alpha", "source", "beta", "m", "N", "accepted",
    "qb_est", "qb_se", "cp_est", "cp_se", "qb_closed", "cp_closed",
    "sigma_distance",
)
APPENDIX_COLUMNS = ("source", "m", "N", "Pr_on", "N_Pr_on", "CP")


def parse_source(spec: str) -> classical.IntensityDistribution:
    """Parse delta:<v> | uniform:<a>,<b> | exp:<mu> | file:<path>."""
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"source spec {spec!r} must look like kind:params")
    try:
        if kind == "delta":
            return classical.DeltaIntensity(float(rest))
        if kind == "uniform":
            low, high = (float(part) for part in rest.split(","))
            return classical.UniformIntensity(low, high)
        if kind == "exp":
            return classical.ExponentialIntensity(float(rest))
        if kind == "file":
            return classical.load_tabulated(rest)
    except OSError:
        raise
    except ValueError as exc:
        raise ValueError(f"bad source spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown source kind {kind!r} in {spec!r}")


def _check_depths(depths) -> list[int]:
    if not depths:
        raise ValueError("at least one depth is required")
    depths = [int(m) for m in depths]
    if any(m < 1 for m in depths):
        raise ValueError(f"depths must all be >= 1, got {depths}")
    return depths


# ---------------------------------------------------------------------------
# row builders (plain functions so scripts can call them without argparse)
# ---------------------------------------------------------------------------


def quantum_sweep_rows(alphas, depths) -> list[dict]:
    if not alphas:
        raise ValueError("at least one amplitude is required")
    depths = _check_depths(depths)
    for alpha in alphas:
        if not math.isfinite(alpha) or alpha < 0.0:
            raise ValueError(f"amplitudes must be finite and >= 0, got {alpha!r}")
    rows = []
    for alpha in alphas:
        limits = quantum.asymptotics(alpha)
        for m in depths:
            config = MultiplexerConfig(m)
            try:
                odds = quantum.branch_odds(alpha, config)
            except OverflowError:
                odds = math.inf
            rows.append({
                "alpha": alpha,
                "m": m,
                "N": config.degree,
                "C": odds,
                "Q_B": quantum.qb_closed_form(alpha, config),
                "CP": quantum.cp_closed_form(alpha, config),
                "Q_B_inf": limits.qb_inf,
                "CP_inf": limits.cp_inf,
            })
    return rows


def _classical_sources(intensities, source_spec):
    """(label, source) pairs; --intensities become delta sources labelled by value."""
    if (intensities is None) == (source_spec is None):
        raise ValueError("provide either --intensities or --source (exactly one)")
    if intensities is not None:
        if not intensities:
            raise ValueError("at least one intensity is required")
        for value in intensities:
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"intensities must be finite and >= 0, got {value!r}")
        return [(f"{value:.17g}", classical.DeltaIntensity(value)) for value in intensities]
    src = parse_source(source_spec)
    return [(src.label(), src)]


def _classical_odds(det, source, config):
    """Branch odds for any source; inf when the odds overflow or p saturates."""
    if isinstance(source, classical.DeltaIntensity):
        try:
            return classical.branch_odds_classical(det, source.value, config)
        except classical.OddsDiverged:
            return math.inf
    p_on = classical.averaged_click_probability(det, source, config)
    if p_on >= 1.0:
        return math.inf
    return (config.degree / 2.0) * p_on / (1.0 - p_on)


def classical_sweep_rows(intensities, source_spec, beta, depths) -> list[dict]:
    depths = _check_depths(depths)
    det = classical.DetectorModel(ionization=beta)
    rows = []
    for label, source in _classical_sources(intensities, source_spec):
        for m in depths:
            config = MultiplexerConfig(m)
            row = {
                "source": label,
                "beta": beta,
                "m": m,
                "N": config.degree,
                "p_click": None,
                "C": None,
                "Q_B": None,
                "CP": None,
            }
            try:
                p_on = classical.averaged_click_probability(det, source, config)
                odds = _classical_odds(det, source, config)
            except classical.QuadratureFailure:
                rows.append(row)
                continue
            row.update({
                "p_click": p_on,
                "C": odds,
                "Q_B": qb_from_odds(odds, config.degree),
                "CP": cp_from_odds(odds),
            })
            rows.append(row)
    return rows


def montecarlo_rows(alphas, intensities, source_spec, beta, depths, trials, seed,
                    workers=1) -> list[dict]:
    depths = _check_depths(depths)
    if not isinstance(trials, int) or trials < 1:
        raise ValueError(f"trials must be an integer >= 1, got {trials!r}")
    quantum_mode = alphas is not None
    if quantum_mode and (intensities is not None or source_spec is not None):
        raise ValueError("choose either --alphas or a classical source, not both")

    cells = []
    if quantum_mode:
        if not alphas:
            raise ValueError("at least one amplitude is required")
        for alpha in alphas:
            model = montecarlo.QuantumModel(alpha)
            for m in depths:
                config = MultiplexerConfig(m)
                odds = quantum._branch_odds_or_inf(alpha, config)
                meta = {"model": "quantum", "alpha": alpha, "source": None, "beta": None}
                cells.append((meta, model, config, odds))
    else:
        det = classical.DetectorModel(ionization=beta)
        for label, source in _classical_sources(intensities, source_spec):
            model = montecarlo.ClassicalModel(det, source)
            for m in depths:
                config = MultiplexerConfig(m)
                odds = _classical_odds(det, source, config)
                meta = {"model": "classical", "alpha": None, "source": label, "beta": beta}
                cells.append((meta, model, config, odds))

    rows = []
    for meta, model, config, odds in cells:
        qb_closed = qb_from_odds(odds, config.degree)
        cp_closed = cp_from_odds(odds)
        row = dict(meta)
        row.update({
            "m": config.depth,
            "N": config.degree,
            "accepted": 0,
            "qb_est": None,
            "qb_se": None,
            "cp_est": None,
            "cp_se": None,
            "qb_closed": qb_closed,
            "cp_closed": cp_closed,
            "sigma_distance": None,
        })
        trial_config = montecarlo.TrialConfig(
            model=model, multiplexer=config, trials=trials, seed=seed
        )
        try:
            report = montecarlo.estimate(trial_config, workers=workers)
        except ZeroAcceptance:
            # score the empty cell by Poisson consistency of zero accepted
            # trials with the closed-form acceptance probability
            mass = montecarlo.post_selection_acceptance(trial_config)
            if mass is not None:
                row["sigma_distance"] = math.sqrt(trials * mass)
            rows.append(row)
            continue
        row.update({
            "accepted": report.accepted_trials,
            "qb_est": report.qb_estimate,
            "qb_se": report.qb_stderr,
            "cp_est": report.cp_estimate,
            "cp_se": report.cp_stderr,
            "sigma_distance": montecarlo.sigma_distance(
                report, qb_closed, cp_closed, post_selected_from_odds(odds)
            ),
        })
        rows.append(row)
    return rows


def appendix_a_rows(source_spec, beta, depths) -> list[dict]:
    if source_spec is None:
        raise ValueError("--source is required")
    depths = _check_depths(depths)
    det = classical.DetectorModel(ionization=beta)
    source = parse_source(source_spec)
    label = source.label()
    rows = []
    for m in depths:
        config = MultiplexerConfig(m)
        row = {
            "source": label, "m": m, "N": config.degree,
            "Pr_on": None, "N_Pr_on": None, "CP": None,
        }
        try:
            p_on = classical.averaged_click_probability(det, source, config)
        except classical.QuadratureFailure:
            rows.append(row)
            continue
        row.update({
            "Pr_on": p_on,
            "N_Pr_on": config.degree * p_on,
            "CP": classical.cp_from_click_probability(p_on, config.degree),
        })
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def resolve_output_path(out: str | None, default_name: str) -> str:
    if out is not None:
        return out
    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), default_name)


def write_rows(path: str, columns, rows, fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(row[col]) for col in columns])
    elif fmt == "json":
        with open(path, "w") as handle:
            json.dump([{col: row[col] for col in columns} for row in rows],
                      handle, indent=2)
            handle.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits with its own code 2 on bad usage; route through ValueError
    # so the documented validation exit code (1) applies instead
    def error(self, message):
        raise ValueError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="clickmux", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file of option values; flags override")
        p.add_argument("--depths", nargs="+", type=int, metavar="M",
                       help="multiplexer depths m (degree N = 2^m)")
        p.add_argument("--out", help="output path (default: per-command name "
                       f"under ${OUTPUT_DIR_ENV} or the working directory)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("quantum-sweep", help="coherent-state closed forms per depth")
    add_common(p)
    p.add_argument("--alphas", nargs="+", type=float, metavar="A")

    p = sub.add_parser("classical-sweep", help="classical closed forms per depth")
    add_common(p)
    p.add_argument("--intensities", nargs="+", type=float, metavar="I")
    p.add_argument("--source", help="delta:<v>|uniform:<a>,<b>|exp:<mu>|file:<path>")
    p.add_argument("--beta", type=float, default=None)

    p = sub.add_parser("montecarlo", help="trial-level estimates vs closed forms")
    add_common(p)
    p.add_argument("--alphas", nargs="+", type=float, metavar="A")
    p.add_argument("--intensities", nargs="+", type=float, metavar="I")
    p.add_argument("--source", help="delta:<v>|uniform:<a>,<b>|exp:<mu>|file:<path>")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("appendix-a", help="classical large-degree decay table")
    add_common(p)
    p.add_argument("--source", help="delta:<v>|uniform:<a>,<b>|exp:<mu>|file:<path>")
    p.add_argument("--beta", type=float, default=None)

    return parser


_DEFAULTS = {"beta": 0.5, "seed": 0, "workers": 1, "format": "csv"}


def _merge_options(args: argparse.Namespace) -> dict:
    """Layer config-file values under explicit flags, then fill defaults."""
    options = dict(vars(args))
    config_path = options.pop("config", None)
    if config_path:
        with open(config_path) as handle:
            try:
                from_file = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{config_path}: invalid JSON ({exc})") from exc
        if not isinstance(from_file, dict):
            raise ValueError(f"{config_path}: config must be a JSON object")
        unknown = set(from_file) - set(options)
        if unknown:
            raise ValueError(f"{config_path}: unknown options {sorted(unknown)}")
        for key, value in from_file.items():
            if options.get(key) is None:
                options[key] = value
    for key, value in _DEFAULTS.items():
        if key in options and options[key] is None:
            options[key] = value
    return options


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        opts = _merge_options(args)
        command = opts.pop("command")
        fmt = opts.pop("format")
        out = opts.pop("out", None)
        if command == "quantum-sweep":
            rows = quantum_sweep_rows(opts["alphas"], opts["depths"])
            columns, default_name = QUANTUM_COLUMNS, f"quantum_sweep.{fmt}"
        elif command == "classical-sweep":
            rows = classical_sweep_rows(
                opts.get("intensities"), opts.get("source"), opts["beta"],
                opts["depths"])
            columns, default_name = CLASSICAL_COLUMNS, f"classical_sweep.{fmt}"
        elif command == "montecarlo":
            if opts.get("trials") is None:
                raise ValueError("--trials is required")
            rows = montecarlo_rows(
                opts.get("alphas"), opts.get("intensities"), opts.get("source"),
                opts["beta"], opts["depths"], opts["trials"], opts["seed"],
                opts["workers"])
            columns, default_name = MONTECARLO_COLUMNS, f"montecarlo.{fmt}"
        else:
            rows = appendix_a_rows(opts.get("source"), opts["beta"], opts["depths"])
            columns, default_name = APPENDIX_COLUMNS, f"appendix_a.{fmt}"
        path = resolve_output_path(out, default_name)
        write_rows(path, columns, rows, fmt)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OverflowError, classical.OddsDiverged, classical.QuadratureFailure,
            ZeroAcceptance) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
