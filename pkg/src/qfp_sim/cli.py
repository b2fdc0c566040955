"""Command-line entry point: ``qfp-sim <model> [--fig ID] [--set key=value ...]``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, presets
from .annealing import AnnealParams
from .errors import ConfigError, QfpSimError, SweepPointError
from .oracles import format_table, run_suite
from .sequential import SequentialParams
from .simultaneous import SimultaneousParams
from .single import SingleQubitParams
from .sweep import SweepTask, default_workers, emit, run_sweep

MODELS = {
    "anneal": (AnnealParams, ("t_frac", "beta_max"), ("flux", "energy")),
    "single": (SingleQubitParams, ("chi_t", "alpha"), ("flux", "energy")),
    "sequential": (
        SequentialParams,
        ("chi_t", "t_over_td", "alpha", "j_over_gap"),
        ("flux", "energy_q2", "energy_q1q2", "zz_approx", "xx_approx", "bare", "dressed"),
    ),
    "simultaneous": (
        SimultaneousParams,
        ("chi_t", "t_over_td", "alpha", "j_over_gap"),
        ("flux", "energy_q1q2", "zz_approx", "xx_approx", "bare", "dressed"),
    ),
}

# named override flags -> (parameter field, models that accept it, choices, value mapping)
OVERRIDES = {
    "fidelity_protocol": ("protocol", ("single", "sequential", "simultaneous"), ("average", "0", "1"), None),
    "ramp": ("schedule", ("anneal",), ("linear", "cosine"), None),
    "energy_mode": ("energy_mode", ("anneal",), ("modulus", "real"), None),
    "lambda2": ("lambda2_convention", ("simultaneous",), ("tunneling", "detuning"), None),
    "branch_sign": ("branch_flip", ("single", "sequential", "simultaneous"), ("normal", "flipped"), {"normal": False, "flipped": True}),
    "spectator": ("spectator", ("sequential", "simultaneous"), ("mixed", "0", "1"), None),
}

OVERRIDE_HELP = {
    "fidelity_protocol": "fidelity protocol: average over both basis states (default) or a single initial state 0/1",
    "ramp": "annealing ramp shape for beta_L(t) (default linear)",
    "energy_mode": "reduction of the complex energy-basis ratio to a real CDF argument (default modulus)",
    "lambda2": "lambda_2 convention: divide by the effective tunneling (default) or by the detuning",
    "branch_sign": "branch sign: 'flipped' swaps which measurement outcome signals basis state 0",
    "spectator": "q1 spectator state: maximally mixed (default) or the basis state 0/1",
}

EPILOG = "overrides (per subcommand): " + "; ".join(
    f"--{k.replace('_', '-')} {{{','.join(v[2])}}}" for k, v in OVERRIDES.items()
) + ". Worker count comes from QFP_SIM_WORKERS (default: all cores)."


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _grid(text: str):
    """'start:stop:num' (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return tuple(float(x) for x in np.linspace(float(start), float(stop), int(num)))
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def _coerce(cls, key: str, raw: str):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    if key not in fields:
        raise ConfigError(f"unknown parameter {key!r}; valid: {', '.join(sorted(fields))}")
    default = fields[key].default
    try:
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return str(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfp-sim", description="QFP-mediated flux-qubit readout fidelity sweeps.", epilog=EPILOG)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for model, (cls, axes, bases) in MODELS.items():
        p = sub.add_parser(model, help=f"{model} fidelity sweep", epilog=EPILOG)
        p.add_argument("--fig", help=f"figure preset: {', '.join(presets.figures_for(model))}")
        p.add_argument("--config", help="INI-style file with key = value lines (section [params] or none)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one parameter")
        p.add_argument("--axis", choices=axes)
        p.add_argument("--grid", help="start:stop:num or comma-separated values (strictly ascending)")
        p.add_argument("--basis", action="append", help=f"basis to evaluate (repeatable); one of {', '.join(bases)}")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default: standard output)")
        for name, (_, models, choices, _) in OVERRIDES.items():
            if model in models:
                p.add_argument("--" + name.replace("_", "-"), choices=choices, help=OVERRIDE_HELP[name])
    sub.add_parser("oracles", help="run the displaced-oscillator checks and print a pass/fail table")
    return parser


def _read_config(path):
    cp = configparser.ConfigParser()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        cp.read_string(text if text.lstrip().startswith("[") else "[params]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    values = {}
    for section in cp.sections():
        values.update(cp[section])
    return values


def resolve(args):
    """Validate everything and return (SweepTask, extra metadata) without computing."""
    model = args.command
    cls, axes, all_bases = MODELS[model]
    if args.fig:
        try:
            preset = presets.get_preset(model, args.fig)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        params, axis, grid, bases = preset.params, preset.axis, preset.grid, preset.bases
    else:
        params, axis, grid, bases = cls(), axes[0], None, all_bases[:2]

    updates = {}
    meta_run = {"fig": args.fig}
    if args.config:
        cfg = _read_config(args.config)
        for key in ("axis", "grid", "basis", "bases"):
            if key in cfg:
                value = cfg.pop(key)
                if key == "axis":
                    axis = value
                elif key == "grid":
                    grid = _grid(value)
                else:
                    bases = tuple(b.strip() for b in value.split(","))
        for k, v in cfg.items():
            updates[k] = _coerce(cls, k, v)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        updates[k.strip()] = _coerce(cls, k.strip(), v.strip())
    for name, (field, models, _, mapping) in OVERRIDES.items():
        value = getattr(args, name, None)
        if value is not None and model in models:
            updates[field] = mapping[value] if mapping else value
            meta_run[name] = value
    try:
        params = dataclasses.replace(params, **updates)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    if args.axis:
        axis = args.axis
    if axis not in axes:
        raise ConfigError(f"axis {axis!r} not valid for {model}; choose from {', '.join(axes)}")
    if args.grid:
        grid = _grid(args.grid)
    if grid is None:
        raise ConfigError("no grid given (use --grid or a --fig preset)")
    if args.basis:
        bases = tuple(b.strip() for arg in args.basis for b in arg.split(","))
    bad = [b for b in bases if b not in all_bases]
    if bad:
        raise ConfigError(f"unknown basis {', '.join(bad)} for {model}")
    if not bases:
        raise ConfigError("basis set is empty")
    return SweepTask(model, params, tuple(bases), axis, tuple(grid)), meta_run


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        if args.command == "oracles":
            checks = run_suite()
            print(format_table(checks))
            return 0 if all(c.passed for c in checks) else 2
        task, meta_run = resolve(args)
        workers = default_workers()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = run_sweep(task, workers, metadata={"run": meta_run})
        result.metadata["warnings"] += sorted({str(w.message) for w in caught})
        result.check_range()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (SweepPointError, QfpSimError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    try:
        if args.out:
            emit(result, args.format, args.out)
        else:
            _emit_stdout(result, args.format)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 1
    for w in result.metadata.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _emit_stdout(result, fmt):
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / f"out.{fmt}"
        emit(result, fmt, path)
        sys.stdout.write(path.read_text())


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
