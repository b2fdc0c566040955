"""Grid execution and CSV/JSON serialization shared by all models."""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import import_module
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, SweepPointError

MAX_GRID = 10_000
FIDELITY_CEILING = 1 + 1e-9

# model name -> "module:function" evaluating one grid point
MODEL_POINTS = {
    "single": "qfp_sim.single:point_fidelities",
    "sequential": "qfp_sim.sequential:point_fidelities",
    "simultaneous": "qfp_sim.simultaneous:point_fidelities",
    "anneal": "qfp_sim.annealing:point_fidelities",
}


@dataclass
class SweepResult:
    axis_name: str
    axis_values: list
    series: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.axis_values)
        for name, values in self.series.items():
            if len(values) != n:
                raise ValueError(f"series {name!r} has {len(values)} points, axis has {n}")

    def check_range(self, lo=0.0, hi=FIDELITY_CEILING):
        for name, values in self.series.items():
            v = np.asarray(values)
            if v.size and (v.min() < lo or v.max() > hi):
                raise ValueError(f"series {name!r} leaves [{lo}, {hi}]")
        return self

    def to_dict(self):
        return {
            "axis_name": self.axis_name,
            "axis_values": list(self.axis_values),
            "series": {k: list(v) for k, v in self.series.items()},
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class SweepTask:
    model: str
    params: object
    bases: tuple
    axis: str
    grid: tuple


def _resolve(model):
    try:
        mod, fn = MODEL_POINTS[model].split(":")
    except KeyError:
        raise ConfigError(f"unknown model {model!r}") from None
    return getattr(import_module(mod), fn)


def _evaluate(args):
    task, index = args
    fn = _resolve(task.model)
    value = task.grid[index]
    try:
        return fn(task.params, task.bases, task.axis, value)
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        record = {"model": task.model, "axis": task.axis, "value": value, "params": _params_record(task.params)}
        raise SweepPointError(f"{type(exc).__name__}: {exc}", record) from exc


def _params_record(params):
    if dataclasses.is_dataclass(params):
        return dataclasses.asdict(params)
    return dict(params)


def _derived_record(params):
    # scalar properties (chi, t_d, J, angles, ...); ones undefined for these params are skipped
    out = {}
    for name in sorted(dir(type(params))):
        if name.startswith("_") or not isinstance(getattr(type(params), name), property):
            continue
        try:
            value = getattr(params, name)
        except (ValueError, ArithmeticError):
            continue
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            out[name] = float(value)
    return out


def default_workers() -> int:
    env = os.environ.get("QFP_SIM_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"QFP_SIM_WORKERS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"QFP_SIM_WORKERS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def run_sweep(task: SweepTask, workers: int = 1, metadata=None) -> SweepResult:
    """Evaluate every grid point; output order follows the grid, not completion."""
    if not task.bases:
        raise ConfigError("basis set is empty")
    grid = [float(g) for g in task.grid]
    if not grid or len(grid) > MAX_GRID:
        raise ConfigError(f"grid must have between 1 and {MAX_GRID} points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid must be strictly ascending")
    if workers < 1:
        raise ConfigError("workers must be positive")
    _resolve(task.model)
    task = dataclasses.replace(task, grid=tuple(grid), bases=tuple(task.bases))

    jobs = [(task, i) for i in range(len(grid))]
    if workers == 1 or len(grid) == 1:
        rows = [_evaluate(j) for j in jobs]
    else:
        # chunksize=1: idle workers pick up the next index as soon as they finish
        with ProcessPoolExecutor(max_workers=min(workers, len(grid))) as pool:
            rows = list(pool.map(_evaluate, jobs, chunksize=1))

    series = {b: [float(r[b]) for r in rows] for b in task.bases}
    meta = {
        "model": task.model,
        "axis": task.axis,
        "bases": list(task.bases),
        "params": _params_record(task.params),
        "derived": _derived_record(task.params),
        "code_version": __version__,
        "warnings": [],
    }
    warn = getattr(import_module(MODEL_POINTS[task.model].split(":")[0]), "sweep_warnings", None)
    if warn is not None:
        meta["warnings"] = warn(task.params, task.axis, grid)
    if metadata:
        meta.update(metadata)
    return SweepResult(task.axis, grid, series, meta)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit(result: SweepResult, fmt: str, path) -> None:
    path = Path(path)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                names = list(result.series)
                w.writerow(["axis", *names])
                for i, x in enumerate(result.axis_values):
                    w.writerow([_fmt(x), *(_fmt(result.series[n][i]) for n in names)])
        elif fmt == "json":
            with path.open("w") as fh:
                json.dump(result.to_dict(), fh, indent=2, default=_json_default)
                fh.write("\n")
        else:
            raise ConfigError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (tuple, set)):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def read_csv(path, axis_name="axis") -> SweepResult:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    axis = [float(r[0]) for r in body]
    series = {name: [float(r[i + 1]) for r in body] for i, name in enumerate(header[1:])}
    return SweepResult(axis_name, axis, series)


def read_json(path) -> SweepResult:
    with Path(path).open() as fh:
        d = json.load(fh)
    return SweepResult(d["axis_name"], d["axis_values"], d["series"], d.get("metadata", {}))
