"""Run every figure preset and write one CSV per panel.

Usage: python3 scripts/reproduce_figures.py [OUTDIR]

Panel 2a is written twice, once per ramp shape, because the ramp is a
free choice that changes the curve between the end points.
"""

import sys
import warnings
from dataclasses import replace
from pathlib import Path

from qfp_sim.presets import PRESETS
from qfp_sim.sweep import SweepTask, default_workers, emit, run_sweep


def main(outdir="figures"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    workers = default_workers()
    jobs = []
    for (model, fig), pre in sorted(PRESETS.items()):
        if (model, fig) == ("anneal", "2a"):
            for ramp in ("linear", "cosine"):
                jobs.append((f"{model}_{fig}_{ramp}", replace(pre.params, schedule=ramp), pre))
        else:
            jobs.append((f"{model}_{fig}", pre.params, pre))
    for name, params, pre in jobs:
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            result = run_sweep(SweepTask(pre.model, params, pre.bases, pre.axis, pre.grid), workers)
        emit(result, "csv", out / f"{name}.csv")
        emit(result, "json", out / f"{name}.json")
        print(f"{name}: {len(result.axis_values)} points -> {out / (name + '.csv')}")


if __name__ == "__main__":
    main(*sys.argv[1:])
