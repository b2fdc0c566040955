"""Figure-reproduction presets.

``FIGURE_TABLE`` holds the stated parameters of each figure. ``PRESETS``
turns them into runnable sweeps; anything the table leaves open (q1's
energies, ramp shape, time grid) gets the defaults documented in the
README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .annealing import AnnealParams
from .sequential import SequentialParams
from .simultaneous import SimultaneousParams
from .single import SingleQubitParams

# Stated values only. "ratio" is the q2 (or single qubit) tunneling
# over energy spacing, Delta/eps.
FIGURE_TABLE = {
    "2": {"beta_max": 1.5, "ratio": 4.0, "xi": 0.4},
    "3": {"n_max": 27, "ratio": 4.0, "delta_over_g": 8.0, "eta": (1.25, 2.5), "alpha": 1.0},
    "4": {"n_max": 27, "eta": 1.25, "ratio": 1.0, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 1.0},
    "5": {"n_max": 27, "eta": 1.25, "ratio": 1.0, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 1.0},
    "6": {"n_max": 27, "eta": 1.25, "ratio": 1.0, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 1.0},
    "xx": {"n_max": 27, "eta": 1.25, "ratio": 10.0, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 1.0},
    "8": {"n_max": 21, "eta": 1.25, "ratio": 0.5, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 2.0},
    "9": {"n_max": 21, "eta": 1.0, "ratio": 8.0, "delta_over_g": 8.0, "j_over_gap": 0.05, "alpha": 2.0},
}

QUARTER_TURN = np.linspace(0.0, math.pi / 2, 51)
ALPHA_GRID = np.linspace(0.0, 3.0, 31)
ALPHA_GRID_WIDE = np.linspace(0.0, 4.5, 46)
J_GRID = np.linspace(0.0, 0.1, 41)

# q1 is flux-dominated for the zz figures and tunneling-dominated for the xx one.
SEQ_Q1_ZZ = {"eps1": 0.2, "delta1": 2.0}
SEQ_Q1_XX = {"eps1": 2.0, "delta1": 0.2}
# q1 copies q2's Delta/eps and eta at 3/4 of q2's energy scale, so omega_2 - omega_1 != 0.
Q1_SCALE = 0.75


@dataclass(frozen=True)
class Preset:
    model: str
    params: object
    axis: str
    grid: tuple
    bases: tuple


def _seq(fig, **kw):
    c = FIGURE_TABLE[fig]
    q1 = SEQ_Q1_XX if fig == "xx" else SEQ_Q1_ZZ
    return SequentialParams(
        eps2=1.0,
        delta2=c["ratio"],
        eta=c["eta"],
        delta_over_g=c["delta_over_g"],
        n_max=c["n_max"],
        alpha=c["alpha"],
        j_over_gap=c["j_over_gap"],
        **q1,
        **kw,
    )


def _sim(fig, **kw):
    c = FIGURE_TABLE[fig]
    return SimultaneousParams(
        eps1=Q1_SCALE,
        delta1=Q1_SCALE * c["ratio"],
        eta1=c["eta"],
        eps2=1.0,
        delta2=c["ratio"],
        eta2=c["eta"],
        delta_over_g=c["delta_over_g"],
        n_max=c["n_max"],
        alpha=c["alpha"],
        j_over_gap=c["j_over_gap"],
        **kw,
    )


def _single(eta=1.25):
    c = FIGURE_TABLE["3"]
    return SingleQubitParams(eps_q=1.0, delta_q=c["ratio"], eta=eta, delta_over_g=c["delta_over_g"], n_max=c["n_max"], alpha=c["alpha"])


def _anneal():
    c = FIGURE_TABLE["2"]
    return AnnealParams(beta_max=c["beta_max"], xi=c["xi"], theta_q=math.atan(c["ratio"]))


def _tuple(a):
    return tuple(float(x) for x in a)


def _build():
    out = {
        ("anneal", "2a"): Preset("anneal", _anneal(), "t_frac", _tuple(np.linspace(0, 1, 101)), ("flux", "energy")),
        ("anneal", "2b"): Preset("anneal", _anneal(), "beta_max", _tuple(np.round(np.arange(1.0, 2.5001, 0.05), 10)), ("flux", "energy")),
        ("single", "3a"): Preset("single", _single(), "chi_t", _tuple(QUARTER_TURN), ("flux", "energy")),
        ("single", "3b"): Preset("single", _single(), "alpha", _tuple(ALPHA_GRID), ("flux", "energy")),
    }
    three = ("flux", "energy_q2", "energy_q1q2")
    for fig, bases, approx in (("4", three, "full"), ("5", ("bare", "dressed"), "full"), ("6", ("energy_q1q2", "zz_approx"), "full"), ("xx", ("bare", "dressed"), "xx")):
        p = _seq(fig, approx=approx)
        out[("sequential", fig + "a")] = Preset("sequential", p, "chi_t", _tuple(QUARTER_TURN), bases)
        out[("sequential", fig + "b")] = Preset("sequential", p, "alpha", _tuple(ALPHA_GRID), bases)
        out[("sequential", fig + "c")] = Preset("sequential", p, "j_over_gap", _tuple(J_GRID), bases)
    zz3 = ("flux", "energy_q1q2", "zz_approx")
    p8 = _sim("8", approx="zz")
    out[("simultaneous", "8a")] = Preset("simultaneous", p8, "chi_t", _tuple(QUARTER_TURN), zz3)
    out[("simultaneous", "8b")] = Preset("simultaneous", replace(p8, t_over_td=0.5), "alpha", _tuple(ALPHA_GRID_WIDE), zz3)
    out[("simultaneous", "8c")] = Preset("simultaneous", replace(p8, t_over_td=0.5, alpha=1.0), "j_over_gap", _tuple(J_GRID), zz3)
    p9 = _sim("9", approx="xx")
    bd = ("bare", "dressed")
    out[("simultaneous", "9a")] = Preset("simultaneous", p9, "chi_t", _tuple(QUARTER_TURN), bd)
    out[("simultaneous", "9b")] = Preset("simultaneous", p9, "alpha", _tuple(ALPHA_GRID_WIDE), bd)
    out[("simultaneous", "9c")] = Preset("simultaneous", replace(p9, alpha=0.5), "j_over_gap", _tuple(J_GRID), bd)
    return out


PRESETS = _build()


def figures_for(model: str) -> list:
    return sorted(fig for (m, fig) in PRESETS if m == model)


def get_preset(model: str, fig: str) -> Preset:
    try:
        return PRESETS[(model, fig)]
    except KeyError:
        raise KeyError(f"no preset {fig!r} for {model}; available: {', '.join(figures_for(model))}") from None
