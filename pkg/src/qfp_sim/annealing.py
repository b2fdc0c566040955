"""Latching fidelity of a flux qubit into a QFP double well.

The QFP potential U(phi) = phi^2/2 + beta cos(phi) - lam phi sz becomes
bistable for beta > 1. After latching, the pointer wave packet is treated as
a Gaussian of width sigma centred at +-phi_p and the fidelity is the weight
on the correct side of the barrier.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.special import ndtr

from .errors import InvalidTime

BASES = ("flux", "energy")
RAMPS = ("linear", "cosine")
ENERGY_MODES = ("modulus", "real")


@dataclass(frozen=True)
class AnnealParams:
    beta_max: float = 1.5
    xi: float = 0.4
    theta_q: float = math.atan(4.0)
    t_qfp: float = 1.0
    schedule: str = "linear"
    # how the complex energy-basis ratio is reduced to a real CDF argument
    energy_mode: str = "modulus"
    lam: float = 0.0

    def __post_init__(self):
        if not 0 < self.beta_max <= 10:
            raise ValueError(f"beta_max must lie in (0, 10], got {self.beta_max}")
        if not 0 < self.xi <= 2:
            raise ValueError(f"xi must lie in (0, 2], got {self.xi}")
        if self.t_qfp <= 0:
            raise ValueError("t_qfp must be positive")
        if self.schedule not in RAMPS:
            raise ValueError(f"schedule must be one of {RAMPS}")
        if self.energy_mode not in ENERGY_MODES:
            raise ValueError(f"energy_mode must be one of {ENERGY_MODES}")

    @classmethod
    def from_ratio(cls, delta_over_eps: float, **kw):
        return cls(theta_q=math.atan(delta_over_eps), **kw)


@dataclass(frozen=True)
class WellGeometry:
    beta: float
    phi_p: float
    sigma: float


def beta_schedule(p: AnnealParams, t: float) -> float:
    if not 0 <= t <= p.t_qfp:
        raise InvalidTime(f"t must lie in [0, {p.t_qfp}], got {t}")
    s = t / p.t_qfp
    if p.schedule == "linear":
        return p.beta_max * s
    return p.beta_max * 0.5 * (1 - math.cos(math.pi * s))


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def minimum_position(beta: float, lam: float = 0.0) -> float:
    """Positive minimum of U: root of phi - beta sin(phi) - lam = 0."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if lam == 0.0:
        if beta <= 1:
            return 0.0
        f = lambda x: x - beta * math.sin(x)  # noqa: E731
        # f < 0 just above 0 and f(pi) = pi > 0
        lo = min(1e-6, math.sqrt(6 * (beta - 1) / beta) / 2)
        if f(lo) >= 0:
            return math.sqrt(6 * (beta - 1) / beta)
        return _bisect(f, lo, math.pi)
    # tilted well: the sz=+1 minimum is the root with positive curvature to the right of 0
    f = lambda x: x - beta * math.sin(x) - abs(lam)  # noqa: E731
    hi = math.pi + abs(lam)
    lo = 0.0
    root = _bisect(f, lo, hi) if f(lo) < 0 else 0.0
    return root


def well_width(beta: float, phi_p, xi: float):
    """sigma = [sqrt(1 - beta cos phi_p) / xi]^(-1/2); complex phi_p allowed."""
    curv = 1 - beta * cmath.cos(phi_p)
    if isinstance(phi_p, complex):
        return (cmath.sqrt(curv) / xi) ** -0.5
    curv = curv.real
    if curv <= 0:
        return math.inf
    return (math.sqrt(curv) / xi) ** -0.5


def solve_minimum(beta: float, xi: float = 0.4, lam: float = 0.0) -> WellGeometry:
    phi = minimum_position(beta, lam)
    return WellGeometry(beta, phi, well_width(beta, phi, xi))


def _ratio_energy(geom: WellGeometry, p: AnnealParams) -> complex:
    phi_t = cmath.exp(-1j * p.theta_q) * geom.phi_p
    sig_t = well_width(geom.beta, complex(phi_t), p.xi)
    return phi_t / sig_t


def fidelity_at_beta(beta: float, p: AnnealParams, basis: str) -> float:
    geom = solve_minimum(beta, p.xi, p.lam)
    if geom.phi_p == 0 or math.isinf(geom.sigma):
        return 0.5
    if basis == "flux":
        x = geom.phi_p / geom.sigma
    elif basis == "energy":
        z = _ratio_energy(geom, p)
        x = abs(z) if p.energy_mode == "modulus" else z.real
    else:
        raise ValueError(f"unknown annealing basis {basis!r}")
    return float(ndtr(x))


def anneal_fidelity(p: AnnealParams, t: float, basis: str) -> float:
    return fidelity_at_beta(beta_schedule(p, t), p, basis)


def point_fidelities(p: AnnealParams, bases, axis: str, value: float) -> dict:
    """``t_frac`` sweeps t/t_qfp; ``beta_max`` sweeps the ramp end point at t = t_qfp."""
    if axis == "t_frac":
        return {b: anneal_fidelity(p, value * p.t_qfp, b) for b in bases}
    if axis == "beta_max":
        return {b: fidelity_at_beta(value, p, b) for b in bases}
    raise ValueError(f"unknown axis {axis!r} for annealing")
