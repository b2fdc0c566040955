"""Single flux qubit read out through a latched QFP and a dispersive resonator.

Energies are in units of the QFP-resonator coupling g (g = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import SM, SP, SX, SZ, fock_operators, tensor
from .povm import PROTOCOLS, FidelityEvaluator, PovmConfig
from .sweep import SweepResult, SweepTask, run_sweep

BASES = ("flux", "energy")
COMPUTATIONAL = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))


@dataclass(frozen=True)
class SingleQubitParams:
    eps_q: float = 1.0
    delta_q: float = 4.0
    eta: float = 1.25
    delta_over_g: float = 8.0
    n_max: int = 27
    alpha: float = 1.0
    branch_flip: bool = False
    # "average" over both basis states, or "0" / "1" for one initial state
    protocol: str = "average"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.delta_over_g == 0:
            raise ValueError("detuning must be non-zero")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")

    g = 1.0

    @property
    def delta_eff(self) -> float:
        return self.delta_q * math.exp(-self.eta)

    @property
    def theta_eff(self) -> float:
        return math.atan(self.delta_eff / self.eps_q) if self.eps_q else math.copysign(math.pi / 2, self.delta_eff)

    @property
    def omega_eff(self) -> float:
        return math.hypot(self.eps_q, self.delta_eff)

    @property
    def detuning(self) -> float:
        return self.delta_over_g * self.g

    @property
    def chi(self) -> float:
        return self.g**2 * math.sin(self.theta_eff) ** 2 / self.detuning

    @property
    def t_d(self) -> float:
        if self.chi == 0:
            raise ValueError("dispersive shift vanishes (delta_eff = 0); t_d is undefined")
        return math.pi / (2 * abs(self.chi))

    def povm(self, alpha=None) -> PovmConfig:
        return PovmConfig(
            self.n_max,
            self.alpha if alpha is None else alpha,
            chi_sign=1 if self.chi > 0 else -1,
            branch_flip=self.branch_flip,
        )


def _shift(p: SingleQubitParams) -> np.ndarray:
    n = np.arange(p.n_max)
    return np.diag(-(p.detuning / 2 + p.chi * (n + 0.5))).astype(complex)


def h_energy_basis(p: SingleQubitParams) -> np.ndarray:
    """-[delta/2 + chi (n + 1/2)] sz on qubit ⊗ resonator, qubit in its energy basis."""
    return tensor(SZ, _shift(p))


def h_flux_basis(p: SingleQubitParams) -> np.ndarray:
    th = p.theta_eff
    return tensor(math.cos(th) * SZ + math.sin(th) * SX, _shift(p))


def h_pre_dispersive(p: SingleQubitParams) -> np.ndarray:
    """-delta/2 sz - g sin(theta) (a s+ + a^dag s-), before the dispersive transformation."""
    a, adag, _ = fock_operators(p.n_max)
    s = p.g * math.sin(p.theta_eff)
    return tensor(-p.detuning / 2 * SZ, np.eye(p.n_max)) - s * (tensor(SP, a) + tensor(SM, adag))


def hamiltonian(p: SingleQubitParams, basis: str) -> np.ndarray:
    if basis == "flux":
        return h_flux_basis(p)
    if basis == "energy":
        return h_energy_basis(p)
    raise ValueError(f"unknown single-qubit basis {basis!r}")


def jc_spectrum(wq: float, wr: float, g: float, n: int):
    """Closed-form JC doublet in the {|g,n+1>, |e,n>} block.

    Returns (E_plus, E_minus, theta_n) with E_+- = wr (n + 1/2) +- sqrt(delta^2 + 4 g^2 (n+1))/2,
    the eigenvalues of wq/2 sz + wr a^dag a + g (s+ a + s- a^dag).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    delta = wq - wr
    root = math.sqrt(delta**2 + 4 * g**2 * (n + 1))
    centre = wr * (n + 0.5)
    theta = math.atan2(2 * g * math.sqrt(n + 1), delta)
    return centre + root / 2, centre - root / 2, theta


def point_fidelities(p: SingleQubitParams, bases, axis: str, value: float) -> dict:
    """Fidelity per basis at one grid point (``chi_t`` or ``alpha`` axis)."""
    if axis == "chi_t":
        t, cfg = value / abs(p.chi), p.povm()
    elif axis == "alpha":
        t, cfg = p.t_d, p.povm(alpha=value)
    else:
        raise ValueError(f"unknown axis {axis!r} for the single-qubit model")
    return {b: FidelityEvaluator(hamiltonian(p, b), COMPUTATIONAL, cfg)(t, p.protocol) for b in bases}


def sweep_warnings(p, axis, grid):
    top = max(grid) if axis == "alpha" else p.alpha
    if top**2 > p.n_max / 4:
        return [f"truncation: alpha^2 = {top**2:.4g} > n_max/4 = {p.n_max / 4:.4g}"]
    return []


def single_qubit_fidelity_sweep(p: SingleQubitParams, axis: str, grid, bases=BASES, workers=1) -> SweepResult:
    return run_sweep(SweepTask("single", p, tuple(bases), axis, tuple(grid)), workers)
