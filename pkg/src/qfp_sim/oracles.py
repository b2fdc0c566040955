"""Displaced-oscillator checks behind the effective tunneling and coupling.

Each check compares a closed form with a direct matrix computation on a
truncated Fock space and returns the largest deviation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

from .errors import TruncationRisk
from .linalg import I2, SX, SZ, expm_hermitian, fock_operators, tensor


@dataclass(frozen=True)
class DisplacedOscillator:
    """Oscillator shifted by nu = g phi_p / Omega; eta = 2 nu^2."""

    displacement: float
    n_max: int

    @property
    def eta(self) -> float:
        return 2 * self.displacement**2

    @classmethod
    def from_circuit(cls, g: float, phi_p: float, omega: float, n_max: int):
        return cls(g * phi_p / omega, n_max)


def _check_truncation(nu, n_max):
    if abs(nu) > math.sqrt(n_max) / 2:
        warnings.warn(f"|nu| = {abs(nu):.3g} exceeds sqrt(n_max)/2 = {math.sqrt(n_max) / 2:.3g}", TruncationRisk, stacklevel=3)


def displacement_matrix(nu: float, n_max: int) -> np.ndarray:
    """D(nu) = exp(nu (a^dag - a)) on ``n_max`` Fock levels."""
    _check_truncation(nu, n_max)
    a, adag, _ = fock_operators(n_max)
    # exp(-i H) with H = i nu (a^dag - a) is exactly exp(nu (a^dag - a))
    return expm_hermitian(1j * nu * (adag - a), 1.0)


def franck_condon(M: int, eta: float) -> float:
    """<M_-|M_+> = exp(-eta) L_M(2 eta)."""
    if not 0 <= M <= 64:
        raise ValueError("M must lie in [0, 64]")
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return float(math.exp(-eta) * eval_laguerre(M, 2 * eta))


def franck_condon_matrix(M: int, eta: float, n_max: int = 80) -> float:
    """Same overlap computed as <M| D(nu)^dag D(-nu) |M> with nu = sqrt(eta/2)."""
    nu = math.sqrt(eta / 2)
    d = displacement_matrix(nu, n_max)
    dm = displacement_matrix(-nu, n_max)
    return float((d.conj().T @ dm)[M, M].real)


def displaced_spectrum_deviation(omega: float, g: float, phi_p: float, n_max: int, sign: int = +1) -> float:
    """Largest |E_M - Omega (M - nu^2)| over the lower half of the truncated spectrum."""
    a, adag, num = fock_operators(n_max)
    h = omega * num + sign * g * phi_p * (adag + a)
    evals = np.linalg.eigvalsh(h)
    nu = g * phi_p / omega
    half = n_max // 2
    exact = omega * (np.arange(half) - nu**2)
    return float(np.max(np.abs(evals[:half] - exact)))


def _conditional_displacement(nu, n_max):
    # D(sz nu) on q2 ⊗ resonator: D(+nu) for the sz=+1 state, D(-nu) for sz=-1
    dp, dm = displacement_matrix(nu, n_max), displacement_matrix(-nu, n_max)
    up = np.diag([1, 0]).astype(complex)
    down = np.diag([0, 1]).astype(complex)
    return tensor(I2, up, dp) + tensor(I2, down, dm)


def j_invariance_check(nu: float, n_max: int, q2_operator: str = "z") -> float:
    """max |U O U^dag - O| for O = sz_1 s_2 ⊗ 1 under the q2-conditioned displacement.

    ``q2_operator = "x"`` is the negative control: it does not commute with
    the conditional displacement and picks up a momentum-dependent term.
    """
    ops = {"z": SZ, "x": SX}
    if q2_operator not in ops:
        raise ValueError("q2_operator must be 'z' or 'x'")
    u = _conditional_displacement(nu, n_max)
    o = tensor(SZ, ops[q2_operator], np.eye(n_max))
    # compare on the low-photon block only; the cutoff corrupts the top levels
    half = n_max // 2
    keep = [q * n_max + k for q in range(4) for k in range(half)]
    diff = (u @ o @ u.conj().T - o)[np.ix_(keep, keep)]
    return float(np.max(np.abs(diff)))


@dataclass(frozen=True)
class OracleCheck:
    name: str
    deviation: float
    tolerance: float
    # negative controls pass when the deviation exceeds the tolerance
    expect_change: bool = False

    @property
    def passed(self) -> bool:
        if self.expect_change:
            return self.deviation > self.tolerance
        return self.deviation < self.tolerance


def run_suite() -> list:
    """All oscillator checks with the tolerances they are expected to meet."""
    checks = []
    fc = max(
        abs(franck_condon(M, eta) - franck_condon_matrix(M, eta, 80))
        for M in range(6)
        for eta in (0.0, 0.25, 0.7, 1.25, 2.0)
    )
    checks.append(OracleCheck("franck_condon vs displacement overlap", fc, 1e-7))
    spec = max(displaced_spectrum_deviation(1.0, g, 1.0, 60, s) for g in (0.2, 0.5, 1.0) for s in (1, -1))
    checks.append(OracleCheck("displaced oscillator spectrum", spec, 1e-6))
    vac = abs(displacement_matrix(1.0, 60)[0, 0].real - math.exp(-0.5))
    checks.append(OracleCheck("vacuum overlap <0|D(1)|0>", vac, 1e-8))
    checks.append(OracleCheck("J invariance (sz sz)", j_invariance_check(0.5, 40), 1e-8))
    ctrl = j_invariance_check(0.5, 40, "x")
    checks.append(OracleCheck("negative control (sz sx) must change", ctrl, 1e-2, expect_change=True))
    return checks


def format_table(checks) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'deviation':>12}  {'bound':>9}  result"]
    for c in checks:
        bound = (">" if c.expect_change else "<") + f"{c.tolerance:.1e}"
        lines.append(f"{c.name:<{width}}  {c.deviation:12.3e}  {bound:>9}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
