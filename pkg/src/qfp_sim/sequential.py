"""Sequential readout: q2 is latched and measured while q1 only acts through J.

Operators live on q1 ⊗ q2 ⊗ resonator in the frame rotating with the
resonator, after the dispersive transformation. The q2 detuning operator is
D = delta_eff2 + chi (2 n + 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateDoublet
from .linalg import I2, SX, SZ, tensor
from .povm import PROTOCOLS, FidelityEvaluator, PovmConfig
from .sweep import SweepResult, SweepTask, run_sweep

HAMILTONIAN_BASES = ("flux", "energy_q2", "energy_q1q2", "zz_approx", "xx_approx")
BASES = HAMILTONIAN_BASES + ("bare", "dressed")
APPROX_HOST = {"full": "energy_q2", "xx": "xx_approx"}
COMPUTATIONAL = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
SPECTATORS = ("mixed", "0", "1")


@dataclass(frozen=True)
class SequentialParams:
    eps2: float = 1.0
    delta2: float = 1.0
    eta: float = 1.25
    eps1: float = 0.2
    delta1: float = 2.0
    j_over_gap: float = 0.05
    delta_over_g: float = 8.0
    n_max: int = 27
    alpha: float = 1.0
    branch_flip: bool = False
    # "average" over both basis states, or "0" / "1" for one initial state
    protocol: str = "average"
    spectator: str = "mixed"
    # "full" dresses the q2-energy Hamiltonian, "xx" the xx-approximated one
    approx: str = "full"
    dressed_n: int = 0
    # measurement time (in units of t_d) for the alpha and coupling axes
    t_over_td: float = 1.0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.delta_over_g == 0:
            raise ValueError("detuning must be non-zero")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.spectator not in SPECTATORS:
            raise ValueError(f"spectator must be one of {SPECTATORS}")
        if self.approx not in APPROX_HOST:
            raise ValueError(f"approx must be one of {tuple(APPROX_HOST)}")
        if self.dressed_n < 0:
            raise ValueError("dressed_n must be >= 0")
        if self.t_over_td < 0:
            raise ValueError("t_over_td must be >= 0")

    g = 1.0

    @property
    def delta_eff2(self):
        return self.delta2 * math.exp(-self.eta)

    @property
    def theta2(self):
        return math.atan2(self.delta_eff2, self.eps2)

    @property
    def theta1(self):
        # tan(theta1) = eps1 / delta1
        return math.atan2(self.eps1, self.delta1)

    @property
    def omega_eff2(self):
        return math.hypot(self.eps2, self.delta_eff2)

    @property
    def omega1(self):
        return math.hypot(self.eps1, self.delta1)

    @property
    def omega2(self):
        return math.hypot(self.eps2, self.delta2)

    @property
    def det2(self):
        """delta_eff,2 = omega_eff,2 - omega_r, fixed by delta/g."""
        return self.delta_over_g * self.g

    @property
    def omega_r(self):
        return self.omega_eff2 - self.det2

    @property
    def chi(self):
        return self.g**2 * math.sin(self.theta2) ** 2 / self.det2

    @property
    def t_d(self):
        if self.chi == 0:
            raise ValueError("dispersive shift vanishes (delta_eff2 = 0); t_d is undefined")
        return math.pi / (2 * abs(self.chi))

    @property
    def J(self):
        return self.j_over_gap * (self.omega2 - self.omega1)

    def povm(self, alpha=None):
        return PovmConfig(
            self.n_max,
            self.alpha if alpha is None else alpha,
            chi_sign=1 if self.chi > 0 else -1,
            branch_flip=self.branch_flip,
        )


@dataclass(frozen=True)
class Couplings:
    """Scalars entering the qubit-sector Hamiltonians; tests may set them directly."""

    det2: float
    chi: float
    J: float
    theta1: float
    theta2: float

    @classmethod
    def of(cls, p: SequentialParams):
        return cls(p.det2, p.chi, p.J, p.theta1, p.theta2)

    @property
    def j_zz(self):
        return self.J * math.cos(self.theta2)

    @property
    def j_zx(self):
        return self.J * math.sin(self.theta2)

    @property
    def j_zz12(self):
        return self.J * math.cos(self.theta1) * math.cos(self.theta2)

    @property
    def j_xx(self):
        return self.J * math.sin(self.theta1) * math.sin(self.theta2)

    def det_n(self, n):
        return self.det2 + self.chi * (2 * n + 1)


def _d_operator(c: Couplings, n_max: int) -> np.ndarray:
    return np.diag(c.det_n(np.arange(n_max))).astype(complex)


def _rot_minus(theta):
    return math.cos(theta) * SZ - math.sin(theta) * SX


def h_seq(p: SequentialParams, basis: str, couplings: Couplings | None = None) -> np.ndarray:
    c = couplings or Couplings.of(p)
    N = p.n_max
    idn = np.eye(N, dtype=complex)
    free = tensor(I2, SZ, -0.5 * _d_operator(c, N))
    if basis == "energy_q2":
        return free + c.J * tensor(SZ, _rot_minus(c.theta2), idn)
    if basis == "flux":
        q2 = math.cos(c.theta2) * SZ + math.sin(c.theta2) * SX
        return tensor(I2, q2, -0.5 * _d_operator(c, N)) + c.J * tensor(SZ, SZ, idn)
    if basis == "energy_q1q2":
        return free + c.J * tensor(_rot_minus(c.theta1), _rot_minus(c.theta2), idn)
    if basis == "zz_approx":
        return free + c.j_zz12 * tensor(SZ, SZ, idn)
    if basis == "xx_approx":
        return free + c.j_xx * tensor(SX, SX, idn)
    raise ValueError(f"unknown sequential basis {basis!r}")


def qubit_block(p: SequentialParams, basis: str, n: int, couplings: Couplings | None = None) -> np.ndarray:
    """4x4 qubit-sector Hamiltonian with the photon number fixed to ``n``."""
    N = n + 1
    h = h_seq(replace(p, n_max=N), basis, couplings or Couplings.of(p))
    idx = [q * N + n for q in range(4)]
    return h[np.ix_(idx, idx)]


def regime_report(p: SequentialParams, couplings: Couplings | None = None) -> dict:
    c = couplings or Couplings.of(p)
    cos_min = min(abs(math.cos(c.theta1)), abs(math.cos(c.theta2)))
    sin_max = max(abs(math.sin(c.theta1)), abs(math.sin(c.theta2)))
    cos_max = max(abs(math.cos(c.theta1)), abs(math.cos(c.theta2)))
    sin_min = min(abs(math.sin(c.theta1)), abs(math.sin(c.theta2)))
    return {
        # ratios well below 1 mean the approximation's precondition holds
        "zz_ratio": sin_max / cos_min if cos_min else math.inf,
        "xx_ratio": cos_max / sin_min if sin_min else math.inf,
    }


@dataclass(frozen=True)
class DressedDecomposition:
    eigenvalues: np.ndarray
    angles: tuple
    eigenvectors: np.ndarray  # columns |00>, |01>, |10>, |11> (dressed)


def _angle(num, den):
    if num == 0 and den == 0:
        warnings.warn("degenerate doublet, using theta = 0", DegenerateDoublet, stacklevel=3)
        return 0.0
    return math.atan2(num, den)


def dressed_decompose(p: SequentialParams, n: int = 0, approx: str = "full", couplings=None) -> DressedDecomposition:
    """Closed-form dressed states of the qubit sector at photon number ``n``.

    Returns angles as (theta_minus, theta_plus).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    c = couplings or Couplings.of(p)
    dn = c.det_n(n)
    v = np.zeros((4, 4))
    if approx == "full":
        jzz, jzx = c.j_zz, c.j_zx
        tm = _angle(jzx, dn / 2 - jzz)
        tp = _angle(-jzx, dn / 2 + jzz)
        wm = math.hypot(dn / 2 - jzz, jzx)
        wp = math.hypot(dn / 2 + jzz, jzx)
        cm, sm = math.cos(tm / 2), math.sin(tm / 2)
        cp, sp = math.cos(tp / 2), math.sin(tp / 2)
        # basis order |00>, |01>, |10>, |11> (q1 q2)
        v[:, 0] = [cm, sm, 0, 0]
        v[:, 1] = [-sm, cm, 0, 0]
        v[:, 2] = [0, 0, cp, sp]
        v[:, 3] = [0, 0, -sp, cp]
        evals = np.array([-wm, wm, -wp, wp])
    elif approx == "xx":
        jxx = c.j_xx
        tp = _angle(-2 * jxx, dn)
        tm = _angle(2 * jxx, dn)
        w = math.hypot(jxx, dn / 2)
        cm, sm = math.cos(tm / 2), math.sin(tm / 2)
        cp, sp = math.cos(tp / 2), math.sin(tp / 2)
        v[:, 0] = [cp, 0, 0, sp]
        v[:, 1] = [0, cm, sm, 0]
        v[:, 2] = [0, -sm, cm, 0]
        v[:, 3] = [-sp, 0, 0, cp]
        evals = np.array([-w, w, -w, w])
    else:
        raise ValueError(f"approx must be 'full' or 'xx', got {approx!r}")
    return DressedDecomposition(evals, (tm, tp), v.astype(complex))


def _safe_ratio(num, den):
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return abs(num / den)


def rwa_validity(p: SequentialParams, n: int, basis: str, approx: str = "full", couplings=None) -> float:
    """Size of the neglected counter-rotating correction; small means the RWA holds."""
    c = couplings or Couplings.of(p)
    dn, d0 = c.det_n(n), c.det2
    shift = c.chi * (n + 0.5)
    if approx == "full":
        jzz, jzx = c.j_zz, c.j_zx
        if basis == "dressed":
            return max(
                _safe_ratio(jzx * shift, (dn / 2 + s * jzz) * (d0 / 2 + s * jzz) + jzx**2) for s in (1, -1)
            )
        if basis == "bare":
            return max(_safe_ratio(jzx, dn / 2 + s * jzz) for s in (1, -1))
    elif approx == "xx":
        jxx = c.j_xx
        if basis == "dressed":
            return _safe_ratio(jxx * shift, dn * d0 / 4 + jxx**2)
        if basis == "bare":
            return _safe_ratio(jxx, dn / 2)
    else:
        raise ValueError(f"approx must be 'full' or 'xx', got {approx!r}")
    raise ValueError(f"basis must be 'bare' or 'dressed', got {basis!r}")


def crossover_residual(p: SequentialParams, n: int = 0, approx: str = "full", couplings=None) -> float:
    """chi (n + 1/2) minus the nearest dressed gap; a sign change marks the bare/dressed crossover."""
    c = couplings or Couplings.of(p)
    lhs = abs(c.chi * (n + 0.5))
    if approx == "full":
        rhs = min(math.hypot(c.det2 / 2 + s * c.j_zz, c.j_zx) for s in (1, -1))
    else:
        rhs = math.hypot(c.det2 / 2, c.j_xx)
    return lhs - rhs


def spectator_matrix(kind: str) -> np.ndarray:
    if kind == "mixed":
        return 0.5 * np.eye(2, dtype=complex)
    k = int(kind)
    m = np.zeros((2, 2), dtype=complex)
    m[k, k] = 1
    return m


def dressed_frame(h: np.ndarray, v0: np.ndarray, n_max: int) -> np.ndarray:
    """Express ``h`` in the dressed qubit basis given by the columns of ``v0``."""
    w = np.kron(v0, np.eye(n_max))
    return w.conj().T @ h @ w


def fidelity_hamiltonian(p: SequentialParams, basis: str) -> np.ndarray:
    if basis in HAMILTONIAN_BASES:
        return h_seq(p, basis)
    host = h_seq(p, APPROX_HOST[p.approx])
    if basis == "bare":
        return host
    if basis == "dressed":
        dec = dressed_decompose(p, p.dressed_n, p.approx)
        return dressed_frame(host, dec.eigenvectors, p.n_max)
    raise ValueError(f"unknown sequential basis {basis!r}")


def _time_and_cfg(p, axis, value):
    if axis == "chi_t":
        return value / abs(p.chi), p.povm(), p
    if axis == "t_over_td":
        return value * p.t_d, p.povm(), p
    if axis == "alpha":
        return p.t_over_td * p.t_d, p.povm(alpha=value), p
    if axis == "j_over_gap":
        q = replace(p, j_over_gap=value)
        return q.t_over_td * q.t_d, q.povm(), q
    raise ValueError(f"unknown axis {axis!r} for the sequential model")


def point_fidelities(p: SequentialParams, bases, axis: str, value: float) -> dict:
    t, cfg, q = _time_and_cfg(p, axis, value)
    spec = spectator_matrix(q.spectator)
    return {b: FidelityEvaluator(fidelity_hamiltonian(q, b), COMPUTATIONAL, cfg, spec)(t, q.protocol) for b in bases}


def sweep_warnings(p, axis, grid):
    out = []
    top = max(grid) if axis == "alpha" else p.alpha
    if top**2 > p.n_max / 4:
        out.append(f"truncation: alpha^2 = {top**2:.4g} > n_max/4 = {p.n_max / 4:.4g}")
    reg = regime_report(p)
    out.append(f"regime: zz_ratio = {reg['zz_ratio']:.4g}, xx_ratio = {reg['xx_ratio']:.4g}")
    return out


def sequential_fidelity_sweep(p: SequentialParams, basis_set, axis: str, grid, workers=1) -> SweepResult:
    return run_sweep(SweepTask("sequential", p, tuple(basis_set), axis, tuple(grid)), workers)
