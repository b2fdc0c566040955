"""Simultaneous readout: both qubits are latched and keep their own dynamics.

Operators live on q1 ⊗ q2 ⊗ resonator in the frame rotating with the
resonator; only q2's QFP is coupled to the resonator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import I2, SX, SZ, tensor
from .povm import PROTOCOLS, FidelityEvaluator, PovmConfig
from .sequential import COMPUTATIONAL, SPECTATORS, _angle, dressed_frame, spectator_matrix
from .sweep import SweepResult, SweepTask, run_sweep

HAMILTONIAN_BASES = ("flux", "energy_q1q2", "zz_approx", "xx_approx")
BASES = HAMILTONIAN_BASES + ("bare", "dressed")
APPROX_HOST = {"full": "energy_q1q2", "zz": "zz_approx", "xx": "xx_approx"}
LAMBDA2_CONVENTIONS = ("tunneling", "detuning")


@dataclass(frozen=True)
class SimultaneousParams:
    eps1: float = 1.0
    delta1: float = 6.0
    eta1: float = 1.0
    eps2: float = 1.0
    delta2: float = 8.0
    eta2: float = 1.0
    j_over_gap: float = 0.05
    delta_over_g: float = 8.0
    n_max: int = 21
    alpha: float = 2.0
    g2: float = 1.0
    branch_flip: bool = False
    # "average" over both basis states, or "0" / "1" for one initial state
    protocol: str = "average"
    spectator: str = "mixed"
    approx: str = "xx"
    dressed_n: int = 0
    # measurement time (in units of t_d) for the alpha and coupling axes
    t_over_td: float = 1.0
    # denominator of lambda_2: the effective tunneling of q2 or its detuning
    lambda2_convention: str = "tunneling"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.delta_over_g == 0:
            raise ValueError("detuning must be non-zero")
        if min(self.eta1, self.eta2) < 0:
            raise ValueError("eta must be >= 0")
        if self.spectator not in SPECTATORS:
            raise ValueError(f"spectator must be one of {SPECTATORS}")
        if self.approx not in APPROX_HOST:
            raise ValueError(f"approx must be one of {tuple(APPROX_HOST)}")
        if self.lambda2_convention not in LAMBDA2_CONVENTIONS:
            raise ValueError(f"lambda2_convention must be one of {LAMBDA2_CONVENTIONS}")
        if self.dressed_n < 0:
            raise ValueError("dressed_n must be >= 0")
        if self.t_over_td < 0:
            raise ValueError("t_over_td must be >= 0")

    @property
    def delta_eff1(self):
        return self.delta1 * math.exp(-self.eta1)

    @property
    def delta_eff2(self):
        return self.delta2 * math.exp(-self.eta2)

    @property
    def theta1(self):
        return math.atan2(self.delta_eff1, self.eps1)

    @property
    def theta2(self):
        return math.atan2(self.delta_eff2, self.eps2)

    @property
    def omega_eff1(self):
        return math.hypot(self.eps1, self.delta_eff1)

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
        return self.delta_over_g * self.g2

    @property
    def omega_r(self):
        return self.omega_eff2 - self.det2

    @property
    def det1(self):
        return self.omega_eff1 - self.omega_r

    @property
    def chi(self):
        return self.g2**2 * math.sin(self.theta2) ** 2 / self.det2

    @property
    def t_d(self):
        if self.chi == 0:
            raise ValueError("dispersive shift vanishes (delta_eff2 = 0); t_d is undefined")
        return math.pi / (2 * abs(self.chi))

    @property
    def J(self):
        return self.j_over_gap * (self.omega2 - self.omega1)

    @property
    def lambda2(self):
        den = self.delta_eff2 if self.lambda2_convention == "tunneling" else self.det2
        return self.g2 * math.sin(self.theta2) / den if den else math.inf

    def povm(self, alpha=None):
        return PovmConfig(
            self.n_max,
            self.alpha if alpha is None else alpha,
            chi_sign=1 if self.chi > 0 else -1,
            branch_flip=self.branch_flip,
        )


@dataclass(frozen=True)
class SimCouplings:
    det1: float
    det2: float
    chi: float
    J: float
    theta1: float
    theta2: float

    @classmethod
    def of(cls, p: SimultaneousParams):
        return cls(p.det1, p.det2, p.chi, p.J, p.theta1, p.theta2)

    @property
    def j_zz(self):
        return self.J * math.cos(self.theta1) * math.cos(self.theta2)

    @property
    def j_xx(self):
        return self.J * math.sin(self.theta1) * math.sin(self.theta2)

    def det_n(self, n):
        return self.det2 + self.chi * (2 * n + 1)


def _rot(theta, sign):
    return math.cos(theta) * SZ + sign * math.sin(theta) * SX


def h_sim(p: SimultaneousParams, basis: str, couplings: SimCouplings | None = None) -> np.ndarray:
    c = couplings or SimCouplings.of(p)
    N = p.n_max
    idn = np.eye(N, dtype=complex)
    d_op = -0.5 * np.diag(c.det_n(np.arange(N))).astype(complex)
    if basis == "flux":
        return (
            -0.5 * c.det1 * tensor(_rot(c.theta1, +1), I2, idn)
            + tensor(I2, _rot(c.theta2, +1), d_op)
            + c.J * tensor(SZ, SZ, idn)
        )
    free = -0.5 * c.det1 * tensor(SZ, I2, idn) + tensor(I2, SZ, d_op)
    if basis == "energy_q1q2":
        return free + c.J * tensor(_rot(c.theta1, -1), _rot(c.theta2, -1), idn)
    if basis == "zz_approx":
        return free + c.j_zz * tensor(SZ, SZ, idn)
    if basis == "xx_approx":
        return free + c.j_xx * tensor(SX, SX, idn)
    raise ValueError(f"unknown simultaneous basis {basis!r}")


def regime_report(p: SimultaneousParams) -> dict:
    cs = [abs(math.cos(p.theta1)), abs(math.cos(p.theta2))]
    ss = [abs(math.sin(p.theta1)), abs(math.sin(p.theta2))]
    return {
        "zz_ratio": max(ss) / min(cs) if min(cs) else math.inf,
        "xx_ratio": max(cs) / min(ss) if min(ss) else math.inf,
        "lambda2": p.lambda2,
    }


def xx_dressed_states(p: SimultaneousParams, n: int = 0, couplings=None):
    """Closed-form eigenvectors (columns |00>, |01>, |10>, |11> dressed) of the xx qubit block.

    Returns (eigenvalues, (theta_minus, theta_plus), vectors).
    """
    c = couplings or SimCouplings.of(p)
    dn, d1, jxx = c.det_n(n), c.det1, c.j_xx
    tp = _angle(-2 * jxx, dn + d1)
    tm = _angle(2 * jxx, dn - d1)
    wp = math.hypot((dn + d1) / 2, jxx)
    wm = math.hypot((dn - d1) / 2, jxx)
    cp, sp = math.cos(tp / 2), math.sin(tp / 2)
    cm, sm = math.cos(tm / 2), math.sin(tm / 2)
    v = np.zeros((4, 4), dtype=complex)
    v[:, 0] = [cp, 0, 0, sp]
    v[:, 1] = [0, cm, sm, 0]
    v[:, 2] = [0, -sm, cm, 0]
    v[:, 3] = [-sp, 0, 0, cp]
    return np.array([-wp, wm, -wm, wp]), (tm, tp), v


def numeric_dressed_states(h4: np.ndarray) -> np.ndarray:
    """Eigenvectors of a 4x4 block, each assigned to the computational state it overlaps most."""
    _, vecs = np.linalg.eigh(h4)
    order = np.argsort(np.argmax(np.abs(vecs), axis=0))
    vecs = vecs[:, order]
    if sorted(np.argmax(np.abs(vecs), axis=0)) != [0, 1, 2, 3]:
        raise ValueError("dressed states cannot be matched one-to-one to bare states")
    # fix the phase so the dominant component is real and positive
    dom = vecs[np.arange(4), np.arange(4)]
    return vecs * (np.abs(dom) / dom)


def xx_dressed_conditions(p: SimultaneousParams, n: int = 0, couplings=None):
    """(dressed_ratio, bare_ratio, crossover_gap) in the tunneling-dominated regime."""
    c = couplings or SimCouplings.of(p)
    dn, d0, d1, jxx = c.det_n(n), c.det2, c.det1, c.j_xx
    dressed, bare = 0.0, 0.0
    for s in (1, -1):
        # the angle mismatch between photon numbers n and 0 drives the dressed-basis error
        num = jxx * ((dn + s * d1) - (d0 + s * d1)) / 2
        den = (d0 + s * d1) * (dn + s * d1) / 4 + jxx**2
        dressed = max(dressed, _ratio(num, den))
        bare = max(bare, _ratio(jxx, (dn + s * d1) / 2))
    gap = abs(c.chi * (n + 0.5)) - math.sqrt((d0 - d1) ** 2 / 4 + jxx**2)
    return dressed, bare, gap


def _ratio(num, den):
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return abs(num / den)


def qubit_block(p: SimultaneousParams, basis: str, n: int, couplings=None) -> np.ndarray:
    N = n + 1
    h = h_sim(replace(p, n_max=N), basis, couplings or SimCouplings.of(p))
    idx = [q * N + n for q in range(4)]
    return h[np.ix_(idx, idx)]


def dressed_vectors(p: SimultaneousParams) -> np.ndarray:
    if p.approx == "xx":
        return xx_dressed_states(p, p.dressed_n)[2]
    return numeric_dressed_states(qubit_block(p, APPROX_HOST[p.approx], p.dressed_n))


def fidelity_hamiltonian(p: SimultaneousParams, basis: str) -> np.ndarray:
    if basis in HAMILTONIAN_BASES:
        return h_sim(p, basis)
    host = h_sim(p, APPROX_HOST[p.approx])
    if basis == "bare":
        return host
    if basis == "dressed":
        return dressed_frame(host, dressed_vectors(p), p.n_max)
    raise ValueError(f"unknown simultaneous basis {basis!r}")


def point_fidelities(p: SimultaneousParams, bases, axis: str, value: float) -> dict:
    if axis == "chi_t":
        t, cfg, q = value / abs(p.chi), p.povm(), p
    elif axis == "t_over_td":
        t, cfg, q = value * p.t_d, p.povm(), p
    elif axis == "alpha":
        t, cfg, q = p.t_over_td * p.t_d, p.povm(alpha=value), p
    elif axis == "j_over_gap":
        q = replace(p, j_over_gap=value)
        t, cfg = q.t_over_td * q.t_d, q.povm()
    else:
        raise ValueError(f"unknown axis {axis!r} for the simultaneous model")
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


def simultaneous_fidelity_sweep(p: SimultaneousParams, basis_set, axis: str, grid, workers=1) -> SweepResult:
    return run_sweep(SweepTask("simultaneous", p, tuple(basis_set), axis, tuple(grid)), workers)
