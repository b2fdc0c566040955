"""Half-plane coherent-state POVM and the readout fidelity built on it.

The resonator starts in a coherent state |alpha>, evolves jointly with the
qubits, and is then sorted into the lower or upper half of phase space.
Outcome ``s`` (+1 or -1) integrates over the lower half-plane when
``s == chi_sign`` and over the upper half-plane otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidBasis, InvalidTime, TruncationWarning
from .linalg import DensityState, HermitianPropagator, ptrace

PLUS, MINUS = +1, -1


@dataclass(frozen=True)
class PovmConfig:
    n_max: int
    alpha: float
    chi_sign: int = +1
    # By default the sz=+1 basis state is read from outcome MINUS, which is the
    # half-plane it is rotated into by H = -chi n sz for either sign of chi.
    branch_flip: bool = False

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 4:
            raise ValueError(f"n_max must be an integer >= 4, got {self.n_max}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.chi_sign not in (-1, 1):
            raise ValueError("chi_sign must be +1 or -1")
        if self.truncation_suspect:
            warnings.warn(
                f"alpha^2 = {self.alpha**2:.3g} exceeds n_max/4 = {self.n_max / 4:.3g}",
                TruncationWarning,
                stacklevel=3,
            )

    @property
    def truncation_suspect(self) -> bool:
        return self.alpha**2 > self.n_max / 4

    @property
    def truncation_loss(self) -> float:
        return truncation_loss(self.alpha, self.n_max)

    def branch_for(self, b: int) -> int:
        """Outcome that signals basis state ``b`` (0 is the sz=+1 state)."""
        s = MINUS if b == 0 else PLUS
        return -s if self.branch_flip else s


def _log_fact(n):
    return math.lgamma(n + 1)


def coherent_amplitudes(alpha: float, n_max: int, renormalize=True) -> np.ndarray:
    """Fock amplitudes of |alpha>, truncated to ``n_max`` levels."""
    n = np.arange(n_max)
    if alpha == 0:
        c = (n == 0).astype(complex)
    else:
        logs = -0.5 * alpha**2 + n * math.log(abs(alpha)) - 0.5 * np.array([_log_fact(k) for k in n])
        c = np.exp(logs) * np.sign(alpha) ** n
        c = c.astype(complex)
    if renormalize:
        c /= np.linalg.norm(c)
    return c


def truncation_loss(alpha: float, n_max: int) -> float:
    """Weight of |alpha> lying above the Fock cutoff."""
    c = coherent_amplitudes(alpha, n_max, renormalize=False)
    return float(max(0.0, 1.0 - np.vdot(c, c).real))


@lru_cache(maxsize=64)
def _offdiag_kernel(n_max: int) -> np.ndarray:
    """Gamma((m+n)/2+1) / ((m-n) sqrt(m! n!)) for odd m-n, zero otherwise."""
    k = np.zeros((n_max, n_max))
    for m in range(n_max):
        for n in range((m + 1) % 2, n_max, 2):
            lg = math.lgamma((m + n) / 2 + 1) - 0.5 * (_log_fact(m) + _log_fact(n))
            k[m, n] = math.exp(lg) / (m - n)
    k.setflags(write=False)
    return k


def half_plane_element(n_max: int, lower: bool) -> np.ndarray:
    """Fock matrix <m|E|n> of (1/pi) * integral of |beta><beta| over a half-plane."""
    sign = -1.0 if lower else 1.0
    e = 0.5 * np.eye(n_max, dtype=complex) + sign * (1j / math.pi) * _offdiag_kernel(n_max)
    return e


def povm_elements(cfg: PovmConfig) -> dict:
    """{PLUS: E_+, MINUS: E_-} as N x N Fock matrices."""
    return {s: half_plane_element(cfg.n_max, lower=(s == cfg.chi_sign)) for s in (PLUS, MINUS)}


@dataclass(frozen=True)
class GCoefficientTable:
    n_max: int
    alpha: float
    plus: np.ndarray
    minus: np.ndarray


def g_table(cfg: PovmConfig) -> GCoefficientTable:
    """Closed-form weights g_+-(m, n) = c_m c_n <m|E_+-|n> with c_n the |alpha> amplitudes.

    The real part sits on the diagonal only (the half-plane elements are
    1/2 on the diagonal); the imaginary part lives on odd m-n.
    """
    N, a = cfg.n_max, float(cfg.alpha)
    m = np.arange(N)[:, None]
    n = np.arange(N)[None, :]
    logfact = np.array([_log_fact(k) for k in range(N)])
    diag = np.zeros(N)
    odd = np.zeros((N, N))
    if a == 0:
        diag[0] = 0.5
    else:
        la = math.log(a)
        diag = 0.5 * np.exp(-a * a + 2 * np.arange(N) * la - logfact)
        lg = np.vectorize(lambda x: math.lgamma(x))((m + n) / 2 + 1)
        mask = (m - n) % 2 == 1
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.exp(-a * a + (m + n) * la + lg - logfact[:, None] - logfact[None, :]) / (m - n)
        odd = np.where(mask, vals, 0.0)
    real = np.diag(diag).astype(complex)
    # outcome s integrates the lower half-plane when s == chi_sign
    imag = cfg.chi_sign * (1j / math.pi) * odd
    plus, minus = real - imag, real + imag
    plus.setflags(write=False)
    minus.setflags(write=False)
    return GCoefficientTable(N, a, plus, minus)


@dataclass(frozen=True)
class MeasurementOutcome:
    branch: int
    post_state: DensityState
    probability: float


def _contract(psi_or_x, e, dq, N, pure):
    """tr_res[(1 ⊗ E) X] for X = |psi><psi| (pure) or an explicit joint matrix."""
    if pure:
        p = psi_or_x.reshape(dq, N)
        return p @ e.T @ p.conj().T
    x = psi_or_x.reshape(dq, N, dq, N)
    return np.einsum("mn,injm->ij", e, x)


def apply_superoperator(h, rho_q: DensityState, cfg: PovmConfig, t: float, trace_out=()):
    """Both measurement branches E_+(rho), E_-(rho) after evolving for time ``t``.

    ``h`` acts on (qubit subsystems) ⊗ resonator; it may also be a prebuilt
    :class:`HermitianPropagator`. Subsystems listed in ``trace_out`` are
    removed from the returned post-measurement states.
    """
    if t < 0:
        raise InvalidTime(f"measurement time must be >= 0, got {t}")
    prop = h if isinstance(h, HermitianPropagator) else HermitianPropagator(h)
    dq, N = rho_q.dim, cfg.n_max
    if prop.dim != dq * N:
        raise DimensionMismatch(f"Hamiltonian dimension {prop.dim} != {dq} x {N}")
    alpha_vec = coherent_amplitudes(cfg.alpha, N)
    joint = np.kron(rho_q.matrix, np.outer(alpha_vec, alpha_vec.conj()))
    u = prop(t)
    x = u @ joint @ u.conj().T
    keep = [k for k in range(len(rho_q.dims)) if k not in set(trace_out)]
    out = []
    for s, e in sorted(povm_elements(cfg).items(), reverse=True):
        post = _contract(x, e, dq, N, pure=False)
        post = 0.5 * (post + post.conj().T)
        prob = float(np.trace(post).real)
        if keep != list(range(len(rho_q.dims))):
            post = ptrace(post, rho_q.dims, keep)
        dims = tuple(rho_q.dims[k] for k in keep)
        out.append(MeasurementOutcome(s, DensityState(post, dims, norm=prob), prob))
    return tuple(out)


def apply_superoperator_fock_diagonal(blocks, rho_q: np.ndarray, cfg: PovmConfig, renormalize=True):
    """Fock-diagonal shortcut: sum_{m,n} g(m,n) U_n rho U_m^dagger.

    ``blocks[n]`` is the qubit-sector propagator <n|U|n>; only valid when U
    does not couple different photon numbers.
    """
    g = g_table(cfg)
    z = 1.0 - truncation_loss(cfg.alpha, cfg.n_max) if renormalize else 1.0
    res = {}
    for s, tab in ((PLUS, g.plus), (MINUS, g.minus)):
        acc = np.zeros_like(rho_q, dtype=complex)
        for n, un in enumerate(blocks):
            left = un @ rho_q
            for m, um in enumerate(blocks):
                w = tab[m, n]
                if w != 0:
                    acc += w * left @ um.conj().T
        res[s] = acc / z
    return res


def _check_basis(basis_states, d):
    b = np.array([np.asarray(v, dtype=complex).ravel() for v in basis_states])
    if b.shape != (2, d):
        raise InvalidBasis(f"expected two states of dimension {d}")
    if np.max(np.abs(b.conj() @ b.T - np.eye(2))) > 1e-10:
        raise InvalidBasis("basis states are not orthonormal")
    return b


class FidelityEvaluator:
    """Basis-averaged readout fidelity of one Hamiltonian at many times.

    F(t) = 1/2 * sum_b <b| E_{s(b)}(rho_b) |b>, with rho_b = spectator ⊗ |b><b|
    and the spectator (if any) traced out after the measurement.
    """

    def __init__(self, h, basis_states, cfg: PovmConfig, spectator=None):
        self.cfg = cfg
        self.prop = h if isinstance(h, HermitianPropagator) else HermitianPropagator(h)
        self.basis = _check_basis(basis_states, 2)
        N = cfg.n_max
        if spectator is None:
            weights, vecs, ds = np.array([1.0]), np.ones((1, 1), dtype=complex), 1
        else:
            sp = spectator.matrix if isinstance(spectator, DensityState) else np.asarray(spectator)
            weights, vecs = np.linalg.eigh(0.5 * (sp + sp.conj().T))
            keep = weights > 1e-15
            weights, vecs = weights[keep], vecs[:, keep]
            ds = sp.shape[0]
        if self.prop.dim != ds * 2 * N:
            raise DimensionMismatch(f"Hamiltonian dimension {self.prop.dim} != {ds} x 2 x {N}")
        self.ds = ds
        alpha_vec = coherent_amplitudes(cfg.alpha, N)
        self.elements = povm_elements(cfg)
        self.weights = weights
        # initial joint vectors per basis state, one column per spectator component
        self.initial = [
            np.stack([np.kron(np.kron(vecs[:, k], self.basis[b]), alpha_vec) for k in range(len(weights))], axis=1)
            for b in (0, 1)
        ]

    def branch_overlap(self, b: int, s: int, t: float, target=None) -> float:
        """<target| E_s(rho_b) |target> at time t (target defaults to |b>)."""
        if t < 0:
            raise InvalidTime(f"measurement time must be >= 0, got {t}")
        target = self.basis[b] if target is None else np.asarray(target, dtype=complex)
        N = self.cfg.n_max
        e = self.elements[s]
        psi = self.prop.apply(t, self.initial[b])
        total = 0.0
        for k, w in enumerate(self.weights):
            p = psi[:, k].reshape(self.ds, 2, N)
            # project the measured qubit onto the target, keep spectator x resonator
            proj = np.einsum("q,sqn->sn", target.conj(), p)
            total += w * np.einsum("sn,mn,sm->", proj, e, proj.conj()).real
        return float(total)

    def __call__(self, t: float, protocol: str = "average") -> float:
        """Basis-averaged fidelity, or the single-state value for protocol "0" / "1"."""
        cfg = self.cfg
        if protocol == "average":
            return 0.5 * sum(self.branch_overlap(b, cfg.branch_for(b), t) for b in (0, 1))
        if protocol in ("0", "1"):
            b = int(protocol)
            return self.branch_overlap(b, cfg.branch_for(b), t)
        raise ValueError(f"unknown fidelity protocol {protocol!r}")


PROTOCOLS = ("average", "0", "1")


def basis_fidelity(h, basis_states, spectator, cfg: PovmConfig, t: float) -> float:
    return FidelityEvaluator(h, basis_states, cfg, spectator)(t)


def state_fidelity(h, psi, branch: int, cfg: PovmConfig, t: float, spectator=None) -> float:
    """<psi| E_branch(spectator ⊗ |psi><psi|) |psi> for an explicit initial state."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    perp = np.array([-psi[1].conj(), psi[0].conj()])
    ev = FidelityEvaluator(h, [psi, perp], cfg, spectator)
    return ev.branch_overlap(0, branch, t)
