"""Dense complex linear algebra on truncated tensor-product spaces.

Operators are plain ``numpy`` complex arrays. Subsystems are always ordered
q1 ⊗ q2 ⊗ resonator (qubit ⊗ resonator for a single qubit).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import (
    DimensionBudgetExceeded,
    DimensionMismatch,
    InvalidDimension,
    InvalidSubsystem,
    NotHermitian,
)

MAX_FOCK = 512
# Largest number of matrix entries a single operator may hold.
MAX_ENTRIES = 10**6
HERMITIAN_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_+ = (sx + i sy)/2 raises the sz eigenvalue: |0><1| with |0> the +1 state.
SP = 0.5 * (SX + 1j * SY)
SM = 0.5 * (SX - 1j * SY)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def fock_operators(n_max: int):
    """Return (a, a_dag, n) on the Fock space truncated to ``n_max`` levels."""
    if not isinstance(n_max, (int, np.integer)) or not 1 <= n_max <= MAX_FOCK:
        raise InvalidDimension(f"n_max must be an integer in [1, {MAX_FOCK}], got {n_max!r}")
    a = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1).astype(complex)
    adag = a.conj().T
    # exact integers; adag @ a reproduces these only up to rounding of sqrt(n)^2
    return a, adag, np.diag(np.arange(n_max, dtype=float)).astype(complex)


def number_diag(n_max: int) -> np.ndarray:
    return np.arange(n_max, dtype=float)


def is_hermitian(h, tol=HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.max(np.abs(h - h.conj().T), initial=0.0) < tol


def tensor(*ops) -> np.ndarray:
    """Kronecker product of the operators (or vectors), left to right."""
    if not ops:
        raise InvalidDimension("tensor() needs at least one factor")
    dim = 1
    for op in ops:
        dim *= np.asarray(op).shape[0]
    if dim * dim > MAX_ENTRIES:
        raise DimensionBudgetExceeded(f"tensor product of dimension {dim} exceeds {MAX_ENTRIES} entries")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


class HermitianPropagator:
    """U(t) = exp(-i h t) from a single eigendecomposition of ``h``.

    Sweeps over time reuse the spectral data, so build one of these per
    Hamiltonian rather than calling :func:`expm_hermitian` repeatedly.
    """

    def __init__(self, h):
        h = np.asarray(h, dtype=complex)
        scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
        if not is_hermitian(h, HERMITIAN_TOL * scale):
            raise NotHermitian("generator is not Hermitian")
        self.dim = h.shape[0]
        # Symmetrize so eigh sees an exactly Hermitian input.
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(0.5 * (h + h.conj().T))

    def __call__(self, t: float) -> np.ndarray:
        if not np.isfinite(t):
            raise ValueError(f"time must be finite, got {t}")
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        """U(t) applied to a vector or to the columns of a matrix."""
        v = self.eigenvectors
        phases = np.exp(-1j * self.eigenvalues * t)
        coeff = v.conj().T @ psi
        if coeff.ndim == 1:
            return v @ (phases * coeff)
        return v @ (phases[:, None] * coeff)


def expm_hermitian(h, t: float) -> np.ndarray:
    return HermitianPropagator(h)(t)


@dataclass(frozen=True)
class DensityState:
    """Density matrix on a tensor-product space with a tracked norm.

    Branches of a measurement are sub-normalized; ``norm`` records the
    expected trace and is never silently renormalized.
    """

    matrix: np.ndarray
    dims: tuple
    norm: float = field(default=None)

    def __post_init__(self):
        m = _frozen(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionMismatch(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        if self.norm is None:
            object.__setattr__(self, "norm", float(np.trace(m).real))

    @classmethod
    def pure(cls, psi, dims):
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def check(self, tol=1e-10, psd_tol=1e-8):
        """Raise ValueError if trace, Hermiticity or positivity is violated."""
        m = self.matrix
        if abs(self.trace - self.norm) > tol:
            raise ValueError(f"trace {self.trace} differs from recorded norm {self.norm}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -psd_tol:
            raise ValueError("density matrix is not positive semidefinite")
        return self


def ptrace(matrix, dims, keep) -> np.ndarray:
    """Partial trace of a raw matrix; ``keep`` lists subsystem indices to retain."""
    dims = [int(d) for d in dims]
    keep = sorted(set(keep))
    if not keep:
        raise InvalidSubsystem("keep must be non-empty")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidSubsystem(f"subsystem indices {keep} invalid for dims {dims}")
    n = len(dims)
    t = np.asarray(matrix).reshape(dims + dims)
    # einsum labels: row index i_k, column index j_k; traced subsystems share a label.
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = [letters[k] for k in range(n)]
    cols = [letters[k] if k not in keep else letters[n + k] for k in range(n)]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    spec = "".join(rows) + "".join(cols) + "->" + "".join(out)
    d = int(np.prod([dims[k] for k in keep]))
    return np.einsum(spec, t).reshape(d, d)


def partial_trace(rho: DensityState, keep) -> DensityState:
    keep = sorted(set(keep))
    m = ptrace(rho.matrix, rho.dims, keep)
    return DensityState(m, tuple(rho.dims[k] for k in keep), norm=rho.norm)


def embed(op, index: int, dims) -> np.ndarray:
    """Place ``op`` on subsystem ``index`` with identities elsewhere."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[index] = op
    return tensor(*factors)


def rotation_y(theta: float) -> np.ndarray:
    """exp(-i theta sy / 2); maps sz to cos(theta) sz + sin(theta) sx."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)
