"""Dense complex linear algebra and qubit-register primitives.

Conventions used throughout the package:

* Qubit 0 is the *most significant* bit of the amplitude index, so an
  N-qubit basis state ``|b_0 b_1 ... b_{N-1}>`` sits at amplitude index
  ``b_0 * 2^{N-1} + ... + b_{N-1}``.
* In a bipartition the A block comes first: the amplitude index of an
  (N_A + N_B)-qubit register factorizes as ``i = i_A * 2^{N_B} + i_B``.

Everything here is a pure function of its inputs; matrices and state
vectors are plain complex ndarrays.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, SizeError

# Dense-representation ceiling: no matrix may exceed this many entries.
MAX_ENTRIES = 2**24

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
PRUNE_THRESHOLD = 1e-12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class QubitSplit:
    """Bipartition of a qubit register into system A (first) and bath B."""

    def __init__(self, n_a: int, n_b: int):
        if n_a < 1 or n_b < 0:
            raise ContractError(f"invalid split ({n_a}, {n_b}): need n_a >= 1, n_b >= 0")
        self.n_a = n_a
        self.n_b = n_b

    @property
    def total(self) -> int:
        return self.n_a + self.n_b

    @property
    def d_a(self) -> int:
        return 2**self.n_a

    @property
    def d_b(self) -> int:
        return 2**self.n_b

    def __repr__(self):
        return f"QubitSplit(n_a={self.n_a}, n_b={self.n_b})"


def assert_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ContractError(f"matrix is not Hermitian: max |M - M^dag| = {dev:.3e}")


def assert_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > tol:
        raise ContractError(f"matrix is not unitary: max |U^dag U - I| = {dev:.3e}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with the dense-size guard."""
    entries = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if entries > MAX_ENTRIES:
        raise SizeError(f"kron result would hold {entries} entries (limit {MAX_ENTRIES})")
    return np.kron(a, b)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    assert_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    return evals, evecs


def evolve_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) through the spectral decomposition of Hermitian h."""
    evals, evecs = hermitian_eig(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def project_bath(
    psi: np.ndarray, z: int, split: QubitSplit, prune: float = PRUNE_THRESHOLD
) -> tuple[np.ndarray | None, float]:
    """Project the bath register onto |z> and renormalize the system part.

    Returns ``(projected_state, prob)`` where ``prob`` is the squared norm
    of the unnormalized slice.  When ``prob <= prune`` the state is
    returned as None and the caller must drop the branch.
    """
    if psi.shape[0] != 2**split.total:
        raise ContractError(
            f"state has {psi.shape[0]} amplitudes, split expects {2**split.total}"
        )
    slice_a = psi.reshape(split.d_a, split.d_b)[:, z]
    prob = float(np.real(np.vdot(slice_a, slice_a)))
    if prob <= prune:
        return None, prob
    return slice_a / np.sqrt(prob), prob


def schatten_norm(m: np.ndarray, alpha: float) -> float:
    """Schatten norm (sum of singular values^alpha)^(1/alpha); alpha=inf gives the largest."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {m.shape}")
    if alpha < 1:
        raise ValueError(f"Schatten index must be >= 1, got {alpha}")
    s = np.linalg.svd(m, compute_uv=False)
    if np.isinf(alpha):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s**alpha) ** (1.0 / alpha))
