"""Physical models and spectral diagnostics.

The workhorse Hamiltonian is the chaotic mixed-field 1D Ising chain with
open boundary conditions,

    H0 = sum_i (h_x X_i + h_y Y_i + J X_i X_{i+1}),

at the standard chaotic point (h_x, h_y, J) = (0.8090, 0.9045, 1).  Every
computational-basis state has <H0> = 0, which is what makes random basis
state initialization compatible with infinite-temperature dynamics.
Disorder enters as a longitudinal X field, H = H0 + sum_i xi_i X_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .qcore import PAULI_X, PAULI_Y, basis_state, hermitian_eig, kron_all
from .rng import RngStream, as_generator, sample_disorder

# Reference mean gap ratios: GOE (chaotic) and Poisson (localized) values.
GOE_MEAN_GAP_RATIO = 0.53590
POISSON_MEAN_GAP_RATIO = 0.38629


@dataclass
class IsingParams:
    n: int
    h_x: float = 0.8090
    h_y: float = 0.9045
    j: float = 1.0


@dataclass
class DisorderRealization:
    xi: np.ndarray
    w: float

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        if np.any(np.abs(self.xi) > self.w + 1e-12):
            raise ContractError("|xi_i| must not exceed the field strength w")

    @classmethod
    def sample(cls, n: int, w: float, rng) -> "DisorderRealization":
        return cls(sample_disorder(n, w, rng), w)

    @classmethod
    def global_detuning(cls, n: int, xi: float, w: float) -> "DisorderRealization":
        return cls(np.full(n, xi), w)


def _one_site(op: np.ndarray, i: int, n: int) -> np.ndarray:
    return kron_all(np.eye(2**i, dtype=complex), op, np.eye(2 ** (n - i - 1), dtype=complex))


def build_mfim(p: IsingParams) -> np.ndarray:
    """Dense mixed-field Ising Hamiltonian on p.n qubits, open boundaries."""
    if p.n < 1:
        raise ContractError("need at least one qubit")
    dim = 2**p.n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(p.n):
        h += p.h_x * _one_site(PAULI_X, i, p.n)
        h += p.h_y * _one_site(PAULI_Y, i, p.n)
    xx = kron_all(PAULI_X, PAULI_X)
    for i in range(p.n - 1):
        h += p.j * kron_all(
            np.eye(2**i, dtype=complex), xx, np.eye(2 ** (p.n - i - 2), dtype=complex)
        )
    return h


def add_disorder(h0: np.ndarray, d: DisorderRealization) -> np.ndarray:
    """H = H0 + sum_i xi_i X_i."""
    n = d.xi.shape[0]
    if h0.shape[0] != 2**n:
        raise ContractError(f"Hamiltonian dim {h0.shape[0]} does not match {n} sites")
    h = h0.astype(complex, copy=True)
    for i in range(n):
        h += d.xi[i] * _one_site(PAULI_X, i, n)
    return h


def loschmidt_echo(
    h0: np.ndarray,
    d1: DisorderRealization,
    d2: DisorderRealization,
    psi0: np.ndarray,
    t: float,
) -> float:
    """|<psi0| e^{i(H0+V2)t} e^{-i(H0+V1)t} |psi0>|^2."""
    return float(loschmidt_echo_curve(h0, d1, d2, psi0, np.array([t]))[0])


def loschmidt_echo_curve(
    h0: np.ndarray,
    d1: DisorderRealization,
    d2: DisorderRealization,
    psi0: np.ndarray,
    ts: np.ndarray,
) -> np.ndarray:
    """Echo at several times from one pair of eigendecompositions."""
    e1, v1 = hermitian_eig(add_disorder(h0, d1))
    e2, v2 = hermitian_eig(add_disorder(h0, d2))
    c1 = v1.conj().T @ psi0
    c2 = v2.conj().T @ psi0
    out = np.empty(len(ts), dtype=float)
    for i, t in enumerate(ts):
        fwd = v1 @ (np.exp(-1j * e1 * t) * c1)
        back = v2 @ (np.exp(-1j * e2 * t) * c2)
        amp = np.vdot(back, fwd)
        out[i] = float(np.abs(amp) ** 2)
    return out


def gap_ratios(eigenvalues: np.ndarray, degeneracy_tol: float = 1e-12) -> np.ndarray:
    """r_n = min(g_n, g_{n+1}) / max(g_n, g_{n+1}) for consecutive gaps g.

    Pairs whose larger gap is below ``degeneracy_tol`` are skipped; the
    ratio is undefined at exact degeneracy and zero-filling would bias
    Poisson statistics.
    """
    e = np.asarray(eigenvalues, dtype=float)
    if e.ndim != 1 or e.size < 3:
        raise ContractError("need at least three sorted eigenvalues")
    if np.any(np.diff(e) < -1e-12):
        raise ContractError("eigenvalues must be sorted ascending")
    gaps = np.diff(e)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    keep = hi >= degeneracy_tol
    return lo[keep] / hi[keep]


def disordered_spectrum(params: IsingParams, w: float, rng) -> np.ndarray:
    """Eigenvalues of one disorder realization of the mixed-field Ising chain."""
    h0 = build_mfim(params)
    d = DisorderRealization.sample(params.n, w, rng)
    evals, _ = hermitian_eig(add_disorder(h0, d))
    return evals


def mean_gap_ratio_scan(
    params: IsingParams,
    w_values,
    realizations: int,
    rng: RngStream,
    workers: int = 1,
    bulk_fraction: float = 0.5,
) -> list[tuple[float, float, float]]:
    """(w, mean gap ratio, standard error) with all ratios pooled per w.

    Ratios come from the central ``bulk_fraction`` of each sorted spectrum;
    edge levels follow neither reference distribution and drag the mean
    visibly below the GOE value at these matrix sizes.
    """
    from .parallel import parallel_map

    chunks = max(1, min(realizations, 2 * workers))
    tasks = []
    for wi, w in enumerate(w_values):
        bounds = np.linspace(0, realizations, chunks + 1).astype(int)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                tasks.append((params, float(w), wi, int(lo), int(hi), rng, bulk_fraction))
    results = parallel_map(_gap_ratio_task, tasks, workers=workers)
    out = []
    for wi, w in enumerate(w_values):
        ratios = np.concatenate([r for t, r in zip(tasks, results) if t[2] == wi])
        mean = float(np.mean(ratios))
        se = float(np.std(ratios, ddof=1) / np.sqrt(ratios.size))
        out.append((float(w), mean, se))
    return out


def spectral_bulk(eigenvalues: np.ndarray, fraction: float) -> np.ndarray:
    """Central ``fraction`` of a sorted spectrum."""
    if not 0 < fraction <= 1:
        raise ContractError("bulk fraction must be in (0, 1]")
    dim = len(eigenvalues)
    keep = max(3, int(round(dim * fraction)))
    lo = (dim - keep) // 2
    return eigenvalues[lo:lo + keep]


def _gap_ratio_task(args):
    params, w, w_index, r_lo, r_hi, rng, bulk_fraction = args
    h0 = build_mfim(params)
    ratios = []
    for r in range(r_lo, r_hi):
        stream = rng.child(w_index * 1_000_003 + r)
        d = DisorderRealization.sample(params.n, w, stream)
        evals, _ = hermitian_eig(add_disorder(h0, d))
        ratios.append(gap_ratios(spectral_bulk(evals, bulk_fraction)))
    return np.concatenate(ratios)


def goe_matrix(dim: int, rng) -> np.ndarray:
    """GOE sample (real symmetric, variance 2 on the diagonal, 1 off it).

    Reference spectrum for chaotic level statistics; its mean gap ratio is
    GOE_MEAN_GAP_RATIO.
    """
    gen = as_generator(rng)
    a = gen.standard_normal((dim, dim))
    return (a + a.T) / np.sqrt(2)


def ground_state(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair (energy, state) of a Hermitian matrix."""
    evals, evecs = hermitian_eig(h)
    return float(evals[0]), evecs[:, 0]


def mfim_basis_expectation(p: IsingParams, x: int) -> float:
    """<x|H0|x> for a computational-basis state; zero for this model."""
    h = build_mfim(p)
    psi = basis_state(p.n, x)
    return float(np.real(psi.conj() @ h @ psi))
