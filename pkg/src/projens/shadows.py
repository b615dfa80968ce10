"""Classical shadow tomography driven by projected ensembles.

The unknown state rho_A sits on the system register, the bath register is
initialized in a basis state |x> drawn from a classical source, a fixed
unitary scrambles everything, and all qubits are read out.  Classical
post-processing inverts the dynamics on the observed outcome to produce
the single-shot estimator

    rho_hat = (d_A + 1) * chi_hat - I_A,

with chi_hat the normalized conditional projector from the inverted
evolution.  The estimator is unbiased when the induced tomographic
ensemble is an exact 2-design; otherwise the residual (infinite-shot)
bias shrinks with the ensemble's distance from a 2-design, which is
exactly what injecting classical entropy buys.

The patched-quench functions scale this up: an identical small unitary
acts on disjoint rows of a qubit grid, keeping the inversion classically
cheap while the per-row shadows are assembled into many-body observables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractError, DegenerateSampleError, SizeError
from .qcore import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, QubitSplit, assert_hermitian, kron_all
from .rng import ClassicalSource, as_generator, sample_categorical, sample_initial
from .model import IsingParams, build_mfim

_WEIGHT_FLOOR = 1e-12
_PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class ShadowSample(NamedTuple):
    x: int
    z_a: int
    z_b: int


@dataclass
class Observable:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        assert_hermitian(self.matrix)


@dataclass
class PatchLayout:
    """n_a grid rows of (one system qubit + n_b bath qubits) each."""

    n_a: int
    n_b: int
    patch_unitary: np.ndarray

    def __post_init__(self):
        r = 2 ** (self.n_b + 1)
        if self.patch_unitary.shape != (r, r):
            raise ContractError("patch unitary must act on n_b + 1 qubits")
        if self.n_a * (self.n_b + 1) > 20:
            raise SizeError("grid beyond 20 qubits is not supported densely")


def random_pauli_observable(n_a: int, rng) -> Observable:
    """Uniformly random non-identity Pauli string on the system register."""
    gen = as_generator(rng)
    while True:
        digits = gen.integers(0, 4, size=n_a)
        if np.any(digits != 0):
            break
    label = "".join("IXYZ"[d] for d in digits)
    return Observable(kron_all(*[_PAULIS[c] for c in label]), label)


def _conditional_vectors(u: np.ndarray, x: int, split: QubitSplit) -> np.ndarray:
    """Row z holds v with v_a = <a, x| U^dag |z>; outcome machinery feeds on this."""
    cols = np.arange(split.d_a) * split.d_b + x
    return u[:, cols].conj()


def outcome_distribution(
    u: np.ndarray, rho_a: np.ndarray, x: int, split: QubitSplit
) -> np.ndarray:
    """p_x(z) over the 2^{n_a+n_b} joint outcomes z = (z_a, z_b)."""
    v = _conditional_vectors(u, x, split)
    p = np.einsum("za,ab,zb->z", v.conj(), rho_a, v).real
    return np.clip(p, 0.0, None)


def sample_shadow(
    u: np.ndarray,
    rho_a: np.ndarray,
    source: ClassicalSource,
    split: QubitSplit,
    rng,
) -> ShadowSample:
    """One measurement record (x, z_a, z_b) from the scrambled register."""
    if source.num_bits != split.n_b:
        raise ContractError("shadow sources are distributions over bath strings")
    gen = as_generator(rng)
    x = sample_initial(source, gen)
    p = outcome_distribution(u, rho_a, x, split)
    z = sample_categorical(p, gen)
    return ShadowSample(x, z >> split.n_b, z & (split.d_b - 1))


def shadow_estimator(u: np.ndarray, s: ShadowSample, split: QubitSplit) -> np.ndarray:
    """rho_hat = (d_A + 1) chi_hat - I for one sample; always unit trace."""
    z = s.z_a * split.d_b + s.z_b
    cols = np.arange(split.d_a) * split.d_b + s.x
    v = u[z, cols].conj()
    weight = float(np.real(np.vdot(v, v)))
    if weight <= _WEIGHT_FLOOR:
        raise DegenerateSampleError(
            f"conditional weight {weight:.3e} for sample {s}; resample"
        )
    return (split.d_a + 1) * np.outer(v, v.conj()) / weight - np.eye(split.d_a)


def _estimator_traces(
    u: np.ndarray, o: Observable, x: int, split: QubitSplit
) -> tuple[np.ndarray, np.ndarray]:
    """Per-outcome Tr(O rho_hat) and conditional weights for initial string x."""
    v = _conditional_vectors(u, x, split)
    weights = np.einsum("za,za->z", v.conj(), v).real
    quad = np.einsum("za,ab,zb->z", v.conj(), o.matrix, v).real
    tr_o = float(np.trace(o.matrix).real)
    safe = weights > _WEIGHT_FLOOR
    traces = np.zeros_like(weights)
    traces[safe] = (split.d_a + 1) * quad[safe] / weights[safe] - tr_o
    return traces, weights


def exact_bias(
    u: np.ndarray,
    rho_a: np.ndarray,
    o: Observable,
    source: ClassicalSource,
    split: QubitSplit,
) -> float:
    """Infinite-shot estimation bias, by full enumeration over (x, z_a, z_b)."""
    truth = float(np.trace(o.matrix @ rho_a).real)
    total = 0.0
    for x, q in zip(source.support, source.probs):
        p = outcome_distribution(u, rho_a, int(x), split)
        traces, _ = _estimator_traces(u, o, int(x), split)
        total += q * float(p @ traces)
    return total - truth


def mean_estimator_exact(
    u: np.ndarray, rho_a: np.ndarray, source: ClassicalSource, split: QubitSplit
) -> np.ndarray:
    """Outcome-averaged estimator sum_x q(x) sum_z p_x(z) rho_hat(x, z)."""
    out = np.zeros((split.d_a, split.d_a), dtype=complex)
    for x, q in zip(source.support, source.probs):
        v = _conditional_vectors(u, int(x), split)
        p = np.einsum("za,ab,zb->z", v.conj(), rho_a, v).real
        weights = np.einsum("za,za->z", v.conj(), v).real
        safe = weights > _WEIGHT_FLOOR
        scale = np.zeros_like(weights)
        scale[safe] = p[safe] / weights[safe]
        chi_avg = (v.T * scale) @ v.conj()
        out += q * ((split.d_a + 1) * chi_avg - p.sum() * np.eye(split.d_a))
    return out


def estimate_observable(
    samples: list[ShadowSample], u: np.ndarray, o: Observable, split: QubitSplit
) -> tuple[float, float]:
    """Empirical mean of Tr(O rho_hat) over shots, with its standard error."""
    if not samples:
        raise ContractError("need at least one sample")
    vals = np.array(
        [float(np.trace(o.matrix @ shadow_estimator(u, s, split)).real) for s in samples]
    )
    se = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return float(np.mean(vals)), se


def unbiased_reference_error(
    rho_a: np.ndarray, o: Observable, shots: int, rng
) -> float:
    """|estimate - truth| for the exact-2-design (fresh Haar unitary per shot)
    shadow protocol; the shot-noise-limited reference curve."""
    from .rng import haar_unitary

    gen = as_generator(rng)
    d = rho_a.shape[0]
    truth = float(np.trace(o.matrix @ rho_a).real)
    tr_o = float(np.trace(o.matrix).real)
    total = 0.0
    for _ in range(shots):
        v = haar_unitary(d, gen)
        p = np.einsum("za,ab,zb->z", v, rho_a, v.conj()).real
        b = sample_categorical(np.clip(p, 0, None), gen)
        row = v[b].conj()
        total += (d + 1) * float(np.real(row.conj() @ o.matrix @ row)) - tr_o
    return abs(total / shots - truth)


# ---------------------------------------------------------------------------
# Patched quench


def _grid_indices(n_a: int, n_b: int, s_values: np.ndarray, x_rows: np.ndarray) -> np.ndarray:
    """Grid amplitude index for system config s and per-row bath strings x."""
    row_dim_bits = n_b + 1
    idx = np.zeros_like(s_values)
    for i in range(n_a):
        s_i = (s_values >> (n_a - 1 - i)) & 1
        code = s_i * (2**n_b) + int(x_rows[i])
        idx = idx + (code << ((n_a - 1 - i) * row_dim_bits))
    return idx


def _patched_distribution(layout: PatchLayout, psi_g: np.ndarray, x_rows: np.ndarray) -> np.ndarray:
    """Measurement distribution of the evolved grid for one ancilla setting."""
    n_a, n_b = layout.n_a, layout.n_b
    r = 2 ** (n_b + 1)
    dim = r**n_a
    grid = np.zeros(dim, dtype=complex)
    s_values = np.arange(2**n_a)
    grid[_grid_indices(n_a, n_b, s_values, x_rows)] = psi_g
    grid = grid.reshape((r,) * n_a)
    for ax in range(n_a):
        grid = np.moveaxis(np.tensordot(layout.patch_unitary, grid, axes=([1], [ax])), 0, ax)
    probs = np.abs(grid.reshape(-1)) ** 2
    return probs / probs.sum()


def _row_pauli_traces(
    layout: PatchLayout, x_rows: np.ndarray, z_codes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Tr(X rho_hat_i), Tr(Y rho_hat_i) for every row of a batch of outcomes.

    z_codes has shape (shots,); returns two (shots, n_a) arrays.
    """
    n_a, n_b = layout.n_a, layout.n_b
    row_bits = n_b + 1
    mask = 2**row_bits - 1
    tx = np.empty((z_codes.shape[0], n_a))
    ty = np.empty((z_codes.shape[0], n_a))
    v_all = layout.patch_unitary.conj()
    for i in range(n_a):
        z_row = (z_codes >> ((n_a - 1 - i) * row_bits)) & mask
        v0 = v_all[z_row, 0 * 2**n_b + int(x_rows[i])]
        v1 = v_all[z_row, 1 * 2**n_b + int(x_rows[i])]
        norm = np.abs(v0) ** 2 + np.abs(v1) ** 2
        norm = np.where(norm > _WEIGHT_FLOOR, norm, np.inf)  # degenerate rows excluded upstream
        cross = v0.conj() * v1
        tx[:, i] = 6.0 * cross.real / norm
        ty[:, i] = 6.0 * cross.imag / norm
    return tx, ty


def patched_energy_estimate(
    layout: PatchLayout,
    psi_g: np.ndarray,
    row_source: ClassicalSource,
    shots: int,
    rng,
    params: IsingParams | None = None,
) -> tuple[float, float]:
    """Energy of psi_g under the n_a-site chain Hamiltonian, from patched shadows.

    Each shot prepares psi_g (x) |x> with per-row bath strings drawn from
    ``row_source``, applies the patch unitary row-wise, measures the whole
    grid, and builds one single-qubit shadow estimator per row; two-site
    XX terms use products of the two neighboring row estimators.  Returns
    (estimate, |estimate - <psi_g|H|psi_g>|).
    """
    if row_source.num_bits != layout.n_b:
        raise ContractError("row source must be a distribution over one row's bath bits")
    params = params or IsingParams(n=layout.n_a)
    if params.n != layout.n_a:
        raise ContractError("Hamiltonian size must match the number of rows")
    gen = as_generator(rng)

    draws = np.array(
        [[sample_initial(row_source, gen) for _ in range(layout.n_a)] for _ in range(shots)],
        dtype=np.int64,
    )
    joint = draws @ (2 ** (layout.n_b * np.arange(layout.n_a - 1, -1, -1, dtype=np.int64)))
    energy_sum = 0.0
    for joint_x in np.unique(joint):
        rows_mask = joint == joint_x
        count = int(rows_mask.sum())
        x_rows = draws[np.argmax(rows_mask)]
        probs = _patched_distribution(layout, psi_g, x_rows)
        counts = gen.multinomial(count, probs)
        hit = np.nonzero(counts)[0]
        z_codes = np.repeat(hit, counts[hit])
        tx, ty = _row_pauli_traces(layout, x_rows, z_codes)
        singles = params.h_x * tx.sum(axis=1) + params.h_y * ty.sum(axis=1)
        pairs = params.j * (tx[:, :-1] * tx[:, 1:]).sum(axis=1)
        energy_sum += float((singles + pairs).sum())
    estimate = energy_sum / shots
    h = build_mfim(params)
    truth = float(np.real(psi_g.conj() @ h @ psi_g))
    return estimate, abs(estimate - truth)
