"""Projected ensembles, moment operators, frame potentials, and benchmarks.

A projected ensemble is built by evolving computational-basis initial
states |x> (drawn from a classical source q) under a fixed unitary and
projecting the bath register onto each measurement outcome z.  Injecting
classical randomness through q enlarges the ensemble and drives its
moments toward the Haar ensemble; the closed-form benchmarks below
(`theorem1_rms`, `rms_k1_exact`, `expected_frame_potential`) quantify how
fast, and the distance measures (`delta_hs`, `delta_alpha`) measure how
close a concrete ensemble actually gets.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, SizeError
from .permutations import symmetric_projector_moment, symmetric_subspace_dim
from .qcore import MAX_ENTRIES, PRUNE_THRESHOLD, QubitSplit, schatten_norm
from .rng import ClassicalSource, as_generator

# Pairwise-overlap computations are blocked at this many members.
MAX_MEMBERS = 30_000
_BLOCK = 1024


@dataclass
class StateEnsemble:
    """Weighted pure-state ensemble on n_a qubits.

    ``states`` holds one unit-norm state per row; ``weights`` are the
    ensemble probabilities (positive, summing to one).
    """

    n_a: int
    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.ndim != 2 or self.states.shape[0] != self.weights.shape[0]:
            raise ContractError("states must be (members, dim) matching weights")
        if self.states.shape[1] != 2**self.n_a:
            raise ContractError("state dimension must be 2^n_a")
        if np.any(self.weights <= 0):
            raise ContractError("weights must be positive (prune zero members first)")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ContractError(f"weights sum to {self.weights.sum()}, not 1")
        norms = np.linalg.norm(self.states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ContractError("member states must be unit-norm")

    @property
    def dim(self) -> int:
        return 2**self.n_a

    @property
    def size(self) -> int:
        return self.weights.shape[0]


@dataclass
class MomentOperator:
    """k-th moment rho^(k) of an ensemble on a d-dimensional space."""

    k: int
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = self.d**self.k
        if self.matrix.shape != (dim, dim):
            raise ContractError(f"moment matrix must be {dim} x {dim}")
        if abs(np.trace(self.matrix) - 1.0) > 1e-9:
            raise ContractError("moment operator must have unit trace")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-9:
            raise ContractError("moment operator must be Hermitian")


def build_projected_ensemble(
    u: np.ndarray,
    source: ClassicalSource,
    split: QubitSplit,
    prune: float = PRUNE_THRESHOLD,
) -> StateEnsemble:
    """Projected ensemble of U with initial states sampled from ``source``.

    Members enumerate all (x, z) pairs with weight q(x) * p_x(z), where
    p_x(z) is the probability of bath outcome z given initial state |x>.
    Zero-probability branches (weight below ``prune``) are dropped before
    the weights are renormalized.
    """
    if source.num_bits != split.total:
        raise SizeError("source strings must cover the full register")
    if u.shape != (2**split.total, 2**split.total):
        raise SizeError(f"unitary shape {u.shape} does not match split {split}")
    upper = source.support.shape[0] * split.d_b
    if upper > MAX_MEMBERS:
        raise SizeError(f"ensemble would hold up to {upper} members (limit {MAX_MEMBERS})")
    blocks_w = []
    blocks_s = []
    for x, q in zip(source.support, source.probs):
        # U|x> is column x; rows of the reshaped column are the A-states per z.
        branch = u[:, x].reshape(split.d_a, split.d_b).T
        probs = np.einsum("zi,zi->z", branch, branch.conj()).real
        keep = probs > prune
        blocks_w.append(q * probs[keep])
        blocks_s.append(branch[keep] / np.sqrt(probs[keep])[:, None])
    weights = np.concatenate(blocks_w)
    states = np.vstack(blocks_s)
    return StateEnsemble(split.n_a, weights / weights.sum(), states)


def pool_ensembles(ensembles: list[StateEnsemble], weights=None) -> StateEnsemble:
    """Mixture of several ensembles on the same register.

    Used for the disorder protocol, where one fixed initial state is
    evolved under 2^{S_c} different disordered unitaries and the projected
    ensembles are pooled with uniform weight.
    """
    if weights is None:
        weights = np.full(len(ensembles), 1.0 / len(ensembles))
    weights = np.asarray(weights, dtype=float)
    n_a = ensembles[0].n_a
    w = np.concatenate([wi * e.weights for wi, e in zip(weights, ensembles)])
    s = np.vstack([e.states for e in ensembles])
    return StateEnsemble(n_a, w / w.sum(), s)


def moment_operator(e: StateEnsemble, k: int) -> MomentOperator:
    """rho^(k) = sum_i w_i (|psi_i><psi_i|)^{(x)k}."""
    dim = e.dim**k
    if dim * dim > MAX_ENTRIES:
        raise SizeError(f"moment operator would hold {dim * dim} entries")
    phi = e.states
    for _ in range(k - 1):
        phi = (phi[:, :, None] * e.states[:, None, :]).reshape(e.size, -1)
    rho = (phi.T * e.weights) @ phi.conj()
    return MomentOperator(k, e.dim, rho)


def _overlap_block_sums(e: StateEnsemble, ks: list[int]) -> dict[int, float]:
    if e.size > MAX_MEMBERS:
        raise SizeError(f"{e.size} members exceeds the pairwise-overlap limit")
    totals = {k: 0.0 for k in ks}
    for lo in range(0, e.size, _BLOCK):
        hi = min(lo + _BLOCK, e.size)
        overlaps = np.abs(e.states[lo:hi] @ e.states.conj().T) ** 2
        wrow = e.weights[lo:hi]
        for k in ks:
            totals[k] += float(wrow @ (overlaps**k) @ e.weights)
    return totals


def frame_potential_exact(e: StateEnsemble, k: int) -> float:
    """F^(k) = sum_{ij} w_i w_j |<psi_i|psi_j>|^{2k} over all member pairs."""
    return _overlap_block_sums(e, [k])[k]


def frame_potentials(e: StateEnsemble, ks) -> dict[int, float]:
    """Frame potentials for several k from one pass over the overlap matrix."""
    return _overlap_block_sums(e, list(ks))


def frame_potential_mc(
    e: StateEnsemble, k: int, pair_samples: int, rng
) -> tuple[float, float]:
    """Monte Carlo frame potential from i.i.d. weighted member pairs.

    Returns (estimate, standard error); unbiased for any sample count.
    """
    gen = as_generator(rng)
    i = gen.choice(e.size, size=pair_samples, p=e.weights)
    j = gen.choice(e.size, size=pair_samples, p=e.weights)
    vals = np.abs(np.einsum("ij,ij->i", e.states[i].conj(), e.states[j])) ** (2 * k)
    se = float(np.std(vals, ddof=1) / np.sqrt(pair_samples)) if pair_samples > 1 else 0.0
    return float(np.mean(vals)), se


def haar_frame_potential(d: int, k: int) -> float:
    """F_Haar^(k)(d) = 1 / binom(d+k-1, k)."""
    return 1.0 / symmetric_subspace_dim(d, k)


def delta_hs(f: float, d: int, k: int) -> float:
    """Normalized Hilbert-Schmidt distance sqrt(F / F_Haar - 1).

    The frame potential of any ensemble is bounded below by the Haar
    value; inputs below the floor (beyond tolerance) are rejected.
    """
    floor = haar_frame_potential(d, k)
    if f < floor - 1e-9:
        raise ContractError(f"frame potential {f} below the Haar floor {floor}")
    return math.sqrt(max(f / floor - 1.0, 0.0))


def haar_moment_operator(d: int, k: int) -> MomentOperator:
    return MomentOperator(k, d, symmetric_projector_moment(d, k))


def delta_alpha(m: MomentOperator, alpha: float) -> float:
    """Normalized Schatten-alpha distance to the Haar moment, alpha in {1, 2, inf}."""
    if alpha not in (1, 2) and not math.isinf(alpha):
        raise ValueError(f"unsupported Schatten index {alpha}")
    haar = symmetric_projector_moment(m.d, m.k)
    return schatten_norm(m.matrix - haar, alpha) / schatten_norm(haar, alpha)


def moment_renyi2(m: MomentOperator) -> float:
    """Renyi 2-entropy of the moment operator from its eigenvalues."""
    evals = np.linalg.eigvalsh(m.matrix)
    return float(-np.log2(np.sum(evals**2)))


def theorem1_rms(k: int, n_a: int, n_b: int, s_c: float) -> float:
    """Root-mean-square design distance sqrt(2^{k n_a - n_b - s_c} / k!).

    Large-system asymptotic for Haar-random evolution with orthonormal
    initial states of collision entropy s_c; valid for k well below
    2^{(n_a+n_b)/4}.
    """
    if k >= 2.0 ** ((n_a + n_b) / 4):
        warnings.warn(
            f"k={k} is outside the regime k < 2^((n_a+n_b)/4) where the "
            "rms formula is controlled",
            stacklevel=2,
        )
    return math.sqrt(2.0 ** (k * n_a - n_b - s_c) / math.factorial(k))


def delta_init(n: int, s_c: float) -> float:
    """Design distance (k=1) of the classical source itself: sqrt(2^{n-s_c} - 1)."""
    if not 0 <= s_c <= n:
        raise ValueError(f"s_c={s_c} out of range [0, {n}]")
    return math.sqrt(max(2.0 ** (n - s_c) - 1.0, 0.0))


def rms_k1_exact(d_a: int, d_b: int, delta_init_value: float) -> float:
    """Exact finite-size rms distance at k=1.

    The subsystem purity average is exact at every size, giving
    Delta_rms^(1) = Delta_init^(1) * sqrt((d_a^2 - 1)/(d_a^2 d_b^2 - 1)).
    """
    return delta_init_value * math.sqrt((d_a**2 - 1) / (d_a**2 * d_b**2 - 1))


def expected_frame_potential(
    k: int, d_a: int, d_b: int, s_c: float, exact_single_state: bool = False
) -> float:
    """Haar-averaged frame potential of the projected ensemble.

    Leading order in the subsystem dimensions:
        E F^(k) = F_Haar^(k)(d_a) + 2^{-s_c} / d_b.
    With ``exact_single_state`` the exact fixed-initial-state (s_c = 0)
    value is returned instead:
        (d_a + 1 + d_a (d_b - 1) F_Haar^(k)(d_a)) / (d_a d_b + 1).
    """
    fh = haar_frame_potential(d_a, k)
    if exact_single_state:
        return (d_a + 1 + d_a * (d_b - 1) * fh) / (d_a * d_b + 1)
    return fh + 2.0 ** (-s_c) / d_b


def design_bounds(delta_rms: float, failure_prob: float) -> float:
    """Markov bound: with probability >= 1 - delta the trace-norm design
    distance is at most delta_rms / delta."""
    if not 0 < failure_prob <= 1:
        raise ValueError(f"failure probability must be in (0, 1], got {failure_prob}")
    return delta_rms / failure_prob
