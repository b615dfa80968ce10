"""Symmetric-group machinery and Weingarten calculus.

Permutations are tuples in one-line notation: ``p[i]`` is the image of
symbol i.  The permutation operator on a k-fold tensor space sends
``|i_0 ... i_{k-1}>`` to ``|i_{p^{-1}(0)} ... i_{p^{-1}(k-1)}>``, i.e. it
moves the factor in slot s to slot p(s); its trace is d^{#cycles(p)}.

Weingarten values are obtained by inverting the Gram matrix
``G[s, p] = d^{#cycles(s^{-1} p)}`` against the identity indicator, which
is exact (to solver precision) whenever d >= k.  They feed the exact Haar
moment oracle

    E_{U~Haar}[ U^k A U^dag^k ] = sum_{s,p} Wg(s^{-1} p, d) Tr(A s^dag) p_op,

the reference against which every Monte Carlo Haar average in the package
is validated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeError
from .qcore import MAX_ENTRIES

Perm = tuple[int, ...]


def all_permutations(k: int) -> list[Perm]:
    """Elements of S_k in lexicographic order (identity first)."""
    return list(itertools.permutations(range(k)))


def identity_perm(k: int) -> Perm:
    return tuple(range(k))


def compose(p: Perm, q: Perm) -> Perm:
    """(p o q)[i] = p[q[i]]  (apply q first)."""
    return tuple(p[q[i]] for i in range(len(p)))


def invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, pi in enumerate(p):
        out[pi] = i
    return tuple(out)


def cycle_count(p: Perm) -> int:
    """Number of disjoint cycles, fixed points included."""
    seen = [False] * len(p)
    count = 0
    for start in range(len(p)):
        if seen[start]:
            continue
        count += 1
        i = start
        while not seen[i]:
            seen[i] = True
            i = p[i]
    return count


def cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        n, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = p[i]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def direct_sum(p: Perm, q: Perm) -> Perm:
    """Permutation acting as p on the first block and q on the second."""
    k = len(p)
    return tuple(list(p) + [k + qi for qi in q])


def block_swap(k: int, m: int = 0) -> Perm:
    """On 2(k+m) symbols laid out [m | k | k | m], swap the two k-blocks."""
    images = list(range(2 * (k + m)))
    for i in range(k):
        images[m + i] = m + k + i
        images[m + k + i] = m + i
    return tuple(images)


def _basis_permutation(p: Perm, d: int) -> np.ndarray:
    """Index map j -> image(j) of the operator for p on the d^k basis.

    Basis index digits are base-d, copy 0 most significant; the image of
    ``|j_0 ... j_{k-1}>`` has digit j_{p^{-1}(t)} in slot t.
    """
    k = len(p)
    dim = d**k
    p_inv = invert(p)
    places = d ** np.arange(k - 1, -1, -1, dtype=np.int64)
    digits = (np.arange(dim, dtype=np.int64)[:, None] // places[None, :]) % d
    return digits[:, list(p_inv)] @ places


def permutation_operator(p: Perm, d: int) -> np.ndarray:
    """Dense unitary permuting the k tensor copies of a d-dim space."""
    dim = d ** len(p)
    if dim * dim > MAX_ENTRIES:
        raise SizeError(f"permutation operator would hold {dim * dim} entries")
    op = np.zeros((dim, dim), dtype=complex)
    op[_basis_permutation(p, d), np.arange(dim)] = 1.0
    return op


def symmetric_subspace_dim(d: int, k: int) -> int:
    return math.comb(d + k - 1, k)


def symmetric_projector_moment(d: int, k: int) -> np.ndarray:
    """k-th Haar moment operator P_sym / D_k as a dense matrix.

    Equals (d-1)!/(d+k-1)! times the sum of all permutation operators.
    """
    dim = d**k
    if dim * dim > MAX_ENTRIES:
        raise SizeError(f"moment operator would hold {dim * dim} entries")
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for p in all_permutations(k):
        out[_basis_permutation(p, d), cols] += 1.0
    return out * (math.factorial(d - 1) / math.factorial(d + k - 1))


@dataclass
class WeingartenTable:
    k: int
    d: int
    values: dict[Perm, float]

    def __call__(self, p: Perm) -> float:
        return self.values[p]


def weingarten_table(k: int, d: int) -> WeingartenTable:
    """Weingarten values for S_k at dimension d, by Gram inversion.

    Restricted to k <= 6 (factorial-size linear system) and d >= k so the
    Gram matrix is nonsingular.
    """
    if k > 6:
        raise SizeError("Weingarten tables are limited to k <= 6")
    if d < k:
        raise ValueError(f"Gram matrix is singular for d={d} < k={k}")
    perms = all_permutations(k)
    n = len(perms)
    gram = np.empty((n, n), dtype=float)
    for i, s in enumerate(perms):
        s_inv = invert(s)
        for j, p in enumerate(perms):
            gram[i, j] = float(d) ** cycle_count(compose(s_inv, p))
    rhs = np.zeros(n)
    rhs[perms.index(identity_perm(k))] = 1.0
    wg = np.linalg.solve(gram, rhs)
    return WeingartenTable(k, d, {p: float(w) for p, w in zip(perms, wg)})


def haar_moment_oracle(a: np.ndarray, k: int, d: int) -> np.ndarray:
    """Exact E_{U~Haar}[U^{(x)k} A U^dag^{(x)k}] via Weingarten sums."""
    dim = d**k
    if a.shape != (dim, dim):
        raise ValueError(f"operator shape {a.shape} does not match d^k = {dim}")
    table = weingarten_table(k, d)
    perms = all_permutations(k)
    index_maps = {p: _basis_permutation(p, d) for p in perms}
    cols = np.arange(dim)
    # Tr(A s^dag) = sum_j A[image_s(j), j]
    traces = {s: complex(a[index_maps[s], cols].sum()) for s in perms}
    out = np.zeros((dim, dim), dtype=complex)
    for p in perms:
        coeff = sum(table.values[compose(invert(s), p)] * traces[s] for s in perms)
        out[index_maps[p], cols] += coeff
    return out


def frame_potential_cycle_sum(k: int, m: int, d: int) -> float:
    """sum over S_{k+m} x S_{k+m} of d^{#cycles(tau s1 s2)} with tau the k-block swap."""
    tau = block_swap(k, m)
    total = 0.0
    for s1 in all_permutations(k + m):
        for s2 in all_permutations(k + m):
            total += float(d) ** cycle_count(compose(tau, direct_sum(s1, s2)))
    return total
