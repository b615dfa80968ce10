import math

import numpy as np
import pytest

from helpers import random_state
from projens.permutations import (
    all_permutations,
    block_swap,
    compose,
    cycle_count,
    cycle_type,
    frame_potential_cycle_sum,
    haar_moment_oracle,
    identity_perm,
    invert,
    permutation_operator,
    symmetric_projector_moment,
    symmetric_subspace_dim,
    weingarten_table,
)
from projens.rng import RngStream, haar_unitary


def test_cycle_count():
    assert cycle_count((0, 1, 2)) == 3
    assert cycle_count((1, 0)) == 1
    assert cycle_count((1, 2, 0)) == 1


def test_permutation_operator_identity_and_swap():
    assert np.allclose(permutation_operator((0, 1, 2), 2), np.eye(8))
    swap = permutation_operator((1, 0), 2)
    expect = np.zeros((4, 4))
    expect[0, 0] = expect[3, 3] = expect[1, 2] = expect[2, 1] = 1.0
    assert np.allclose(swap, expect)


def test_permutation_operator_trace_counts_cycles():
    for k in (1, 2, 3, 4):
        for d in (2, 3):
            for p in all_permutations(k):
                op = permutation_operator(p, d)
                assert np.trace(op).real == pytest.approx(float(d) ** cycle_count(p))


def test_permutation_operator_is_group_homomorphism():
    for p in all_permutations(3):
        for q in all_permutations(3):
            lhs = permutation_operator(p, 2) @ permutation_operator(q, 2)
            assert np.allclose(lhs, permutation_operator(compose(p, q), 2))


def test_symmetric_projector_moment():
    assert np.allclose(symmetric_projector_moment(2, 1), np.eye(2) / 2)
    rho = symmetric_projector_moment(2, 2)
    assert np.trace(rho).real == pytest.approx(1.0)
    evals = np.linalg.eigvalsh(rho)
    assert np.sum(evals > 1e-10) == 3  # triplet subspace
    d_k = symmetric_subspace_dim(2, 2)
    # idempotent up to the 1/D_k scale
    assert np.max(np.abs((d_k * rho) @ (d_k * rho) - d_k * rho)) < 1e-10
    assert np.trace(rho @ rho).real == pytest.approx(1.0 / d_k)


def test_weingarten_k2_d2_by_gram_inversion():
    # invert [[4, 2], [2, 4]] against (1, 0) by hand
    gram = np.array([[4.0, 2.0], [2.0, 4.0]])
    expect = np.linalg.solve(gram, [1.0, 0.0])
    table = weingarten_table(2, 2)
    assert table.values[(0, 1)] == pytest.approx(expect[0])
    assert table.values[(1, 0)] == pytest.approx(expect[1])
    assert table.values[(0, 1)] == pytest.approx(1.0 / 3.0)
    assert table.values[(1, 0)] == pytest.approx(-1.0 / 6.0)


@pytest.mark.parametrize("d", [2, 3, 4, 8])
def test_weingarten_identity_value(d):
    table = weingarten_table(2, d)
    assert table.values[identity_perm(2)] == pytest.approx(1.0 / (d * d - 1))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [4, 6, 8])
def test_weingarten_absolute_sum(k, d):
    table = weingarten_table(k, d)
    total = sum(abs(v) for v in table.values.values())
    expect = math.factorial(d - k) / math.factorial(d)
    assert total == pytest.approx(expect, rel=1e-10)


def test_weingarten_defining_relation():
    for k in (2, 3, 4, 5):
        for d in (k, k + 2, 8):
            table = weingarten_table(k, d)
            perms = all_permutations(k)
            for s in perms:
                s_inv = invert(s)
                total = sum(
                    float(d) ** cycle_count(compose(s_inv, p)) * table.values[p]
                    for p in perms
                )
                expect = 1.0 if s == identity_perm(k) else 0.0
                assert abs(total - expect) < 1e-10


def test_weingarten_depends_only_on_cycle_type():
    table = weingarten_table(4, 6)
    by_type = {}
    for p, v in table.values.items():
        by_type.setdefault(cycle_type(p), set()).add(round(v, 14))
    assert all(len(vals) == 1 for vals in by_type.values())


def test_weingarten_rejects_singular_gram():
    with pytest.raises(ValueError):
        weingarten_table(3, 2)


def test_oracle_first_moment():
    for d in (2, 3, 5):
        a = np.zeros((d, d), dtype=complex)
        a[0, 0] = 1.0
        assert np.allclose(haar_moment_oracle(a, 1, d), np.eye(d) / d, atol=1e-12)


def test_oracle_pure_second_moment_is_haar_moment():
    a = np.zeros((4, 4), dtype=complex)
    a[0, 0] = 1.0
    assert np.allclose(haar_moment_oracle(a, 2, 2), symmetric_projector_moment(2, 2),
                       atol=1e-12)


def test_oracle_fixes_permutation_operators():
    for p in all_permutations(2):
        op = permutation_operator(p, 3)
        assert np.allclose(haar_moment_oracle(op, 2, 3), op, atol=1e-10)


def test_oracle_preserves_trace_and_commutes_with_tensor_unitaries():
    gen = RngStream(5).generator()
    a = gen.standard_normal((16, 16)) + 1j * gen.standard_normal((16, 16))
    out = haar_moment_oracle(a, 2, 4)
    assert np.trace(out) == pytest.approx(np.trace(a), abs=1e-9)
    v = haar_unitary(4, gen)
    vv = np.kron(v, v)
    assert np.max(np.abs(vv @ out - out @ vv)) < 1e-8


def test_oracle_against_monte_carlo():
    """Rank-one A = |v><w|: the sample average of U^2 A U^dag^2 over Haar
    draws must match the Weingarten oracle entrywise."""
    d, k, n = 4, 2, 20_000
    gen = RngStream(314).generator()
    v, w = random_state(d * d, gen), random_state(d * d, gen)
    a = np.outer(v, w.conj())
    oracle = haar_moment_oracle(a, k, d)
    acc = np.zeros((d * d, d * d), dtype=complex)
    vm, wm = v.reshape(d, d), w.reshape(d, d)
    for _ in range(n):
        u = haar_unitary(d, gen)
        av = (u @ vm @ u.T).reshape(-1)
        aw = (u @ wm @ u.T).reshape(-1)
        acc += np.outer(av, aw.conj())
    assert np.max(np.abs(acc / n - oracle)) < 5e-3


@pytest.mark.parametrize("k,m", [(1, 0), (1, 1), (2, 0), (1, 2), (2, 1), (1, 3), (3, 0),
                                 (2, 2), (3, 1), (4, 0)])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_frame_potential_identity(k, m, d):
    lhs = frame_potential_cycle_sum(k, m, d)
    rhs = (math.factorial(d + k + m - 1) / math.factorial(d - 1)) ** 2 / \
        symmetric_subspace_dim(d, k)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_block_swap_layout():
    # layout [m | k | k | m] with m = 1, k = 2: slots 1, 2 swap with 3, 4
    assert block_swap(2, 1) == (0, 3, 4, 1, 2, 5)
    assert block_swap(1, 0) == (1, 0)
