import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_ensemble
from projens.ensemble import (
    MomentOperator,
    StateEnsemble,
    build_projected_ensemble,
    delta_alpha,
    delta_hs,
    delta_init,
    design_bounds,
    expected_frame_potential,
    frame_potential_exact,
    frame_potential_mc,
    frame_potentials,
    haar_frame_potential,
    moment_operator,
    moment_renyi2,
    pool_ensembles,
    rms_k1_exact,
    theorem1_rms,
)
from projens.errors import ContractError
from projens.permutations import symmetric_projector_moment, symmetric_subspace_dim
from projens.qcore import QubitSplit
from projens.rng import ClassicalSource, RngStream, haar_unitary

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KETP = np.array([1, 1], dtype=complex) / math.sqrt(2)


def pair_ensemble():
    return StateEnsemble(1, np.array([0.5, 0.5]), np.array([KET0, KET1]))


def test_build_identity_point_mass():
    e = build_projected_ensemble(np.eye(4, dtype=complex),
                                 ClassicalSource.point_mass(0, 2), QubitSplit(1, 1))
    assert e.size == 1
    assert e.weights[0] == pytest.approx(1.0)
    assert np.allclose(e.states[0], KET0)


def test_build_identity_uniform_source():
    e = build_projected_ensemble(np.eye(4, dtype=complex),
                                 ClassicalSource.uniform(range(4), 2), QubitSplit(1, 1))
    assert e.size == 4
    assert np.allclose(e.weights, 0.25)
    # initial strings 00, 01 leave A in |0>, strings 10, 11 leave it in |1>
    overlaps = np.abs(e.states @ KET1) ** 2
    assert sorted(np.round(overlaps, 12)) == [0.0, 0.0, 1.0, 1.0]


def test_build_rejects_mismatched_source():
    with pytest.raises(Exception):
        build_projected_ensemble(np.eye(4, dtype=complex),
                                 ClassicalSource.point_mass(0, 3), QubitSplit(1, 1))


def test_disorder_pool_member_count():
    # fixed initial string, 2^n unitaries: |ensemble| = 2^{n_a + 2 n_b}
    split = QubitSplit(1, 1)
    n = split.total
    parts = []
    for i in range(2**n):
        u = haar_unitary(4, RngStream(60, i))
        parts.append(build_projected_ensemble(u, ClassicalSource.point_mass(0, n), split))
    pooled = pool_ensembles(parts)
    assert pooled.size == 2 ** (split.n_a + 2 * split.n_b)
    assert pooled.weights.sum() == pytest.approx(1.0)


def test_moment_operator_trivial_cases():
    single = StateEnsemble(1, np.array([1.0]), np.array([KET0]))
    for k in (1, 2, 3):
        m = moment_operator(single, k)
        assert np.trace(m.matrix @ m.matrix).real == pytest.approx(1.0)
    pair = pair_ensemble()
    assert np.allclose(moment_operator(pair, 1).matrix, np.eye(2) / 2)
    m2 = moment_operator(pair, 2)
    assert np.allclose(m2.matrix, np.diag([0.5, 0.0, 0.0, 0.5]))


def test_moment_operator_invariants():
    e = random_ensemble(2, 12, RngStream(9))
    for k in (1, 2):
        m = moment_operator(e, k)
        evals = np.linalg.eigvalsh(m.matrix)
        assert evals.min() >= -1e-10
        p_sym = symmetric_projector_moment(e.dim, k) * symmetric_subspace_dim(e.dim, k)
        proj = p_sym @ m.matrix @ p_sym
        assert np.max(np.abs(proj - m.matrix)) < 1e-9


def test_frame_potential_exact_values():
    single = StateEnsemble(1, np.array([1.0]), np.array([KETP]))
    for k in (1, 2, 5):
        assert frame_potential_exact(single, k) == pytest.approx(1.0)
    pair = pair_ensemble()
    for k in (1, 2, 3):
        assert frame_potential_exact(pair, k) == pytest.approx(0.5)
    mix = StateEnsemble(1, np.array([0.5, 0.5]), np.array([KET0, KETP]))
    assert frame_potential_exact(mix, 1) == pytest.approx(0.75)


def test_frame_potential_matches_moment_purity():
    for seed in range(4):
        e = random_ensemble(2, 10, RngStream(20, seed))
        for k in (1, 2):
            f = frame_potential_exact(e, k)
            m = moment_operator(e, k)
            assert f == pytest.approx(np.trace(m.matrix @ m.matrix).real, abs=1e-8)


def test_frame_potentials_batch_matches_single():
    e = random_ensemble(1, 8, RngStream(21))
    fps = frame_potentials(e, [1, 2, 3])
    for k in (1, 2, 3):
        assert fps[k] == pytest.approx(frame_potential_exact(e, k), abs=1e-12)


def test_frame_potential_mc():
    single = StateEnsemble(1, np.array([1.0]), np.array([KET0]))
    est, se = frame_potential_mc(single, 2, 500, RngStream(1))
    assert est == 1.0 and se == 0.0
    pair = pair_ensemble()
    est, se = frame_potential_mc(pair, 3, 10_000, RngStream(2))
    assert abs(est - 0.5) <= 4 * se
    e = random_ensemble(2, 30, RngStream(3))
    exact = frame_potential_exact(e, 2)
    est, se = frame_potential_mc(e, 2, 10_000, RngStream(4))
    assert abs(est - exact) <= 4 * se


def test_haar_frame_potential_values():
    assert haar_frame_potential(2, 1) == pytest.approx(0.5)
    assert haar_frame_potential(2, 2) == pytest.approx(1.0 / 3.0)
    assert haar_frame_potential(4, 2) == pytest.approx(0.1)


def test_delta_hs_values():
    assert delta_hs(haar_frame_potential(4, 2), 4, 2) == pytest.approx(0.0)
    assert delta_hs(1.0, 2, 1) == pytest.approx(1.0)
    assert delta_hs(0.5, 2, 2) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ContractError):
        delta_hs(0.2, 2, 2)  # below the Haar floor 1/3


def test_delta_alpha_exact_design_and_pure_state():
    # the full computational basis is an exact 1-design
    basis = StateEnsemble(1, np.array([0.5, 0.5]), np.array([KET0, KET1]))
    m = moment_operator(basis, 1)
    for alpha in (1, 2, math.inf):
        assert delta_alpha(m, alpha) == pytest.approx(0.0, abs=1e-12)
    single = moment_operator(StateEnsemble(1, np.array([1.0]), np.array([KET0])), 1)
    assert delta_alpha(single, 1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        delta_alpha(single, 3)


def test_delta_alpha_2_matches_frame_potential_route():
    for seed in range(3):
        e = random_ensemble(1, 7, RngStream(40, seed))
        for k in (1, 2, 3):
            via_moment = delta_alpha(moment_operator(e, k), 2)
            via_f = delta_hs(frame_potential_exact(e, k), 2, k)
            assert via_moment == pytest.approx(via_f, abs=1e-6)


def test_delta_alpha_norm_sandwich():
    # delta_alpha <= delta_{alpha+1} <= D_k^{1/(alpha(alpha+1))} delta_alpha
    # for alpha = 1, 2; delta_3 comes straight from the Schatten 3-norm.
    from projens.permutations import symmetric_projector_moment as haar_matrix
    from projens.qcore import schatten_norm

    for seed in range(10):
        e = random_ensemble(1, 6, RngStream(41, seed))
        for k in (1, 2):
            m = moment_operator(e, k)
            d_k = symmetric_subspace_dim(2, k)
            haar = haar_matrix(2, k)
            d1, d2 = delta_alpha(m, 1), delta_alpha(m, 2)
            d3 = schatten_norm(m.matrix - haar, 3) / schatten_norm(haar, 3)
            assert d1 <= d2 + 1e-9
            assert d2 <= d_k ** (1 / 2) * d1 + 1e-9
            assert d2 <= d3 + 1e-9
            assert d3 <= d_k ** (1 / 6) * d2 + 1e-9


def test_delta_alpha_monotone_in_k():
    for seed in range(8):
        e = random_ensemble(1, 9, RngStream(42, seed))
        deltas = [delta_alpha(moment_operator(e, k), 2) for k in (1, 2, 3)]
        assert deltas[0] <= deltas[1] + 1e-9 <= deltas[2] + 2e-9


def test_renyi_relation():
    for seed in range(4):
        e = random_ensemble(1, 8, RngStream(43, seed))
        for k in (1, 2):
            m = moment_operator(e, k)
            f = frame_potential_exact(e, k)
            assert f == pytest.approx(2.0 ** (-moment_renyi2(m)), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(1, 3), st.integers(1, 12))
def test_frame_potential_floor(seed, n_a, k, members):
    e = random_ensemble(n_a, members, RngStream(seed))
    assert frame_potential_exact(e, k) >= haar_frame_potential(2**n_a, k) - 1e-9


def test_theorem1_rms_values():
    assert theorem1_rms(2, 4, 4, 8) == pytest.approx(math.sqrt(1 / 32))
    assert theorem1_rms(2, 4, 4, 8) == pytest.approx(0.1768, abs=1e-4)
    assert theorem1_rms(2, 4, 4, 0) == pytest.approx(math.sqrt(8))
    assert theorem1_rms(1, 3, 2, 5) == pytest.approx(2.0 ** (-2))
    with pytest.warns(UserWarning):
        theorem1_rms(4, 2, 2, 0)


def test_delta_init_values():
    assert delta_init(8, 8) == pytest.approx(0.0)
    assert delta_init(8, 0) == pytest.approx(math.sqrt(255))
    assert delta_init(6, 4) == pytest.approx(math.sqrt(3))
    with pytest.raises(ValueError):
        delta_init(4, 5.0)


def test_rms_k1_exact_values():
    assert rms_k1_exact(2, 4, 0.0) == pytest.approx(0.0)
    assert rms_k1_exact(4, 1, 1.23) == pytest.approx(1.23)
    assert rms_k1_exact(2, 4, math.sqrt(7)) == pytest.approx(math.sqrt(1 / 3))


def test_expected_frame_potential_forms():
    assert expected_frame_potential(2, 4, 8, 60.0) == pytest.approx(
        haar_frame_potential(4, 2), rel=1e-6)
    assert expected_frame_potential(1, 2, 2, 0.0, exact_single_state=True) == \
        pytest.approx(0.8)


def test_expected_frame_potential_against_haar_sampling():
    """200 Haar unitaries, single initial state: the mean frame potential
    must sit within 3 standard errors of the exact endpoint value."""
    split = QubitSplit(1, 3)
    src = ClassicalSource.point_mass(0, 4)
    fs = []
    for i in range(200):
        u = haar_unitary(16, RngStream(2718, i))
        fs.append(frame_potential_exact(build_projected_ensemble(u, src, split), 2))
    mean, se = np.mean(fs), np.std(fs, ddof=1) / math.sqrt(len(fs))
    endpoint = expected_frame_potential(2, 2, 8, 0.0, exact_single_state=True)
    assert abs(mean - endpoint) <= 3 * se


def test_expected_frame_potential_two_system_qubits():
    # leading order stays within 15% of the Haar-sampled mean at n_a = 2
    split = QubitSplit(2, 3)
    src = ClassicalSource.point_mass(0, 5)
    fs = []
    for i in range(150):
        u = haar_unitary(32, RngStream(3141, i))
        fs.append(frame_potential_exact(build_projected_ensemble(u, src, split), 2))
    pred = expected_frame_potential(2, 4, 8, 0.0)
    assert abs(np.mean(fs) / pred - 1) <= 0.15


def test_design_bounds():
    assert design_bounds(0.1, 1.0) == pytest.approx(0.1)
    assert design_bounds(0.1, 0.5) == pytest.approx(0.2)
    # k = 2, n_a = n_b = 4, s_c = 8 at failure probability 1/2
    eps = design_bounds(theorem1_rms(2, 4, 4, 8), 0.5)
    assert eps == pytest.approx(0.3536, abs=1e-4)
    with pytest.raises(ValueError):
        design_bounds(0.1, 0.0)


def test_ensemble_invariant_enforcement():
    with pytest.raises(ContractError):
        StateEnsemble(1, np.array([0.7, 0.7]), np.array([KET0, KET1]))
    with pytest.raises(ContractError):
        StateEnsemble(1, np.array([0.5, 0.5]), np.array([KET0, 2 * KET1]))
    with pytest.raises(ContractError):
        MomentOperator(1, 2, np.eye(2, dtype=complex))  # trace 2
