"""Shared fixtures: random objects and the exact-2-design reference scrambler."""

import numpy as np

from projens.ensemble import StateEnsemble
from projens.rng import ClassicalSource, as_generator


def random_state(dim, rng):
    gen = as_generator(rng)
    psi = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_density(dim, rng):
    gen = as_generator(rng)
    a = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim, rng):
    gen = as_generator(rng)
    a = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_ensemble(n_a, members, rng):
    gen = as_generator(rng)
    w = gen.random(members) + 0.05
    states = np.array([random_state(2**n_a, gen) for _ in range(members)])
    return StateEnsemble(n_a, w / w.sum(), states)


def mub_scrambler():
    """(unitary, bath source) whose tomographic ensemble is an exact 2-design.

    A 3-qubit unitary applying one of the three single-qubit mutually
    unbiased basis rotations to the system qubit, controlled on the bath
    string; with the bath uniform over the three control values the
    conditional states are the six stabilizer states, uniformly weighted
    for a maximally mixed input.
    """
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    blocks = [np.eye(2, dtype=complex), h, h @ s.conj().T, np.eye(2, dtype=complex)]
    u = np.zeros((8, 8), dtype=complex)
    for x, v in enumerate(blocks):
        for a in range(2):
            for b in range(2):
                u[a * 4 + x, b * 4 + x] = v[a, b]
    return u, ClassicalSource.uniform([0, 1, 2], 2)
