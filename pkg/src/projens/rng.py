"""Deterministic, splittable randomness.

All stochastic pieces of the package draw from :class:`RngStream`, a value
type holding ``(seed, stream_id)``.  Streams with distinct ids are
statistically independent; the same pair always reproduces the same draws,
which is what makes every experiment byte-reproducible.  The underlying
bit generator is counter-based (Philox, 128-bit state) so this holds
across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import UNITARY_TOL

GENERATOR_NAME = "philox4x64"


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator for this (seed, stream_id); same pair -> same draws."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        """Derived independent stream, e.g. one per parallel task."""
        mixed = ((self.stream_id << 20) ^ (index + 1)) & 0xFFFFFFFFFFFFFFFF
        return RngStream(self.seed, mixed)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream or an already-instantiated numpy Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


@dataclass
class ClassicalSource:
    """Distribution q(x) over computational-basis strings of ``num_bits`` bits.

    ``support`` holds the basis-state integer labels, ``probs`` their
    probabilities.  The collision (Renyi-2) entropy ``s_c`` is derived.
    """

    num_bits: int
    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.support.shape != self.probs.shape:
            raise ValueError("support and probs must have matching length")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()}, not 1")
        if np.any(self.support < 0) or np.any(self.support >= 2**self.num_bits):
            raise ValueError("support labels out of range for num_bits")

    @property
    def s_c(self) -> float:
        """Renyi-2 entropy -log2 sum q^2 in bits."""
        return float(-np.log2(np.sum(self.probs**2)))

    def mean_squared_overlap(self) -> float:
        """Mean |<x|x'>|^2 over distinct pairs; nonzero only for duplicate labels."""
        mass = 0.0
        seen: dict[int, float] = {}
        for x, q in zip(self.support, self.probs):
            mass += 2.0 * seen.get(int(x), 0.0) * q
            seen[int(x)] = seen.get(int(x), 0.0) + q
        return mass

    @classmethod
    def point_mass(cls, x: int, num_bits: int) -> "ClassicalSource":
        return cls(num_bits, np.array([x]), np.array([1.0]))

    @classmethod
    def uniform(cls, labels, num_bits: int) -> "ClassicalSource":
        labels = np.asarray(labels, dtype=np.int64)
        return cls(num_bits, labels, np.full(labels.shape[0], 1.0 / labels.shape[0]))

    @classmethod
    def from_entropy(
        cls, num_bits: int, s_c: float, policy: str = "first", rng=None, labels=None
    ) -> "ClassicalSource":
        """Source over ``num_bits``-bit strings with exact Renyi-2 entropy ``s_c``.

        Integer ``s_c`` gives the uniform distribution over 2^s_c strings,
        chosen by ``policy`` ("first": lexicographically first labels,
        "random": a uniformly drawn subset, "explicit": the caller's
        ``labels``).  Non-integer ``s_c`` uses a two-level distribution over
        floor(2^s_c) + 1 strings tuned so that sum q^2 = 2^{-s_c} exactly.
        """
        if not 0 <= s_c <= num_bits:
            raise ValueError(f"s_c={s_c} out of range [0, {num_bits}]")
        collision = 2.0 ** (-s_c)
        m = int(math.floor(2.0**s_c + 1e-9))
        n_labels = m if abs(2.0**s_c - m) < 1e-9 else m + 1
        if policy == "first":
            labels = np.arange(n_labels, dtype=np.int64)
        elif policy == "random":
            gen = as_generator(rng)
            labels = np.sort(gen.choice(2**num_bits, size=n_labels, replace=False))
        elif policy == "explicit":
            if labels is None or len(labels) < n_labels:
                raise ValueError(f"explicit policy needs >= {n_labels} labels")
            labels = np.asarray(labels[:n_labels], dtype=np.int64)
        else:
            raise ValueError(f"unknown subset policy {policy!r}")
        if n_labels == m:
            return cls.uniform(labels, num_bits)
        # Two-level weights (a on m strings, b on one more) solving
        # m*a + b = 1, m*a^2 + b^2 = 2^{-s_c}.
        disc = m * m - m * (m + 1) * (1.0 - collision)
        a = (m + math.sqrt(disc)) / (m * (m + 1))
        b = 1.0 - m * a
        probs = np.concatenate([np.full(m, a), [b]])
        return cls(num_bits, labels, probs)


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed d x d unitary via QR of a complex Ginibre matrix.

    The R-diagonal phase fix is what makes the distribution exactly Haar;
    the raw numpy QR alone is not.
    """
    gen = as_generator(rng)
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    dev = np.max(np.abs(q.conj().T @ q - np.eye(d)))
    if dev > UNITARY_TOL:
        raise AssertionError(f"QR produced a non-unitary matrix (dev {dev:.2e})")
    return q


def sample_disorder(n: int, w: float, rng) -> np.ndarray:
    """n i.i.d. field values, uniform on [-w, w]."""
    if w < 0:
        raise ValueError("disorder strength must be >= 0")
    gen = as_generator(rng)
    return gen.uniform(-w, w, size=n)


def sample_initial(source: ClassicalSource, rng) -> int:
    """Draw a basis-string label x with probability q(x)."""
    idx = sample_categorical(source.probs, rng)
    return int(source.support[idx])


def sample_categorical(weights, rng) -> int:
    """Index i with probability weights_i / sum(weights)."""
    weights = np.asarray(weights, dtype=float)
    total = weights.sum()
    if np.any(weights < 0) or total <= 0:
        raise ValueError("weights must be nonnegative with positive sum")
    gen = as_generator(rng)
    cum = np.cumsum(weights)
    return int(np.searchsorted(cum, gen.random() * total, side="right"))
