"""Declarative experiment configs and figure-reproduction runners.

Each experiment maps a config to a ResultTable.  Runs are deterministic
for a fixed (config, seed): parallel tasks carry stream ids derived from
their sweep index and results are assembled in sweep order, never in
completion order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .ensemble import (
    StateEnsemble,
    build_projected_ensemble,
    delta_alpha,
    delta_hs,
    design_bounds,
    expected_frame_potential,
    frame_potential_exact,
    frame_potentials,
    haar_frame_potential,
    moment_operator,
    pool_ensembles,
    rms_k1_exact,
    theorem1_rms,
)
from .ensemble import delta_init as delta_init_fn
from .model import (
    DisorderRealization,
    IsingParams,
    add_disorder,
    build_mfim,
    ground_state,
    loschmidt_echo_curve,
    mean_gap_ratio_scan,
)
from .parallel import parallel_map
from .qcore import QubitSplit, basis_state, evolve_unitary
from .results import ResultTable
from .rng import GENERATOR_NAME, ClassicalSource, RngStream, haar_unitary
from .shadows import (
    PatchLayout,
    estimate_observable,
    exact_bias,
    patched_energy_estimate,
    random_pauli_observable,
    sample_shadow,
    unbiased_reference_error,
)

EXPERIMENTS = (
    "theorem1-verify",
    "fig1c",
    "disorder-scan",
    "gap-ratio",
    "echo",
    "shadow-bias",
    "shadow-convergence",
    "patched-energy",
    "design-check",
)

# Reference defaults: chaotic Ising point, JT = 1000 for ensemble
# figures, JT = 100 for shadow figures, L = 5000 shots.
_DEFAULTS: dict[str, dict] = {
    "theorem1-verify": dict(n_a=1, n_b=3, k_values=[1, 2], s_c_values=[0.0, 2.0, 4.0],
                            realizations=300),
    "fig1c": dict(n_a=4, n_b=4, k_values=[1, 2, 3],
                  s_c_values=[float(s) for s in range(9)], jt=1000.0),
    "disorder-scan": dict(n_a=4, n_b=4, k_values=[2], jt=1000.0, realizations=256,
                          w_values=[1e-3, 1e-2, 0.1, 0.42, 1.0, 3.0, 10.0]),
    "gap-ratio": dict(n_a=5, n_b=5, realizations=100,
                      w_values=[0.1, 0.2, 0.3, 0.42, 0.6, 1.0, 5.0]),
    "echo": dict(n_a=5, n_b=5, w_values=[1.0], realizations=30),
    "shadow-bias": dict(n_a=1, n_b=3, s_c_values=[0.0, 1.0, 2.0, 3.0], realizations=100),
    "shadow-convergence": dict(n_a=1, n_b=3, s_c_values=[0.0, 3.0], shots=5000,
                               realizations=50),
    "patched-energy": dict(n_a=4, n_b=2, s_c_values=[0.0, 8.0], jt=100.0, shots=5000,
                           realizations=20),
    "design-check": dict(n_a=2, n_b=3, k_values=[1, 2], s_c_values=[0.0, 2.0, 5.0],
                         jt=0.0),
}


@dataclass
class ExperimentConfig:
    experiment: str
    n_a: int = 2
    n_b: int = 2
    k_values: list[int] = field(default_factory=lambda: [1, 2])
    s_c_values: list[float] = field(default_factory=list)
    w_values: list[float] = field(default_factory=list)
    jt: float = 0.0
    shots: int = 1000
    realizations: int = 100
    seed: int = 0
    q_subset_policy: str = "first"
    q_support: list[int] = field(default_factory=list)
    out_path: str = ""

    @classmethod
    def with_defaults(cls, experiment: str, **overrides) -> "ExperimentConfig":
        base = dict(_DEFAULTS.get(experiment, {}))
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(experiment=experiment, **base)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ValueError("config must name an experiment")
        return cls.with_defaults(data["experiment"],
                                 **{k: v for k, v in data.items() if k != "experiment"})

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        # out_path is delivery detail: excluded so payloads written to
        # different files from the same physics config stay byte-identical
        data = {k: v for k, v in self.to_dict().items() if k != "out_path"}
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def metadata(self) -> dict[str, str]:
        return {
            "experiment": self.experiment,
            "config": self.canonical_json(),
            "config_hash": self.config_hash(),
            "seed": str(self.seed),
            "generator": GENERATOR_NAME,
            "q_subset_policy": self.q_subset_policy,
            "code_version": __version__,
        }



def _entropy_source(num_bits: int, s_c: float, config: "ExperimentConfig") -> ClassicalSource:
    return ClassicalSource.from_entropy(
        num_bits, s_c, config.q_subset_policy,
        RngStream(config.seed, 999_999), labels=config.q_support or None)

_NEEDS_K = {"theorem1-verify", "fig1c", "disorder-scan", "design-check"}
_NEEDS_SC = {"theorem1-verify", "fig1c", "shadow-bias", "shadow-convergence",
             "patched-energy", "design-check"}
_NEEDS_W = {"disorder-scan", "gap-ratio", "echo"}
_BATH_SC = {"shadow-bias", "shadow-convergence"}


def validate(config: ExperimentConfig) -> list[str]:
    """All diagnostics for a config; empty iff run() would accept it."""
    diags = []
    if config.experiment not in EXPERIMENTS:
        diags.append(f"unknown experiment {config.experiment!r}")
        return diags
    if config.n_a < 1:
        diags.append("n_a must be >= 1")
    if config.n_b < 0:
        diags.append("n_b must be >= 0")
    if config.jt < 0:
        diags.append("jt must be >= 0")
    if config.shots < 1:
        diags.append("shots must be >= 1")
    if config.realizations < 1:
        diags.append("realizations must be >= 1")
    if config.seed < 0:
        diags.append("seed must be a nonnegative 64-bit integer")
    if config.q_subset_policy not in ("first", "random", "explicit"):
        diags.append(f"unknown q_subset_policy {config.q_subset_policy!r}")
    if config.q_subset_policy == "explicit" and not config.q_support:
        diags.append("explicit q_subset_policy requires q_support labels")
    if config.experiment in _NEEDS_K and not config.k_values:
        diags.append("k_values sweep must not be empty")
    if config.experiment in _NEEDS_SC and not config.s_c_values:
        diags.append("s_c_values sweep must not be empty")
    if config.experiment in _NEEDS_W and not config.w_values:
        diags.append("w_values sweep must not be empty")
    if any(k < 1 for k in config.k_values):
        diags.append("k values must be >= 1")
    n = config.n_a + config.n_b
    if n > 12:
        diags.append(f"total register of {n} qubits exceeds the dense limit of 12")
    if config.experiment in _BATH_SC:
        bad = [s for s in config.s_c_values if not 0 <= s <= config.n_b]
        if bad:
            diags.append(f"bath entropy values {bad} outside [0, n_b]")
    elif config.experiment == "patched-energy":
        bad = [s for s in config.s_c_values if not 0 <= s <= config.n_a * config.n_b]
        if bad:
            diags.append(f"entropy values {bad} outside [0, n_a*n_b]")
        if config.n_a * (config.n_b + 1) > 20:
            diags.append("patched grid exceeds 20 qubits")
    else:
        bad = [s for s in config.s_c_values if not 0 <= s <= n]
        if bad:
            diags.append(f"entropy values {bad} outside [0, n_a+n_b]")
    if config.experiment == "design-check":
        for k in config.k_values:
            if k * config.n_a > 12:
                diags.append(
                    f"moment operator for k={k}, n_a={config.n_a} has dimension "
                    f"2^{k * config.n_a}; need k*n_a <= 12"
                )
    return diags


def run(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    diags = validate(config)
    if diags:
        raise ValueError("; ".join(diags))
    runner = _RUNNERS[config.experiment]
    return runner(config, workers)


# ---------------------------------------------------------------------------
# theorem1-verify


def _t1_task(args):
    config, lo, hi = args
    n = config.n_a + config.n_b
    split = QubitSplit(config.n_a, config.n_b)
    sources = [_entropy_source(n, s_c, config) for s_c in config.s_c_values]
    out = np.empty((hi - lo, len(sources), len(config.k_values)))
    for r in range(lo, hi):
        u = haar_unitary(2**n, RngStream(config.seed, r))
        for si, src in enumerate(sources):
            e = build_projected_ensemble(u, src, split)
            fps = frame_potentials(e, config.k_values)
            for ki, k in enumerate(config.k_values):
                out[r - lo, si, ki] = fps[k]
    return out


def run_theorem1_verify(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    bounds = np.linspace(0, config.realizations, max(1, min(workers * 2, config.realizations)) + 1).astype(int)
    tasks = [(config, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    chunks = parallel_map(_t1_task, tasks, workers=workers)
    f_samples = np.concatenate(chunks, axis=0)  # (realizations, s_c, k)
    d_a, d_b = 2**config.n_a, 2**config.n_b
    n = config.n_a + config.n_b
    table = ResultTable(
        config.metadata(),
        ["quantity", "k", "n_a", "n_b", "s_c", "empirical", "se", "predicted"],
    )
    for si, s_c in enumerate(config.s_c_values):
        for ki, k in enumerate(config.k_values):
            fs = f_samples[:, si, ki]
            if k == 1:
                vals = fs / haar_frame_potential(d_a, 1) - 1.0
                predicted = rms_k1_exact(d_a, d_b, delta_init_fn(n, s_c)) ** 2
                quantity = "delta1_sq"
            else:
                vals = fs
                predicted = expected_frame_potential(k, d_a, d_b, s_c)
                quantity = f"frame_potential_k{k}"
            se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            table.add_row(quantity, k, config.n_a, config.n_b, float(s_c),
                          float(np.mean(vals)), se, float(predicted))
    return table


# ---------------------------------------------------------------------------
# fig1c


def run_fig1c(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    n = config.n_a + config.n_b
    split = QubitSplit(config.n_a, config.n_b)
    u = evolve_unitary(build_mfim(IsingParams(n=n)), config.jt)
    table = ResultTable(config.metadata(), ["k", "s_c", "delta_k", "theorem1_rms"])
    for s_c in config.s_c_values:
        src = _entropy_source(n, s_c, config)
        e = build_projected_ensemble(u, src, split)
        fps = frame_potentials(e, config.k_values)
        for k in config.k_values:
            table.add_row(k, float(s_c), delta_hs(fps[k], split.d_a, k),
                          theorem1_rms(k, config.n_a, config.n_b, s_c))
    return table


# ---------------------------------------------------------------------------
# disorder-scan


def _disorder_task(args):
    config, w, w_index, lo, hi = args
    n = config.n_a + config.n_b
    split = QubitSplit(config.n_a, config.n_b)
    h0 = build_mfim(IsingParams(n=n))
    src0 = ClassicalSource.point_mass(0, n)
    parts = []
    for r in range(lo, hi):
        d = DisorderRealization.sample(n, w, RngStream(config.seed, w_index * 1_000_003 + r))
        u = evolve_unitary(add_disorder(h0, d), config.jt)
        parts.append(build_projected_ensemble(u, src0, split))
    return [(e.weights, e.states) for e in parts]


def run_disorder_scan(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    split = QubitSplit(config.n_a, config.n_b)
    n = config.n_a + config.n_b
    chunks = max(1, min(workers * 2, config.realizations))
    tasks = []
    for wi, w in enumerate(config.w_values):
        bounds = np.linspace(0, config.realizations, chunks + 1).astype(int)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                tasks.append((config, float(w), wi, int(lo), int(hi)))
    results = parallel_map(_disorder_task, tasks, workers=workers)
    table = ResultTable(config.metadata(),
                        ["k", "w", "delta_k", "bench_sc_0", "bench_sc_n"])
    for wi, w in enumerate(config.w_values):
        parts = [
            StateEnsemble(config.n_a, wgt, st)
            for t, res in zip(tasks, results) if t[2] == wi
            for wgt, st in res
        ]
        pooled = pool_ensembles(parts)
        fps = frame_potentials(pooled, config.k_values)
        for k in config.k_values:
            table.add_row(k, float(w), delta_hs(fps[k], split.d_a, k),
                          theorem1_rms(k, config.n_a, config.n_b, 0.0),
                          theorem1_rms(k, config.n_a, config.n_b, float(n)))
    return table


# ---------------------------------------------------------------------------
# gap-ratio


def run_gap_ratio(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    n = config.n_a + config.n_b
    rows = mean_gap_ratio_scan(IsingParams(n=n), config.w_values,
                               config.realizations, RngStream(config.seed),
                               workers=workers)
    table = ResultTable(config.metadata(), ["n", "w", "mean_r", "stderr"])
    for w, mean_r, se in rows:
        table.add_row(n, w, mean_r, se)
    return table


# ---------------------------------------------------------------------------
# echo


def _echo_task(args):
    config, w, ts, lo, hi = args
    n = config.n_a + config.n_b
    h0 = build_mfim(IsingParams(n=n))
    psi0 = basis_state(n, 0)
    curves = []
    for r in range(lo, hi):
        d1 = DisorderRealization.sample(n, w, RngStream(config.seed, 2 * r))
        d2 = DisorderRealization.sample(n, w, RngStream(config.seed, 2 * r + 1))
        curves.append(loschmidt_echo_curve(h0, d1, d2, psi0, ts))
    return np.array(curves)


def run_echo(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    n = config.n_a + config.n_b
    w = float(config.w_values[0])
    # Grid covers the Gaussian-decay window W*t <= 0.6.
    ts = np.linspace(0.05, 0.6, 12) / w
    chunks = max(1, min(workers * 2, config.realizations))
    bounds = np.linspace(0, config.realizations, chunks + 1).astype(int)
    tasks = [(config, w, ts, int(lo), int(hi))
             for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    curves = np.concatenate(parallel_map(_echo_task, tasks, workers=workers), axis=0)
    table = ResultTable(config.metadata(), ["w", "t", "f_mean", "f_se", "gaussian_pred"])
    for ti, t in enumerate(ts):
        vals = curves[:, ti]
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        pred = math.exp(-(2.0 / 3.0) * n * w**2 * t**2)
        table.add_row(w, float(t), float(np.mean(vals)), se, pred)
    return table


# ---------------------------------------------------------------------------
# shadow-bias and shadow-convergence


def _random_instance(n_a: int, d: int, stream: RngStream):
    """Haar unitary, random non-identity Pauli, Haar-random pure state on A."""
    gen = stream.generator()
    u = haar_unitary(d, gen)
    o = random_pauli_observable(n_a, gen)
    psi = gen.standard_normal(2**n_a) + 1j * gen.standard_normal(2**n_a)
    psi /= np.linalg.norm(psi)
    return u, o, np.outer(psi, psi.conj())


def _bias_task(args):
    config, s_c, s_index, lo, hi = args
    split = QubitSplit(config.n_a, config.n_b)
    d = 2 ** (config.n_a + config.n_b)
    src = _entropy_source(config.n_b, s_c, config)
    vals = []
    for inst in range(lo, hi):
        u, o, rho = _random_instance(config.n_a, d, RngStream(config.seed, inst))
        vals.append(abs(exact_bias(u, rho, o, src, split)))
    return np.array(vals)


def run_shadow_bias(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    chunks = max(1, min(workers * 2, config.realizations))
    tasks = []
    for si, s_c in enumerate(config.s_c_values):
        bounds = np.linspace(0, config.realizations, chunks + 1).astype(int)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                tasks.append((config, float(s_c), si, int(lo), int(hi)))
    results = parallel_map(_bias_task, tasks, workers=workers)
    table = ResultTable(config.metadata(), ["n_b", "s_c", "mean_abs_bias", "se"])
    for si, s_c in enumerate(config.s_c_values):
        vals = np.concatenate([r for t, r in zip(tasks, results) if t[2] == si])
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        table.add_row(config.n_b, float(s_c), float(np.mean(vals)), se)
    return table


def _convergence_task(args):
    config, s_c, s_index, lo, hi = args
    split = QubitSplit(config.n_a, config.n_b)
    d = 2 ** (config.n_a + config.n_b)
    src = _entropy_source(config.n_b, s_c, config)
    errs, refs = [], []
    for inst in range(lo, hi):
        u, o, rho = _random_instance(config.n_a, d, RngStream(config.seed, inst))
        gen = RngStream(config.seed, 500_000 + inst).generator()
        samples = [sample_shadow(u, rho, src, split, gen) for _ in range(config.shots)]
        est, _ = estimate_observable(samples, u, o, split)
        truth = float(np.trace(o.matrix @ rho).real)
        errs.append(abs(est - truth))
        refs.append(unbiased_reference_error(
            rho, o, config.shots, RngStream(config.seed, 700_000 + inst)))
    return np.array(errs), np.array(refs)


def run_shadow_convergence(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    chunks = max(1, min(workers * 2, config.realizations))
    tasks = []
    for si, s_c in enumerate(config.s_c_values):
        bounds = np.linspace(0, config.realizations, chunks + 1).astype(int)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                tasks.append((config, float(s_c), si, int(lo), int(hi)))
    results = parallel_map(_convergence_task, tasks, workers=workers)
    table = ResultTable(config.metadata(),
                        ["n_b", "s_c", "shots", "mean_err", "se", "unbiased_ref"])
    for si, s_c in enumerate(config.s_c_values):
        errs = np.concatenate([r[0] for t, r in zip(tasks, results) if t[2] == si])
        refs = np.concatenate([r[1] for t, r in zip(tasks, results) if t[2] == si])
        se = float(np.std(errs, ddof=1) / math.sqrt(len(errs))) if len(errs) > 1 else 0.0
        table.add_row(config.n_b, float(s_c), config.shots,
                      float(np.mean(errs)), se, float(np.mean(refs)))
    return table


# ---------------------------------------------------------------------------
# patched-energy


def _patched_task(args):
    config, s_c, run_index = args
    params = IsingParams(n=config.n_a)
    _, psi_g = ground_state(build_mfim(params))
    v = evolve_unitary(build_mfim(IsingParams(n=config.n_b + 1)), config.jt)
    layout = PatchLayout(config.n_a, config.n_b, v)
    row_source = _entropy_source(config.n_b, s_c / config.n_a, config)
    stream = RngStream(config.seed, 10_000 * run_index + int(round(s_c)))
    _, err = patched_energy_estimate(layout, psi_g, row_source, config.shots,
                                     stream, params)
    return err / config.n_a


def run_patched_energy(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    tasks = [(config, float(s_c), run_index)
             for run_index in range(config.realizations)
             for s_c in config.s_c_values]
    errs = parallel_map(_patched_task, tasks, workers=workers)
    table = ResultTable(config.metadata(), ["run_index", "s_c", "abs_err_per_site"])
    for (cfg, s_c, run_index), err in zip(tasks, errs):
        table.add_row(run_index, s_c, float(err))
    return table


# ---------------------------------------------------------------------------
# design-check


def run_design_check(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    n = config.n_a + config.n_b
    split = QubitSplit(config.n_a, config.n_b)
    if config.jt > 0:
        u = evolve_unitary(build_mfim(IsingParams(n=n)), config.jt)
    else:
        u = haar_unitary(2**n, RngStream(config.seed))
    table = ResultTable(
        config.metadata(),
        ["k", "s_c", "delta_2", "delta_1", "rms_benchmark", "markov_eps_half"],
    )
    for s_c in config.s_c_values:
        src = _entropy_source(n, s_c, config)
        e = build_projected_ensemble(u, src, split)
        fps = frame_potentials(e, config.k_values)
        for k in config.k_values:
            m = moment_operator(e, k)
            bench = theorem1_rms(k, config.n_a, config.n_b, s_c)
            table.add_row(k, float(s_c), delta_hs(fps[k], split.d_a, k),
                          delta_alpha(m, 1), bench, design_bounds(bench, 0.5))
    return table


_RUNNERS = {
    "theorem1-verify": run_theorem1_verify,
    "fig1c": run_fig1c,
    "disorder-scan": run_disorder_scan,
    "gap-ratio": run_gap_ratio,
    "echo": run_echo,
    "shadow-bias": run_shadow_bias,
    "shadow-convergence": run_shadow_convergence,
    "patched-energy": run_patched_energy,
    "design-check": run_design_check,
}
