"""Estimation protocols built on the quasiprobability decomposition.

The central object is a *shot bank*: outcomes of projective +-1
measurements grouped by sampled circuit variant, together with the signed
weight that turns raw outcomes into unbiased estimates.  Reference
estimators (nearest-notch rounding and the continuous-angle circuit) fill
the same structure with a single trivial variant so downstream analysis
treats all three identically.

Random-stream layout (see :mod:`pai.rng`): variant ``v`` of a run owns the
stream keyed ``(*key_prefix, v)`` and draws, in order, one uniform per
gate for the setting choice and then one uniform per shot.  Auxiliary
streams (reference estimators, repeat-level draws) use key tuples of
length >= 2, which never collide with bare variant keys.

Multi-threading only partitions variants into fixed-size chunks; stream
contents and reduction order are independent of the thread count, so
results are bit-identical for any ``threads`` value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .notch import NotchGrid, locate, nearest_notch
from .quasiprob import (
    CircuitDecomposition,
    decompose_circuit,
    settings_from_uniforms,
)
from .rng import stream
from .statevector import (
    Observable,
    PauliString,
    Statevector,
    batch_expectation,
    batch_pauli_expectation,
    rotate_batch,
    run_circuit,
)

__all__ = [
    "EnumerationLimitError",
    "ShotRecord",
    "EstimateResult",
    "ShotBank",
    "FidelityPoint",
    "RmsPoint",
    "pai_shot_bank",
    "pai_estimate",
    "nearest_notch_shot_bank",
    "nearest_notch_estimate",
    "continuous_shot_bank",
    "continuous_estimate",
    "continuous_expectation",
    "exact_pai_expectation",
    "two_notch_fidelity_profile",
    "approximate_two_notch_state",
    "rms_vs_shots",
    "per_variant_rows",
]

NEAREST_STREAM_KEY = (1, 0)
CONTINUOUS_STREAM_KEY = (2, 0)

_ENUMERATION_CAP = 10


class EnumerationLimitError(ValueError):
    """Raised when exact variant enumeration is requested for a circuit too
    deep to enumerate (more than 10 interpolated gates)."""


@dataclass(frozen=True)
class ShotRecord:
    """One measurement outcome with its reweighting factor."""

    variant_id: int
    outcome: int
    factor: float


@dataclass(frozen=True)
class EstimateResult:
    """Summary of an estimation run."""

    mean: float
    std_error: float
    n_shots: int
    n_variants: int
    overhead_bound: float


@dataclass
class ShotBank:
    """Outcomes grouped by variant: ``outcomes[v, i]`` is shot ``i`` of
    variant ``v``; the estimate of shot ``(v, i)`` is
    ``outcomes[v, i] * variant_signs[v] * weight``."""

    outcomes: np.ndarray
    variant_signs: np.ndarray
    weight: float

    @property
    def n_variants(self) -> int:
        return self.outcomes.shape[0]

    @property
    def shots_per_variant(self) -> int:
        return self.outcomes.shape[1]

    @property
    def n_shots(self) -> int:
        return self.outcomes.size

    def values(self) -> np.ndarray:
        """Flat per-shot estimates, variant-major order."""
        factors = self.variant_signs.astype(np.float64) * self.weight
        return (self.outcomes * factors[:, None]).ravel()

    def records(self) -> Iterator[ShotRecord]:
        for v in range(self.n_variants):
            factor = float(self.variant_signs[v]) * self.weight
            for outcome in self.outcomes[v]:
                yield ShotRecord(variant_id=v, outcome=int(outcome), factor=factor)

    def result(self) -> EstimateResult:
        vals = self.values()
        n = vals.size
        std_error = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return EstimateResult(
            mean=float(vals.mean()),
            std_error=std_error,
            n_shots=n,
            n_variants=self.n_variants,
            overhead_bound=self.weight**2,
        )


def per_variant_rows(bank: ShotBank) -> list[tuple[int, int, float, float]]:
    """``(variant_id, sign, outcome_mean, factor)`` per variant, for
    tabular output."""
    means = bank.outcomes.mean(axis=1)
    return [
        (
            v,
            int(bank.variant_signs[v]),
            float(means[v]),
            float(bank.variant_signs[v]) * bank.weight,
        )
        for v in range(bank.n_variants)
    ]


def _require_pauli(observable) -> PauliString:
    if not isinstance(observable, PauliString):
        raise ValueError(
            "shot-sampled estimators measure a single Pauli string; "
            "combine terms at a higher level"
        )
    return observable


def _as_observable(observable) -> Observable:
    if isinstance(observable, PauliString):
        return Observable(terms=((1.0, observable),))
    return observable


def _auto_chunk(dim: int) -> int:
    # bound per-chunk working memory to a few tens of MB
    return max(64, min(2048, (1 << 21) // max(dim, 1)))


def _chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def _map_chunks(worker, bounds, threads: int) -> list:
    if threads <= 1 or len(bounds) <= 1:
        return [worker(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: worker(*b), bounds))


def _simulate_variants(
    generators, angles: np.ndarray, num_qubits: int
) -> np.ndarray:
    """Run one realized circuit per row of ``angles`` from the all-zeros
    state; returns the ``(V, dim)`` amplitude batch."""
    n_rows = angles.shape[0]
    amps = np.zeros((n_rows, 1 << num_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    for j, generator in enumerate(generators):
        amps = rotate_batch(amps, generator, angles[:, j])
    return amps


def _circuit_qubits(circuit, observable: PauliString) -> int:
    n = observable.num_qubits
    for generator, _ in circuit:
        if generator.num_qubits != n:
            raise ValueError("circuit and observable qubit counts differ")
    return n


def pai_shot_bank(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_variants: int,
    shots_per_variant: int,
    master_seed: int,
    *,
    key_prefix: tuple[int, ...] = (),
    threads: int = 1,
) -> ShotBank:
    """Sample ``n_variants`` circuit variants and measure each one
    ``shots_per_variant`` times.

    Variant ``v`` uses the stream ``(master_seed, *key_prefix, v)`` so any
    variant can be regenerated in isolation and the full bank is identical
    for any thread count.
    """
    observable = _require_pauli(observable)
    if n_variants < 1 or shots_per_variant < 1:
        raise ValueError("n_variants and shots_per_variant must be positive")
    n = _circuit_qubits(circuit, observable)
    dec = decompose_circuit(grid, list(circuit))
    nu = dec.num_gates

    def worker(lo: int, hi: int):
        count = hi - lo
        u_settings = np.empty((count, nu))
        u_shots = np.empty((count, shots_per_variant))
        for i in range(count):
            r = stream(master_seed, *key_prefix, lo + i)
            u_settings[i] = r.random(nu)
            u_shots[i] = r.random(shots_per_variant)
        _, signs, angles = settings_from_uniforms(dec, u_settings)
        amps = _simulate_variants(dec.generators, angles, n)
        ev = batch_pauli_expectation(amps, observable)
        p_plus = np.clip(0.5 * (1.0 + ev), 0.0, 1.0)
        outcomes = np.where(u_shots < p_plus[:, None], 1, -1).astype(np.int8)
        return signs.astype(np.int8), outcomes

    bounds = _chunk_bounds(n_variants, _auto_chunk(1 << n))
    parts = _map_chunks(worker, bounds, threads)
    return ShotBank(
        outcomes=np.concatenate([p[1] for p in parts], axis=0),
        variant_signs=np.concatenate([p[0] for p in parts]),
        weight=dec.norm1_total,
    )


def pai_estimate(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_variants: int,
    shots_per_variant: int,
    master_seed: int,
    *,
    key_prefix: tuple[int, ...] = (),
    threads: int = 1,
) -> EstimateResult:
    """Unbiased estimate of the continuous-angle expectation from sampled
    variants; see :func:`pai_shot_bank` for the sampling contract."""
    bank = pai_shot_bank(
        grid,
        circuit,
        observable,
        n_variants,
        shots_per_variant,
        master_seed,
        key_prefix=key_prefix,
        threads=threads,
    )
    return bank.result()


def _reference_bank(
    state: Statevector,
    observable: PauliString,
    n_shots: int,
    master_seed: int,
    key: tuple[int, ...],
) -> ShotBank:
    if n_shots < 1:
        raise ValueError("n_shots must be positive")
    ev = float(batch_pauli_expectation(state.amps[None, :], observable)[0])
    p_plus = min(max(0.5 * (1.0 + ev), 0.0), 1.0)
    u = stream(master_seed, *key).random(n_shots)
    outcomes = np.where(u < p_plus, 1, -1).astype(np.int8)
    return ShotBank(
        outcomes=outcomes[None, :],
        variant_signs=np.ones(1, dtype=np.int8),
        weight=1.0,
    )


def nearest_notch_shot_bank(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_shots: int,
    seed: int,
) -> ShotBank:
    """Round every angle to its nearest notch, run once, sample shots."""
    observable = _require_pauli(observable)
    n = _circuit_qubits(circuit, observable)
    rounded = [
        (generator, grid.angle(nearest_notch(grid, angle)))
        for generator, angle in circuit
    ]
    state = run_circuit(rounded, n)
    return _reference_bank(state, observable, n_shots, seed, NEAREST_STREAM_KEY)


def nearest_notch_estimate(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_shots: int,
    seed: int,
) -> EstimateResult:
    """Biased baseline: the discretized circuit's expectation, shot-sampled."""
    return nearest_notch_shot_bank(grid, circuit, observable, n_shots, seed).result()


def continuous_shot_bank(
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_shots: int,
    seed: int,
) -> ShotBank:
    """Shot-sample the ideal continuous-angle circuit."""
    observable = _require_pauli(observable)
    n = _circuit_qubits(circuit, observable)
    state = run_circuit(list(circuit), n)
    return _reference_bank(state, observable, n_shots, seed, CONTINUOUS_STREAM_KEY)


def continuous_estimate(
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    n_shots: int,
    seed: int,
) -> EstimateResult:
    """Shot-noise-only reference with no angle restriction."""
    return continuous_shot_bank(circuit, observable, n_shots, seed).result()


def continuous_expectation(
    circuit: Sequence[tuple[PauliString, float]], observable
) -> float:
    """Noise-free continuous-angle expectation (statevector evaluation)."""
    obs = _as_observable(observable)
    state = run_circuit(list(circuit), obs.num_qubits)
    return float(batch_expectation(state.amps[None, :], obs)[0])


def exact_pai_expectation(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable,
) -> float:
    """Enumerate all ``3**nu`` variants and sum their weighted expectations.

    Feasible only for shallow circuits; raises
    :class:`EnumerationLimitError` above 10 gates.  Up to numerical
    rounding the result equals the continuous-angle expectation, which is
    what makes the sampled estimator unbiased.
    """
    obs = _as_observable(observable)
    dec = decompose_circuit(grid, list(circuit))
    nu = dec.num_gates
    if nu > _ENUMERATION_CAP:
        raise EnumerationLimitError(
            f"{nu} gates would need 3**{nu} variants; cap is {_ENUMERATION_CAP}"
        )
    n = obs.num_qubits
    for generator, _ in circuit:
        if generator.num_qubits != n:
            raise ValueError("circuit and observable qubit counts differ")
    if nu == 0:
        state = Statevector.zero(n)
        return float(batch_expectation(state.amps[None, :], obs)[0])
    gamma_table = np.array([qp.gammas for qp in dec.per_gate])
    all_idx = np.stack(
        np.meshgrid(*[np.arange(3)] * nu, indexing="ij"), axis=-1
    ).reshape(-1, nu)
    cols = np.arange(nu)
    total = 0.0
    for lo, hi in _chunk_bounds(all_idx.shape[0], 4096):
        idx = all_idx[lo:hi]
        weights = gamma_table[cols, idx].prod(axis=1)
        angles = dec.setting_angle_table[cols, idx]
        amps = _simulate_variants(dec.generators, angles, n)
        total += float(weights @ batch_expectation(amps, obs))
    return total


@dataclass(frozen=True)
class FidelityPoint:
    """Mean variant fidelity against the ideal state after ``n_gates``."""

    n_gates: int
    fidelity: float
    std_error: float


def two_notch_fidelity_profile(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    checkpoints: Sequence[int],
    n_variants: int,
    master_seed: int,
    *,
    key_prefix: tuple[int, ...] = (),
    threads: int = 1,
) -> list[FidelityPoint]:
    """Fidelity decay of the sign-free two-notch interpolation scheme.

    Each gate independently realizes its lower enclosing notch with
    probability ``1 - lam`` and the upper notch with probability ``lam``
    (``lam`` the gap fraction); no reweighting.  For every checkpoint
    prefix length the mean squared overlap with the ideal continuous
    prefix state is averaged over ``n_variants`` sampled assignments,
    one stream per variant as in :func:`pai_shot_bank`.
    """
    if n_variants < 1:
        raise ValueError("n_variants must be positive")
    circuit = list(circuit)
    nu = len(circuit)
    cps = sorted(set(int(c) for c in checkpoints))
    if not cps or cps[0] < 0 or cps[-1] > nu:
        raise ValueError("checkpoints must lie in [0, number of gates]")
    generators = [g for g, _ in circuit]
    n = generators[0].num_qubits if generators else 1
    for g in generators:
        if g.num_qubits != n:
            raise ValueError("circuit generators act on differing qubit counts")

    positions = [locate(grid, angle) for _, angle in circuit]
    low = np.array([grid.angle(p.k) for p in positions])
    high = np.array([grid.angle((p.k + 1) % grid.size) for p in positions])
    thresholds = np.array([1.0 - p.lam for p in positions])

    ideal = {}
    state = Statevector.zero(n)
    step = 0
    for cp in cps:
        while step < cp:
            gen, ang = circuit[step]
            state = run_circuit([(gen, ang)], n, initial=state)
            step += 1
        ideal[cp] = state.amps.copy()

    def worker(lo_v: int, hi_v: int):
        count = hi_v - lo_v
        u = np.empty((count, nu))
        for i in range(count):
            u[i] = stream(master_seed, *key_prefix, lo_v + i).random(nu)
        angles = np.where(u < thresholds, low, high)
        amps = np.zeros((count, 1 << n), dtype=np.complex128)
        amps[:, 0] = 1.0
        fid = np.empty((count, len(cps)))
        step = 0
        for m, cp in enumerate(cps):
            while step < cp:
                amps = rotate_batch(amps, generators[step], angles[:, step])
                step += 1
            fid[:, m] = np.abs(amps @ np.conj(ideal[cp])) ** 2
        return fid

    bounds = _chunk_bounds(n_variants, _auto_chunk(1 << n))
    fids = np.concatenate(_map_chunks(worker, bounds, threads), axis=0)
    points = []
    for m, cp in enumerate(cps):
        col = fids[:, m]
        se = float(col.std(ddof=1) / math.sqrt(n_variants)) if n_variants > 1 else 0.0
        points.append(FidelityPoint(n_gates=cp, fidelity=float(col.mean()), std_error=se))
    return points


def approximate_two_notch_state(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    n_variants: int,
    master_seed: int,
    *,
    key_prefix: tuple[int, ...] = (),
    threads: int = 1,
) -> tuple[float, float]:
    """Mean fidelity of the two-notch scheme after the full circuit;
    returns ``(fidelity, std_error)``."""
    point = two_notch_fidelity_profile(
        grid,
        circuit,
        [len(list(circuit))],
        n_variants,
        master_seed,
        key_prefix=key_prefix,
        threads=threads,
    )[-1]
    return point.fidelity, point.std_error


@dataclass(frozen=True)
class RmsPoint:
    """Observed and predicted error at one shot budget."""

    n_shots: int
    rms_error: float
    shot_noise: float
    worst_case: float


def rms_vs_shots(
    grid: NotchGrid,
    circuit: Sequence[tuple[PauliString, float]],
    observable: PauliString,
    shot_grid: Sequence[int],
    repeats: int,
    master_seed: int,
    *,
    threads: int = 1,
) -> list[RmsPoint]:
    """Root-mean-square estimator error versus shot budget.

    For every budget ``N`` in ``shot_grid`` the estimator is repeated
    ``repeats`` times, each repeat drawing ``N`` single-shot variants from
    the stream ``(master_seed, budget_index, repeat)``; the RMS is taken
    against the exact continuous value.  Reported alongside are the
    direct-sampling shot-noise level ``sqrt((1 - o**2) / N)`` and the
    variance bound ``||g||_1 / sqrt(N)``.
    """
    observable = _require_pauli(observable)
    if repeats < 2:
        raise ValueError("repeats must be at least 2")
    shot_grid = [int(s) for s in shot_grid]
    if any(s < 1 for s in shot_grid):
        raise ValueError("shot budgets must be positive")
    n = _circuit_qubits(circuit, observable)
    dec = decompose_circuit(grid, list(circuit))
    nu = dec.num_gates
    exact = continuous_expectation(list(circuit), observable)
    block = 8192  # fixed draw-block size keeps streams thread-independent

    def run_mean(budget_index: int, repeat: int) -> float:
        r = stream(master_seed, budget_index, repeat)
        n_shots = shot_grid[budget_index]
        acc = 0.0
        for lo, hi in _chunk_bounds(n_shots, block):
            count = hi - lo
            u_settings = r.random((count, nu))
            u_shots = r.random(count)
            _, signs, angles = settings_from_uniforms(dec, u_settings)
            amps = _simulate_variants(dec.generators, angles, n)
            ev = batch_pauli_expectation(amps, observable)
            p_plus = np.clip(0.5 * (1.0 + ev), 0.0, 1.0)
            outcomes = np.where(u_shots < p_plus, 1.0, -1.0)
            acc += float(outcomes @ signs.astype(np.float64))
        return dec.norm1_total * acc / n_shots

    jobs = [(i, r) for i in range(len(shot_grid)) for r in range(repeats)]
    if threads <= 1:
        means = [run_mean(i, r) for i, r in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = list(pool.map(lambda jr: run_mean(*jr), jobs))
    points = []
    for i, n_shots in enumerate(shot_grid):
        errs = np.array(means[i * repeats : (i + 1) * repeats]) - exact
        points.append(
            RmsPoint(
                n_shots=n_shots,
                rms_error=float(np.sqrt(np.mean(errs**2))),
                shot_noise=math.sqrt(max(1.0 - exact**2, 0.0) / n_shots),
                worst_case=dec.norm1_total / math.sqrt(n_shots),
            )
        )
    return points
