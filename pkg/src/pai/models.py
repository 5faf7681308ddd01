"""Spin-ring benchmark: Hamiltonian, Trotter circuits, variational loop.

The model is a ring of qubits with random on-site Z fields and isotropic
nearest-neighbour exchange,

    H = sum_q omega_q Z_q + J * sum_q (X_q X_{q+1} + Y_q Y_{q+1} + Z_q Z_{q+1}),

indices mod the ring size.  Term order is fixed everywhere: all Z terms by
qubit index, then per bond the XX, YY, ZZ triple; bond ``n-1`` closes the
ring.  A first-order Trotter layer applies one rotation per term with
channel angle ``2 * coefficient * dt`` (the factor 2 cancels the half
angle in the rotation convention), and the variational ansatz reuses the
same gate sequence with free per-gate angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .notch import NotchGrid, nearest_notch
from .quasiprob import decompose_circuit, settings_from_uniforms
from .rng import stream
from .statevector import (
    Observable,
    PauliString,
    Statevector,
    _pauli_tables,
    batch_pauli_expectation,
    expectation,
    run_circuit,
)
from .estimate import _chunk_bounds, _map_chunks, _auto_chunk, _simulate_variants

__all__ = [
    "SpinRingModel",
    "spin_ring",
    "TrotterSpec",
    "trotter_circuit",
    "hva_circuit",
    "energy",
    "dense_hamiltonian",
    "ground_energy",
    "EstimatorConfig",
    "estimate_energy",
    "gradient",
    "VqeResult",
    "vqe_run",
    "round_params_to_grid",
    "notch_floor_energy",
]

_INIT_KEY = (0, 0)  # aux stream for drawing initial variational parameters


def _single_site(letter: str, q: int, n: int) -> PauliString:
    return PauliString("".join(letter if i == q else "I" for i in range(n)))


def _bond(letter: str, a: int, b: int, n: int) -> PauliString:
    return PauliString(
        "".join(letter if i in (a, b) else "I" for i in range(n))
    )


@dataclass(frozen=True)
class SpinRingModel:
    """Ring Hamiltonian parameters; ``omega`` holds the on-site fields."""

    num_qubits: int
    coupling: float
    omega: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.num_qubits < 3:
            raise ValueError("a ring needs at least 3 qubits")
        if len(self.omega) != self.num_qubits:
            raise ValueError("need one on-site field per qubit")

    def terms(self) -> tuple[tuple[float, PauliString], ...]:
        """Hamiltonian terms in the fixed global order (4n of them)."""
        n = self.num_qubits
        out: list[tuple[float, PauliString]] = []
        for q in range(n):
            out.append((self.omega[q], _single_site("Z", q, n)))
        for k in range(n):
            a, b = k, (k + 1) % n
            for letter in "XYZ":
                out.append((self.coupling, _bond(letter, a, b, n)))
        return tuple(out)

    def observable(self) -> Observable:
        return Observable(terms=self.terms())

    @property
    def num_terms(self) -> int:
        return 4 * self.num_qubits


def spin_ring(
    num_qubits: int,
    coupling: float = 0.3,
    seed: int = 0,
    omega=None,
) -> SpinRingModel:
    """Build a ring model; on-site fields are uniform in [-1, 1) from the
    model seed unless given explicitly."""
    if omega is None:
        fields = stream(seed).uniform(-1.0, 1.0, int(num_qubits))
        omega = tuple(float(w) for w in fields)
    else:
        omega = tuple(float(w) for w in omega)
    return SpinRingModel(num_qubits=int(num_qubits), coupling=float(coupling), omega=omega)


@dataclass(frozen=True)
class TrotterSpec:
    """First-order Trotterization: ``n_layers`` layers covering
    ``total_time``."""

    total_time: float
    n_layers: int

    def __post_init__(self) -> None:
        if self.n_layers < 1:
            raise ValueError("n_layers must be positive")
        if not np.isfinite(self.total_time):
            raise ValueError("total_time must be finite")

    @property
    def dt(self) -> float:
        return self.total_time / self.n_layers


def trotter_circuit(
    model: SpinRingModel, spec: TrotterSpec
) -> list[tuple[PauliString, float]]:
    """Rotation sequence of the Trotterized evolution, ``4n`` gates per
    layer in the model's term order."""
    dt = spec.dt
    layer = [(pauli, 2.0 * coeff * dt) for coeff, pauli in model.terms()]
    return layer * spec.n_layers


def neel_prep_circuit(num_qubits: int) -> list[tuple[PauliString, float]]:
    """X rotations by pi on odd qubits: maps |0..0> to the alternating
    product state (up to global phase).

    The all-zeros state is an eigenstate of the spin-ring Hamiltonian, so
    time-evolution experiments quench from this state instead.  The pi
    angle sits exactly on a notch for every uniform grid, so the prep
    layer never contributes sampling weight.
    """
    n = int(num_qubits)
    if n < 1:
        raise ValueError("num_qubits must be positive")
    return [(_single_site("X", q, n), math.pi) for q in range(1, n, 2)]


def hva_circuit(
    model: SpinRingModel, n_layers: int, params
) -> list[tuple[PauliString, float]]:
    """Variational ansatz with the Trotter gate pattern and one free
    channel angle per gate (``4n * n_layers`` parameters)."""
    n_layers = int(n_layers)
    if n_layers < 1:
        raise ValueError("n_layers must be positive")
    params = np.asarray(params, dtype=np.float64)
    expected = model.num_terms * n_layers
    if params.shape != (expected,):
        raise ValueError(f"expected {expected} parameters, got {params.shape}")
    generators = [pauli for _, pauli in model.terms()]
    return [
        (generators[t], float(params[layer * len(generators) + t]))
        for layer in range(n_layers)
        for t in range(len(generators))
    ]


def energy(model: SpinRingModel, state: Statevector) -> float:
    """Exact energy of a state under the ring Hamiltonian."""
    return expectation(state, model.observable())


def dense_hamiltonian(model: SpinRingModel) -> np.ndarray:
    """Explicit matrix; intended for small systems (dimension <= 2**10)."""
    dim = 1 << model.num_qubits
    if dim > 1 << 10:
        raise ValueError("dense Hamiltonian capped at 10 qubits; use ground_energy")
    mat = np.zeros((dim, dim), dtype=np.complex128)
    rows = np.arange(dim)
    for coeff, pauli in model.terms():
        src, phase = _pauli_tables(pauli.letters)
        mat[rows, src] += coeff * phase
    return mat


def ground_energy(model: SpinRingModel) -> float:
    """Lowest eigenvalue, dense for small rings and Lanczos with a fixed
    deterministic start vector otherwise."""
    n = model.num_qubits
    if n <= 8:
        return float(np.linalg.eigvalsh(dense_hamiltonian(model))[0])
    dim = 1 << n
    tables = [(coeff, *_pauli_tables(p.letters)) for coeff, p in model.terms()]

    def matvec(vec):
        vec = np.asarray(vec).reshape(dim)
        out = np.zeros(dim, dtype=np.complex128)
        for coeff, src, phase in tables:
            out += coeff * (phase * vec[src])
        return out

    op = LinearOperator((dim, dim), matvec=matvec, dtype=np.complex128)
    v0 = np.full(dim, 1.0 / math.sqrt(dim))
    vals = eigsh(op, k=1, which="SA", v0=v0, return_eigenvectors=False)
    return float(vals[0])


@dataclass(frozen=True)
class EstimatorConfig:
    """How energies are evaluated inside gradients and the VQE loop.

    ``mode`` is ``"exact"`` (statevector), ``"nearest"`` (angles rounded to
    the grid, then shot-sampled) or ``"pai"`` (sampled interpolation
    variants, shot-sampled).  Sampled modes give every Hamiltonian term an
    equal budget of ``n_variants * shots_per_variant`` shots.
    """

    mode: str
    grid: NotchGrid | None = None
    n_variants: int = 100
    shots_per_variant: int = 100
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "nearest", "pai"):
            raise ValueError(f"unknown estimator mode {self.mode!r}")
        if self.mode != "exact":
            if self.grid is None:
                raise ValueError(f"mode {self.mode!r} requires a notch grid")
            if self.n_variants < 1 or self.shots_per_variant < 1:
                raise ValueError("sampled modes need positive shot counts")


def _per_term_expectations(amps: np.ndarray, terms) -> np.ndarray:
    """``(V, T)`` expectation of every term for every batch row; diagonal
    terms share one probability table."""
    out = np.empty((amps.shape[0], len(terms)))
    probs = None
    for t, (_, pauli) in enumerate(terms):
        if "X" not in pauli.letters and "Y" not in pauli.letters:
            if probs is None:
                probs = amps.real**2 + amps.imag**2
            _, phase = _pauli_tables(pauli.letters)
            out[:, t] = probs @ phase.real
        else:
            out[:, t] = batch_pauli_expectation(amps, pauli)
    return out


def estimate_energy(
    model: SpinRingModel,
    circuit,
    config: EstimatorConfig,
    key: tuple[int, ...] = (),
    threads: int = 1,
) -> float:
    """Energy of the circuit's output state under the configured estimator.

    ``key`` addresses the random streams of this evaluation; distinct keys
    give independent noise (the VQE loop keys every gradient term by
    iteration, parameter and shift direction).
    """
    circuit = list(circuit)
    terms = model.terms()
    coeffs = np.array([c for c, _ in terms])
    if config.mode == "exact":
        state = run_circuit(circuit, model.num_qubits)
        return energy(model, state)
    if config.mode == "nearest":
        grid = config.grid
        rounded = [
            (gen, grid.angle(nearest_notch(grid, ang))) for gen, ang in circuit
        ]
        state = run_circuit(rounded, model.num_qubits)
        evs = _per_term_expectations(state.amps[None, :], terms)[0]
        p_plus = np.clip(0.5 * (1.0 + evs), 0.0, 1.0)
        n_shots = config.n_variants * config.shots_per_variant
        r = stream(config.master_seed, *key, 1, 0)
        total = 0.0
        for t in range(len(terms)):
            u = r.random(n_shots)
            mean_t = np.where(u < p_plus[t], 1.0, -1.0).mean()
            total += coeffs[t] * mean_t
        return float(total)
    # pai mode: variants are shared across terms, each term keeps an equal
    # shot budget and its own shot uniforms
    dec = decompose_circuit(config.grid, circuit)
    nu = dec.num_gates
    n_terms = len(terms)
    shots = config.shots_per_variant

    def worker(lo: int, hi: int):
        count = hi - lo
        u_settings = np.empty((count, nu))
        u_shots = np.empty((count, n_terms, shots))
        for i in range(count):
            r = stream(config.master_seed, *key, lo + i)
            u_settings[i] = r.random(nu)
            u_shots[i] = r.random((n_terms, shots))
        _, signs, angles = settings_from_uniforms(dec, u_settings)
        amps = _simulate_variants(dec.generators, angles, model.num_qubits)
        evs = _per_term_expectations(amps, terms)
        p_plus = np.clip(0.5 * (1.0 + evs), 0.0, 1.0)
        outcome_means = np.where(
            u_shots < p_plus[:, :, None], 1.0, -1.0
        ).mean(axis=2)
        return signs.astype(np.float64) @ (outcome_means @ coeffs)

    bounds = _chunk_bounds(config.n_variants, _auto_chunk(1 << model.num_qubits))
    parts = _map_chunks(worker, bounds, threads)
    return dec.norm1_total * float(sum(parts)) / config.n_variants


def gradient(
    model: SpinRingModel,
    n_layers: int,
    params,
    config: EstimatorConfig,
    key_prefix: tuple[int, ...] = (),
    threads: int = 1,
) -> np.ndarray:
    """Parameter-shift gradient of the estimated energy.

    Every Pauli generator squares to the identity, so the derivative in
    parameter ``j`` is exactly half the difference of energies at shifts
    of +-pi/2 in that channel angle.  Evaluation ``(j, s)`` uses stream
    key ``(*key_prefix, j, s)`` with ``s`` 0 for the plus shift.
    """
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty(params.shape[0])
    for j in range(params.shape[0]):
        shifted = params.copy()
        shifted[j] = params[j] + 0.5 * np.pi
        e_plus = estimate_energy(
            model,
            hva_circuit(model, n_layers, shifted),
            config,
            key=(*key_prefix, j, 0),
            threads=threads,
        )
        shifted[j] = params[j] - 0.5 * np.pi
        e_minus = estimate_energy(
            model,
            hva_circuit(model, n_layers, shifted),
            config,
            key=(*key_prefix, j, 1),
            threads=threads,
        )
        grad[j] = 0.5 * (e_plus - e_minus)
    return grad


@dataclass
class VqeResult:
    """Trace of a gradient-descent run; energies are exact statevector
    evaluations of the iterates, one per iteration plus the final point."""

    energies: np.ndarray
    init_params: np.ndarray
    final_params: np.ndarray
    best_params: np.ndarray
    best_energy: float

    def trace(self) -> list[tuple[int, float]]:
        return [(i, float(e)) for i, e in enumerate(self.energies)]


def vqe_run(
    model: SpinRingModel,
    n_layers: int,
    learning_rate: float,
    n_iters: int,
    config: EstimatorConfig,
    init_params=None,
    init_seed: int = 0,
    threads: int = 1,
) -> VqeResult:
    """Plain gradient descent on the ansatz energy.

    Initial parameters are uniform in [-0.1, 0.1) drawn from ``init_seed``
    unless supplied.  Gradient evaluations at iteration ``i`` use stream
    keys prefixed ``(i, ...)`` so the noise is independent across
    iterations yet fully reproducible.
    """
    n_params = model.num_terms * int(n_layers)
    if init_params is None:
        params = stream(init_seed, *_INIT_KEY).uniform(-0.1, 0.1, n_params)
    else:
        params = np.asarray(init_params, dtype=np.float64).copy()
        if params.shape != (n_params,):
            raise ValueError(f"expected {n_params} initial parameters")
    init = params.copy()
    energies = np.empty(int(n_iters) + 1)
    best_energy = math.inf
    best_params = params.copy()
    for it in range(int(n_iters)):
        state = run_circuit(hva_circuit(model, n_layers, params), model.num_qubits)
        energies[it] = energy(model, state)
        if energies[it] < best_energy:
            best_energy = float(energies[it])
            best_params = params.copy()
        step = gradient(
            model, n_layers, params, config, key_prefix=(it,), threads=threads
        )
        params = params - float(learning_rate) * step
    state = run_circuit(hva_circuit(model, n_layers, params), model.num_qubits)
    energies[-1] = energy(model, state)
    if energies[-1] < best_energy:
        best_energy = float(energies[-1])
        best_params = params.copy()
    return VqeResult(
        energies=energies,
        init_params=init,
        final_params=params,
        best_params=best_params,
        best_energy=best_energy,
    )


def round_params_to_grid(grid: NotchGrid, params) -> np.ndarray:
    """Round every channel angle to its nearest notch."""
    return np.array(
        [grid.angle(nearest_notch(grid, float(p))) for p in np.asarray(params)]
    )


def notch_floor_energy(
    model: SpinRingModel, n_layers: int, grid: NotchGrid, params
) -> float:
    """Exact energy after rounding the given parameters to the grid: the
    resolution floor a rounding-based optimizer cannot descend below."""
    rounded = round_params_to_grid(grid, params)
    state = run_circuit(hva_circuit(model, n_layers, rounded), model.num_qubits)
    return energy(model, state)
