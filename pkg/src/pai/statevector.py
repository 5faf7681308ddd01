"""Dense statevector simulation of Pauli-generated rotations.

Conventions
-----------
* Qubit ``q`` corresponds to bit ``q`` of the basis-state index, so qubit 0
  is the least-significant bit and ``PauliString("XZ")`` puts X on qubit 0
  and Z on qubit 1.
* A rotation with generator ``G`` and channel angle ``phi`` applies the
  unitary ``exp(-1j * phi / 2 * G)``.  With the half angle inside the
  exponent the map on density matrices has period ``2*pi`` in ``phi``, and
  the angle ``phi + pi`` applies the original unitary followed by ``G``
  itself (up to global phase).
* States are dense complex128 arrays of length ``2**num_qubits``; the
  number of qubits is capped at ``MAX_QUBITS`` to keep memory bounded.

Any non-identity Pauli string squares to the identity, so the rotation
acts as ``cos(phi/2) * psi - 1j * sin(phi/2) * (G psi)``; applying ``G``
to a dense vector is a permutation of amplitudes times a phase table,
which is what the cached tables below store.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "PauliString",
    "Observable",
    "Statevector",
    "apply_rotation",
    "rotate_batch",
    "run_circuit",
    "pauli_expectation",
    "batch_pauli_expectation",
    "expectation",
    "batch_expectation",
    "sample_pauli_shot",
    "fidelity",
]

MAX_QUBITS = 24

_PAULI_CHARS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``PauliString("IZZX")``.

    ``letters[q]`` is the Pauli acting on qubit ``q``.
    """

    letters: str

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("Pauli string must act on at least one qubit")
        bad = set(self.letters) - _PAULI_CHARS
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)}")

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity tensor factors."""
        return sum(c != "I" for c in self.letters)

    def __str__(self) -> str:
        return self.letters


@dataclass(frozen=True)
class Observable:
    """Real linear combination of Pauli strings, all on the same qubits."""

    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("observable needs at least one term")
        n = self.terms[0][1].num_qubits
        for coeff, pauli in self.terms:
            if not np.isfinite(coeff):
                raise ValueError("observable coefficients must be finite")
            if pauli.num_qubits != n:
                raise ValueError("observable terms act on differing qubit counts")

    @property
    def num_qubits(self) -> int:
        return self.terms[0][1].num_qubits

    @property
    def one_norm(self) -> float:
        """Sum of absolute coefficients; bounds the operator norm."""
        return float(sum(abs(c) for c, _ in self.terms))


@lru_cache(maxsize=None)
def _pauli_tables(letters: str) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(src, phase)`` with ``(G psi)[c] = phase[c] * psi[src[c]]``."""
    n = len(letters)
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    flip = 0
    y_mask = 0
    z_mask = 0
    for q, letter in enumerate(letters):
        bit = 1 << q
        if letter in ("X", "Y"):
            flip |= bit
        if letter == "Y":
            y_mask |= bit
        if letter == "Z":
            z_mask |= bit
    idx = np.arange(1 << n, dtype=np.uint64)
    src = idx ^ np.uint64(flip)
    pops = np.bitwise_count(src & np.uint64(y_mask)) + np.bitwise_count(
        src & np.uint64(z_mask)
    )
    phase = np.where(pops & 1, -1.0, 1.0) * (1j ** letters.count("Y"))
    return src.astype(np.intp), phase.astype(np.complex128)


@dataclass(frozen=True)
class Statevector:
    """Normalized pure state on ``num_qubits`` qubits."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        dim = amps.shape[0]
        if amps.ndim != 1 or dim == 0 or dim & (dim - 1):
            raise ValueError("amplitude array length must be a power of two")
        if dim > (1 << MAX_QUBITS):
            raise ValueError(f"state exceeds the {MAX_QUBITS}-qubit cap")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        """The all-zeros computational basis state."""
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @property
    def num_qubits(self) -> int:
        return int(self.amps.shape[0]).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _check_compatible(pauli: PauliString, dim: int) -> None:
    if (1 << pauli.num_qubits) != dim:
        raise ValueError(
            f"Pauli string on {pauli.num_qubits} qubits applied to a "
            f"dimension-{dim} state"
        )


def rotate_batch(
    amps: np.ndarray, generator: PauliString, angles: np.ndarray
) -> np.ndarray:
    """Apply ``exp(-1j*angles[v]/2 * G)`` to each row of a ``(V, dim)`` batch.

    This is the workhorse kernel: one Pauli gather plus two scaled
    accumulations, all vectorized over the batch axis.
    """
    _check_compatible(generator, amps.shape[1])
    src, phase = _pauli_tables(generator.letters)
    half = 0.5 * np.asarray(angles, dtype=np.float64)
    g = amps[:, src]
    g *= phase
    out = amps * np.cos(half)[:, None]
    g *= (-1j * np.sin(half))[:, None]
    out += g
    return out


def apply_rotation(
    state: Statevector, generator: PauliString, channel_angle: float
) -> Statevector:
    """Rotate ``state`` by ``channel_angle`` about a non-identity generator."""
    if generator.weight == 0:
        raise ValueError("rotation generator must be a non-identity Pauli string")
    if not np.isfinite(channel_angle):
        raise ValueError("channel angle must be finite")
    amps = rotate_batch(state.amps[None, :], generator, np.array([channel_angle]))
    return Statevector(amps[0])


def run_circuit(
    circuit: list[tuple[PauliString, float]],
    num_qubits: int,
    initial: Statevector | None = None,
) -> Statevector:
    """Apply a sequence of ``(generator, channel_angle)`` rotations to
    ``initial`` (default: the all-zeros state)."""
    state = Statevector.zero(num_qubits) if initial is None else initial
    amps = state.amps[None, :]
    for generator, angle in circuit:
        if generator.num_qubits != num_qubits:
            raise ValueError("circuit generator qubit count mismatch")
        if generator.weight == 0:
            raise ValueError("rotation generator must be a non-identity Pauli string")
        amps = rotate_batch(amps, generator, np.array([float(angle)]))
    return Statevector(amps[0])


def batch_pauli_expectation(amps: np.ndarray, pauli: PauliString) -> np.ndarray:
    """``<row|G|row>`` for each row of a ``(V, dim)`` batch; real output."""
    _check_compatible(pauli, amps.shape[1])
    src, phase = _pauli_tables(pauli.letters)
    g = amps[:, src]
    g *= phase
    return np.einsum("vi,vi->v", np.conj(amps), g).real


def pauli_expectation(state: Statevector, pauli: PauliString) -> float:
    """Expectation value of a single Pauli string; a real number in [-1, 1]
    for normalized states."""
    return float(batch_pauli_expectation(state.amps[None, :], pauli)[0])


def batch_expectation(amps: np.ndarray, observable: Observable) -> np.ndarray:
    out = np.zeros(amps.shape[0])
    probs = None
    for coeff, pauli in observable.terms:
        if "X" not in pauli.letters and "Y" not in pauli.letters:
            # diagonal term: expectation is a signed sum of probabilities
            if probs is None:
                probs = amps.real**2 + amps.imag**2
            _, phase = _pauli_tables(pauli.letters)
            out += coeff * (probs @ phase.real)
        else:
            out += coeff * batch_pauli_expectation(amps, pauli)
    return out


def expectation(state: Statevector, observable: Observable) -> float:
    """Expectation value of a real Pauli-sum observable."""
    return float(batch_expectation(state.amps[None, :], observable)[0])


def sample_pauli_shot(
    state: Statevector, pauli: PauliString, rng: np.random.Generator
) -> int:
    """Draw one projective +-1 outcome of measuring a Pauli string.

    Uses the Born probability ``p(+1) = (1 + <G>) / 2``; one uniform draw
    per shot so callers control the stream layout.
    """
    p_plus = 0.5 * (1.0 + pauli_expectation(state, pauli))
    return 1 if rng.random() < min(max(p_plus, 0.0), 1.0) else -1


def fidelity(a: Statevector, b: Statevector) -> float:
    """Squared overlap ``|<a|b>|**2``."""
    if a.amps.shape != b.amps.shape:
        raise ValueError("states have differing dimensions")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)
