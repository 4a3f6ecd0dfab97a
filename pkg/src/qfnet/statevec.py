"""Dense statevector simulation of pure-state circuits, up to 20 qubits.

Conventions (shared by every module in this package):
  - qubit 0 is the least-significant bit of the basis index, so basis state
    ``|q_{n-1} ... q_1 q_0>`` has index ``sum(q_k * 2**k)``;
  - bitstrings returned by :func:`sample_counts` are written most-significant
    qubit first, i.e. ``format(index, "0nb")``.

Gates are applied in place by slicing the amplitude array along the target
qubit's axis; no full unitary is ever built except in :func:`circuit_unitary`,
which is capped at 6 qubits and exists for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .rng import random_uniform

MAX_QUBITS = 20

# kind -> (number of wires, number of angle params)
GATE_ARITY = {
    "H": (1, 0),
    "X": (1, 0),
    "Y": (1, 0),
    "SX": (1, 0),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "CNOT": (2, 0),
    "CZ": (2, 0),
    "CP": (2, 1),
    "SWAP": (2, 0),
}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, target wires, rotation angles in radians."""

    kind: str
    wires: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_wires, n_params = GATE_ARITY[self.kind]
        if len(self.wires) != n_wires:
            raise ValueError(
                f"{self.kind} takes {n_wires} wire(s), got {self.wires}"
            )
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"{self.kind} wires must be distinct: {self.wires}")
        if len(self.params) != n_params:
            raise ValueError(
                f"{self.kind} takes {n_params} angle(s), got {len(self.params)}"
            )


@dataclass
class StateVector:
    """Complex amplitudes over n qubits, kept at unit L2 norm."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def new_zero_state(num_qubits: int) -> StateVector:
    """The all-zeros computational basis state |0...0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(
            f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}"
        )
    amp = np.zeros(2**num_qubits, dtype=complex)
    amp[0] = 1.0
    return StateVector(num_qubits, amp)


def _single_qubit_matrix(gate: Gate) -> np.ndarray:
    kind = gate.kind
    if kind == "H":
        return _H
    if kind == "SX":
        return _SX
    if kind == "RX":
        t = gate.params[0]
        c, s = math.cos(t / 2), math.sin(t / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        t = gate.params[0]
        c, s = math.cos(t / 2), math.sin(t / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    raise ValueError(f"no dense 2x2 matrix for {kind}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the (mutated) state."""
    n = state.num_qubits
    for w in gate.wires:
        if not 0 <= w < n:
            raise ValueError(f"wire {w} out of range for {n}-qubit state")
    amp = state.amplitudes
    kind = gate.kind

    if kind in ("H", "SX", "RX", "RY"):
        u = _single_qubit_matrix(gate)
        _kernels.apply_2x2(amp, gate.wires[0], u[0, 0], u[0, 1], u[1, 0], u[1, 1])
    elif kind == "X":
        _kernels.apply_2x2(amp, gate.wires[0], 0j, 1 + 0j, 1 + 0j, 0j)
    elif kind == "Y":
        _kernels.apply_2x2(amp, gate.wires[0], 0j, -1j, 1j, 0j)
    elif kind == "RZ":
        t = gate.params[0]
        _kernels.apply_diag(amp, gate.wires[0], np.exp(-0.5j * t), np.exp(0.5j * t))
    elif kind == "CNOT":
        _kernels.apply_cnot(amp, gate.wires[0], gate.wires[1])
    elif kind == "CZ":
        _kernels.apply_cphase(amp, gate.wires[0], gate.wires[1], -1 + 0j)
    elif kind == "CP":
        _kernels.apply_cphase(
            amp, gate.wires[0], gate.wires[1], np.exp(1j * gate.params[0])
        )
    elif kind == "SWAP":
        _kernels.apply_swap(amp, gate.wires[0], gate.wires[1])
    else:  # pragma: no cover - Gate.__post_init__ rejects unknown kinds
        raise ValueError(f"unknown gate kind {kind}")
    return state


def simulate(circuit, num_qubits: int | None = None) -> StateVector:
    """Run a circuit (anything with .gates and .num_wires) on |0...0>."""
    n = circuit.num_wires if num_qubits is None else num_qubits
    state = new_zero_state(n)
    for gate in circuit.gates:
        apply_gate(state, gate)
    return state


def probabilities(state: StateVector) -> np.ndarray:
    """Measurement probabilities |amplitude_i|^2 for every basis index."""
    p = np.abs(state.amplitudes) ** 2
    return p


def sample_counts(state: StateVector, shots: int, seed: int) -> dict[str, int]:
    """Draw `shots` measurement outcomes; returns bitstring -> count.

    A counted multinomial draw from the exact probability vector via
    inverse-CDF over splitmix64 uniforms: identical (state, shots, seed)
    triples give identical counts on any platform.  Zero-count outcomes are
    omitted.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = probabilities(state)
    cdf = np.cumsum(p)
    cdf[-1] = max(cdf[-1], 1.0)
    u = random_uniform(seed, shots)
    idx = np.searchsorted(cdf, u, side="right")
    counts = np.bincount(idx, minlength=len(p))
    n = state.num_qubits
    return {
        format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c > 0
    }


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> (conjugate-linear in the first argument)."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def circuit_unitary(circuit, num_qubits: int) -> np.ndarray:
    """Dense unitary of a circuit, column by column.  Verification only."""
    if num_qubits > 6:
        raise ValueError("circuit_unitary is capped at 6 qubits")
    for gate in circuit.gates:
        if max(gate.wires) >= num_qubits:
            raise ValueError(
                f"gate {gate.kind} on wires {gate.wires} exceeds {num_qubits} qubits"
            )
    dim = 2**num_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        state = StateVector(num_qubits, np.zeros(dim, dtype=complex))
        state.amplitudes[col] = 1.0
        for gate in circuit.gates:
            apply_gate(state, gate)
        u[:, col] = state.amplitudes
    return u
