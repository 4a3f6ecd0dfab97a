"""Shared test oracles: dense Kronecker-lifted gate matrices and random circuits.

Everything here is implemented independently of the package's gate
application path (full matrix construction and matrix-vector products), so
the simulator can be checked against it.
"""

import numpy as np

from qfnet.circuits import Circuit
from qfnet.statevec import Gate

I2 = np.eye(2, dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of one gate on its own wires (wire order as in gate.wires)."""
    k = gate.kind
    if k == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if k == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k == "SX":
        return np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2
    if k == "RX":
        t = gate.params[0]
        c, s = np.cos(t / 2), np.sin(t / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if k == "RY":
        t = gate.params[0]
        c, s = np.cos(t / 2), np.sin(t / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k == "RZ":
        t = gate.params[0]
        return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]).astype(complex)
    # two-qubit: local index bit p = bit of gate.wires[p]
    if k == "CNOT":  # wires = (control, target)
        m = np.zeros((4, 4), dtype=complex)
        for c in (0, 1):
            for t in (0, 1):
                col = c | (t << 1)
                row = c | ((t ^ c) << 1)
                m[row, col] = 1
        return m
    if k == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k == "CP":
        return np.diag([1, 1, 1, np.exp(1j * gate.params[0])]).astype(complex)
    if k == "SWAP":
        m = np.zeros((4, 4), dtype=complex)
        for a in (0, 1):
            for b in (0, 1):
                m[b | (a << 1), a | (b << 1)] = 1
        return m
    raise ValueError(k)


def lift(gate: Gate, num_qubits: int) -> np.ndarray:
    """Kronecker-lifted matrix of a gate on an n-qubit register (qubit 0 = LSB)."""
    local = gate_matrix(gate)
    dim = 2**num_qubits
    full = np.zeros((dim, dim), dtype=complex)
    wires = gate.wires
    for col in range(dim):
        local_col = 0
        for pos, w in enumerate(wires):
            local_col |= ((col >> w) & 1) << pos
        rest = col
        for w in wires:
            rest &= ~(1 << w)
        for local_row in range(local.shape[0]):
            v = local[local_row, local_col]
            if v == 0:
                continue
            row = rest
            for pos, w in enumerate(wires):
                row |= ((local_row >> pos) & 1) << w
            full[row, col] += v
    return full


def dense_simulate(circuit: Circuit, num_qubits: int | None = None) -> np.ndarray:
    """Matrix-product simulation of a circuit on |0...0>; the oracle path."""
    n = circuit.num_wires if num_qubits is None else num_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for gate in circuit.gates:
        psi = lift(gate, n) @ psi
    return psi


def dense_unitary(circuit: Circuit, num_qubits: int) -> np.ndarray:
    u = np.eye(2**num_qubits, dtype=complex)
    for gate in circuit.gates:
        u = lift(gate, num_qubits) @ u
    return u


def random_circuit(rng: np.random.Generator, num_qubits: int, num_gates: int) -> Circuit:
    """A random circuit over the full gate vocabulary."""
    kinds_1q = ["H", "X", "Y", "SX", "RX", "RY", "RZ"]
    kinds_2q = ["CNOT", "CZ", "CP", "SWAP"]
    gates = []
    for _ in range(num_gates):
        if num_qubits >= 2 and rng.random() < 0.4:
            kind = kinds_2q[rng.integers(len(kinds_2q))]
            w = tuple(rng.choice(num_qubits, size=2, replace=False).tolist())
            params = (float(rng.uniform(-np.pi, np.pi)),) if kind == "CP" else ()
        else:
            kind = kinds_1q[rng.integers(len(kinds_1q))]
            w = (int(rng.integers(num_qubits)),)
            params = (
                (float(rng.uniform(-np.pi, np.pi)),) if kind in ("RX", "RY", "RZ") else ()
            )
        gates.append(Gate(kind, w, params))
    return Circuit(num_qubits, tuple(gates))


def phase_aligned_close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """True if a = e^{i phi} b for some phi, within tol entrywise."""
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[k]) < tol:
        return False
    phase = a[k] / b[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) < tol)
