"""Circuit construction, inversion, and gate/depth accounting.

A Circuit is an ordered gate list over ``num_wires`` wires plus the set of
wires measured at the end.  Builders cover the three embedding preparations
(one RX layer; real-amplitude cascade of uniformly controlled RY rotations;
QFT) and the two fidelity circuits (destructive swap test and the doubled
compute-uncompute with optional Hadamard layers and per-load QFT).

Text format (read/written by :func:`to_text` / :func:`from_text`):

    wires <n>
    <KIND> <wire>[,<wire>] [<angle>]
    ...
    measure <wire>,<wire>,...   # optional, at most once

Blank lines and ``#`` comments are ignored; angles use repr() precision so
round-trips are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError
from .statevec import GATE_ARITY, Gate

_SELF_INVERSE = {"H", "X", "Y", "CNOT", "CZ", "SWAP"}
_NEGATE_ANGLE = {"RX", "RY", "RZ", "CP"}


@dataclass(frozen=True)
class Circuit:
    num_wires: int
    gates: tuple[Gate, ...]
    measured_wires: tuple[int, ...] = ()

    def __post_init__(self):
        for gate in self.gates:
            if max(gate.wires) >= self.num_wires:
                raise ValueError(
                    f"gate {gate.kind} on wires {gate.wires} exceeds "
                    f"{self.num_wires} wires"
                )
        for w in self.measured_wires:
            if not 0 <= w < self.num_wires:
                raise ValueError(f"measured wire {w} out of range")


@dataclass
class GateCensus:
    """Gate counts and greedy ASAP depth; CP is reported in the CZ bucket."""

    total_gates: int
    per_kind: dict[str, int]
    two_qubit_gates: int
    depth: int


def build_angle_prep(angles, offset_wire: int = 0) -> Circuit:
    """One layer of RX rotations, angle i on wire offset_wire + i."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.size < 1:
        raise ValueError("need at least one angle")
    gates = tuple(
        Gate("RX", (offset_wire + i,), (float(t),)) for i, t in enumerate(angles)
    )
    return Circuit(offset_wire + angles.size, gates)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def build_mottonen_real_prep(amplitudes) -> Circuit:
    """State preparation for a real unit vector using RY and CNOT only.

    Walks the binary tree of subvector norms root-to-leaf: the stage that
    targets qubit q applies a uniformly controlled RY over the higher qubits,
    realised as the standard Gray-code ladder of 2^k RY rotations interleaved
    with 2^k CNOTs.  Leaf angles use atan2 on the signed pair so real vectors
    are reproduced exactly, global phase +1; a branch with zero norm on both
    sides gets angle 0.  Census for 2^n amplitudes: (2^n - 1) RY, (2^n - 2)
    CNOT.
    """
    x = np.asarray(amplitudes, dtype=float)
    size = x.size
    if size < 2 or size & (size - 1):
        raise ValueError(f"amplitude length must be a power of two >= 2, got {size}")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"amplitudes must be L2-normalized, got norm {norm}")
    n = size.bit_length() - 1

    gates: list[Gate] = []
    for level in range(n):
        q = n - 1 - level  # target qubit; level 0 splits on the top bit
        k = level  # controls: qubits q+1 .. n-1
        block = 1 << (q + 1)
        half = block >> 1
        num = 1 << k
        alphas = np.empty(num)
        for j in range(num):
            seg = x[j * block : (j + 1) * block]
            if q == 0:
                a, b = seg[0], seg[1]
            else:
                a = np.linalg.norm(seg[:half])
                b = np.linalg.norm(seg[half:])
            alphas[j] = 2.0 * math.atan2(b, a)
        if k == 0:
            gates.append(Gate("RY", (q,), (float(alphas[0]),)))
            continue
        # theta = M @ alpha with M[i, j] = 2^-k (-1)^popcount(j & gray(i));
        # the CNOT after step i is controlled by the bit on which the Gray
        # code walk flips next (MSB on wrap-around).
        for i in range(num):
            gi = _gray(i)
            theta = sum(
                alphas[j] * (-1) ** bin(j & gi).count("1") for j in range(num)
            ) / num
            gates.append(Gate("RY", (q,), (float(theta),)))
            if i == num - 1:
                bit = k - 1
            else:
                bit = (gi ^ _gray(i + 1)).bit_length() - 1
            gates.append(Gate("CNOT", (q + 1 + bit, q)))
    return Circuit(n, tuple(gates))


def build_qft(n: int) -> Circuit:
    """Standard QFT with final wire-reversal SWAPs (qubit 0 = LSB)."""
    if n < 1:
        raise ValueError(f"QFT needs at least one wire, got {n}")
    gates: list[Gate] = []
    for j in range(n - 1, -1, -1):
        gates.append(Gate("H", (j,)))
        for k in range(j - 1, -1, -1):
            gates.append(Gate("CP", (k, j), (math.pi / 2 ** (j - k),)))
    for i in range(n // 2):
        gates.append(Gate("SWAP", (i, n - 1 - i)))
    return Circuit(n, tuple(gates))


def invert(circuit: Circuit) -> Circuit:
    """Adjoint circuit: gates reversed and individually inverted.

    Rotations negate their angle; H/X/Y/CNOT/CZ/SWAP are self-inverse; SX
    inverts to RX(-pi/2), which equals SX^dagger up to global phase.
    """
    inv: list[Gate] = []
    for gate in reversed(circuit.gates):
        if gate.kind in _SELF_INVERSE:
            inv.append(gate)
        elif gate.kind in _NEGATE_ANGLE:
            inv.append(Gate(gate.kind, gate.wires, (-gate.params[0],)))
        elif gate.kind == "SX":
            inv.append(Gate("RX", gate.wires, (-math.pi / 2,)))
        else:  # pragma: no cover - exhaustive over GATE_ARITY
            raise ValueError(f"cannot invert gate kind {gate.kind}")
    return Circuit(circuit.num_wires, tuple(inv), circuit.measured_wires)


def _shift(circuit: Circuit, offset: int) -> tuple[Gate, ...]:
    return tuple(
        Gate(g.kind, tuple(w + offset for w in g.wires), g.params)
        for g in circuit.gates
    )


def build_swap_test(prep_a: Circuit, prep_b: Circuit) -> Circuit:
    """Destructive swap test: both registers prepared, entangled, measured.

    Layout on 2n wires: prep_a on 0..n-1, prep_b on n..2n-1, then
    CNOT(i -> n+i) for each i, then H on wires 0..n-1.  The parity estimator
    over the measured bits lives in the metrics module.
    """
    if prep_a.num_wires != prep_b.num_wires:
        raise ValueError(
            f"register size mismatch: {prep_a.num_wires} vs {prep_b.num_wires}"
        )
    n = prep_a.num_wires
    gates = list(prep_a.gates) + list(_shift(prep_b, n))
    gates += [Gate("CNOT", (i, n + i)) for i in range(n)]
    gates += [Gate("H", (i,)) for i in range(n)]
    return Circuit(2 * n, tuple(gates), tuple(range(2 * n)))


def build_compute_uncompute(
    prep_a: Circuit,
    prep_b: Circuit,
    repetitions: int = 2,
    hadamard_layers: bool = True,
    qft_mode: str = "none",
) -> Circuit:
    """Doubled load/unload overlap circuit on one register.

    Gate order: repetitions x [H layer if enabled; prep_a; QFT if
    qft_mode="on_load"], then repetitions x [invert(prep_b); H layer if
    enabled].  With repetitions=1, no H layers and no QFT this is the
    textbook compute-uncompute circuit whose all-zeros probability is
    |<b|a>|^2.
    """
    if prep_a.num_wires != prep_b.num_wires:
        raise ValueError(
            f"register size mismatch: {prep_a.num_wires} vs {prep_b.num_wires}"
        )
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if qft_mode not in ("none", "on_load"):
        raise ValueError(f"unknown qft_mode {qft_mode!r}")
    n = prep_a.num_wires
    h_layer = [Gate("H", (i,)) for i in range(n)]
    qft_gates = list(build_qft(n).gates) if qft_mode == "on_load" else []
    unprep_b = invert(prep_b)

    gates: list[Gate] = []
    for _ in range(repetitions):
        if hadamard_layers:
            gates += h_layer
        gates += list(prep_a.gates)
        gates += qft_gates
    for _ in range(repetitions):
        gates += list(unprep_b.gates)
        if hadamard_layers:
            gates += h_layer
    return Circuit(n, tuple(gates), tuple(range(n)))


def asap_layers(gates) -> list[int]:
    """Greedy as-soon-as-possible layer index for each gate.

    Scanning in circuit order, a gate starts in the earliest layer where all
    its wires are free.
    """
    busy_until: dict[int, int] = {}
    layers = []
    for gate in gates:
        layer = max((busy_until.get(w, -1) for w in gate.wires), default=-1) + 1
        for w in gate.wires:
            busy_until[w] = layer
        layers.append(layer)
    return layers


def count_gates(circuit: Circuit) -> GateCensus:
    """Census of a circuit; measurements are not gates and are not counted.

    CP gates are tallied under the "CZ" key (both are controlled-phase
    entries in the reporting convention this package follows).
    """
    per_kind: dict[str, int] = {}
    two_qubit = 0
    for gate in circuit.gates:
        bucket = "CZ" if gate.kind == "CP" else gate.kind
        per_kind[bucket] = per_kind.get(bucket, 0) + 1
        if len(gate.wires) == 2:
            two_qubit += 1
    layers = asap_layers(circuit.gates)
    depth = max(layers) + 1 if layers else 0
    return GateCensus(len(circuit.gates), per_kind, two_qubit, depth)


def to_text(circuit: Circuit) -> str:
    """Serialize to the line-oriented text format (see module docstring)."""
    lines = [f"wires {circuit.num_wires}"]
    for gate in circuit.gates:
        parts = [gate.kind, ",".join(str(w) for w in gate.wires)]
        if gate.params:
            parts.append(repr(gate.params[0]))
        lines.append(" ".join(parts))
    if circuit.measured_wires:
        lines.append("measure " + ",".join(str(w) for w in circuit.measured_wires))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    """Parse the text format; raises DataFormatError with the line number."""
    num_wires = None
    gates: list[Gate] = []
    measured: tuple[int, ...] = ()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "wires":
                num_wires = int(parts[1])
            elif head == "measure":
                measured = tuple(int(w) for w in parts[1].split(","))
            else:
                kind = head.upper()
                if kind not in GATE_ARITY:
                    raise ValueError(f"unknown gate kind {head!r}")
                wires = tuple(int(w) for w in parts[1].split(","))
                params = tuple(float(p) for p in parts[2:])
                gates.append(Gate(kind, wires, params))
        except (IndexError, ValueError) as exc:
            raise DataFormatError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    if num_wires is None:
        raise DataFormatError("missing 'wires <n>' header line")
    try:
        return Circuit(num_wires, tuple(gates), measured)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from exc
