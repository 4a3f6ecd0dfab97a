"""Lowering to the native gate set {SX, RZ, CZ, X} and XYXY idle-window pulses.

Single-qubit gates go through the ZXZXZ Euler form
U(theta, phi, lam) = RZ(phi+pi) . SX . RZ(theta+pi) . SX . RZ(lam)   (up to
global phase), with shorter forms where angles vanish.  CNOT becomes an
H-conjugated CZ, SWAP becomes three CNOTs, CP becomes two CNOT-conjugated RZ
stages.  A peephole pass then merges adjacent RZ on the same wire and drops
RZ(0).

Dynamical decoupling inserts one X,Y,X,Y train into every idle window of at
least `min_window` consecutive ASAP layers between a wire's first and last
gate; the train multiplies to -I, so the circuit unitary is unchanged up to
global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, GateCensus, asap_layers, count_gates
from .statevec import Gate, circuit_unitary

NATIVE_KINDS = frozenset({"SX", "RZ", "CZ", "X"})
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LoweredCircuit:
    """A circuit over native kinds only (plus Y from DDD insertion)."""

    circuit: Circuit
    census: GateCensus
    provenance: str = ""


def _euler_zsx(theta: float, phi: float, lam: float, wire: int) -> list[Gate]:
    """Native sequence for RZ(phi).RY(theta).RZ(lam), up to global phase."""
    if abs(theta) < 1e-15:
        merged = phi + lam
        return [] if abs(merged) < 1e-15 else [Gate("RZ", (wire,), (merged,))]
    seq = []
    if lam != 0.0:
        seq.append(Gate("RZ", (wire,), (lam,)))
    seq.append(Gate("SX", (wire,)))
    seq.append(Gate("RZ", (wire,), (theta + math.pi,)))
    seq.append(Gate("SX", (wire,)))
    seq.append(Gate("RZ", (wire,), (phi + math.pi,)))
    return seq


def _lower_gate(gate: Gate) -> list[Gate]:
    kind = gate.kind
    if kind in NATIVE_KINDS:
        return [gate]
    w = gate.wires[0]
    if kind == "H":
        # one-SX short form: H = RZ(pi/2) . SX . RZ(pi/2) up to phase
        half = math.pi / 2
        return [Gate("RZ", (w,), (half,)), Gate("SX", (w,)), Gate("RZ", (w,), (half,))]
    if kind == "Y":
        # Y = -i X Z: apply RZ(pi) then X
        return [Gate("RZ", (w,), (math.pi,)), Gate("X", (w,))]
    if kind == "RX":
        t = gate.params[0]
        return _euler_zsx(t, -math.pi / 2, math.pi / 2, w)
    if kind == "RY":
        return _euler_zsx(gate.params[0], 0.0, 0.0, w)
    if kind == "CNOT":
        c, t = gate.wires
        return _lower_gate(Gate("H", (t,))) + [Gate("CZ", (c, t))] + _lower_gate(
            Gate("H", (t,))
        )
    if kind == "SWAP":
        a, b = gate.wires
        out = []
        for cnot in (Gate("CNOT", (a, b)), Gate("CNOT", (b, a)), Gate("CNOT", (a, b))):
            out.extend(_lower_gate(cnot))
        return out
    if kind == "CP":
        c, t = gate.wires
        half = gate.params[0] / 2
        seq = [
            Gate("RZ", (t,), (half,)),
            Gate("CNOT", (c, t)),
            Gate("RZ", (t,), (-half,)),
            Gate("CNOT", (c, t)),
            Gate("RZ", (c,), (half,)),
        ]
        out = []
        for g in seq:
            out.extend(_lower_gate(g))
        return out
    raise ValueError(f"cannot lower gate kind {kind}")


def _peephole_merge_rz(gates: list[Gate]) -> list[Gate]:
    """Merge adjacent same-wire RZ (no intervening gate on that wire); drop RZ(0).

    Angles are normalized to (-pi, pi]; dropping a merged RZ(2pi) changes the
    unitary by a global phase only.
    """
    out: list[Gate | None] = []
    last_on_wire: dict[int, int] = {}  # wire -> index into out
    for gate in gates:
        if gate.kind == "RZ":
            w = gate.wires[0]
            prev = last_on_wire.get(w)
            if prev is not None and out[prev] is not None and out[prev].kind == "RZ":
                angle = math.remainder(out[prev].params[0] + gate.params[0], _TWO_PI)
                out[prev] = None if abs(angle) < 1e-12 else Gate("RZ", (w,), (angle,))
                continue
            angle = math.remainder(gate.params[0], _TWO_PI)
            if abs(angle) < 1e-12:
                continue
            gate = Gate("RZ", (w,), (angle,))
        for w in gate.wires:
            last_on_wire[w] = len(out)
        out.append(gate)
    return [g for g in out if g is not None]


def lower(circuit: Circuit, provenance: str = "") -> LoweredCircuit:
    """Rewrite every gate into the native set and run the RZ peephole pass."""
    gates: list[Gate] = []
    for gate in circuit.gates:
        gates.extend(_lower_gate(gate))
    gates = _peephole_merge_rz(gates)
    lowered = Circuit(circuit.num_wires, tuple(gates), circuit.measured_wires)
    return LoweredCircuit(lowered, count_gates(lowered), provenance)


def insert_ddd_xyxy(lowered: LoweredCircuit, min_window: int = 4) -> LoweredCircuit:
    """Insert one X,Y,X,Y train per idle window of >= min_window ASAP layers.

    Windows are the layer gaps between consecutive gates on the same wire
    (so only between a wire's first and last gate).  Each train is placed
    immediately before the gate that ends its window; XYXY = -I, so the
    unitary only picks up a global phase.
    """
    circuit = lowered.circuit
    layers = asap_layers(circuit.gates)
    prev_gate: dict[int, int] = {}  # wire -> gate index of its latest gate
    insert_before: dict[int, list[int]] = {}  # gate index -> wires to decouple
    for idx, gate in enumerate(circuit.gates):
        for w in gate.wires:
            if w in prev_gate:
                gap = layers[idx] - layers[prev_gate[w]] - 1
                if gap >= min_window:
                    insert_before.setdefault(idx, []).append(w)
            prev_gate[w] = idx

    if not insert_before:
        return LoweredCircuit(circuit, lowered.census, lowered.provenance)

    gates: list[Gate] = []
    for idx, gate in enumerate(circuit.gates):
        for w in sorted(insert_before.get(idx, ())):
            gates += [Gate(k, (w,)) for k in ("X", "Y", "X", "Y")]
        gates.append(gate)
    out = Circuit(circuit.num_wires, tuple(gates), circuit.measured_wires)
    return LoweredCircuit(out, count_gates(out), lowered.provenance)


def equivalence_up_to_phase(a: Circuit, b: Circuit, num_qubits: int, tol: float = 1e-8) -> bool:
    """True iff U_a = exp(i phi) U_b, by largest-entry phase alignment."""
    if num_qubits > 4:
        raise ValueError("equivalence check is capped at 4 qubits")
    ua = circuit_unitary(a, num_qubits)
    ub = circuit_unitary(b, num_qubits)
    k = np.unravel_index(np.argmax(np.abs(ub)), ub.shape)
    if abs(ua[k]) < tol:
        return False
    phase = ua[k] / ub[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(ua - phase * ub)) < tol)
