import math

import numpy as np
import pytest

from qfnet.circuits import (
    Circuit,
    asap_layers,
    build_angle_prep,
    build_swap_test,
    count_gates,
)
from qfnet.statevec import Gate, circuit_unitary
from qfnet.transpile import (
    NATIVE_KINDS,
    equivalence_up_to_phase,
    insert_ddd_xyxy,
    lower,
)

from helpers import phase_aligned_close, random_circuit


class TestLower:
    def test_hadamard_short_form(self):
        lowered = lower(Circuit(1, (Gate("H", (0,)),)))
        census = lowered.census
        assert census.per_kind == {"RZ": 2, "SX": 1}
        assert equivalence_up_to_phase(Circuit(1, (Gate("H", (0,)),)), lowered.circuit, 1)

    def test_cnot_census(self):
        lowered = lower(Circuit(2, (Gate("CNOT", (0, 1)),)))
        assert lowered.census.per_kind == {"CZ": 1, "SX": 2, "RZ": 4}
        assert equivalence_up_to_phase(
            Circuit(2, (Gate("CNOT", (0, 1)),)), lowered.circuit, 2
        )

    def test_identity_circuit_lowers_to_empty(self):
        lowered = lower(Circuit(3, ()))
        assert lowered.census.total_gates == 0
        zero_rotations = Circuit(2, (Gate("RX", (0,), (0.0,)), Gate("RZ", (1,), (0.0,))))
        assert lower(zero_rotations).census.total_gates == 0

    def test_native_gates_pass_through(self):
        c = Circuit(2, (Gate("SX", (0,)), Gate("X", (1,)), Gate("CZ", (0, 1)),
                        Gate("RZ", (0,), (0.7,))))
        lowered = lower(c)
        assert lowered.census.per_kind == {"SX": 1, "X": 1, "CZ": 1, "RZ": 1}

    @pytest.mark.parametrize(
        "gate",
        [
            Gate("H", (0,)),
            Gate("X", (0,)),
            Gate("Y", (0,)),
            Gate("SX", (0,)),
            Gate("RX", (0,), (1.234,)),
            Gate("RX", (0,), (-0.4,)),
            Gate("RY", (0,), (2.2,)),
            Gate("RZ", (0,), (0.3,)),
            Gate("CNOT", (0, 1)),
            Gate("CNOT", (1, 0)),
            Gate("CZ", (0, 1)),
            Gate("CP", (0, 1), (1.1,)),
            Gate("SWAP", (0, 1)),
        ],
    )
    def test_each_kind_lowered_correctly(self, gate):
        n = max(gate.wires) + 1
        original = Circuit(n, (gate,))
        lowered = lower(original)
        assert all(g.kind in NATIVE_KINDS for g in lowered.circuit.gates)
        assert equivalence_up_to_phase(original, lowered.circuit, n)

    def test_random_circuits_equivalent(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            c = random_circuit(rng, n, 25)
            lowered = lower(c)
            assert all(g.kind in NATIVE_KINDS for g in lowered.circuit.gates)
            assert equivalence_up_to_phase(c, lowered.circuit, n)

    def test_peephole_never_increases_count(self):
        rng = np.random.default_rng(1)
        from qfnet.transpile import _lower_gate, _peephole_merge_rz

        for _ in range(30):
            c = random_circuit(rng, 4, 30)
            raw = []
            for g in c.gates:
                raw.extend(_lower_gate(g))
            merged = _peephole_merge_rz(raw)
            assert len(merged) <= len(raw)

    def test_rz_merge_across_same_wire(self):
        c = Circuit(1, (Gate("RZ", (0,), (0.4,)), Gate("RZ", (0,), (0.6,))))
        lowered = lower(c)
        assert lowered.census.total_gates == 1
        assert lowered.circuit.gates[0].params[0] == pytest.approx(1.0)

    def test_rz_cancellation(self):
        c = Circuit(1, (Gate("RZ", (0,), (0.4,)), Gate("RZ", (0,), (-0.4,))))
        assert lower(c).census.total_gates == 0

    def test_no_merge_through_blocking_gate(self):
        c = Circuit(
            2,
            (
                Gate("RZ", (1,), (0.4,)),
                Gate("CZ", (0, 1)),
                Gate("RZ", (1,), (0.6,)),
            ),
        )
        assert lower(c).census.per_kind == {"RZ": 2, "CZ": 1}


class TestDdd:
    def test_no_idle_windows_unchanged(self):
        lowered = lower(build_angle_prep([0.4, 0.5]))
        after = insert_ddd_xyxy(lowered)
        assert after.circuit == lowered.circuit

    def test_single_window_gets_one_train(self):
        # wire 0 idles for exactly 4 layers (1..4) while wire 1 runs a chain
        # of 5 native gates; the CZ at layer 5 closes the window
        gates = (
            (Gate("X", (0,)),)
            + tuple(Gate("SX", (1,)) for _ in range(5))
            + (Gate("CZ", (0, 1)),)
        )
        lowered = lower(Circuit(2, gates))
        after = insert_ddd_xyxy(lowered, min_window=4)
        added = after.census.total_gates - lowered.census.total_gates
        assert added == 4
        assert after.census.per_kind.get("Y", 0) == 2
        assert after.census.per_kind["X"] == lowered.census.per_kind["X"] + 2

    def test_short_windows_skipped(self):
        gates = (
            (Gate("X", (0,)),)
            + tuple(Gate("SX", (1,)) for _ in range(3))
            + (Gate("CZ", (0, 1)),)
        )
        lowered = lower(Circuit(2, gates))
        assert insert_ddd_xyxy(lowered, min_window=4).circuit == lowered.circuit

    def test_ang_circuit_too_shallow_for_ddd(self):
        prep = build_angle_prep(np.linspace(0.1, 0.9, 9))
        swap = build_swap_test(prep, prep)
        assert count_gates(swap).depth == 3
        lowered = lower(swap)
        after = insert_ddd_xyxy(lowered)
        assert after.circuit == lowered.circuit

    def test_unitary_preserved(self):
        rng = np.random.default_rng(2)
        hits = 0
        for _ in range(40):
            n = int(rng.integers(2, 5))
            c = random_circuit(rng, n, 20)
            lowered = lower(c)
            after = insert_ddd_xyxy(lowered)
            hits += after.census.total_gates != lowered.census.total_gates
            assert equivalence_up_to_phase(c, after.circuit, n)
        assert hits > 0  # some circuits actually received insertions

    def test_cz_census_unchanged(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            c = random_circuit(rng, 4, 25)
            lowered = lower(c)
            after = insert_ddd_xyxy(lowered)
            assert after.census.per_kind.get("CZ", 0) == lowered.census.per_kind.get(
                "CZ", 0
            )

    def test_inserted_gates_fall_inside_windows(self):
        gates = (
            (Gate("X", (0,)),)
            + tuple(Gate("SX", (1,)) for _ in range(6))
            + (Gate("CZ", (0, 1)),)
        )
        lowered = lower(Circuit(2, gates))
        after = insert_ddd_xyxy(lowered)
        layers = asap_layers(after.circuit.gates)
        inserted = [
            layers[idx]
            for idx, g in enumerate(after.circuit.gates)
            if g.kind in ("X", "Y") and g.wires == (0,) and 0 < idx < len(layers) - 1
        ]
        assert len(inserted) == 4
        assert min(inserted) >= 1


class TestEquivalence:
    def test_identical_circuits(self):
        c = random_circuit(np.random.default_rng(4), 3, 15)
        assert equivalence_up_to_phase(c, c, 3)

    def test_x_vs_z_not_equivalent(self):
        cx = Circuit(1, (Gate("X", (0,)),))
        cz = Circuit(1, (Gate("RZ", (0,), (math.pi,)),))
        assert not equivalence_up_to_phase(cx, cz, 1)

    def test_global_phase_ignored(self):
        c1 = Circuit(1, (Gate("RZ", (0,), (0.7,)),))
        # same rotation plus a 2pi RZ: global phase -1
        c2 = Circuit(1, (Gate("RZ", (0,), (0.7 + 2 * math.pi,)),))
        assert equivalence_up_to_phase(c1, c2, 1)
        u1 = circuit_unitary(c1, 1)
        u2 = circuit_unitary(c2, 1)
        assert phase_aligned_close(u1, u2, 1e-10)

    def test_qubit_cap(self):
        c = Circuit(5, ())
        with pytest.raises(ValueError):
            equivalence_up_to_phase(c, c, 5)
