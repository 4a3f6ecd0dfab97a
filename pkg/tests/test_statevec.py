import math

import numpy as np
import pytest

from qfnet.circuits import Circuit, build_qft
from qfnet.statevec import (
    Gate,
    apply_gate,
    circuit_unitary,
    inner_product,
    new_zero_state,
    probabilities,
    sample_counts,
    simulate,
)

from helpers import lift, random_circuit


def test_new_zero_state():
    s = new_zero_state(1)
    assert np.allclose(s.amplitudes, [1, 0])
    s2 = new_zero_state(2)
    assert np.allclose(s2.amplitudes, [1, 0, 0, 0])


@pytest.mark.parametrize("n", [0, 21, -3])
def test_new_zero_state_rejects_bad_counts(n):
    with pytest.raises(ValueError):
        new_zero_state(n)


def test_hadamard_on_zero():
    s = apply_gate(new_zero_state(1), Gate("H", (0,)))
    assert np.allclose(s.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_x_on_zero():
    s = apply_gate(new_zero_state(1), Gate("X", (0,)))
    assert np.allclose(s.amplitudes, [0, 1])


def test_rx_pi_on_zero():
    # exp(-i pi X / 2)|0> = -i |1>
    s = apply_gate(new_zero_state(1), Gate("RX", (0,), (math.pi,)))
    assert np.allclose(s.amplitudes, [0, -1j], atol=1e-15)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("RX", (0,))  # missing angle
    with pytest.raises(ValueError):
        Gate("H", (0,), (1.0,))  # stray angle
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))  # duplicate wires
    with pytest.raises(ValueError):
        Gate("NOPE", (0,))
    with pytest.raises(ValueError):
        apply_gate(new_zero_state(2), Gate("X", (5,)))


@pytest.mark.parametrize(
    "kind,nwires,params",
    [
        ("H", 1, ()),
        ("X", 1, ()),
        ("Y", 1, ()),
        ("SX", 1, ()),
        ("RX", 1, (0.7,)),
        ("RY", 1, (-1.3,)),
        ("RZ", 1, (2.1,)),
        ("CNOT", 2, ()),
        ("CZ", 2, ()),
        ("CP", 2, (0.9,)),
        ("SWAP", 2, ()),
    ],
)
def test_every_gate_matches_kron_oracle(kind, nwires, params):
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = int(rng.integers(nwires, 5))
        wires = tuple(rng.choice(n, size=nwires, replace=False).tolist())
        gate = Gate(kind, wires, params)
        amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        amps /= np.linalg.norm(amps)
        from qfnet.statevec import StateVector

        state = StateVector(n, amps.copy())
        apply_gate(state, gate)
        expected = lift(gate, n) @ amps
        assert np.max(np.abs(state.amplitudes - expected)) < 1e-12


def test_norm_preserved_on_random_circuits():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 11))
        circuit = random_circuit(rng, n, 200)
        state = simulate(circuit)
        assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10


def test_probabilities():
    s = apply_gate(new_zero_state(1), Gate("H", (0,)))
    assert np.allclose(probabilities(s), [0.5, 0.5])
    assert np.allclose(probabilities(new_zero_state(1)), [1, 0])
    s = apply_gate(new_zero_state(1), Gate("RY", (0,), (math.pi / 2,)))
    assert np.allclose(probabilities(s), [0.5, 0.5])
    rng = np.random.default_rng(0)
    c = random_circuit(rng, 5, 60)
    assert abs(probabilities(simulate(c)).sum() - 1.0) < 1e-12


class TestSampleCounts:
    def test_deterministic_states(self):
        assert sample_counts(new_zero_state(1), 100, seed=5) == {"0": 100}
        one = apply_gate(new_zero_state(1), Gate("X", (0,)))
        assert sample_counts(one, 7, seed=5) == {"1": 7}

    def test_reproducibility(self):
        s = apply_gate(new_zero_state(3), Gate("H", (1,)))
        a = sample_counts(s, 5000, seed=123)
        b = sample_counts(s, 5000, seed=123)
        assert a == b
        c = sample_counts(s, 5000, seed=124)
        assert a != c

    def test_binomial_bound(self):
        s = apply_gate(new_zero_state(1), Gate("H", (0,)))
        counts = sample_counts(s, 10**6, seed=99)
        assert abs(counts["0"] / 10**6 - 0.5) < 0.0015  # 3 sigma

    def test_counts_sum_to_shots(self):
        rng = np.random.default_rng(5)
        s = simulate(random_circuit(rng, 4, 30))
        counts = sample_counts(s, 4321, seed=1)
        assert sum(counts.values()) == 4321
        assert all(len(k) == 4 for k in counts)

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            sample_counts(new_zero_state(1), 0, seed=0)


def test_inner_product():
    zero = new_zero_state(1)
    one = apply_gate(new_zero_state(1), Gate("X", (0,)))
    plus = apply_gate(new_zero_state(1), Gate("H", (0,)))
    assert inner_product(zero, zero) == pytest.approx(1)
    assert inner_product(zero, one) == pytest.approx(0)
    assert inner_product(zero, plus) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ValueError):
        inner_product(zero, new_zero_state(2))


class TestCircuitUnitary:
    def test_empty_circuit_is_identity(self):
        u = circuit_unitary(Circuit(1, ()), 1)
        assert np.allclose(u, np.eye(2))

    def test_single_x(self):
        u = circuit_unitary(Circuit(1, (Gate("X", (0,)),)), 1)
        assert np.allclose(u, [[0, 1], [1, 0]])

    def test_qft_2_is_dft(self):
        # DFT matrix entry (j, k) = i^(jk) / 2
        u = circuit_unitary(build_qft(2), 2)
        expected = np.array(
            [[1, 1, 1, 1], [1, 1j, -1, -1j], [1, -1, 1, -1], [1, -1j, -1, 1j]]
        ) / 2
        assert np.max(np.abs(u - expected)) < 1e-12

    def test_unitarity_random_circuits(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(1, 5))
            u = circuit_unitary(random_circuit(rng, n, 40), n)
            assert np.max(np.abs(u @ u.conj().T - np.eye(2**n))) < 1e-10

    def test_qubit_cap(self):
        with pytest.raises(ValueError):
            circuit_unitary(Circuit(7, ()), 7)
