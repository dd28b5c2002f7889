import math

import numpy as np
import pytest

from conftest import random_state
from oracles import gate_unitary
from qsr.statevector import (
    CONTROLLED_KINDS,
    GATE_KINDS,
    GateOp,
    StateVector,
    apply_gate,
    basis_state,
    cnot,
    cz,
    fidelity,
    rotation_matrix,
    rx,
    ry,
    rz,
    tensor,
)


class TestBasisState:
    def test_two_qubit_zero(self):
        s = basis_state(2, 0)
        np.testing.assert_array_equal(s.amplitudes, [1, 0, 0, 0])

    def test_one_qubit_one(self):
        np.testing.assert_array_equal(basis_state(1, 1).amplitudes, [0, 1])

    def test_three_qubit_101(self):
        s = basis_state(3, 5)
        expected = np.zeros(8)
        expected[5] = 1
        np.testing.assert_array_equal(s.amplitudes, expected)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            basis_state(2, 4)
        with pytest.raises(ValueError):
            basis_state(2, -1)


class TestStateVectorValidation:
    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            StateVector(2, np.array([1.0, 0.0]))

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_qubit_range(self):
        with pytest.raises(ValueError):
            StateVector(0, np.array([1.0]))
        with pytest.raises(ValueError):
            StateVector(13, np.zeros(2**13))

    def test_amplitudes_are_immutable(self):
        s = basis_state(1, 0)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0


class TestGateOpValidation:
    def test_control_equals_target(self):
        with pytest.raises(ValueError):
            GateOp("cnot", 1, control=1)

    def test_non_finite_angle(self):
        with pytest.raises(ValueError):
            GateOp("rx", 0, angle=float("nan"))
        with pytest.raises(ValueError):
            GateOp("ry", 0, angle=float("inf"))

    def test_rotation_needs_angle(self):
        with pytest.raises(ValueError):
            GateOp("rx", 0)

    def test_entangler_needs_control(self):
        with pytest.raises(ValueError):
            GateOp("cz", 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            GateOp("hadamard", 0)


class TestRotationMatrices:
    @pytest.mark.parametrize("kind", ["rx", "ry", "rz"])
    @pytest.mark.parametrize("angle", [0.0, 0.3, 1.1, 2.7, -4.2, 9.9])
    def test_unitary(self, kind, angle):
        u = rotation_matrix(kind, angle)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


class TestApplyGate:
    def test_rx_zero_is_identity(self):
        rng = np.random.default_rng(1)
        s = random_state(3, rng)
        out = apply_gate(s, rx(0.0, 1))
        np.testing.assert_allclose(out.amplitudes, s.amplitudes, atol=1e-14)

    def test_cz_phase_on_11(self):
        s = basis_state(2, 3)
        out = apply_gate(s, cz(0, 1))
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, -1], atol=1e-14)

    @pytest.mark.parametrize("angle", [0.3, 1.1, 2.7])
    def test_ry_on_zero_matches_matrix_product(self, angle):
        # oracle: direct 2x2 matrix-vector product
        expected = rotation_matrix("ry", angle) @ np.array([1.0, 0.0])
        out = apply_gate(basis_state(1, 0), ry(angle, 0))
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-14)

    def test_invalid_qubit_index(self):
        s = basis_state(2, 0)
        with pytest.raises(ValueError):
            apply_gate(s, rx(0.1, 2))
        with pytest.raises(ValueError):
            apply_gate(s, cnot(3, 0))

    def test_cnot_flips_target_when_control_set(self):
        # qubit 0 is the most significant bit: |10> is index 2
        out = apply_gate(basis_state(2, 2), cnot(0, 1))
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1], atol=1e-14)

    def test_input_state_unchanged(self):
        s = basis_state(2, 2)
        apply_gate(s, cnot(0, 1))
        np.testing.assert_array_equal(s.amplitudes, [0, 0, 1, 0])


def _random_gate(rng, num_qubits):
    kind = GATE_KINDS[rng.integers(0, len(GATE_KINDS))]
    target = int(rng.integers(0, num_qubits))
    if kind in CONTROLLED_KINDS:
        if num_qubits == 1:
            return rx(float(rng.uniform(-7, 7)), target)
        control = int(rng.integers(0, num_qubits))
        while control == target:
            control = int(rng.integers(0, num_qubits))
        return GateOp(kind, target, control=control)
    return GateOp(kind, target, angle=float(rng.uniform(-7, 7)))


class TestGateOracleEquivalence:
    @pytest.mark.parametrize("num_qubits", [1, 2, 3, 4])
    def test_matches_dense_kronecker_oracle(self, num_qubits):
        rng = np.random.default_rng(100 + num_qubits)
        for _ in range(60):
            s = random_state(num_qubits, rng)
            gate = _random_gate(rng, num_qubits)
            got = apply_gate(s, gate).amplitudes
            want = gate_unitary(gate, num_qubits) @ s.amplitudes
            np.testing.assert_allclose(got, want, atol=1e-12)


class TestNormAndInverses:
    def test_norm_preserved_over_10000_random_gates(self):
        rng = np.random.default_rng(7)
        s = random_state(5, rng)
        arr = s.amplitudes
        from qsr.statevector import apply_gate_kernel

        for _ in range(10_000):
            arr = apply_gate_kernel(arr, 5, _random_gate(rng, 5))
        assert abs(np.linalg.norm(arr) - 1.0) < 1e-8

    def test_gate_then_inverse_roundtrip(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            s = random_state(4, rng)
            gate = _random_gate(rng, 4)
            back = apply_gate(apply_gate(s, gate), gate.inverse())
            np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-10)


class TestFidelity:
    def test_self_fidelity(self):
        s = random_state(3, np.random.default_rng(2))
        assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states(self):
        assert fidelity(basis_state(1, 0), basis_state(1, 1)) == 0.0

    def test_ry_overlap_value(self):
        # |<0|RY(pi/3)|0>|^2 = cos^2(pi/6) = 0.75
        out = apply_gate(basis_state(1, 0), ry(math.pi / 3, 0))
        assert fidelity(basis_state(1, 0), out) == pytest.approx(0.75, abs=1e-12)

    def test_symmetry_and_phase_invariance(self):
        rng = np.random.default_rng(3)
        a, b = random_state(3, rng), random_state(3, rng)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)
        phased = StateVector(3, b.amplitudes * np.exp(0.7j))
        assert fidelity(a, phased) == pytest.approx(fidelity(a, b), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(basis_state(1, 0), basis_state(2, 0))


class TestTensor:
    def test_zero_with_zero(self):
        out = tensor(basis_state(1, 0), basis_state(1, 0))
        np.testing.assert_array_equal(out.amplitudes, [1, 0, 0, 0])

    def test_state_with_ancilla_fills_leading_block(self):
        rng = np.random.default_rng(5)
        psi = random_state(4, rng)
        out = tensor(psi, basis_state(2, 0))
        assert out.num_qubits == 6
        np.testing.assert_allclose(out.amplitudes[:16], psi.amplitudes, atol=1e-14)
        np.testing.assert_allclose(out.amplitudes[16:], 0.0, atol=1e-14)

    def test_uniform_with_uniform(self):
        u = StateVector(1, np.array([1.0, 1.0]) / math.sqrt(2))
        out = tensor(u, u)
        np.testing.assert_allclose(out.amplitudes, [0.5, 0.5, 0.5, 0.5], atol=1e-14)

    def test_size_overflow(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            tensor(random_state(7, rng), random_state(6, rng))


class TestRotationConventions:
    def test_rz_adds_opposite_half_phases(self):
        out = apply_gate(basis_state(1, 0), rz(1.3, 0))
        assert out.amplitudes[0] == pytest.approx(np.exp(-0.65j), abs=1e-14)

    def test_four_pi_periodicity(self):
        rng = np.random.default_rng(8)
        s = random_state(2, rng)
        for kind in ("rx", "ry", "rz"):
            a = apply_gate(s, GateOp(kind, 1, angle=0.9))
            b = apply_gate(s, GateOp(kind, 1, angle=0.9 + 4 * math.pi))
            np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-10)
