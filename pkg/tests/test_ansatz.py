import math

import numpy as np
import pytest

from conftest import random_state
from oracles import circuit_unitary
from qsr.ansatz import (
    FAMILIES,
    CircuitSpec,
    apply_circuit,
    apply_circuit_adjoint,
    build_circuit,
    build_layer,
    load_checkpoint,
    param_count,
    params_per_layer,
    save_checkpoint,
)
from qsr.statevector import ROTATION_KINDS, basis_state, fidelity


class TestParamCount:
    @pytest.mark.parametrize(
        "family,expected",
        [("circuit1", 960), ("circuit2", 480), ("circuit3", 240), ("qae", 482)],
    )
    def test_published_counts_at_depth_40(self, family, expected):
        assert param_count(CircuitSpec(family, 6, 40)) == expected

    def test_circuit2_depth_one(self):
        assert param_count(CircuitSpec("circuit2", 6, 1)) == 12

    @pytest.mark.parametrize("family", FAMILIES)
    def test_linear_in_depth(self, family):
        tail = 2 if family == "qae" else 0
        per_layer = params_per_layer(CircuitSpec(family, 6, 1))
        for depth in (0, 1, 2, 7, 40):
            assert param_count(CircuitSpec(family, 6, depth)) == per_layer * depth + tail

    def test_bad_specs_rejected(self):
        with pytest.raises(ValueError):
            CircuitSpec("circuit9", 6, 1)
        with pytest.raises(ValueError):
            CircuitSpec("circuit1", 0, 1)
        with pytest.raises(ValueError):
            CircuitSpec("circuit1", 6, -1)
        with pytest.raises(ValueError):
            CircuitSpec("qae", 1, 1)


class TestBuildLayer:
    def test_circuit2_layer_composition(self):
        spec = CircuitSpec("circuit2", 6, 40)
        gates = build_layer(spec, 0, np.zeros(12))
        rotations = [g for g in gates if g.kind in ROTATION_KINDS]
        entanglers = [g for g in gates if g.kind == "cnot"]
        assert len(rotations) == 12 and len(entanglers) == 6
        assert len(gates) == 18

    def test_circuit3_layer_composition(self):
        spec = CircuitSpec("circuit3", 6, 40)
        gates = build_layer(spec, 0, np.zeros(6))
        assert sum(g.kind == "ry" for g in gates) == 6
        assert sum(g.kind == "cz" for g in gates) == 6

    def test_wrong_slice_length(self):
        spec = CircuitSpec("circuit2", 6, 40)
        with pytest.raises(ValueError):
            build_layer(spec, 0, np.zeros(11))

    def test_zero_params_layer_equals_pure_entangler(self):
        # all-zero rotations are identities, so the layer acts as its ring alone
        spec = CircuitSpec("circuit2", 4, 1)
        rng = np.random.default_rng(0)
        s = random_state(4, rng)
        full = apply_circuit(s, spec, np.zeros(8))
        ring_only = s
        from qsr.statevector import apply_gate, cnot

        for q in range(4):
            ring_only = apply_gate(ring_only, cnot(q, (q + 1) % 4))
        np.testing.assert_allclose(full.amplitudes, ring_only.amplitudes, atol=1e-12)

    def test_entangler_is_ring_over_all_qubits(self):
        spec = CircuitSpec("circuit3", 6, 1)
        gates = build_layer(spec, 0, np.zeros(6))
        pairs = {(g.control, g.target) for g in gates if g.kind == "cz"}
        assert pairs == {(q, (q + 1) % 6) for q in range(6)}


class TestParameterLayout:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_rotation_gates_appear_in_parameter_order(self, family):
        spec = CircuitSpec(family, 6, 3)
        theta = np.arange(param_count(spec), dtype=float)
        angles = [g.angle for g in build_circuit(spec, theta) if g.kind in ROTATION_KINDS]
        np.testing.assert_array_equal(angles, theta)

    def test_qae_tail_rotations_on_trash_qubits(self):
        spec = CircuitSpec("qae", 6, 2)
        theta = np.zeros(param_count(spec))
        theta[-2:] = [0.5, 0.7]
        tail = build_circuit(spec, theta)[-2:]
        assert [(g.kind, g.target, g.angle) for g in tail] == [
            ("ry", 0, 0.5),
            ("ry", 1, 0.7),
        ]


class TestApplyCircuit:
    def test_zero_theta_circuit3_fixes_all_zeros(self):
        spec = CircuitSpec("circuit3", 6, 40)
        out = apply_circuit(basis_state(6, 0), spec, np.zeros(240))
        np.testing.assert_allclose(out.amplitudes, basis_state(6, 0).amplitudes, atol=1e-12)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_random_theta_preserves_norm(self, family):
        rng = np.random.default_rng(17)
        spec = CircuitSpec(family, 6, 5)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        out = apply_circuit(random_state(6, rng), spec, theta)
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-10

    def test_depth1_circuit2_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        spec = CircuitSpec("circuit2", 6, 1)
        theta = rng.uniform(0, 2 * math.pi, 12)
        s = random_state(6, rng)
        want = circuit_unitary(build_circuit(spec, theta), 6) @ s.amplitudes
        got = apply_circuit(s, spec, theta).amplitudes
        np.testing.assert_allclose(got, want, atol=1e-10)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_depth2_matches_dense_oracle(self, family):
        rng = np.random.default_rng(23)
        spec = CircuitSpec(family, 6, 2)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        s = random_state(6, rng)
        want = circuit_unitary(build_circuit(spec, theta), 6) @ s.amplitudes
        got = apply_circuit(s, spec, theta).amplitudes
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_theta_length_mismatch(self):
        spec = CircuitSpec("circuit2", 6, 2)
        with pytest.raises(ValueError):
            apply_circuit(basis_state(6, 0), spec, np.zeros(23))

    def test_state_size_mismatch(self):
        spec = CircuitSpec("circuit2", 6, 1)
        with pytest.raises(ValueError):
            apply_circuit(basis_state(5, 0), spec, np.zeros(12))


class TestAdjoint:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("depth", [1, 3])
    def test_adjoint_undoes_circuit_on_100_random_states(self, family, depth):
        rng = np.random.default_rng(31)
        spec = CircuitSpec(family, 6, depth)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        for _ in range(100):
            s = random_state(6, rng)
            back = apply_circuit_adjoint(apply_circuit(s, spec, theta), spec, theta)
            assert fidelity(back, s) >= 1 - 1e-9

    def test_depth2_circuit1_adjoint_matches_oracle_dagger(self):
        rng = np.random.default_rng(37)
        spec = CircuitSpec("circuit1", 6, 2)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        s = random_state(6, rng)
        dense = circuit_unitary(build_circuit(spec, theta), 6)
        want = dense.conj().T @ s.amplitudes
        got = apply_circuit_adjoint(s, spec, theta).amplitudes
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_zero_theta_adjoint_is_reversed_entanglers(self):
        spec = CircuitSpec("circuit1", 4, 1)
        rng = np.random.default_rng(41)
        s = random_state(4, rng)
        out = apply_circuit_adjoint(s, spec, np.zeros(16))
        from qsr.statevector import apply_gate, cnot

        want = s
        for q in reversed(range(4)):
            want = apply_gate(want, cnot(q, (q + 1) % 4))
        np.testing.assert_allclose(out.amplitudes, want.amplitudes, atol=1e-12)


class TestContinuityAndPeriodicity:
    def test_single_coordinate_shift_bounded_by_half_epsilon(self):
        rng = np.random.default_rng(53)
        spec = CircuitSpec("circuit2", 6, 2)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        s = random_state(6, rng)
        base = apply_circuit(s, spec, theta).amplitudes
        eps = 1e-3
        for j in range(param_count(spec)):
            shifted = theta.copy()
            shifted[j] += eps
            moved = apply_circuit(s, spec, shifted).amplitudes
            assert np.linalg.norm(moved - base) <= eps / 2 + 1e-12

    def test_four_pi_shift_gives_identical_state(self):
        rng = np.random.default_rng(59)
        spec = CircuitSpec("circuit1", 6, 2)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        s = random_state(6, rng)
        base = apply_circuit(s, spec, theta).amplitudes
        for j in (0, 17, 47):
            shifted = theta.copy()
            shifted[j] += 4 * math.pi
            moved = apply_circuit(s, spec, shifted).amplitudes
            np.testing.assert_allclose(moved, base, atol=1e-10)


class TestCheckpoints:
    def test_roundtrip_preserves_spec_and_17_digit_values(self, tmp_path):
        rng = np.random.default_rng(61)
        spec = CircuitSpec("qae", 6, 3)
        theta = rng.uniform(0, 2 * math.pi, param_count(spec))
        path = tmp_path / "ckpt.txt"
        save_checkpoint(path, spec, theta)
        loaded_spec, loaded = load_checkpoint(path)
        assert loaded_spec == spec
        np.testing.assert_allclose(loaded, theta, rtol=0, atol=1e-15)

    def test_header_format(self, tmp_path):
        spec = CircuitSpec("circuit3", 6, 1)
        path = tmp_path / "ckpt.txt"
        save_checkpoint(path, spec, np.zeros(6))
        assert path.read_text().splitlines()[0] == "circuit3,6,1"

    def test_wrong_value_count_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("circuit3,6,1\n0.0\n0.0\n")
        with pytest.raises(ValueError):
            load_checkpoint(path)

    def test_bad_family_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("mystery,6,1\n" + "0.0\n" * 6)
        with pytest.raises(ValueError):
            load_checkpoint(path)
