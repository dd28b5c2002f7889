"""Dense statevector simulation for small n-qubit systems.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of a basis-state index, so an
  n-qubit basis state |b0 b1 .. b_{n-1}> lives at index
  sum(b_k << (n - 1 - k)).
* Rotations follow R(theta) = exp(-i * theta * G / 2) with G the Pauli
  generator of the axis, which makes every rotation 4*pi periodic.
* All operations have value semantics: returned states are immutable
  and never alias caller-owned buffers.

The raw kernels (`apply_matrix2`, `apply_gate_kernel`) act on complex
arrays of shape (..., 2**n), so the same code path serves single states
and whole training batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 12
NORM_TOL = 1e-8

ROTATION_KINDS = ("rx", "ry", "rz")
CONTROLLED_KINDS = ("cz", "cnot")
GATE_KINDS = ROTATION_KINDS + CONTROLLED_KINDS

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

ROTATION_GENERATOR = {"rx": PAULI_X, "ry": PAULI_Y, "rz": PAULI_Z}


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """2x2 unitary exp(-i*angle*G/2) for kind in {rx, ry, rz}."""
    if kind not in ROTATION_KINDS:
        raise ValueError(f"not a rotation kind: {kind!r}")
    if not math.isfinite(angle):
        raise ValueError(f"non-finite rotation angle: {angle!r}")
    half = 0.5 * float(angle)
    c, s = math.cos(half), math.sin(half)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]])


@dataclass(frozen=True)
class GateOp:
    """One gate: a rotation (rx/ry/rz with an angle) or an entangler (cz/cnot)."""

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind: {self.kind!r}")
        if self.target < 0:
            raise ValueError(f"negative target qubit: {self.target}")
        if self.kind in ROTATION_KINDS:
            if self.control is not None:
                raise ValueError(f"{self.kind} takes no control qubit")
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle, got {self.angle!r}")
        else:
            if self.angle is not None:
                raise ValueError(f"{self.kind} takes no angle")
            if self.control is None or self.control < 0:
                raise ValueError(f"{self.kind} needs a non-negative control qubit")
            if self.control == self.target:
                raise ValueError("control and target must differ")

    def inverse(self) -> "GateOp":
        """Inverse gate: negated rotation angle; cz/cnot are self-inverse."""
        if self.kind in ROTATION_KINDS:
            return GateOp(self.kind, self.target, angle=-self.angle)
        return self


def rx(angle: float, target: int) -> GateOp:
    return GateOp("rx", target, angle=angle)


def ry(angle: float, target: int) -> GateOp:
    return GateOp("ry", target, angle=angle)


def rz(angle: float, target: int) -> GateOp:
    return GateOp("rz", target, angle=angle)


def cz(control: int, target: int) -> GateOp:
    return GateOp("cz", target, control=control)


def cnot(control: int, target: int) -> GateOp:
    return GateOp("cnot", target, control=control)


@dataclass(frozen=True)
class StateVector:
    """Unit-norm pure state of `num_qubits` qubits as 2**n complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |amplitudes| = {norm!r}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> of `num_qubits` qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range [0, {dim})")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _check_qubit(num_qubits: int, qubit: int, role: str) -> None:
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"{role} qubit {qubit} out of range for {num_qubits} qubits")


def apply_matrix2(arr: np.ndarray, num_qubits: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a (..., 2**n) amplitude array."""
    _check_qubit(num_qubits, qubit, "target")
    post = 1 << (num_qubits - 1 - qubit)
    if post == 1:
        return (arr.reshape(-1, 2) @ mat.T).reshape(arr.shape)
    if post >= 8:
        return np.matmul(mat, arr.reshape(-1, 2, post)).reshape(arr.shape)
    s = arr.reshape(-1, 2, post)
    out = np.empty_like(s)
    a, b = s[:, 0, :], s[:, 1, :]
    out[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    out[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b
    return out.reshape(arr.shape)


@lru_cache(maxsize=None)
def _cz_signs(num_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits)
    cbit = (idx >> (num_qubits - 1 - control)) & 1
    tbit = (idx >> (num_qubits - 1 - target)) & 1
    signs = np.where((cbit & tbit) == 1, -1.0, 1.0)
    signs.flags.writeable = False
    return signs


@lru_cache(maxsize=None)
def _cnot_perm(num_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits)
    cbit = (idx >> (num_qubits - 1 - control)) & 1
    perm = np.where(cbit == 1, idx ^ (1 << (num_qubits - 1 - target)), idx)
    perm.flags.writeable = False
    return perm


def apply_gate_kernel(
    arr: np.ndarray, num_qubits: int, gate: GateOp, invert: bool = False
) -> np.ndarray:
    """Apply `gate` (or its inverse) to a (..., 2**n) amplitude array."""
    if gate.kind in ROTATION_KINDS:
        angle = -gate.angle if invert else gate.angle
        return apply_matrix2(arr, num_qubits, gate.target, rotation_matrix(gate.kind, angle))
    _check_qubit(num_qubits, gate.control, "control")
    _check_qubit(num_qubits, gate.target, "target")
    if gate.kind == "cz":
        return arr * _cz_signs(num_qubits, gate.control, gate.target)
    return arr[..., _cnot_perm(num_qubits, gate.control, gate.target)]


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return the new state after applying one gate."""
    return StateVector(
        state.num_qubits, apply_gate_kernel(state.amplitudes, state.num_qubits, gate)
    )


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the squared overlap of two pure states."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"fidelity needs equal qubit counts, got {a.num_qubits} and {b.num_qubits}"
        )
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return min(float(abs(overlap) ** 2), 1.0)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Combined state of a and b, with b on the most significant qubits.

    The basis index of the result reads (b_index << a.num_qubits) | a_index,
    so tensor(psi, basis_state(k, 0)) embeds psi's amplitudes in the leading
    2**psi.num_qubits entries of the combined vector.
    """
    total = a.num_qubits + b.num_qubits
    if total > MAX_QUBITS:
        raise ValueError(f"combined state of {total} qubits exceeds {MAX_QUBITS}")
    return StateVector(total, np.kron(b.amplitudes, a.amplitudes))
