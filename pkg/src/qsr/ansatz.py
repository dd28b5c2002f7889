"""Layered parameterized circuits and their parameter layout.

Four families are provided, each a stack of identical layers:

  circuit1: per qubit rx,ry,rx,ry then a cnot ring  (4n params per layer)
  circuit2: per qubit rx,ry then a cnot ring        (2n params per layer)
  circuit3: per qubit ry then a cz ring             (n params per layer)
  qae:      circuit2 layers plus one trailing ry on each of the two
            trash qubits                            (2n per layer + 2)

The entangler ring couples qubits (q, q+1 mod n) and carries no
parameters.  Parameters are laid out layer-major, then qubit-major,
then rotation order within a qubit; the qae tail parameters come last.
Rotation gates emitted by `build_circuit` therefore appear in exactly
the same order as their entries in the parameter vector, which the
gradient engine relies on.

Trash qubits are the two most significant qubit positions (0 and 1),
matching where `tensor` embeds the |00> ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statevector import (
    MAX_QUBITS,
    ROTATION_KINDS,
    GateOp,
    StateVector,
    apply_gate_kernel,
    ry,
)

FAMILIES = ("circuit1", "circuit2", "circuit3", "qae")

_LAYER_ROTATIONS = {
    "circuit1": ("rx", "ry", "rx", "ry"),
    "circuit2": ("rx", "ry"),
    "circuit3": ("ry",),
    "qae": ("rx", "ry"),
}
_ENTANGLER = {
    "circuit1": "cnot",
    "circuit2": "cnot",
    "circuit3": "cz",
    "qae": "cnot",
}

QAE_TAIL_QUBITS = (0, 1)


@dataclass(frozen=True)
class CircuitSpec:
    """Ansatz family, qubit count, and layer depth."""

    family: str
    num_qubits: int
    depth: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown circuit family: {self.family!r}")
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if self.family == "qae" and self.num_qubits < 2:
            raise ValueError("qae needs at least 2 qubits for its trash pair")


def params_per_layer(spec: CircuitSpec) -> int:
    return len(_LAYER_ROTATIONS[spec.family]) * spec.num_qubits


def param_count(spec: CircuitSpec) -> int:
    """Total trainable parameters: depth layers plus the qae tail pair."""
    tail = 2 if spec.family == "qae" else 0
    return params_per_layer(spec) * spec.depth + tail


def validate_params(spec: CircuitSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    expected = param_count(spec)
    if theta.shape != (expected,):
        raise ValueError(
            f"{spec.family} at depth {spec.depth} takes {expected} parameters, "
            f"got shape {theta.shape}"
        )
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameter vector contains non-finite values")
    return theta


def build_layer(spec: CircuitSpec, layer_index: int, layer_params) -> list[GateOp]:
    """Gate list of one layer: rotations per qubit, then the entangler ring."""
    if layer_index < 0:
        raise ValueError(f"negative layer index: {layer_index}")
    params = np.asarray(layer_params, dtype=float)
    expected = params_per_layer(spec)
    if params.shape != (expected,):
        raise ValueError(
            f"layer of {spec.family} takes {expected} parameters, got shape {params.shape}"
        )
    rotations = _LAYER_ROTATIONS[spec.family]
    gates: list[GateOp] = []
    k = 0
    for q in range(spec.num_qubits):
        for kind in rotations:
            gates.append(GateOp(kind, q, angle=float(params[k])))
            k += 1
    if spec.num_qubits >= 2:
        ent = _ENTANGLER[spec.family]
        for q in range(spec.num_qubits):
            gates.append(GateOp(ent, (q + 1) % spec.num_qubits, control=q))
    return gates


def build_circuit(spec: CircuitSpec, theta) -> list[GateOp]:
    """Full gate list of U(theta): all layers in order, then the qae tail."""
    theta = validate_params(spec, theta)
    ppl = params_per_layer(spec)
    gates: list[GateOp] = []
    for layer in range(spec.depth):
        gates.extend(build_layer(spec, layer, theta[layer * ppl : (layer + 1) * ppl]))
    if spec.family == "qae":
        tail = theta[spec.depth * ppl :]
        gates.append(ry(float(tail[0]), QAE_TAIL_QUBITS[0]))
        gates.append(ry(float(tail[1]), QAE_TAIL_QUBITS[1]))
    return gates


def _check_state(state: StateVector, spec: CircuitSpec) -> None:
    if state.num_qubits != spec.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, circuit expects {spec.num_qubits}"
        )


def apply_circuit(state: StateVector, spec: CircuitSpec, theta) -> StateVector:
    """Apply U(theta) to a state."""
    _check_state(state, spec)
    arr = state.amplitudes
    for gate in build_circuit(spec, theta):
        arr = apply_gate_kernel(arr, spec.num_qubits, gate)
    return StateVector(spec.num_qubits, arr)


def apply_circuit_adjoint(state: StateVector, spec: CircuitSpec, theta) -> StateVector:
    """Apply U(theta)^dag: gates reversed, rotation angles negated."""
    _check_state(state, spec)
    arr = state.amplitudes
    for gate in reversed(build_circuit(spec, theta)):
        arr = apply_gate_kernel(arr, spec.num_qubits, gate, invert=True)
    return StateVector(spec.num_qubits, arr)


def save_checkpoint(path, spec: CircuitSpec, theta) -> None:
    """Write `family,num_qubits,depth` then one decimal parameter per line."""
    theta = validate_params(spec, theta)
    lines = [f"{spec.family},{spec.num_qubits},{spec.depth}"]
    lines.extend(f"{v:.17g}" for v in theta)
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[CircuitSpec, np.ndarray]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty checkpoint file")
    header = lines[0].split(",")
    if len(header) != 3:
        raise ValueError(f"{path}: bad checkpoint header {lines[0]!r}")
    try:
        spec = CircuitSpec(header[0].strip(), int(header[1]), int(header[2]))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    values = [line.strip() for line in lines[1:] if line.strip()]
    expected = param_count(spec)
    if len(values) != expected:
        raise ValueError(
            f"{path}: expected {expected} parameters for {spec.family} "
            f"at depth {spec.depth}, found {len(values)}"
        )
    try:
        theta = np.array([float(v) for v in values])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric parameter value") from exc
    return spec, validate_params(spec, theta)
