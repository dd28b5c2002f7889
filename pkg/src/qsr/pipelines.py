"""Forward passes mapping 8x8 samples through the two circuit models.

qnn training/evaluation:
    downsample -> normalize -> encode on 4 qubits -> attach the |00>
    ancilla -> circuit -> decode to an 8x8 image.

qae training:
    encode the full 8x8 image on 6 qubits -> circuit -> decode, and
    compare against the decoded ancilla-padded encoding of the
    downsampled image (the compression target).

qae reconstruction:
    run the circuit adjoint on the ancilla-padded downsampled encoding.

`compressed_state` (4-qubit image block plus |00> trash/ancilla pair)
is simultaneously the qnn input, the qae compression target, and the
qae reconstruction input.
"""

from __future__ import annotations

import numpy as np

from .ansatz import CircuitSpec, apply_circuit, apply_circuit_adjoint
from .dataset import Sample
from .encoding import amplitude_encode, decode_to_image, downsample, normalize
from .statevector import StateVector, basis_state, tensor

PIPELINE_QUBITS = 6
ANCILLA_QUBITS = 2
IMAGE_SHAPE = (8, 8)


def compressed_state(image) -> StateVector:
    """Downsampled image encoded on 4 qubits with the |00> ancilla attached."""
    small = downsample(image)
    return tensor(amplitude_encode(small), basis_state(ANCILLA_QUBITS, 0))


def reference_state(image) -> StateVector:
    """Full 8x8 image amplitude-encoded on 6 qubits."""
    arr = np.asarray(image, dtype=float)
    if arr.shape != IMAGE_SHAPE:
        raise ValueError(f"expected an 8x8 image, got {arr.shape}")
    return amplitude_encode(arr)


def _check_pipeline_spec(spec: CircuitSpec, family: str | None = None) -> None:
    if spec.num_qubits != PIPELINE_QUBITS:
        raise ValueError(
            f"pipeline runs on {PIPELINE_QUBITS} qubits, circuit has {spec.num_qubits}"
        )
    if family is not None and spec.family != family:
        raise ValueError(f"expected family {family!r}, got {spec.family!r}")


def qnn_forward(
    sample: Sample, spec: CircuitSpec, theta
) -> tuple[np.ndarray, StateVector]:
    """Run the qnn reconstruction: returns (decoded 8x8 image, output state)."""
    _check_pipeline_spec(spec)
    out_state = apply_circuit(compressed_state(sample.image), spec, theta)
    return decode_to_image(out_state, *IMAGE_SHAPE), out_state


def qae_train_forward(
    sample: Sample, spec: CircuitSpec, theta
) -> tuple[np.ndarray, np.ndarray]:
    """Run the qae compression pass: returns (output image, target image)."""
    _check_pipeline_spec(spec, family="qae")
    out_state = apply_circuit(reference_state(sample.image), spec, theta)
    out_img = decode_to_image(out_state, *IMAGE_SHAPE)
    target_img = decode_to_image(compressed_state(sample.image), *IMAGE_SHAPE)
    return out_img, target_img


def qae_reconstruct(
    sample: Sample, spec: CircuitSpec, theta
) -> tuple[np.ndarray, StateVector]:
    """Run the qae decoder U(theta)^dag on the compressed input."""
    _check_pipeline_spec(spec, family="qae")
    out_state = apply_circuit_adjoint(compressed_state(sample.image), spec, theta)
    return decode_to_image(out_state, *IMAGE_SHAPE), out_state


def reconstruction_target(image) -> np.ndarray:
    """Normalized reference image that reconstructions are scored against."""
    return normalize(image)
