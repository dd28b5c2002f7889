"""Batched loss and gradient engines for circuit training.

The adjoint engine performs reverse-mode differentiation through the
statevector simulation in one forward and one backward sweep.  With phi
the final state and L(phi) a real loss, define the cotangent
w = conj(dL/dphi), so that dL = 2 Re <w, dphi>.  Sweeping backward over
a gate U whose post-gate state is psi, a rotation exp(-i*theta*G/2)
contributes

    dL/dtheta = Im <w, G psi>

after which both vectors step back: psi <- U^dag psi, w <- U^dag w.

Loss heads supply the initial cotangent (targets t are real-valued for
every production pipeline; the fidelity head also accepts complex
targets; n is the amplitude count):

    fidelity:  L = 1 - |<t|phi>|^2       w = -<t|phi> t
    state l2:  L = mean |phi - t|^2      w = (phi - t) / n
    state l1:  L = mean |phi - t|        w = (phi - t) / (2 n |phi - t|)
    image l2:  L = mean (|phi| - t)^2    w = (|phi| - t) phi / (n |phi|)
    image l1:  L = mean ||phi| - t|      w = sign(|phi| - t) phi / (2 n |phi|)

Magnitude heads take the zero subgradient wherever a denominator
vanishes.  The finite-difference engine (central differences) and the
parameter-shift rule (exact for the fidelity loss) are retained as
independent checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ansatz import CircuitSpec, build_circuit, param_count, validate_params
from .encoding import ZeroImageError
from .pipelines import compressed_state, reference_state
from .statevector import (
    ROTATION_GENERATOR,
    ROTATION_KINDS,
    apply_matrix2,
    _cnot_perm,
    _cz_signs,
)

log = logging.getLogger(__name__)

LOSS_KINDS = ("l1", "l2", "fidelity")
LOSS_DOMAINS = ("state", "image")
FRAMEWORKS = ("qnn", "qae")

FD_STEP = 1e-5


@dataclass(frozen=True)
class BatchProgram:
    """A differentiable batch: fixed input states, targets, and loss head."""

    spec: CircuitSpec
    loss_kind: str
    loss_domain: str
    inputs: np.ndarray  # (batch, 2**n) complex
    targets: np.ndarray  # (batch, 2**n) real
    kept: tuple[int, ...]
    skipped: tuple[int, ...]

    @property
    def batch_size(self) -> int:
        return self.inputs.shape[0]


def build_batch_program(
    framework: str,
    spec: CircuitSpec,
    samples,
    loss_kind: str = "l2",
    loss_domain: str = "state",
) -> BatchProgram:
    """Assemble the batched inputs/targets for one framework and loss.

    Samples whose downsampled image is all zero cannot be encoded and are
    skipped with a warning; their indices are recorded on the program.
    """
    if framework not in FRAMEWORKS:
        raise ValueError(f"unknown framework: {framework!r}")
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind: {loss_kind!r}")
    if loss_domain not in LOSS_DOMAINS:
        raise ValueError(f"unknown loss domain: {loss_domain!r}")
    if framework == "qae" and spec.family != "qae":
        raise ValueError("the qae framework requires the qae circuit family")
    inputs, targets, kept, skipped = [], [], [], []
    for i, sample in enumerate(samples):
        try:
            comp = compressed_state(sample.image)
            ref = reference_state(sample.image)
        except ZeroImageError:
            skipped.append(i)
            continue
        if framework == "qnn":
            inputs.append(comp.amplitudes)
            targets.append(ref.amplitudes.real)
        else:
            inputs.append(ref.amplitudes)
            targets.append(comp.amplitudes.real)
        kept.append(i)
    if skipped:
        log.warning("skipped %d sample(s) with an all-zero downsampled image", len(skipped))
    if not kept:
        raise ValueError("every sample in the batch was skipped")
    return BatchProgram(
        spec=spec,
        loss_kind=loss_kind,
        loss_domain=loss_domain,
        inputs=np.array(inputs),
        targets=np.array(targets),
        kept=tuple(kept),
        skipped=tuple(skipped),
    )


# ---------------------------------------------------------------------------
# Compiled tape.  build_circuit defines the contract; the tape is the same
# gate sequence with parameter-free entangler runs fused into one diagonal
# sign vector (cz) or one composed index permutation (cnot), and with all
# rotation 2x2 matrices built vectorized per evaluation.  Rotation entries
# carry their parameter index; they appear in parameter order.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _tape(spec: CircuitSpec):
    gates = build_circuit(spec, np.zeros(param_count(spec)))
    ops: list[tuple] = []
    pend_kind: str | None = None
    pend: np.ndarray | None = None

    def flush() -> None:
        nonlocal pend_kind, pend
        if pend_kind == "diag":
            ops.append(("diag", pend))
        elif pend_kind == "perm":
            ops.append(("perm", pend, np.argsort(pend)))
        pend_kind = pend = None

    k = 0
    kinds: list[str] = []
    for gate in gates:
        if gate.kind in ROTATION_KINDS:
            flush()
            ops.append(("rot", gate.kind, gate.target, k))
            kinds.append(gate.kind)
            k += 1
        elif gate.kind == "cz":
            signs = _cz_signs(spec.num_qubits, gate.control, gate.target)
            if pend_kind == "diag":
                pend = pend * signs
            else:
                flush()
                pend_kind, pend = "diag", signs.astype(float)
        else:
            perm = _cnot_perm(spec.num_qubits, gate.control, gate.target)
            if pend_kind == "perm":
                pend = pend[perm]
            else:
                flush()
                pend_kind, pend = "perm", perm.copy()
    flush()
    kind_arr = np.array(kinds)
    masks = tuple(kind_arr == kind for kind in ROTATION_KINDS)
    return tuple(ops), masks


def _rotation_mats(masks, theta: np.ndarray) -> np.ndarray:
    """All rotation 2x2 unitaries for one parameter vector, shape (P, 2, 2)."""
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    mats = np.zeros((theta.size, 2, 2), dtype=complex)
    mx, my, mz = masks
    mats[mx, 0, 0] = mats[mx, 1, 1] = c[mx]
    mats[mx, 0, 1] = mats[mx, 1, 0] = -1j * s[mx]
    mats[my, 0, 0] = mats[my, 1, 1] = c[my]
    mats[my, 0, 1] = -s[my]
    mats[my, 1, 0] = s[my]
    mats[mz, 0, 0] = c[mz] - 1j * s[mz]
    mats[mz, 1, 1] = c[mz] + 1j * s[mz]
    return mats


def _tape_apply(arr: np.ndarray, num_qubits: int, ops, mats: np.ndarray) -> np.ndarray:
    for op in ops:
        if op[0] == "rot":
            arr = apply_matrix2(arr, num_qubits, op[2], mats[op[3]])
        elif op[0] == "diag":
            arr = arr * op[1]
        else:
            arr = arr[..., op[1]]
    return arr


def _forward(prog: BatchProgram, theta: np.ndarray) -> np.ndarray:
    ops, masks = _tape(prog.spec)
    return _tape_apply(prog.inputs, prog.spec.num_qubits, ops, _rotation_mats(masks, theta))


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den != 0)
    return out


def _sample_losses(phi: np.ndarray, prog: BatchProgram) -> np.ndarray:
    t = prog.targets
    if prog.loss_kind == "fidelity":
        overlap = np.einsum("bi,bi->b", np.conj(t), phi)
        return 1.0 - np.abs(overlap) ** 2
    if prog.loss_domain == "state":
        diff = np.abs(phi - t)
    else:
        diff = np.abs(np.abs(phi) - t)
    if prog.loss_kind == "l2":
        return np.mean(diff**2, axis=-1)
    return np.mean(diff, axis=-1)


def _cotangent(phi: np.ndarray, prog: BatchProgram) -> np.ndarray:
    t = prog.targets
    n = phi.shape[-1]
    if prog.loss_kind == "fidelity":
        overlap = np.einsum("bi,bi->b", np.conj(t), phi)
        return -overlap[:, None] * t
    if prog.loss_domain == "state":
        d = phi - t
        if prog.loss_kind == "l2":
            return d / n
        return _safe_div(d, 2.0 * n * np.abs(d))
    p = np.abs(phi)
    if prog.loss_kind == "l2":
        return _safe_div((p - t) * phi, n * p)
    return _safe_div(np.sign(p - t) * phi, 2.0 * n * p)


def batch_loss(prog: BatchProgram, theta) -> float:
    """Mean loss of the batch at theta."""
    theta = validate_params(prog.spec, theta)
    return float(np.mean(_sample_losses(_forward(prog, theta), prog)))


def adjoint_loss_and_gradient(prog: BatchProgram, theta) -> tuple[float, np.ndarray]:
    """Mean batch loss and its exact gradient in one forward/backward sweep."""
    theta = validate_params(prog.spec, theta)
    n = prog.spec.num_qubits
    ops, masks = _tape(prog.spec)
    mats = _rotation_mats(masks, theta)
    inv_mats = _rotation_mats(masks, -theta)
    psi = _tape_apply(prog.inputs, n, ops, mats)
    losses = _sample_losses(psi, prog)
    # psi and its cotangent step backward in lockstep; stacking them makes
    # every un-apply a single kernel call.
    batch = prog.batch_size
    stacked = np.concatenate([psi, _cotangent(psi, prog)], axis=0)
    grads = np.empty_like(theta)
    for op in reversed(ops):
        if op[0] == "rot":
            _, kind, target, k = op
            gpsi = apply_matrix2(stacked[:batch], n, target, ROTATION_GENERATOR[kind])
            contrib = np.einsum("bi,bi->b", np.conj(stacked[batch:]), gpsi).imag
            grads[k] = float(np.mean(contrib))
            stacked = apply_matrix2(stacked, n, target, inv_mats[k])
        elif op[0] == "diag":
            stacked = stacked * op[1]
        else:
            stacked = stacked[..., op[2]]
    return float(np.mean(losses)), grads


def finite_difference_gradient(prog: BatchProgram, theta, step: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of the mean batch loss."""
    theta = validate_params(prog.spec, theta)
    grads = np.empty_like(theta)
    for j in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[j] += step
        minus[j] -= step
        grads[j] = (batch_loss(prog, plus) - batch_loss(prog, minus)) / (2.0 * step)
    return grads


def parameter_shift_gradient(prog: BatchProgram, theta) -> np.ndarray:
    """Exact gradient via +-pi/2 shifts; valid for the fidelity loss only."""
    if prog.loss_kind != "fidelity":
        raise ValueError("the parameter-shift rule applies to the fidelity loss only")
    theta = validate_params(prog.spec, theta)
    grads = np.empty_like(theta)
    for j in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[j] += math.pi / 2.0
        minus[j] -= math.pi / 2.0
        grads[j] = (batch_loss(prog, plus) - batch_loss(prog, minus)) / 2.0
    return grads


def loss_and_gradient(
    prog: BatchProgram, theta, engine: str = "adjoint"
) -> tuple[float, np.ndarray]:
    if engine == "adjoint":
        return adjoint_loss_and_gradient(prog, theta)
    if engine == "finite_difference":
        return batch_loss(prog, theta), finite_difference_gradient(prog, theta)
    raise ValueError(f"unknown gradient engine: {engine!r}")
