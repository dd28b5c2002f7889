"""Losses between image pairs (l1, l2) and state pairs (fidelity loss)."""

from __future__ import annotations

import numpy as np

from .statevector import StateVector, fidelity


def _check_pair(pred, ref) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=float)
    r = np.asarray(ref, dtype=float)
    if p.shape != r.shape:
        raise ValueError(f"image shapes differ: {p.shape} vs {r.shape}")
    return p, r


def loss_l1(pred, ref) -> float:
    """Mean absolute error over all pixels."""
    p, r = _check_pair(pred, ref)
    return float(np.mean(np.abs(p - r)))


def loss_l2(pred, ref) -> float:
    """Mean squared error over all pixels."""
    p, r = _check_pair(pred, ref)
    return float(np.mean((p - r) ** 2))


def loss_fidelity(out: StateVector, ref: StateVector) -> float:
    """1 - |<out|ref>|^2."""
    return 1.0 - fidelity(out, ref)
