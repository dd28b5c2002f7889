import sys
from pathlib import Path

import numpy as np
import pytest

from qsr.dataset import bundled_digits_path, load_digits_csv
from qsr.statevector import StateVector

sys.path.insert(0, str(Path(__file__).parent))


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    dim = 1 << num_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))


@pytest.fixture(scope="session")
def digit_samples():
    return load_digits_csv(bundled_digits_path())
