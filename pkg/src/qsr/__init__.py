"""qsr: quantum super-resolution of 8x8 images from 4x4 inputs.

Core library layers:

* `statevector`: dense n-qubit simulation kernels and primitives;
* `ansatz`: layered parameterized circuits and checkpoints;
* `encoding`: image normalization, amplitude encoding, decoding, pooling;
* `dataset`: digit corpus ingestion and seeded train/test splits;
* `losses`, `gradients`, `training`: loss heads, adjoint/finite-difference
  engines, and the full-batch training loop;
* `pipelines`: the qnn and qae forward passes;
* `experiments`: config files, artifact emission, experiment grids;
* `service` / `cli`: HTTP wrapper around the above plus a thin client.
"""

__version__ = "0.1.0"

from .ansatz import (
    CircuitSpec,
    apply_circuit,
    apply_circuit_adjoint,
    build_circuit,
    build_layer,
    load_checkpoint,
    param_count,
    save_checkpoint,
)
from .dataset import DatasetSplit, Sample, bundled_digits_path, load_digits_csv, make_split
from .encoding import (
    ZeroImageError,
    amplitude_encode,
    decode_to_image,
    downsample,
    normalize,
)
from .losses import loss_fidelity, loss_l1, loss_l2
from .pipelines import (
    compressed_state,
    qae_reconstruct,
    qae_train_forward,
    qnn_forward,
    reference_state,
)
from .statevector import (
    GateOp,
    StateVector,
    apply_gate,
    basis_state,
    cnot,
    cz,
    fidelity,
    rx,
    ry,
    rz,
    tensor,
)
from .training import TrainConfig, TrainReport, evaluate, gradient, initial_params, train

__all__ = [
    "__version__",
    "CircuitSpec",
    "DatasetSplit",
    "GateOp",
    "Sample",
    "StateVector",
    "TrainConfig",
    "TrainReport",
    "ZeroImageError",
    "amplitude_encode",
    "apply_circuit",
    "apply_circuit_adjoint",
    "apply_gate",
    "basis_state",
    "build_circuit",
    "build_layer",
    "bundled_digits_path",
    "cnot",
    "compressed_state",
    "cz",
    "decode_to_image",
    "downsample",
    "evaluate",
    "fidelity",
    "gradient",
    "initial_params",
    "load_checkpoint",
    "load_digits_csv",
    "loss_fidelity",
    "loss_l1",
    "loss_l2",
    "make_split",
    "normalize",
    "param_count",
    "qae_reconstruct",
    "qae_train_forward",
    "qnn_forward",
    "reference_state",
    "rx",
    "ry",
    "rz",
    "save_checkpoint",
    "tensor",
    "train",
]
