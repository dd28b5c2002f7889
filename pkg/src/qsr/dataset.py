"""Ingestion of the 8x8 handwritten-digit corpus and seeded splitting.

The on-disk format is CSV with one row per sample: 64 pixel values in
[0, 16] (row-major 8x8) followed by the integer label 0..9.  A full
export of the corpus ships with the package for tests and smoke runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

PIXEL_MAX = 16.0


class DatasetError(ValueError):
    """Malformed dataset file."""


@dataclass(frozen=True)
class Sample:
    image: np.ndarray
    label: int

    def __post_init__(self) -> None:
        img = np.asarray(self.image, dtype=float)
        img.flags.writeable = False
        object.__setattr__(self, "image", img)


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[Sample, ...]
    test: tuple[Sample, ...]
    label_filter: frozenset[int]
    seed: int


def bundled_digits_path() -> Path:
    """Path of the digit corpus CSV shipped inside the package."""
    return Path(str(resources.files("qsr").joinpath("data", "digits_8x8.csv")))


def load_digits_csv(path) -> list[Sample]:
    """Parse a digits CSV file, validating every row."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    samples: list[Sample] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 65:
            raise DatasetError(f"{path}: line {lineno}: expected 65 fields, got {len(fields)}")
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise DatasetError(f"{path}: line {lineno}: non-numeric field") from None
        pixels = np.array(values[:64])
        if np.any(pixels < 0.0) or np.any(pixels > PIXEL_MAX):
            raise DatasetError(
                f"{path}: line {lineno}: pixel value outside [0, {PIXEL_MAX:g}]"
            )
        label = values[64]
        if label != int(label) or not 0 <= int(label) <= 9:
            raise DatasetError(f"{path}: line {lineno}: bad label {fields[64]!r}")
        samples.append(Sample(pixels.reshape(8, 8), int(label)))
    return samples


def make_split(
    samples: list[Sample],
    labels,
    n_train: int = 50,
    n_test: int = 30,
    seed: int = 0,
) -> DatasetSplit:
    """Filter by label, shuffle deterministically, and take train/test prefixes."""
    label_filter = frozenset(int(v) for v in labels)
    if not label_filter:
        raise ValueError("label filter is empty")
    pool = [s for s in samples if s.label in label_filter]
    needed = n_train + n_test
    if len(pool) < needed:
        raise ValueError(
            f"label filter {sorted(label_filter)}: need {needed} samples, have {len(pool)}"
        )
    order = np.random.default_rng(seed).permutation(len(pool))
    train = tuple(pool[i] for i in order[:n_train])
    test = tuple(pool[i] for i in order[n_train:needed])
    return DatasetSplit(train=train, test=test, label_filter=label_filter, seed=seed)
