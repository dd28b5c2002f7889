"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..training import DEFAULT_LOSS_DOMAIN

Family = Literal["circuit1", "circuit2", "circuit3", "qae"]
Framework = Literal["qnn", "qae", ""]
LossKind = Literal["l1", "l2", "fidelity"]
LossDomain = Literal["state", "image"]


class HealthResponse(BaseModel):
    status: str
    version: str


class TrainRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Family
    labels: list[int] = Field(min_length=1)
    output_dir: str
    framework: Framework = ""
    dataset: str = "builtin"
    depth: int = Field(default=40, ge=0)
    loss: LossKind = "l2"
    loss_domain: LossDomain = DEFAULT_LOSS_DOMAIN
    epochs: int = Field(default=150, ge=0)
    learning_rate: float = Field(default=0.05, gt=0)
    optimizer: Literal["adam", "sgd"] = "adam"
    gradient_engine: Literal["adjoint", "finite_difference"] = "adjoint"
    seed: int = 0
    n_train: int = Field(default=50, ge=1)
    n_test: int = Field(default=30, ge=1)
    eval_every: int = Field(default=0, ge=0)


class ArtifactPaths(BaseModel):
    checkpoint: str
    losses_csv: str
    metrics_csv: str
    manifest: str


class TrainResponse(BaseModel):
    family: str
    framework: str
    labels: list[int]
    param_count: int
    avg_l2: float
    avg_fidelity: float
    seed: int
    epochs: int
    skipped_train: int
    skipped_test: int
    artifacts: ArtifactPaths
    summary: str


class SampleMetricsRow(BaseModel):
    index: int
    label: int
    l2: float
    fidelity: float


class EvalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    checkpoint: str
    labels: list[int] = Field(min_length=1)
    dataset: str = "builtin"
    seed: int = 0
    n_train: int = Field(default=50, ge=1)
    n_test: int = Field(default=30, ge=1)
    framework: Framework = ""


class EvalResponse(BaseModel):
    family: str
    framework: str
    param_count: int
    avg_l2: float
    avg_fidelity: float
    samples: list[SampleMetricsRow]


class ReconstructRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    checkpoint: str
    indices: list[int] = Field(min_length=1)
    output_dir: str
    dataset: str = "builtin"
    framework: Framework = ""


class ReconstructedSample(BaseModel):
    index: int
    label: int
    files: list[str]


class ReconstructResponse(BaseModel):
    output_dir: str
    samples: list[ReconstructedSample]


class GridCellSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Family
    labels: list[int] = Field(min_length=1)


class GridRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cells: list[GridCellSpec]
    output_dir: str
    dataset: str = "builtin"
    depth: int = Field(default=40, ge=0)
    loss: LossKind = "l2"
    loss_domain: LossDomain = DEFAULT_LOSS_DOMAIN
    epochs: int = Field(default=150, ge=0)
    learning_rate: float = Field(default=0.05, gt=0)
    optimizer: Literal["adam", "sgd"] = "adam"
    gradient_engine: Literal["adjoint", "finite_difference"] = "adjoint"
    seed: int = 0
    n_train: int = Field(default=50, ge=1)
    n_test: int = Field(default=30, ge=1)
    parallel: bool = False


class GridRow(BaseModel):
    family: str
    framework: str
    labels: str
    param_count: int | None
    avg_l2: float | None
    avg_fidelity: float | None
    status: str


class GridResponse(BaseModel):
    results_csv: str
    rows: list[GridRow]
