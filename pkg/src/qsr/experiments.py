"""Experiment orchestration: config files, artifact emission, and grids.

Config files are flat `key = value` text; `#` starts a comment.  Grid
files additionally repeat `cell = family:labels` lines, e.g.
`cell = circuit2:0,1`.  Every run writes a manifest (config echo, seed,
code version) next to its artifacts, and training runs emit a
checkpoint, an epoch-loss CSV, and a test-metrics CSV.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__
from .ansatz import CircuitSpec, load_checkpoint, param_count, save_checkpoint
from .dataset import bundled_digits_path, load_digits_csv, make_split
from .encoding import downsample, normalize, write_image_csv, write_pgm
from .pipelines import qae_reconstruct, qnn_forward
from .training import (
    DEFAULT_LOSS_DOMAIN,
    TrainConfig,
    evaluate,
    train,
    write_loss_csv,
    write_metrics_csv,
)

log = logging.getLogger(__name__)

DATASET_BUILTIN = "builtin"
PIPELINE_QUBITS = 6

CHECKPOINT_FILE = "checkpoint.txt"
LOSSES_FILE = "losses.csv"
METRICS_FILE = "test_metrics.csv"
MANIFEST_FILE = "manifest.txt"
GRID_RESULTS_FILE = "results.csv"

GRID_CSV_HEADER = "family,framework,labels,param_count,avg_l2,avg_fidelity,status"


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    labels: frozenset[int]
    output_dir: str
    framework: str = ""  # empty means: qae family -> qae, otherwise qnn
    dataset: str = DATASET_BUILTIN
    depth: int = 40
    loss: str = "l2"
    loss_domain: str = DEFAULT_LOSS_DOMAIN
    epochs: int = 150
    learning_rate: float = 0.05
    optimizer: str = "adam"
    gradient_engine: str = "adjoint"
    seed: int = 0
    n_train: int = 50
    n_test: int = 30
    eval_every: int = 0

    def resolved_framework(self) -> str:
        if self.framework:
            return self.framework
        return "qae" if self.family == "qae" else "qnn"


def parse_config_file(path) -> dict:
    """Parse `key = value` lines; repeated `cell` keys collect into a list."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    out: dict = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"{path}: line {lineno}: empty key")
        if key == "cell":
            out.setdefault("cell", []).append(value)
        else:
            out[key] = value
    return out


def parse_labels(value) -> frozenset[int]:
    if isinstance(value, str):
        parts = [p for p in value.replace("&", ",").split(",") if p.strip()]
    else:
        parts = list(value)
    if not parts:
        raise ValueError("empty label set")
    return frozenset(int(p) for p in parts)


def labels_tag(labels) -> str:
    return "&".join(str(v) for v in sorted(labels))


def resolve_dataset(dataset: str) -> Path:
    if dataset in ("", DATASET_BUILTIN):
        return bundled_digits_path()
    path = Path(dataset)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    return path


def write_manifest(path, mapping: dict) -> None:
    lines = [f"{key} = {mapping[key]}" for key in sorted(mapping)]
    lines.append(f"version = {__version__}")
    Path(path).write_text("\n".join(lines) + "\n")


def _config_echo(cfg: ExperimentConfig) -> dict:
    echo = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        echo[f.name] = labels_tag(value) if f.name == "labels" else value
    echo["framework"] = cfg.resolved_framework()
    return echo


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Train one configuration, write its artifacts, return the summary."""
    dataset_path = resolve_dataset(cfg.dataset)
    samples = load_digits_csv(dataset_path)
    split = make_split(samples, cfg.labels, cfg.n_train, cfg.n_test, cfg.seed)
    spec = CircuitSpec(cfg.family, PIPELINE_QUBITS, cfg.depth)
    framework = cfg.resolved_framework()
    train_cfg = TrainConfig(
        circuit=spec,
        framework=framework,
        loss=cfg.loss,
        loss_domain=cfg.loss_domain,
        epochs=cfg.epochs,
        learning_rate=cfg.learning_rate,
        optimizer=cfg.optimizer,
        seed=cfg.seed,
        gradient_engine=cfg.gradient_engine,
        eval_every=cfg.eval_every,
    )
    report = train(train_cfg, split)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / CHECKPOINT_FILE
    losses_csv = out_dir / LOSSES_FILE
    metrics_csv = out_dir / METRICS_FILE
    manifest = out_dir / MANIFEST_FILE
    save_checkpoint(checkpoint, spec, report.final_params)
    write_loss_csv(losses_csv, report.epoch_losses)
    write_metrics_csv(metrics_csv, report.test_metrics)
    write_manifest(manifest, _config_echo(cfg))

    return {
        "family": cfg.family,
        "framework": framework,
        "labels": sorted(cfg.labels),
        "param_count": param_count(spec),
        "avg_l2": report.avg_l2,
        "avg_fidelity": report.avg_fidelity,
        "seed": cfg.seed,
        "epochs": cfg.epochs,
        "skipped_train": report.skipped_train,
        "skipped_test": report.skipped_test,
        "artifacts": {
            "checkpoint": str(checkpoint),
            "losses_csv": str(losses_csv),
            "metrics_csv": str(metrics_csv),
            "manifest": str(manifest),
        },
    }


def summary_line(summary: dict) -> str:
    return (
        f"{summary['family']},{summary['framework']},"
        f"{summary['avg_l2']:.6g},{summary['avg_fidelity']:.6g},{summary['param_count']}"
    )


def run_eval(
    checkpoint: str,
    dataset: str = DATASET_BUILTIN,
    labels=(0,),
    seed: int = 0,
    n_train: int = 50,
    n_test: int = 30,
    framework: str = "",
) -> dict:
    """Evaluate a checkpoint on the test half of the seeded split."""
    spec, theta = load_checkpoint(checkpoint)
    if spec.num_qubits != PIPELINE_QUBITS:
        raise ValueError(
            f"checkpoint is for {spec.num_qubits} qubits, pipeline needs {PIPELINE_QUBITS}"
        )
    samples = load_digits_csv(resolve_dataset(dataset))
    label_set = parse_labels(labels) if not isinstance(labels, frozenset) else labels
    split = make_split(samples, label_set, n_train, n_test, seed)
    fw = framework or ("qae" if spec.family == "qae" else "qnn")
    avg_l2, avg_fid, rows = evaluate(spec, theta, split.test, fw)
    return {
        "family": spec.family,
        "framework": fw,
        "param_count": param_count(spec),
        "avg_l2": avg_l2,
        "avg_fidelity": avg_fid,
        "samples": [row._asdict() for row in rows],
    }


def run_reconstruct(
    checkpoint: str,
    dataset: str = DATASET_BUILTIN,
    indices=(0,),
    output_dir: str = ".",
    framework: str = "",
) -> dict:
    """Emit low-res input, reconstruction, and reference images per index.

    Each image is written both as ASCII PGM (rescaled by its max) and as a
    CSV of the unscaled normalized values.
    """
    spec, theta = load_checkpoint(checkpoint)
    if spec.num_qubits != PIPELINE_QUBITS:
        raise ValueError(
            f"checkpoint is for {spec.num_qubits} qubits, pipeline needs {PIPELINE_QUBITS}"
        )
    samples = load_digits_csv(resolve_dataset(dataset))
    fw = framework or ("qae" if spec.family == "qae" else "qnn")
    if fw == "qae" and spec.family != "qae":
        raise ValueError("the qae framework requires a qae checkpoint")
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emitted = []
    for index in indices:
        index = int(index)
        if not 0 <= index < len(samples):
            raise ValueError(f"sample index {index} out of range [0, {len(samples)})")
        sample = samples[index]
        if fw == "qae":
            recon, _ = qae_reconstruct(sample, spec, theta)
        else:
            recon, _ = qnn_forward(sample, spec, theta)
        images = {
            "input": normalize(downsample(sample.image)),
            "recon": recon,
            "reference": normalize(sample.image),
        }
        files = []
        for name, img in images.items():
            base = out_dir / f"sample_{index:04d}_{name}"
            write_pgm(base.with_suffix(".pgm"), img)
            write_image_csv(base.with_suffix(".csv"), img)
            files.extend([str(base.with_suffix(".pgm")), str(base.with_suffix(".csv"))])
        emitted.append({"index": index, "label": sample.label, "files": files})
    write_manifest(
        out_dir / MANIFEST_FILE,
        {
            "checkpoint": checkpoint,
            "dataset": str(resolve_dataset(dataset)),
            "framework": fw,
            "indices": ",".join(str(int(i)) for i in indices),
        },
    )
    return {"output_dir": str(out_dir), "samples": emitted}


@dataclass(frozen=True)
class GridCell:
    family: str
    labels: frozenset[int]


def parse_grid_cells(values) -> list[GridCell]:
    cells = []
    for value in values:
        if isinstance(value, GridCell):
            cells.append(value)
            continue
        text = str(value)
        if ":" not in text:
            raise ValueError(f"grid cell {text!r} must look like 'family:labels'")
        family, labels = text.split(":", 1)
        cells.append(GridCell(family.strip(), parse_labels(labels)))
    return cells


def _grid_cell_run(cfg: ExperimentConfig) -> dict:
    return run_experiment(cfg)


def run_grid(base: ExperimentConfig, cells, output_dir: str, parallel: bool = False) -> dict:
    """Run each (family, labels) cell independently and write results.csv.

    A failing cell is recorded in its row and does not stop the grid.
    """
    cells = parse_grid_cells(cells)
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = []
    for i, cell in enumerate(cells):
        cell_dir = out_dir / f"cell_{i:02d}_{cell.family}_{labels_tag(cell.labels)}"
        configs.append(
            replace(
                base,
                family=cell.family,
                labels=cell.labels,
                framework="",
                output_dir=str(cell_dir),
            )
        )

    results: list[dict | Exception] = [None] * len(configs)
    if parallel and len(configs) > 1:
        with ProcessPoolExecutor() as pool:
            futures = [pool.submit(_grid_cell_run, cfg) for cfg in configs]
            for i, future in enumerate(futures):
                try:
                    results[i] = future.result()
                except Exception as exc:  # recorded per row
                    results[i] = exc
    else:
        for i, cfg in enumerate(configs):
            try:
                results[i] = _grid_cell_run(cfg)
            except Exception as exc:
                results[i] = exc

    rows = []
    for cell, result in zip(cells, results):
        if isinstance(result, Exception):
            log.warning("grid cell %s/%s failed: %s", cell.family, labels_tag(cell.labels), result)
            rows.append(
                {
                    "family": cell.family,
                    "framework": "qae" if cell.family == "qae" else "qnn",
                    "labels": labels_tag(cell.labels),
                    "param_count": None,
                    "avg_l2": None,
                    "avg_fidelity": None,
                    "status": f"error: {result}",
                }
            )
        else:
            rows.append(
                {
                    "family": result["family"],
                    "framework": result["framework"],
                    "labels": labels_tag(result["labels"]),
                    "param_count": result["param_count"],
                    "avg_l2": result["avg_l2"],
                    "avg_fidelity": result["avg_fidelity"],
                    "status": "ok",
                }
            )
    results_csv = out_dir / GRID_RESULTS_FILE
    header = GRID_CSV_HEADER.split(",")
    with open(results_csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    row["family"],
                    row["framework"],
                    row["labels"],
                    "" if row["param_count"] is None else row["param_count"],
                    "" if row["avg_l2"] is None else f"{row['avg_l2']:.17g}",
                    "" if row["avg_fidelity"] is None else f"{row['avg_fidelity']:.17g}",
                    row["status"],
                ]
            )
    return {"results_csv": str(results_csv), "rows": rows}
