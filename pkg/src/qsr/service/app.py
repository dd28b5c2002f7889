"""FastAPI service wrapping training, evaluation, reconstruction, and grids.

Handlers run synchronously (training a full configuration takes seconds
to minutes) and write artifacts to the server-local filesystem paths
named in each request.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__, experiments
from ..dataset import DatasetError
from ..training import TrainingDivergedError
from . import schemas


def _experiment_config(req: schemas.TrainRequest) -> experiments.ExperimentConfig:
    return experiments.ExperimentConfig(
        family=req.family,
        labels=frozenset(req.labels),
        output_dir=req.output_dir,
        framework=req.framework,
        dataset=req.dataset,
        depth=req.depth,
        loss=req.loss,
        loss_domain=req.loss_domain,
        epochs=req.epochs,
        learning_rate=req.learning_rate,
        optimizer=req.optimizer,
        gradient_engine=req.gradient_engine,
        seed=req.seed,
        n_train=req.n_train,
        n_test=req.n_test,
        eval_every=req.eval_every,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="qsr", version=__version__)

    def client_error(exc: Exception) -> HTTPException:
        return HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/train", response_model=schemas.TrainResponse)
    def train_endpoint(req: schemas.TrainRequest) -> dict:
        try:
            summary = experiments.run_experiment(_experiment_config(req))
        except (ValueError, OSError, DatasetError, TrainingDivergedError) as exc:
            raise client_error(exc) from exc
        summary["summary"] = experiments.summary_line(summary)
        return summary

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_endpoint(req: schemas.EvalRequest) -> dict:
        try:
            return experiments.run_eval(
                checkpoint=req.checkpoint,
                dataset=req.dataset,
                labels=frozenset(req.labels),
                seed=req.seed,
                n_train=req.n_train,
                n_test=req.n_test,
                framework=req.framework,
            )
        except (ValueError, OSError, DatasetError) as exc:
            raise client_error(exc) from exc

    @app.post("/reconstruct", response_model=schemas.ReconstructResponse)
    def reconstruct_endpoint(req: schemas.ReconstructRequest) -> dict:
        try:
            return experiments.run_reconstruct(
                checkpoint=req.checkpoint,
                dataset=req.dataset,
                indices=req.indices,
                output_dir=req.output_dir,
                framework=req.framework,
            )
        except (ValueError, OSError, DatasetError) as exc:
            raise client_error(exc) from exc

    @app.post("/grid", response_model=schemas.GridResponse)
    def grid_endpoint(req: schemas.GridRequest) -> dict:
        base = experiments.ExperimentConfig(
            family="circuit1",  # placeholder, replaced per cell
            labels=frozenset({0}),
            output_dir=req.output_dir,
            dataset=req.dataset,
            depth=req.depth,
            loss=req.loss,
            loss_domain=req.loss_domain,
            epochs=req.epochs,
            learning_rate=req.learning_rate,
            optimizer=req.optimizer,
            gradient_engine=req.gradient_engine,
            seed=req.seed,
            n_train=req.n_train,
            n_test=req.n_test,
        )
        cells = [
            experiments.GridCell(cell.family, frozenset(cell.labels)) for cell in req.cells
        ]
        try:
            return experiments.run_grid(base, cells, req.output_dir, parallel=req.parallel)
        except (ValueError, OSError, DatasetError) as exc:
            raise client_error(exc) from exc

    return app


app = create_app()
