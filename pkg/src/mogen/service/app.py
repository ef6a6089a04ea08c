"""FastAPI application wrapping the core package.

Endpoints mirror the CLI subcommands (stats, fit, select, evaluate,
generate, roc) and additionally keep fitted models in an in-memory registry
for interactive next-element prediction and sampling.
"""

from __future__ import annotations

import math
import random

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import MogenError
from ..model import (
    MultiOrderModel,
    fit_model,
    model_from_document,
    model_to_document,
)
from ..paths import PathMultiset, derive_topology, parse_ngram_file, summary_stats
from ..prediction import (
    END,
    FallbackPolicy,
    next_element_distribution,
    sample_corpus,
)
from ..selection import select_order
from ..workflows import evaluate_method, roc_experiment
from . import schemas
from .store import ModelStore


def _parse_corpus(payload: schemas.CorpusPayload) -> PathMultiset:
    try:
        return parse_ngram_file(
            payload.ngram, separator=payload.separator, weighted=payload.weighted
        )
    except MogenError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app(store: ModelStore | None = None) -> FastAPI:
    store = store if store is not None else ModelStore()
    app = FastAPI(title="multi-order path models", version=__version__)

    @app.exception_handler(MogenError)
    async def _domain_error(request, exc: MogenError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/stats", response_model=schemas.StatsResponse)
    def stats(req: schemas.StatsRequest) -> schemas.StatsResponse:
        s = _parse_corpus(req.corpus)
        st = summary_stats(s)
        return schemas.StatsResponse(
            total_paths=st.total_paths,
            unique_paths=st.unique_paths,
            mean_length=st.mean_length,
            median_length=st.median_length,
            min_length=st.min_length,
            max_length=st.max_length,
            nodes=st.node_count,
            links=st.link_count,
            density=st.density,
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest) -> schemas.FitResponse:
        s = _parse_corpus(req.corpus)
        model = fit_model(s, req.order, workers=req.workers)
        stored_id = store.put(model) if req.store else None
        return schemas.FitResponse(
            document=model_to_document(model),
            stored_id=stored_id,
            order=model.max_order,
            states=model.n_states,
            transitions=model.counts.n_transitions,
            total_observations=model.total_observations,
        )

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(req: schemas.SelectRequest) -> schemas.SelectResponse:
        s = _parse_corpus(req.corpus)
        report = select_order(
            s,
            derive_topology(s),
            k_max=req.max_order,
            workers=req.workers,
            binary_walks=req.binary_walks,
        )
        rows = [
            schemas.SelectRow(
                order=c.order,
                degrees_of_freedom=c.degrees_of_freedom,
                log_likelihood=c.log_likelihood,
                aic=c.aic,
                objective=c.objective,
                selected=c.order == report.selected_order,
            )
            for c in report.candidates
        ]
        return schemas.SelectResponse(rows=rows, selected_order=report.selected_order)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        s = _parse_corpus(req.corpus)
        outcome = evaluate_method(
            s,
            method=req.method,
            order=req.order,
            train_fraction=req.train_fraction,
            seed=req.seed,
            max_prefix=req.max_prefix,
            workers=req.workers,
            fallback=req.fallback,
        )
        report = outcome.report
        loss = None if math.isinf(report.loss_bits) else report.loss_bits
        return schemas.EvaluateResponse(
            method=outcome.method,
            order=outcome.order,
            loss_bits=loss,
            n_targets=report.n_targets,
            n_queries=report.n_queries,
            n_fallbacks=report.n_fallbacks,
            n_infinite=report.n_infinite,
        )

    def _resolve_model(req: schemas.GenerateRequest) -> MultiOrderModel:
        if req.document is not None:
            try:
                return model_from_document(req.document)
            except (KeyError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        if req.model_id is not None:
            model = store.get(req.model_id)
            if model is None:
                raise HTTPException(status_code=404, detail="unknown model id")
            return model
        raise HTTPException(status_code=400, detail="provide document or model_id")

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
        model = _resolve_model(req)
        sampled, truncated = sample_corpus(
            model, req.n_samples, random.Random(req.seed), req.max_length
        )
        return schemas.GenerateResponse(
            ngram=sampled.to_ngram(separator=req.separator, weighted=True),
            distinct_paths=len(sampled.paths),
            truncated=truncated,
        )

    @app.post("/roc", response_model=schemas.RocResponse)
    def roc(req: schemas.RocRequest) -> schemas.RocResponse:
        s = _parse_corpus(req.corpus)
        outcome = roc_experiment(
            s,
            order=req.order,
            train_fraction=req.train_fraction,
            seed=req.seed,
            n_samples=req.n_samples,
            top_fraction=req.top_fraction,
            workers=req.workers,
        )
        return schemas.RocResponse(
            points=list(outcome.curve.points),
            auc=outcome.curve.auc,
            n_positives=outcome.curve.n_positives,
            n_negatives=outcome.curve.n_negatives,
            order=outcome.order,
            n_samples=outcome.n_samples,
        )

    def _predict_with(
        model: MultiOrderModel, req: schemas.PredictRequest
    ) -> schemas.PredictResponse:
        vocab = model.vocabulary
        prefix = [vocab.id(label) for label in req.prefix]
        policy = FallbackPolicy.from_model(model) if req.fallback else None
        dist = next_element_distribution(model, prefix, fallback=policy)
        entries = [
            schemas.PredictionEntry(
                node=None if target == END else vocab.label(target),
                probability=probability,
            )
            for target, probability in dist.probabilities.items()
        ]
        return schemas.PredictResponse(
            entries=entries, provenance=dist.provenance, fallback=dist.fallback
        )

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict_document(req: schemas.PredictDocumentRequest) -> schemas.PredictResponse:
        try:
            model = model_from_document(req.document)
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return _predict_with(
            model, schemas.PredictRequest(prefix=req.prefix, fallback=req.fallback)
        )

    @app.get("/models", response_model=schemas.ModelListResponse)
    def list_models() -> schemas.ModelListResponse:
        infos = []
        for model_id in store.ids():
            model = store.get(model_id)
            if model is None:
                continue
            infos.append(
                schemas.StoredModelInfo(
                    model_id=model_id,
                    order=model.max_order,
                    nodes=len(model.vocabulary),
                    states=model.n_states,
                    total_observations=model.total_observations,
                )
            )
        return schemas.ModelListResponse(models=infos)

    def _stored(model_id: str) -> MultiOrderModel:
        model = store.get(model_id)
        if model is None:
            raise HTTPException(status_code=404, detail="unknown model id")
        return model

    @app.get("/models/{model_id}", response_model=schemas.StoredModelInfo)
    def model_info(model_id: str) -> schemas.StoredModelInfo:
        model = _stored(model_id)
        return schemas.StoredModelInfo(
            model_id=model_id,
            order=model.max_order,
            nodes=len(model.vocabulary),
            states=model.n_states,
            total_observations=model.total_observations,
        )

    @app.delete("/models/{model_id}")
    def delete_model(model_id: str) -> dict:
        if not store.delete(model_id):
            raise HTTPException(status_code=404, detail="unknown model id")
        return {"deleted": model_id}

    @app.post("/models/{model_id}/predict", response_model=schemas.PredictResponse)
    def predict(model_id: str, req: schemas.PredictRequest) -> schemas.PredictResponse:
        return _predict_with(_stored(model_id), req)

    @app.post("/models/{model_id}/sample", response_model=schemas.GenerateResponse)
    def sample(model_id: str, req: schemas.SampleRequest) -> schemas.GenerateResponse:
        model = _stored(model_id)
        sampled, truncated = sample_corpus(
            model, req.n_samples, random.Random(req.seed), req.max_length
        )
        return schemas.GenerateResponse(
            ngram=sampled.to_ngram(separator=req.separator, weighted=True),
            distinct_paths=len(sampled.paths),
            truncated=truncated,
        )

    return app


app = create_app()
