"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class CorpusPayload(BaseModel):
    """An ngram corpus shipped inline: one path per non-empty line,
    separator-joined labels, optional trailing integer count."""

    ngram: str
    separator: str = ","
    weighted: bool = False


class StatsRequest(BaseModel):
    corpus: CorpusPayload


class StatsResponse(BaseModel):
    total_paths: int
    unique_paths: int
    mean_length: float
    median_length: float
    min_length: int
    max_length: int
    nodes: int
    links: int
    density: float


class FitRequest(BaseModel):
    corpus: CorpusPayload
    order: int = Field(ge=1)
    workers: int = Field(default=1, ge=1)
    store: bool = False


class FitResponse(BaseModel):
    document: dict
    stored_id: str | None = None
    order: int
    states: int
    transitions: int
    total_observations: int


class SelectRequest(BaseModel):
    corpus: CorpusPayload
    max_order: int | None = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)
    binary_walks: bool = False


class SelectRow(BaseModel):
    order: int
    degrees_of_freedom: int
    log_likelihood: float
    aic: float
    objective: float
    selected: bool


class SelectResponse(BaseModel):
    rows: list[SelectRow]
    selected_order: int


class EvaluateRequest(BaseModel):
    corpus: CorpusPayload
    method: Literal["mogen", "rnd", "net", "akom"] = "mogen"
    order: int | None = Field(default=None, ge=1)
    train_fraction: float = Field(default=0.9, gt=0.0, lt=1.0)
    seed: int = 0
    max_prefix: int = Field(default=6, ge=1)
    workers: int = Field(default=1, ge=1)
    fallback: bool = True


class EvaluateResponse(BaseModel):
    method: str
    order: int
    loss_bits: float | None
    n_targets: int
    n_queries: int
    n_fallbacks: int
    n_infinite: int


class GenerateRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    document: dict | None = None
    model_id: str | None = None
    n_samples: int = Field(ge=1)
    seed: int = 0
    max_length: int = Field(default=10_000, ge=1)
    separator: str = ","


class GenerateResponse(BaseModel):
    ngram: str
    distinct_paths: int
    truncated: int


class RocRequest(BaseModel):
    corpus: CorpusPayload
    order: int | None = Field(default=None, ge=1)
    train_fraction: float = Field(default=0.99, gt=0.0, lt=1.0)
    seed: int = 0
    n_samples: int | None = Field(default=None, ge=1)
    top_fraction: float = Field(default=0.10, gt=0.0, lt=1.0)
    workers: int = Field(default=1, ge=1)


class RocResponse(BaseModel):
    points: list[tuple[float, float]]
    auc: float
    n_positives: int
    n_negatives: int
    order: int
    n_samples: int


class PredictRequest(BaseModel):
    prefix: list[str] = []
    fallback: bool = True


class PredictDocumentRequest(BaseModel):
    document: dict
    prefix: list[str] = []
    fallback: bool = True


class PredictionEntry(BaseModel):
    node: str | None  # None predicts path termination
    probability: float


class PredictResponse(BaseModel):
    entries: list[PredictionEntry]
    provenance: str
    fallback: bool


class SampleRequest(BaseModel):
    n_samples: int = Field(ge=1)
    seed: int = 0
    max_length: int = Field(default=10_000, ge=1)
    separator: str = ","


class StoredModelInfo(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    order: int
    nodes: int
    states: int
    total_observations: int


class ModelListResponse(BaseModel):
    models: list[StoredModelInfo]
