"""End-to-end pipelines shared by the service and the CLI: evaluation of a
predictor on a held-out split and the out-of-sample top-path experiment."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .baselines import fit_akom, fit_net, fit_rnd
from .model import fit_model
from .paths import PathMultiset, derive_topology, split_train_validation
from .prediction import (
    EvaluationReport,
    FallbackPolicy,
    ModelPredictor,
    RocCurve,
    cross_entropy_eval,
    top_path_roc,
)
from .selection import select_order

METHODS = ("mogen", "rnd", "net", "akom")


def build_predictor(train: PathMultiset, method: str, order: int | None, workers: int = 1):
    """Fit the requested predictor on the training multiset.

    For mogen/net/akom a missing order triggers AIC selection (mogen) or
    defaults to 1; rnd is parameter-free and reports order 0.
    """
    if method == "mogen":
        k = order
        if k is None:
            k = select_order(train, derive_topology(train), workers=workers).selected_order
        return ModelPredictor(fit_model(train, k, workers=workers)), k
    if method == "rnd":
        return fit_rnd(train), 0
    if method == "net":
        k = order if order is not None else 1
        return fit_net(train, k), k
    if method == "akom":
        k = order if order is not None else 1
        return fit_akom(train, k), k
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class EvaluationOutcome:
    method: str
    order: int
    report: EvaluationReport


def evaluate_method(
    s: PathMultiset,
    method: str = "mogen",
    order: int | None = None,
    train_fraction: float = 0.9,
    seed: int = 0,
    max_prefix: int = 6,
    workers: int = 1,
    fallback: bool = True,
) -> EvaluationOutcome:
    """Split the corpus, fit the method on the training part and score
    multi-prefix cross-entropy on the validation part."""
    train, validation = split_train_validation(s, train_fraction, seed)
    policy = FallbackPolicy.from_training(train) if fallback else None
    predictor, used_order = build_predictor(train, method, order, workers)
    report = cross_entropy_eval(
        predictor, validation, max_prefix=max_prefix, fallback=policy, workers=workers
    )
    return EvaluationOutcome(method, used_order, report)


@dataclass(frozen=True)
class RocOutcome:
    order: int
    n_samples: int
    curve: RocCurve


def roc_experiment(
    s: PathMultiset,
    order: int | None = None,
    train_fraction: float = 0.99,
    seed: int = 0,
    n_samples: int | None = None,
    top_fraction: float = 0.10,
    workers: int = 1,
    max_length: int = 10_000,
) -> RocOutcome:
    """Fit on the training split, generate paths and score the ranking
    against the most frequent validation paths."""
    train, validation = split_train_validation(s, train_fraction, seed)
    k = order
    if k is None:
        k = select_order(train, derive_topology(train), workers=workers).selected_order
    model = fit_model(train, k, workers=workers)
    if n_samples is None:
        n_samples = 10 * validation.total_observations
    curve = top_path_roc(
        model,
        validation,
        rng=random.Random(seed),
        n_samples=n_samples,
        top_fraction=top_fraction,
        max_length=max_length,
    )
    return RocOutcome(k, n_samples, curve)
