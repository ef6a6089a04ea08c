"""AIC-based selection of the optimal maximum order.

Degrees of freedom are derived from powers of the binary adjacency matrix
of the underlying network: entry sums of the k-th power count walks of
length k, so structural zeros never contribute free parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreesOfFreedomOverflowError
from .model import (
    MultiOrderModel,
    _fit_counts_pooled,
    corpus_items,
    counts_log_likelihood,
    dataset_log_likelihood,
)
from .parallel import ChunkPool
from .paths import NetworkTopology, PathMultiset

# float64 shadow threshold: beyond this, int64 matrix products may wrap.
_SATURATION_LIMIT = float(2**62)


def adjacency_power_sums(
    topo: NetworkTopology, k_max: int, binary_walks: bool = False
) -> list[int]:
    """Entry sums of the first ``k_max`` powers of the adjacency matrix.

    ``binary_walks=True`` clips each power to 0/1 before summing (counting
    node pairs connected by at least one walk instead of walk multiplicity).
    Raises :class:`DegreesOfFreedomOverflowError` instead of wrapping when
    walk counts leave the 64-bit range.
    """
    if k_max < 1:
        raise ValueError(f"maximum order must be >= 1, got {k_max}")
    a = topo.adjacency_matrix()
    sums: list[int] = []

    if binary_walks:
        # propagate reachability in boolean space; never overflows
        reach = a > 0
        for _ in range(k_max):
            sums.append(int(np.count_nonzero(reach)))
            reach = (reach.astype(np.int64) @ a) > 0
        return sums

    a_float = a.astype(np.float64)
    power = a
    power_float = a_float
    for _ in range(k_max):
        if float(power_float.max(initial=0.0)) > _SATURATION_LIMIT:
            raise DegreesOfFreedomOverflowError(
                "walk counts exceed the 64-bit integer range; "
                "reduce the maximum order or use binary_walks"
            )
        sums.append(int(power.sum()))
        power = power @ a
        power_float = power_float @ a_float
    return sums


def degrees_of_freedom(
    topo: NetworkTopology, k: int, binary_walks: bool = False
) -> int:
    """Free parameters of a maximum-order-k model on this topology.

    Sum of adjacency-power entry sums for orders 1..k plus |V| - 1 for the
    start-state distribution.
    """
    return sum(adjacency_power_sums(topo, k, binary_walks)) + topo.node_count - 1


def aic(model: MultiOrderModel, s: PathMultiset, topo: NetworkTopology) -> float:
    """2 * degrees_of_freedom - 2 * log-likelihood (natural log)."""
    d = degrees_of_freedom(topo, model.max_order)
    return 2.0 * d - 2.0 * dataset_log_likelihood(model, s)


@dataclass(frozen=True)
class OrderCandidate:
    order: int
    degrees_of_freedom: int
    log_likelihood: float
    aic: float
    objective: float


@dataclass(frozen=True)
class OrderSelectionReport:
    candidates: tuple[OrderCandidate, ...]
    selected_order: int

    def candidate(self, order: int) -> OrderCandidate:
        for c in self.candidates:
            if c.order == order:
                return c
        raise KeyError(order)


def select_order(
    s: PathMultiset,
    topo: NetworkTopology,
    k_max: int | None = None,
    workers: int = 1,
    binary_walks: bool = False,
) -> OrderSelectionReport:
    """Fit orders 1..k_max on ``s`` and pick the argmin of the selection
    objective (walk-count sum minus log-likelihood); ties go to the smaller
    order.  The full AIC is recorded alongside for transparency.

    ``k_max`` defaults to min(max path length, 6).
    """
    if k_max is None:
        k_max = min(s.max_length, 6)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")

    power_sums = adjacency_power_sums(topo, k_max, binary_walks)
    n_const = topo.node_count - 1

    candidates = []
    best_order = None
    best_objective = None
    # one worker pool serves every per-order fit; the in-sample likelihood
    # follows from the count table in closed form
    with ChunkPool(corpus_items(s), workers) as pool:
        for k in range(1, k_max + 1):
            counts = _fit_counts_pooled(pool, k, s.vocabulary, s.total_observations)
            log_likelihood = counts_log_likelihood(counts)
            walk_sum = sum(power_sums[:k])
            dof = walk_sum + n_const
            objective = walk_sum - log_likelihood
            candidates.append(
                OrderCandidate(
                    order=k,
                    degrees_of_freedom=dof,
                    log_likelihood=log_likelihood,
                    aic=2.0 * dof - 2.0 * log_likelihood,
                    objective=objective,
                )
            )
            if best_objective is None or objective < best_objective:
                best_objective = objective
                best_order = k
    return OrderSelectionReport(tuple(candidates), best_order)
