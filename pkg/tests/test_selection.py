import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mogen import (
    DegreesOfFreedomOverflowError,
    NetworkTopology,
    aic,
    dataset_log_likelihood,
    degrees_of_freedom,
    derive_topology,
    fit_model,
    select_order,
)
from mogen.selection import adjacency_power_sums
from mogen.synthetic import planted_corpus

from .conftest import corpus_from, fig_toy
from .oracles import count_walks
from .test_paths import corpora


def topo(n, edges):
    return NetworkTopology(n, frozenset(edges))


# -- degrees of freedom -------------------------------------------------------

def test_dof_chain():
    chain = topo(3, {(0, 1), (1, 2)})
    assert degrees_of_freedom(chain, 1) == 4
    assert degrees_of_freedom(chain, 2) == 5
    # A^3 of a 2-edge chain is zero: dof saturates
    assert degrees_of_freedom(chain, 3) == 5


def test_dof_empty_edges():
    assert degrees_of_freedom(topo(5, set()), 1) == 4
    assert degrees_of_freedom(topo(1, set()), 1) == 0


def test_dof_matches_walk_enumeration():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(2, 6)
        density = rng.uniform(0.2, 0.9)
        edges = {
            (i, j)
            for i in range(n)
            for j in range(n)
            if rng.random() < density
        }
        t = topo(n, edges)
        for k in range(1, 5):
            expected = sum(count_walks(n, edges, length) for length in range(1, k + 1))
            assert degrees_of_freedom(t, k) == expected + n - 1


def test_dof_binary_walks_variant():
    # complete graph with self-loops: every pair reachable at every length
    n = 4
    full = topo(n, {(i, j) for i in range(n) for j in range(n)})
    sums = adjacency_power_sums(full, 3, binary_walks=True)
    assert sums == [16, 16, 16]
    plain = adjacency_power_sums(full, 3)
    assert plain == [16, 64, 256]


def test_dof_overflow_raises():
    n = 10
    full = topo(n, {(i, j) for i in range(n) for j in range(n)})
    # entry sums are 10^(k+1); 64-bit range ends before k=19
    with pytest.raises(DegreesOfFreedomOverflowError):
        adjacency_power_sums(full, 25)
    # the clipped variant saturates instead of overflowing
    assert adjacency_power_sums(full, 25, binary_walks=True) == [100] * 25


# -- AIC ----------------------------------------------------------------------

def test_aic_pair_corpus(pair_corpus):
    t = derive_topology(pair_corpus)
    model = fit_model(pair_corpus, 1)
    assert aic(model, pair_corpus, t) == pytest.approx(8 + 4 * math.log(2), abs=1e-12)


def test_aic_deterministic_corpus(chain_corpus):
    t = derive_topology(chain_corpus)
    model = fit_model(chain_corpus, 2)
    # log-likelihood is zero, so AIC is twice the degrees of freedom
    assert aic(model, chain_corpus, t) == 2 * degrees_of_freedom(t, 2)


@settings(max_examples=30, deadline=None)
@given(corpora(), st.integers(1, 4))
def test_dof_nondecreasing_in_k(s, k):
    t = derive_topology(s)
    values = [degrees_of_freedom(t, i) for i in range(1, k + 1)]
    assert values == sorted(values)


# -- order selection ----------------------------------------------------------

def test_select_dependent_quartet():
    # start determines the exit: maximum order three is required
    s = fig_toy(20, 0, 0, 20, 0)
    report = select_order(s, derive_topology(s))
    assert report.selected_order == 3


def test_select_dependent_five_path_toy():
    s = fig_toy(20, 0, 0, 20, 20)
    report = select_order(s, derive_topology(s))
    assert report.selected_order == 3


def test_select_independent_five_path_toy():
    s = fig_toy(20, 20, 20, 20, 20)
    report = select_order(s, derive_topology(s))
    assert report.selected_order == 2


def test_select_first_order_process():
    s = planted_corpus(n_nodes=10, out_degree=3, order=1, n_paths=4000, seed=3)
    report = select_order(s, derive_topology(s), k_max=3)
    assert report.selected_order == 1


def test_report_consistency():
    s = fig_toy(20, 5, 5, 20, 10)
    t = derive_topology(s)
    report = select_order(s, t, k_max=3)
    assert [c.order for c in report.candidates] == [1, 2, 3]
    for c in report.candidates:
        model = fit_model(s, c.order)
        ll = dataset_log_likelihood(model, s)
        assert c.log_likelihood == pytest.approx(ll, rel=1e-12)
        assert c.degrees_of_freedom == degrees_of_freedom(t, c.order)
        assert c.aic == pytest.approx(2 * c.degrees_of_freedom - 2 * ll, abs=1e-12)
        walk_sum = c.degrees_of_freedom - (t.node_count - 1)
        assert c.objective == pytest.approx(walk_sum - ll, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(corpora())
def test_argmin_equivalence(s):
    t = derive_topology(s)
    report = select_order(s, t, k_max=min(s.max_length + 1, 4))
    by_objective = min(report.candidates, key=lambda c: (c.objective, c.order))
    by_aic = min(report.candidates, key=lambda c: (c.aic, c.order))
    assert report.selected_order == by_objective.order == by_aic.order


def test_selection_deterministic():
    s = fig_toy(20, 5, 5, 20, 10)
    t = derive_topology(s)
    assert select_order(s, t, k_max=3) == select_order(s, t, k_max=3)


def test_k_max_default_is_capped():
    s = corpus_from(("A,B", 4), ("B,A", 4))
    report = select_order(s, derive_topology(s))
    assert [c.order for c in report.candidates] == [1, 2]

    long_path = corpus_from((",".join("ABABABAB"), 2), ("A,B", 1))
    report_long = select_order(long_path, derive_topology(long_path))
    assert report_long.candidates[-1].order == 6


def test_tie_breaks_toward_smaller_order():
    # single deterministic path: log-likelihood 0 at every order; the
    # adjacency walk sums vanish past the path length, producing exact ties
    s = corpus_from(("A,B", 3))
    report = select_order(s, derive_topology(s), k_max=3)
    assert report.candidates[1].objective == report.candidates[2].objective
    assert report.selected_order == 1
