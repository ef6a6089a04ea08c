import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mogen import (
    END,
    FallbackPolicy,
    MissingStateError,
    ModelPredictor,
    PathMultiset,
    UnknownNodeError,
    Vocabulary,
    cross_entropy_eval,
    fit_model,
    fit_net,
    next_element_distribution,
    path_log_likelihood,
    predict_net,
    roc_from_ranking,
    sample_corpus,
    sample_path,
    top_path_roc,
)
from mogen.model import iter_complete_paths
from mogen.prediction import PathSampler

from .conftest import corpus_from, fig_toy
from .test_paths import corpora


# -- next-element distributions -----------------------------------------------

def test_next_element_examples(pair_corpus):
    model = fit_model(pair_corpus, 1)
    a, b, c = range(3)

    dist = next_element_distribution(model, [a])
    assert dist.probabilities == {b: 0.5, c: 0.5}
    assert not dist.fallback

    empty = next_element_distribution(model, [])
    assert empty.probabilities == {a: 1.0}
    assert empty.provenance == "start"

    model_ab = fit_model(corpus_from(("A,B", 3)), 1)
    dist_b = next_element_distribution(model_ab, [1])
    assert dist_b.probabilities == {END: 1.0}


def test_prefix_truncated_to_max_order(chain_corpus):
    model = fit_model(chain_corpus, 2)
    a, c, d, e = range(4)
    # prefix longer than K: only the last two nodes key the lookup
    dist = next_element_distribution(model, [a, c, d])
    assert dist.probabilities == {e: 1.0}
    assert dist.provenance == "order-2"
    assert not dist.fallback


def test_fallback_tiers(chain_corpus):
    model = fit_model(chain_corpus, 4)
    policy = FallbackPolicy.from_training(chain_corpus)
    a, c, d, e = range(4)

    # (C,D) and (D) are not states of a growing-prefix-only model, so the
    # lookup backs off to the start row
    dist = next_element_distribution(model, [c, d], fallback=policy)
    assert dist.provenance == "start"
    assert dist.fallback
    assert dist.probabilities == {a: 1.0}

    # an unknown-node prefix errors out
    with pytest.raises(UnknownNodeError):
        next_element_distribution(model, [99], fallback=policy)


def test_suffix_shortening_provenance():
    s = corpus_from(("A,B,C", 2), ("B,C", 1))
    model = fit_model(s, 2)
    a, b, c = range(3)
    # state (A,B) exists; querying [C,B]: (C,B) absent -> suffix (B) exists
    dist = next_element_distribution(model, [c, b], fallback=FallbackPolicy.from_training(s))
    assert dist.provenance == "order-1"
    assert dist.fallback


def test_missing_state_without_policy():
    s = corpus_from(("A,B,C", 2))
    net = fit_net(s, 2)
    with pytest.raises(MissingStateError):
        predict_net(net, [0], fallback=None)


def test_policy_smoothed_row(pair_corpus):
    policy = FallbackPolicy.from_training(pair_corpus)
    row = policy.smoothed_row()
    # node visits: A twice, B once, C once (N=4); m=2
    assert row[END] == pytest.approx(2 / 6)
    assert row[0] == pytest.approx(2 / 6)
    assert row[1] == pytest.approx(1 / 6)
    assert math.fsum(row.values()) == pytest.approx(1.0, abs=1e-12)


def test_policy_from_model_matches_training():
    s = fig_toy(10, 5, 3, 10, 7)
    model = fit_model(s, 3)
    from_train = FallbackPolicy.from_training(s)
    from_model = FallbackPolicy.from_model(model)
    assert from_model.node_counts == from_train.node_counts
    assert from_model.total_node_visits == from_train.total_node_visits
    assert from_model.total_paths == from_train.total_paths


@settings(max_examples=40, deadline=None)
@given(corpora(), st.integers(1, 4), st.integers(0, 3))
def test_distribution_sums_to_one(s, k, prefix_len):
    model = fit_model(s, k)
    policy = FallbackPolicy.from_training(s)
    rng = random.Random(prefix_len)
    nodes = [rng.randrange(len(s.vocabulary)) for _ in range(prefix_len)]
    dist = next_element_distribution(model, nodes, fallback=policy)
    assert math.fsum(dist.probabilities.values()) == pytest.approx(1.0, abs=1e-12)


# -- cross-entropy evaluation -------------------------------------------------

def test_eval_single_node_corpus_is_zero():
    s = corpus_from(("A", 5))
    for k in (1, 2):
        model = fit_model(s, k)
        report = cross_entropy_eval(
            ModelPredictor(model), s, fallback=FallbackPolicy.from_training(s)
        )
        assert report.loss_bits == 0.0
        assert report.n_fallbacks == 0


def test_eval_deterministic_chain_first_order(chain_corpus):
    model = fit_model(chain_corpus, 1)
    report = cross_entropy_eval(
        ModelPredictor(model),
        chain_corpus,
        fallback=FallbackPolicy.from_training(chain_corpus),
    )
    assert report.loss_bits == 0.0


class UniformPredictor:
    """Assigns 1/n to every node and the terminal regardless of prefix."""

    method = "uniform"

    def __init__(self, vocabulary: Vocabulary):
        self.vocabulary = vocabulary
        n = len(vocabulary) + 1
        self._row = {i: 1.0 / n for i in range(len(vocabulary))}
        self._row[END] = 1.0 / n

    def candidate_rows(self, prefix):
        yield "uniform", False, self._row


def test_eval_uniform_predictor_analytic():
    s = fig_toy(4, 3, 2, 1, 5)
    predictor = UniformPredictor(s.vocabulary)
    report = cross_entropy_eval(predictor, s)
    assert report.loss_bits == pytest.approx(math.log2(len(s.vocabulary) + 1), abs=1e-12)


def test_eval_pair_corpus_hand_computed(pair_corpus):
    model = fit_model(pair_corpus, 1)
    report = cross_entropy_eval(
        ModelPredictor(model),
        pair_corpus,
        fallback=FallbackPolicy.from_training(pair_corpus),
    )
    # per observation: start target costs 0, middle target costs 1 bit,
    # terminal targets cost 0 -> mean over six targets is 1/3
    assert report.loss_bits == pytest.approx(1 / 3, abs=1e-12)
    assert report.n_targets == 6
    assert report.n_queries == 8
    assert report.n_infinite == 0


def test_eval_weight_bookkeeping():
    s = corpus_from(("A,B,C,D", 3), ("B,C", 2), ("A", 1))
    model = fit_model(s, 2)
    report = cross_entropy_eval(
        ModelPredictor(model), s, fallback=FallbackPolicy.from_training(s)
    )
    assert report.n_targets == 3 * 5 + 2 * 3 + 1 * 2
    # queries: per target min(max_prefix, history) prefixes, one for position 1;
    # the terminal target of a length-l path has history l
    expected_queries = 3 * (1 + 1 + 2 + 3 + 4) + 2 * (1 + 1 + 2) + 1 * (1 + 1)
    assert report.n_queries == expected_queries


def test_eval_max_prefix_caps_queries():
    s = corpus_from((",".join("ABCDEFGH"), 1))
    model = fit_model(s, 2)
    policy = FallbackPolicy.from_training(s)
    short = cross_entropy_eval(ModelPredictor(model), s, max_prefix=2, fallback=policy)
    long = cross_entropy_eval(ModelPredictor(model), s, max_prefix=6, fallback=policy)
    assert short.n_queries < long.n_queries
    # l=8: position 1 plus capped prefixes for positions 2..9
    assert short.n_queries == 1 + 1 + 2 * 7
    with pytest.raises(ValueError):
        cross_entropy_eval(ModelPredictor(model), s, max_prefix=0, fallback=policy)


def test_eval_infinite_loss_cases():
    vocab = Vocabulary(["A", "B", "Z"])
    train = PathMultiset.from_sequences([(["A", "B"], 4)], vocabulary=vocab)
    val = PathMultiset.from_sequences([(["A", "Z"], 1)], vocabulary=vocab)
    model = fit_model(train, 1)
    policy = FallbackPolicy.from_training(train)

    with_policy = cross_entropy_eval(ModelPredictor(model), val, fallback=policy)
    assert math.isinf(with_policy.loss_bits)
    assert with_policy.n_infinite > 0

    strict = cross_entropy_eval(ModelPredictor(model), val, fallback=None)
    assert math.isinf(strict.loss_bits)
    assert strict.n_infinite >= with_policy.n_infinite


def test_eval_worker_invariance():
    s = fig_toy(8, 5, 4, 3, 6)
    model = fit_model(s, 2)
    policy = FallbackPolicy.from_training(s)
    serial = cross_entropy_eval(ModelPredictor(model), s, fallback=policy, workers=1)
    parallel = cross_entropy_eval(ModelPredictor(model), s, fallback=policy, workers=3)
    assert serial == parallel


# -- sampling -----------------------------------------------------------------

def test_sample_deterministic_chain(chain_corpus):
    model = fit_model(chain_corpus, 2)
    rng = random.Random(0)
    for _ in range(5):
        sampled = sample_path(model, rng)
        assert sampled.nodes == (0, 1, 2, 3)
        assert not sampled.truncated


def test_sample_seed_reproducible():
    s = fig_toy(10, 5, 3, 10, 7)
    model = fit_model(s, 2)
    first = [sample_path(model, random.Random(99)).nodes for _ in range(1)]
    again = [sample_path(model, random.Random(99)).nodes for _ in range(1)]
    assert first == again
    corpus_a, _ = sample_corpus(model, 50, random.Random(7))
    corpus_b, _ = sample_corpus(model, 50, random.Random(7))
    assert [(p.nodes, p.frequency) for p in corpus_a.paths] == [
        (p.nodes, p.frequency) for p in corpus_b.paths
    ]


def test_sample_truncation_guard(chain_corpus):
    model = fit_model(chain_corpus, 2)
    sampled = sample_path(model, random.Random(0), max_length=2)
    assert sampled.truncated
    assert len(sampled.nodes) == 2


def test_sampler_frequencies_match_exact_probabilities():
    s = fig_toy(10, 5, 3, 10, 7)
    model = fit_model(s, 2)
    exact = dict(iter_complete_paths(model))
    sampler = PathSampler(model)
    rng = random.Random(1234)
    counts: dict[tuple[int, ...], int] = {}
    n = 4000
    for _ in range(n):
        nodes = sampler.sample(rng).nodes
        counts[nodes] = counts.get(nodes, 0) + 1
    support = set(exact) | set(counts)
    l1 = math.fsum(abs(exact.get(p, 0.0) - counts.get(p, 0) / n) for p in support)
    assert l1 < 0.1


# -- ROC ----------------------------------------------------------------------

def test_roc_single_positive_perfect(chain_corpus):
    model = fit_model(chain_corpus, 2)
    curve = top_path_roc(model, chain_corpus, rng=random.Random(0), n_samples=50)
    assert curve.auc == 1.0
    assert curve.n_positives == 1
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)


def test_roc_random_ranking_near_half():
    s = PathMultiset.from_sequences(
        ([f"p{i}", f"q{i}"], 40 - i) for i in range(40)
    )
    universe = [p.nodes for p in s.paths]
    aucs = []
    for seed in range(20):
        rng = random.Random(seed)
        shuffled = universe[:]
        rng.shuffle(shuffled)
        aucs.append(roc_from_ranking(shuffled, s, 0.10).auc)
    mean_auc = sum(aucs) / len(aucs)
    assert 0.38 <= mean_auc <= 0.62


def test_roc_curve_monotone_and_bounded():
    s = fig_toy(30, 20, 10, 5, 2)
    model = fit_model(s, 2)
    curve = top_path_roc(model, s, rng=random.Random(5), n_samples=200)
    assert 0.0 <= curve.auc <= 1.0
    xs = [x for x, _ in curve.points]
    ys = [y for _, y in curve.points]
    assert xs == sorted(xs)
    assert ys == sorted(ys)


def test_roc_default_sample_size():
    s = fig_toy(10, 5, 3, 10, 7)
    model = fit_model(s, 2)
    curve = top_path_roc(model, s, rng=random.Random(3))
    assert curve.n_positives + curve.n_negatives == 5


def test_roc_rejects_bad_fraction(chain_corpus):
    model = fit_model(chain_corpus, 1)
    with pytest.raises(ValueError):
        top_path_roc(model, chain_corpus, rng=random.Random(0), top_fraction=1.5)
