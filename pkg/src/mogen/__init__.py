"""Multi-order generative models of paths in networks.

Fit a single generative model stacking Markov orders 1..K with explicit
start and terminal states, select K by AIC, and use the result for
next-element prediction, cross-entropy evaluation, path sampling and
out-of-sample top-path prediction, alongside RND/NET/AKOM baselines.
"""

__version__ = "0.1.0"

from .baselines import (
    AkomModel,
    FrequencyBaseline,
    HigherOrderNetwork,
    fit_akom,
    fit_net,
    fit_rnd,
    predict_akom,
    predict_net,
)
from .errors import (
    DegreesOfFreedomOverflowError,
    MissingStateError,
    MogenError,
    NgramParseError,
    UnknownNodeError,
    UnseenTransitionError,
)
from .model import (
    END,
    START,
    MultiOrderCounts,
    MultiOrderModel,
    dataset_log_likelihood,
    expand_path,
    fit_counts,
    fit_model,
    load_model,
    model_from_document,
    model_to_document,
    normalize,
    path_factor_probabilities,
    path_log_likelihood,
    save_model,
)
from .paths import (
    CorpusStats,
    NetworkTopology,
    Path,
    PathMultiset,
    Vocabulary,
    derive_topology,
    parse_ngram_file,
    split_train_validation,
    summary_stats,
)
from .prediction import (
    EvaluationReport,
    FallbackPolicy,
    ModelPredictor,
    PathSampler,
    PredictionDistribution,
    RocCurve,
    SampledPath,
    cross_entropy_eval,
    next_element_distribution,
    roc_from_ranking,
    sample_corpus,
    sample_path,
    top_path_roc,
)
from .selection import (
    OrderCandidate,
    OrderSelectionReport,
    aic,
    degrees_of_freedom,
    select_order,
)
from .workflows import evaluate_method, roc_experiment
