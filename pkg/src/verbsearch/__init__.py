"""Automatic verbalizer search for cloze-style few-shot text classification.

The engine works on precomputed masked-LM score matrices: it filters the
vocabulary to frequent word-like tokens, ranks per-label candidates by a
one-vs-rest likelihood-ratio objective, and assembles multi-verbalizers
that map each label to its best-scoring tokens.
"""

from .candidates import CandidateSets, filter_vocab, label_candidates
from .evaluate import DEFAULT_NV_SWEEP, EvalReport, evaluate, sweep_nv
from .fixtures import PlantedSpec, gen_global_confounder, gen_planted, gen_vocab
from .formats import (
    FormatError,
    LabeledExamples,
    LogitMatrix,
    MultiVerbalizer,
    VocabEntry,
    VocabTable,
    read_labels,
    read_logit_matrix,
    read_verbalizer,
    read_vocab,
    write_labels,
    write_logit_matrix,
    write_verbalizer,
    write_vocab,
)
from .losses import (
    avg_margin_objective,
    ce_loss,
    lr_loss,
    mle_log_likelihood,
    positive_ce,
)
from .probs import (
    BinaryView,
    binary_log_probs,
    class_probs,
    imbalance_weight,
    log_softmax_row,
    multi_class_probs,
)
from .search import (
    SearchConfig,
    TokenLoss,
    brute_force_mle,
    find_verbalizer,
    random_verbalizer,
    rank_label_tokens,
)

__version__ = "0.1.0"
