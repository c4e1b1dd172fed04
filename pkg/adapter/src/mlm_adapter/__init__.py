"""Bridge from masked language models to the verbalizer-search formats."""

from .export import (
    build_input_ids,
    export_logits,
    export_vocab,
    load_model,
    word_initial_flags,
)
from .formats import atomic_write, write_labels, write_logit_matrix, write_vocab
from .templates import PatternTemplate

__version__ = "0.1.0"
