"""How accuracy varies with the number of verbalizations per label.

With a moderate planted signal and held-out evaluation data the trade-off
becomes visible: the top-ranked pick per label carries most of the signal,
and large n_v dilutes it with junk picks whose scores are noise on the
held-out set.
"""

from dataclasses import replace

from verbsearch import (
    DEFAULT_NV_SWEEP,
    PlantedSpec,
    SearchConfig,
    gen_planted,
    gen_vocab,
    sweep_nv,
)

spec = PlantedSpec(
    num_classes=4,
    examples_per_class=5,
    vocab_size=10_000,
    boost=3.5,
    planted_tokens=(5, 50, 500, 5000),
    seed=11,
)
train_matrix, train_data = gen_planted(spec)
# same planted structure, fresh background noise
eval_matrix, eval_data = gen_planted(replace(spec, seed=12))
vocab = gen_vocab(spec.vocab_size)

rows = sweep_nv([train_matrix], train_data, vocab, SearchConfig(),
                DEFAULT_NV_SWEEP, [eval_matrix], eval_data)

print("held-out accuracy, boost 3.5, 5 examples per class")
print("n_v\taccuracy")
for n_v, acc in rows:
    bar = "#" * round(acc * 40)
    print(f"{n_v}\t{acc:.3f}\t{bar}")
