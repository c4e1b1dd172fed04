import numpy as np
import pytest

from verbsearch.candidates import filter_vocab
from verbsearch.fixtures import (
    PlantedSpec,
    gen_global_confounder,
    gen_planted,
    gen_vocab,
)
from verbsearch.losses import lr_loss_all
from verbsearch.probs import BinaryView


def test_generation_is_deterministic():
    spec = PlantedSpec(3, 4, 50, 5.0, (1, 2, 3), seed=9)
    m1, d1 = gen_planted(spec)
    m2, d2 = gen_planted(spec)
    assert m1 == m2
    assert d1 == d2


def test_zero_boost_is_pure_background():
    spec = PlantedSpec(2, 4, 50, 0.0, (0, 1), seed=9)
    planted, _ = gen_planted(spec)
    confounded, _ = gen_global_confounder(
        PlantedSpec(2, 4, 50, 0.0, (0, 1), seed=9), 10, 0.0)
    assert planted == confounded


def test_labels_are_class_blocked():
    spec = PlantedSpec(3, 2, 20, 1.0, (0, 1, 2), seed=0)
    _, data = gen_planted(spec)
    assert data.labels == (0, 0, 1, 1, 2, 2)


def test_planted_tokens_minimize_lr_loss():
    spec = PlantedSpec(2, 5, 300, 5.0, (4, 9), seed=3)
    matrix, data = gen_planted(spec)
    for y, token in enumerate(spec.planted_tokens):
        losses = lr_loss_all(matrix, BinaryView.of(data, y))
        assert int(np.argmin(losses)) == token


def test_confounder_boosted_everywhere():
    spec = PlantedSpec(2, 3, 40, 0.0, (0, 1), seed=5)
    plain, _ = gen_planted(spec)
    conf, _ = gen_global_confounder(spec, 20, 5.0)
    diff = conf.scores.astype(np.float64) - plain.scores.astype(np.float64)
    assert np.allclose(diff[:, 20], 5.0, atol=1e-6)
    diff[:, 20] = 0.0
    assert np.allclose(diff, 0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        PlantedSpec(2, 3, 40, 5.0, (0,)).validate()  # one token for two classes
    with pytest.raises(ValueError):
        PlantedSpec(2, 3, 40, 5.0, (0, 0)).validate()
    with pytest.raises(ValueError):
        PlantedSpec(2, 3, 40, 5.0, (0, 40)).validate()
    with pytest.raises(ValueError):
        PlantedSpec(2, 3, 40, float("inf"), (0, 1)).validate()


def test_gen_vocab_all_pass_filter():
    vocab = gen_vocab(200)
    assert filter_vocab(vocab, max_filtered=500) == list(range(200))
    assert filter_vocab(vocab, max_filtered=50) == list(range(50))
