import numpy as np
import pytest

from verbsearch.evaluate import DEFAULT_NV_SWEEP, evaluate, format_report, sweep_nv
from verbsearch.fixtures import PlantedSpec, gen_planted, gen_vocab
from verbsearch.formats import LabeledExamples, LogitMatrix, MultiVerbalizer
from verbsearch.search import SearchConfig, find_verbalizer, random_verbalizer


def planted_setup(seed=0, k=2, per_class=5, t=200):
    planted = tuple(range(0, 3 * k, 3))
    spec = PlantedSpec(k, per_class, t, 5.0, planted, seed=seed)
    matrix, data = gen_planted(spec)
    mv = MultiVerbalizer(tuple(((tok, 0.0),) for tok in planted))
    return matrix, data, mv


def test_planted_accuracy_is_one():
    matrix, data, mv = planted_setup()
    report = evaluate([matrix], data, mv)
    assert report.pooled_accuracy == 1.0
    assert report.per_pattern[0].confusion.sum() == data.num_examples
    assert np.trace(report.per_pattern[0].confusion) == data.num_examples


def test_tie_goes_to_label_zero():
    matrix = LogitMatrix("p", np.zeros((6, 5), dtype=np.float32))
    data = LabeledExamples(2, (0, 0, 1, 1, 1, 1))
    mv = MultiVerbalizer((((0, 0.0),), ((1, 0.0),)))
    report = evaluate([matrix], data, mv)
    assert report.pooled_accuracy == pytest.approx(2 / 6)


def test_two_pattern_pooling():
    scores_good = np.zeros((4, 4), dtype=np.float32)
    scores_bad = np.zeros((4, 4), dtype=np.float32)
    labels = (0, 1, 0, 1)
    for i, y in enumerate(labels):
        scores_good[i, y] = 5.0
        scores_bad[i, 1 - y] = 5.0
    good, bad = LogitMatrix("good", scores_good), LogitMatrix("bad", scores_bad)
    data = LabeledExamples(2, labels)
    mv = MultiVerbalizer((((0, 0.0),), ((1, 0.0),)))
    report = evaluate([good, bad], data, mv)
    assert [r.accuracy for r in report.per_pattern] == [1.0, 0.0]
    assert report.pooled_accuracy == pytest.approx(0.5)


def test_evaluate_misaligned():
    matrix, data, mv = planted_setup()
    short = LabeledExamples(data.num_classes, data.labels[:-1])
    with pytest.raises(ValueError):
        evaluate([matrix], short, mv)


def test_evaluate_shift_invariant():
    matrix, data, mv = planted_setup(seed=5)
    shifted = LogitMatrix("p", matrix.scores + np.float32(123.0))
    a = evaluate([matrix], data, mv)
    b = evaluate([shifted], data, mv)
    assert a.pooled_accuracy == b.pooled_accuracy


def test_sweep_planted_singleton():
    matrix, data, _ = planted_setup()
    vocab = gen_vocab(matrix.vocab_size)
    cfg = SearchConfig(n_v=1, max_filtered=200, max_candidates=50)
    assert sweep_nv([matrix], data, vocab, cfg, [1]) == [(1, 1.0)]


def test_sweep_duplicates_and_default_length():
    matrix, data, _ = planted_setup(seed=2)
    vocab = gen_vocab(matrix.vocab_size)
    cfg = SearchConfig(n_v=1, max_filtered=200, max_candidates=50)
    rows = sweep_nv([matrix], data, vocab, cfg, [3, 3])
    assert rows[0] == rows[1]
    assert len(DEFAULT_NV_SWEEP) == 7


def test_sweep_matches_manual_composition():
    matrix, data, _ = planted_setup(seed=7)
    vocab = gen_vocab(matrix.vocab_size)
    cfg = SearchConfig(n_v=4, max_filtered=200, max_candidates=50)
    (n_v, acc), = sweep_nv([matrix], data, vocab, cfg, [4])
    mv = find_verbalizer([matrix], data, vocab, cfg)
    assert (n_v, acc) == (4, evaluate([matrix], data, mv).pooled_accuracy)


def test_sweep_rejects_empty():
    matrix, data, _ = planted_setup()
    vocab = gen_vocab(matrix.vocab_size)
    with pytest.raises(ValueError):
        sweep_nv([matrix], data, vocab, SearchConfig(), [])


def test_random_baseline_near_chance():
    vocab = gen_vocab(500)
    t_f = list(range(500))
    accs = []
    for seed in range(30):
        spec = PlantedSpec(4, 5, 500, 0.0, (0, 1, 2, 3), seed=seed)
        matrix, data = gen_planted(spec)
        mv = random_verbalizer(t_f, 4, 10, seed)
        accs.append(evaluate([matrix], data, mv).pooled_accuracy)
    assert abs(float(np.mean(accs)) - 0.25) < 0.1


def test_format_report():
    matrix, data, mv = planted_setup()
    text = format_report(evaluate([matrix], data, mv), confusion=True)
    lines = text.splitlines()
    assert lines[0] == "pattern_id\taccuracy"
    assert lines[1].startswith("synthetic\t1.000000")
    assert "pooled\t1.000000" in lines
    assert any(ln.startswith("confusion\t") for ln in lines)
