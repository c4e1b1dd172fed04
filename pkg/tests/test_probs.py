import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from verbsearch.formats import LabeledExamples, LogitMatrix, MultiVerbalizer
from verbsearch.probs import (
    BinaryView,
    binary_log_probs,
    class_probs,
    imbalance_weight,
    log_softmax_row,
    multi_class_probs,
)


def as_matrix(rows) -> LogitMatrix:
    return LogitMatrix("p", np.array(rows, dtype=np.float32))


def test_log_softmax_symmetric():
    out = log_softmax_row(np.array([0.0, 0.0]))
    assert np.allclose(out, [math.log(0.5)] * 2, atol=1e-12)


def test_log_softmax_sigmoid():
    out = log_softmax_row(np.array([1.0, 0.0]))
    e = math.e
    assert out[0] == pytest.approx(math.log(e / (e + 1)), abs=1e-12)
    assert out[1] == pytest.approx(math.log(1 / (e + 1)), abs=1e-12)


def test_log_softmax_no_overflow():
    out = log_softmax_row(np.array([1000.0, 0.0]))
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(0.0, abs=1e-12)


def test_log_softmax_rejects_empty_and_nan():
    with pytest.raises(ValueError):
        log_softmax_row(np.array([]))
    with pytest.raises(ValueError):
        log_softmax_row(np.array([1.0, np.nan]))


@settings(max_examples=50, deadline=None)
@given(
    scores=arrays(np.float64, st.integers(1, 2000),
                  elements=st.floats(-100, 100)),
)
def test_log_softmax_normalizes(scores):
    out = log_softmax_row(scores)
    assert abs(np.exp(out).sum() - 1.0) < 1e-9


def test_log_softmax_normalizes_large_vocab():
    rng = np.random.default_rng(0)
    out = log_softmax_row(rng.standard_normal(100_000))
    assert abs(np.exp(out).sum() - 1.0) < 1e-9


@settings(max_examples=50, deadline=None)
@given(
    scores=arrays(np.float64, st.integers(1, 500),
                  elements=st.floats(-50, 50)),
    shift=st.sampled_from([-500.0, -1.5, 0.25, 500.0]),
)
def test_log_softmax_shift_invariance(scores, shift):
    assert np.allclose(log_softmax_row(scores),
                       log_softmax_row(scores + shift), atol=1e-9)


def test_binary_log_probs_hand_value():
    m = as_matrix([[math.log(3), 0.0]])
    log_q1, log_q0 = binary_log_probs(m, 0)
    # float32 storage of ln 3 limits agreement to ~1e-7
    assert log_q1[0] == pytest.approx(math.log(0.75), abs=1e-6)
    assert log_q0[0] == pytest.approx(math.log(0.25), abs=1e-6)


def test_binary_log_probs_symmetric():
    m = as_matrix([[0.0, 0.0]])
    log_q1, log_q0 = binary_log_probs(m, 1)
    assert log_q1[0] == pytest.approx(math.log(0.5), abs=1e-12)
    assert log_q0[0] == pytest.approx(math.log(0.5), abs=1e-12)


def test_binary_log_probs_uniform_large_vocab():
    t = 50_000
    m = LogitMatrix("p", np.zeros((1, t), dtype=np.float32))
    log_q1, log_q0 = binary_log_probs(m, 123)
    assert log_q1[0] == pytest.approx(-math.log(t), abs=1e-9)
    assert log_q0[0] == pytest.approx(math.log(1 - 1 / t), abs=1e-12)
    assert np.isfinite(log_q0[0])


def test_binary_log_probs_extreme_gap_stays_finite():
    m = as_matrix([[1000.0, 0.0]])
    log_q1, log_q0 = binary_log_probs(m, 0)
    assert np.isfinite(log_q0[0])
    assert log_q0[0] == pytest.approx(-1000.0, abs=1e-6)


def test_binary_log_probs_guards():
    m = as_matrix([[0.0, 0.0]])
    with pytest.raises(ValueError):
        binary_log_probs(m, 2)
    single = LogitMatrix("p", np.zeros((1, 1), dtype=np.float32))
    with pytest.raises(ValueError, match="degenerate vocabulary"):
        binary_log_probs(single, 0)


def test_class_probs_two_labels():
    row = np.array([2.0, 0.0, -1.0])
    probs = class_probs(row, [0, 1])
    e2 = math.exp(2)
    assert probs[0] == pytest.approx(e2 / (e2 + 1), abs=1e-9)
    assert probs[1] == pytest.approx(1 / (e2 + 1), abs=1e-9)


def test_class_probs_symmetry():
    probs = class_probs(np.array([1.5, 1.5, 1.5]), [0, 1, 2])
    assert np.allclose(probs, 1 / 3, atol=1e-12)


def test_class_probs_constructed_gap():
    row = np.array([5.0, 5.0 - math.log(9)])
    probs = class_probs(row, [0, 1])
    assert probs[0] == pytest.approx(0.9, abs=1e-9)
    assert probs[1] == pytest.approx(0.1, abs=1e-9)


def test_class_probs_out_of_range():
    with pytest.raises(ValueError):
        class_probs(np.array([0.0, 1.0]), [0, 5])


def test_multi_singleton_matches_class_probs_bitwise():
    rng = np.random.default_rng(42)
    for _ in range(20):
        row = rng.standard_normal(30)
        tokens = rng.choice(30, size=3, replace=False)
        mv = MultiVerbalizer(tuple(((int(t), 0.0),) for t in tokens))
        a = class_probs(row, [int(t) for t in tokens])
        b = multi_class_probs(row, mv)
        assert a.tobytes() == b.tobytes()


def test_multi_class_probs_average():
    row = np.array([4.0, 0.0, 2.0])
    mv = MultiVerbalizer((((0, 0.0), (1, 0.0)), ((2, 0.0),)))
    probs = multi_class_probs(row, mv)
    assert np.allclose(probs, [0.5, 0.5], atol=1e-12)


def test_multi_class_probs_equal_scores():
    row = np.full(5, 2.5)
    mv = MultiVerbalizer((((0, 0.0), (1, 0.0)), ((2, 0.0), (3, 0.0), (4, 0.0))))
    assert np.allclose(multi_class_probs(row, mv), [0.5, 0.5], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    scores=arrays(np.float64, 12, elements=st.floats(-30, 30)),
    shift=st.floats(-200, 200),
)
def test_argmax_invariant_under_shift(scores, shift):
    mv = MultiVerbalizer((((0, 0.0), (3, 0.0)), ((5, 0.0),), ((7, 0.0), (9, 0.0))))
    a = multi_class_probs(scores, mv)
    b = multi_class_probs(scores + shift, mv)
    assert a.argmax() == b.argmax()
    c = class_probs(scores, [1, 4, 8])
    d = class_probs(scores + shift, [1, 4, 8])
    assert c.argmax() == d.argmax()


def test_imbalance_weight_values():
    assert imbalance_weight(1, 5, 50) == Fraction(1)
    assert imbalance_weight(0, 5, 50) == Fraction(1, 9)
    with pytest.raises(ValueError, match="degenerate class"):
        imbalance_weight(0, 50, 50)
    with pytest.raises(ValueError, match="degenerate class"):
        imbalance_weight(0, 0, 50)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 200), data=st.data())
def test_weight_balance_exact(n, data):
    n_y = data.draw(st.integers(1, n - 1))
    neg_sum = sum(
        (imbalance_weight(0, n_y, n) for _ in range(n - n_y)), Fraction(0))
    pos_sum = sum(
        (imbalance_weight(1, n_y, n) for _ in range(n_y)), Fraction(0))
    assert neg_sum == n_y == pos_sum


def test_binary_view_partition():
    data = LabeledExamples(3, (0, 1, 2, 0, 1))
    bv = BinaryView.of(data, 1)
    assert bv.positives == (1, 4)
    assert bv.negatives == (0, 2, 3)
    assert bv.n_y == data.label_counts[1]
    assert sorted(bv.positives + bv.negatives) == list(range(5))
