import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desc import models as M
from desc.ensemble import (
    MEMBER_ORDER,
    EnsembleInputs,
    EnsembleModel,
    compute_weights,
    cross_validated_f1,
    ensemble_predict,
    soft_vote,
    stratified_folds,
)
from desc.errors import OutOfRangeF1, TooFewSamplesPerClass

F1 = st.floats(0, 1)


def simplex_rows(rng, n, c):
    x = rng.random((n, c)) + 1e-3
    return x / x.sum(axis=1, keepdims=True)


def test_weights_from_reported_f1_triple():
    w = compute_weights([0.70, 0.70, 0.67]).w
    assert np.allclose(w, [0.33665, 0.33665, 0.32670], atol=1e-5)
    e = math.exp
    assert w[0] == pytest.approx(e(0.7) / (2 * e(0.7) + e(0.67)), abs=1e-15)


def test_weight_examples():
    assert np.allclose(compute_weights([0.5, 0.5, 0.5]).w, 1 / 3, atol=1e-15)
    expected = np.array([math.e, 1, 1]) / (math.e + 2)
    assert np.allclose(compute_weights([1, 0, 0]).w, expected, atol=1e-15)


@pytest.mark.parametrize("bad", [[1.1, 0.5, 0.5], [-0.1, 0.5, 0.5], [float("nan"), 0.1, 0.1], []])
def test_out_of_range_f1(bad):
    with pytest.raises(OutOfRangeF1):
        compute_weights(bad)


@given(st.lists(F1, min_size=3, max_size=3), st.floats(-0.5, 0.5))
def test_weight_invariants(f1, shift):
    w = compute_weights(f1).w
    assert np.all(w > 0) and abs(w.sum() - 1) < 1e-12
    for i in range(3):
        for j in range(3):
            if f1[i] > f1[j]:
                assert w[i] >= w[j]
    shifted = [x + shift for x in f1]
    if all(0 <= x <= 1 for x in shifted):
        assert np.allclose(compute_weights(shifted).w, w, atol=1e-12)


def test_soft_vote_hand_example():
    probs = [np.array([[0.9, 0.1]]), np.array([[0.2, 0.8]]), np.array([[0.4, 0.6]])]
    labels, combined = soft_vote([0.5, 0.3, 0.2], probs)
    assert np.allclose(combined, [[0.59, 0.41]], atol=1e-15)
    assert labels.tolist() == [0]


def test_uniform_members_tie_to_lowest_class():
    u = np.full((1, 3), 1 / 3)
    labels, _ = soft_vote([0.2, 0.3, 0.5], [u, u, u])
    assert labels.tolist() == [0]


def test_one_hot_weights_follow_that_member(rng):
    probs = [simplex_rows(rng, 200, 3) for _ in range(3)]
    for i in range(3):
        w = np.eye(3)[i]
        labels, _ = soft_vote(w, probs)
        assert np.array_equal(labels, probs[i].argmax(axis=1))


@given(st.lists(F1, min_size=3, max_size=3), st.integers(0, 2**31))
@settings(max_examples=50)
def test_combined_vector_on_simplex(f1, seed):
    rng = np.random.default_rng(seed)
    probs = [simplex_rows(rng, 5, 4) for _ in range(3)]
    _, combined = soft_vote(compute_weights(f1).w, probs)
    assert np.all(combined >= 0) and np.allclose(combined.sum(axis=1), 1, atol=1e-9)


def test_equal_weights_match_unweighted_mean(rng):
    probs = [simplex_rows(rng, 30, 2) for _ in range(3)]
    labels, combined = soft_vote(compute_weights([0.4, 0.4, 0.4]).w, probs)
    mean = sum(probs) / 3
    assert np.allclose(combined, mean, atol=1e-15)
    assert np.array_equal(labels, mean.argmax(axis=1))


def test_ensemble_predict_routes_inputs(rng):
    members = {
        "DNN": M.init_dnn(5, 2, widths=(4, 4, 4, 4, 4), seed=1),
        "BILSTM": M.init_bilstm(3, 2, hidden=3, dense=3, max_len=5, seed=2),
        "ATTLSTM": M.init_attention(3, 2, hidden=3, max_len=5, seed=3),
    }
    model = EnsembleModel(members, compute_weights([0.9, 0.8, 0.7]))
    inputs = EnsembleInputs(rng.normal(size=(4, 5)), [rng.normal(size=(k, 3)) for k in (1, 2, 3, 4)])
    out = ensemble_predict(model, inputs)
    probs = model.member_probs(inputs)
    _, expected = soft_vote(model.weights.w, [probs[a] for a in MEMBER_ORDER])
    assert len(out) == 4
    assert np.array_equal(np.vstack([v for _, v in out]), expected)
    assert [c for c, _ in out] == expected.argmax(axis=1).tolist()
    assert model.n_classes == 2


def test_stratified_folds_cover_every_row_once():
    labels = np.array([0] * 7 + [1] * 5)
    folds = stratified_folds(labels, 5, seed=3)
    assert sorted(np.concatenate(folds).tolist()) == list(range(12))
    for f in folds:
        assert set(labels[f]) == {0, 1}
    assert [f.tolist() for f in folds] == [f.tolist() for f in stratified_folds(labels, 5, seed=3)]


def test_too_few_samples_per_class():
    with pytest.raises(TooFewSamplesPerClass):
        stratified_folds([0, 0, 0, 1, 1], 3, seed=0)


def test_cross_validation_perfect_and_constant():
    items = np.arange(20)
    labels = items % 2
    perfect = cross_validated_f1(lambda xs, ys: (lambda t: t % 2), items, labels, k=5)
    assert perfect == 1.0
    constant = cross_validated_f1(lambda xs, ys: (lambda t: np.zeros(len(t), dtype=int)), items, labels, k=5)
    assert constant == pytest.approx(1 / 3, abs=1e-15)


def test_cross_validation_trains_on_fold_complement():
    items = np.arange(30)
    labels = (items >= 15).astype(int)
    seen = []

    def factory(xs, ys):
        seen.append(set(xs.tolist()))
        return lambda t: np.eye(2)[(t >= 15).astype(int)]

    assert cross_validated_f1(factory, items, labels, k=3, seed=1) == 1.0
    assert all(len(s) == 20 for s in seen)
