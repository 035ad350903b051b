import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desc import tensor as T
from desc.errors import NonScalarLoss, ShapeMismatch
from oracles import central_difference, relative_error


def check(build, *shapes, seed=0, tol=1e-6):
    """Compare backward() against central differences for a scalar loss built from leaves."""
    rng = np.random.default_rng(seed)
    leaves = [T.parameter(rng.normal(size=s)) for s in shapes]
    loss = build(*leaves)
    T.backward(loss)
    numeric = central_difference(lambda: float(build(*leaves).data), [p.data for p in leaves])
    for p, n in zip(leaves, numeric):
        assert relative_error(p.grad, n) < tol


PROBE = np.random.default_rng(7).normal(size=(3, 4))


@pytest.mark.parametrize(
    "name, build, shapes",
    [
        ("add", lambda a, b: T.sum(T.mul(T.add(a, b), PROBE)), [(3, 4), (3, 4)]),
        ("bias add", lambda a, b: T.sum(T.mul(T.add(a, b), PROBE)), [(3, 4), (4,)]),
        ("sub", lambda a, b: T.sum(T.mul(T.sub(a, b), PROBE)), [(3, 4), (1, 4)]),
        ("mul", lambda a, b: T.sum(T.mul(a, b)), [(3, 4), (3, 4)]),
        ("tanh", lambda a: T.sum(T.mul(T.tanh(a), PROBE)), [(3, 4)]),
        ("sigmoid", lambda a: T.sum(T.mul(T.sigmoid(a), PROBE)), [(3, 4)]),
        ("relu", lambda a: T.sum(T.mul(T.relu(a), PROBE)), [(3, 4)]),
        ("leaky_relu", lambda a: T.sum(T.mul(T.leaky_relu(a, 0.1), PROBE)), [(3, 4)]),
        ("matmul", lambda a, b: T.sum(T.tanh(T.matmul(a, b))), [(3, 4), (4, 2)]),
        ("batched matmul", lambda a, b: T.sum(T.tanh(a @ b)), [(2, 3, 4), (4, 2)]),
        ("concat", lambda a, b: T.sum(T.mul(T.concat([a, b], axis=1), np.ones((3, 6)) * 1.5)), [(3, 4), (3, 2)]),
        ("stack/take", lambda a, b: T.sum(T.tanh(T.take(T.stack([a, b], axis=0), 1, axis=0))), [(3, 4), (3, 4)]),
        ("narrow", lambda a: T.sum(T.tanh(T.narrow(a, 1, 3))), [(3, 4)]),
        ("reshape", lambda a: T.sum(T.mul(T.reshape(a, (4, 3)), PROBE.T)), [(3, 4)]),
        ("mean axis", lambda a: T.sum(T.tanh(T.mean(a, axis=0))), [(3, 4)]),
        ("softmax", lambda a: T.sum(T.mul(T.softmax(a, axis=1), PROBE)), [(3, 4)]),
        ("masked softmax", lambda a: T.sum(T.mul(T.softmax(a, axis=1, mask=PROBE > 0), PROBE)), [(3, 4)]),
        ("cross_entropy", lambda a: T.cross_entropy(a, [0, 3, 1]), [(3, 4)]),
    ],
)
def test_primitive_gradients(name, build, shapes):
    check(build, *shapes)


def test_composite_graph_gradient():
    def build(w, u, x):
        h = T.tanh(x @ w)
        return T.cross_entropy(T.leaky_relu(h @ u) + T.sigmoid(h @ u), [1, 0, 1, 1, 0])

    check(build, (3, 4), (4, 2), (5, 3), tol=1e-4)


def test_forward_examples():
    s = T.softmax(T.Tensor(np.zeros(3)), axis=0).data
    assert np.allclose(s, 1 / 3, atol=1e-15)
    assert T.tanh(T.Tensor(0.0)).data == 0.0
    assert T.leaky_relu(T.Tensor(-1.0), 0.01).data == pytest.approx(-0.01, abs=1e-18)
    assert T.matmul(np.ones((2, 3)), np.ones((3, 1))).shape == (2, 1)


def test_backward_examples():
    w = T.parameter([1.0, 2.0, 3.0])
    T.backward(T.sum(w))
    assert w.grad.tolist() == [1.0, 1.0, 1.0]
    v = T.parameter(3.0)
    T.backward(v * v)
    assert v.grad == 6.0


def test_gradients_accumulate_until_reset():
    w = T.parameter([2.0])
    T.backward(T.sum(w * w))
    T.backward(T.sum(w * w))
    assert w.grad.tolist() == [8.0]
    T.zero_grads([w])
    assert w.grad is None


def test_shared_subexpression_visited_once():
    w = T.parameter(2.0)
    h = w * w
    T.backward(h + h)
    assert w.grad == 8.0


def test_non_scalar_loss():
    with pytest.raises(NonScalarLoss):
        T.backward(T.parameter([1.0, 2.0]) * 2.0)


@pytest.mark.parametrize(
    "op",
    [
        lambda: T.matmul(np.ones((2, 3)), np.ones((2, 1))),
        lambda: T.add(np.ones((2, 3)), np.ones((3, 2))),
        lambda: T.concat([np.ones((2, 3)), np.ones((3, 3))], axis=1),
        lambda: T.cross_entropy(np.ones((2, 3)), [0]),
    ],
)
def test_shape_mismatch_names_both_shapes(op):
    with pytest.raises(ShapeMismatch, match=r"\(\d"):
        op()


def test_constants_get_no_gradient():
    w = T.parameter([1.0])
    c = T.Tensor([5.0])
    T.backward(T.sum(w * c))
    assert c.grad is None and w.grad.tolist() == [5.0]


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=12))
def test_softmax_sums_to_one(values):
    assert abs(T.softmax(T.Tensor(values), axis=0).data.sum() - 1.0) < 1e-9


@given(st.lists(st.floats(-30, 30), min_size=2, max_size=10), st.data())
@settings(max_examples=200)
def test_masked_softmax_matches_subset_softmax(values, data):
    mask = data.draw(st.lists(st.booleans(), min_size=len(values), max_size=len(values)))
    if not any(mask):
        mask[0] = True
    y = T.softmax(T.Tensor(values), axis=0, mask=np.array(mask)).data
    kept = np.array(values)[mask]
    ref = np.exp(kept - kept.max())
    ref /= ref.sum()
    assert np.all(y[~np.array(mask)] == 0.0)
    assert np.allclose(y[np.array(mask)], ref, atol=1e-12)


def test_deterministic_forward():
    x = np.random.default_rng(1).normal(size=(4, 5))
    a = T.softmax(T.tanh(T.Tensor(x)) @ np.eye(5), axis=1).data
    b = T.softmax(T.tanh(T.Tensor(x)) @ np.eye(5), axis=1).data
    assert np.array_equal(a, b)


def test_dropout_is_identity_without_rng():
    x = T.parameter(np.ones(4))
    assert T.dropout(x, 0.5, None) is x
    y = T.dropout(x, 0.5, np.random.default_rng(0)).data
    assert set(np.unique(y)) <= {0.0, 2.0}
