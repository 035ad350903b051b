"""Independent reference computations shared by the test modules."""

import numpy as np


def central_difference(loss_fn, arrays, eps=1e-5):
    """d loss / d array for each array, by perturbing entries in place."""
    grads = []
    for arr in arrays:
        g = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = arr[i]
            arr[i] = old + eps
            up = loss_fn()
            arr[i] = old - eps
            down = loss_fn()
            arr[i] = old
            g[i] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def relative_error(analytic, numeric):
    """Norm-wise relative error; 0 when both gradients vanish."""
    a = np.linalg.norm(analytic)
    n = np.linalg.norm(numeric)
    scale = max(a, n)
    if scale < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def pairwise_auc(gold, scores):
    """Probability that a random positive outranks a random negative, ties counted half."""
    pos = [s for y, s in zip(gold, scores) if y == 1]
    neg = [s for y, s in zip(gold, scores) if y == 0]
    wins = 0.0
    for p in pos:
        for q in neg:
            wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (len(pos) * len(neg))
