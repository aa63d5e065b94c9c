"""Multinomial logistic regression fit by full-batch descent with line search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convnet import softmax


@dataclass
class SoftmaxRegressionConfig:
    l2: float = 1e-4
    max_iters: int = 5000
    grad_tol: float = 1e-8
    init_scale: float = 0.01
    seed: int = 0


class SoftmaxRegression:
    """Affine logits plus softmax; the L2 penalty applies to weights only."""

    def __init__(self, weights, bias):
        self.weights = weights  # (D, K)
        self.bias = bias        # (K,)

    @property
    def n_features(self):
        return self.weights.shape[0]

    @property
    def n_classes(self):
        return self.weights.shape[1]

    def predict_proba(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features, got {x.shape[1]}"
            )
        return softmax(x @ self.weights + self.bias)

    def predict(self, x):
        """Argmax labels; ties resolve to the lower class index."""
        return np.argmax(self.predict_proba(x), axis=1)


def loss_and_grad(weights, bias, x, y, l2):
    """Mean cross-entropy + 0.5*l2*||W||^2 and its analytic gradient."""
    n = len(y)
    probs = softmax(x @ weights + bias)
    rows = np.arange(n)
    loss = float(
        -np.log(np.maximum(probs[rows, y], 1e-300)).mean()
        + 0.5 * l2 * np.sum(weights * weights)
    )
    dlogits = probs
    dlogits[rows, y] -= 1.0
    dlogits /= n
    dw = x.T @ dlogits + l2 * weights
    db = dlogits.sum(axis=0)
    return loss, dw, db


def fit_softmax_regression(x, y, n_classes, config=None):
    """Minimize the convex objective to (near) optimality.

    Full-batch gradient descent with Armijo backtracking, run until the
    gradient sup-norm falls under grad_tol; deterministic for a fixed seed.
    """
    cfg = config or SoftmaxRegressionConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(x) == 0:
        raise ValueError("no training examples")
    if len(np.unique(y)) < 2:
        raise ValueError("training data must cover at least 2 classes")

    rng = np.random.default_rng(cfg.seed)
    weights = rng.standard_normal((x.shape[1], n_classes)) * cfg.init_scale
    bias = np.zeros(n_classes)

    step = 1.0
    loss, dw, db = loss_and_grad(weights, bias, x, y, cfg.l2)
    for _ in range(cfg.max_iters):
        gnorm2 = float(np.sum(dw * dw) + np.sum(db * db))
        if np.sqrt(gnorm2) < cfg.grad_tol:
            break
        step = min(step * 2.0, 1e6)
        while step > 1e-18:
            w_new = weights - step * dw
            b_new = bias - step * db
            new_loss, dw_new, db_new = loss_and_grad(w_new, b_new, x, y, cfg.l2)
            if new_loss <= loss - 1e-4 * step * gnorm2:
                break
            step *= 0.5
        weights, bias, loss, dw, db = w_new, b_new, new_loss, dw_new, db_new
    return SoftmaxRegression(weights, bias), loss
