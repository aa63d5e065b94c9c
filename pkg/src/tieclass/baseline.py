"""Mean/std community aggregation with a softmax-regression classifier."""

from __future__ import annotations

import numpy as np

from .features import member_feature_rows
from .labels import ClassResult
from .linear import SoftmaxRegression, SoftmaxRegressionConfig, fit_softmax_regression


def baseline_aggregate(C, g) -> np.ndarray:
    """Per-dimension mean and population std over the community's member rows.

    Rows are the same [interaction share | individual features] vectors that
    feed the feature matrix, without padding; a singleton community has all
    stds equal to zero.
    """
    rows = member_feature_rows(C, g)
    return np.concatenate([rows.mean(axis=0), rows.std(axis=0)])


class BaselineClassifier:
    """Softmax regression over baseline_aggregate vectors."""

    def __init__(self, model: SoftmaxRegression):
        self.model = model

    def classify_vector(self, vec) -> ClassResult:
        return ClassResult(r=self.model.predict_proba(vec)[0])

    def predict_proba(self, x):
        return self.model.predict_proba(x)


def train_baseline(vectors, y, n_classes, config=None):
    """Fit the convex baseline; canonicalizes sample order for reproducibility."""
    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(x):
        canon = sorted(range(len(x)), key=lambda i: (int(y[i]), x[i].tobytes()))
        x, y = x[canon], y[canon]
    model, final_loss = fit_softmax_regression(
        x, y, n_classes, config or SoftmaxRegressionConfig()
    )
    return BaselineClassifier(model), final_loss
