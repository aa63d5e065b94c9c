"""Edge-level features from incident community results, plus the edge classifier."""

from __future__ import annotations

import numpy as np

from .linear import SoftmaxRegressionConfig, fit_softmax_regression
from .stores import CommunityStore


def locate_communities(u, v, store: CommunityStore):
    """(C_u, C_v): u's community in v's ego network and v's in u's.

    Both ego networks must be present in the phase-1 output; for an existing
    edge each endpoint is by construction a member of the other's network.
    """
    return store.community_of(v, u), store.community_of(u, v)


def edge_feature(u, v, store: CommunityStore, tightness, class_results):
    """[tightness(u,C_u), tightness(v,C_v), r^{C_u}, r^{C_v}] with u = min id.

    ``tightness`` maps (ego, node) pairs scored inside the ego's network;
    ``class_results`` maps (ego, community_index) to probability vectors.
    """
    if u > v:
        u, v = v, u
    c_u, c_v = locate_communities(u, v, store)
    r_u = class_results[(v, c_u.community_index)]
    r_v = class_results[(u, c_v.community_index)]
    return np.concatenate(
        [[tightness[(v, u)], tightness[(u, v)]], r_u, r_v]
    )


def swap_endpoint_order(features, n_labels):
    """The same features seen from the other endpoint."""
    f = np.asarray(features)
    swapped = np.empty_like(f)
    swapped[..., 0] = f[..., 1]
    swapped[..., 1] = f[..., 0]
    swapped[..., 2 : 2 + n_labels] = f[..., 2 + n_labels :]
    swapped[..., 2 + n_labels :] = f[..., 2 : 2 + n_labels]
    return swapped


def train_edge_model(
    features,
    y,
    n_classes,
    config: SoftmaxRegressionConfig | None = None,
    augment_swap: bool = True,
):
    """Fit the multinomial edge classifier on assembled edge features.

    With ``augment_swap`` every sample is also presented with its endpoints
    swapped, which restores symmetry lost to canonical endpoint ordering.
    Returns the model and the final training loss.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if augment_swap and len(x):
        x = np.vstack([x, swap_endpoint_order(x, n_classes)])
        y = np.concatenate([y, y])
    if len(x):
        canon = sorted(range(len(x)), key=lambda i: (int(y[i]), x[i].tobytes()))
        x, y = x[canon], y[canon]
    return fit_softmax_regression(x, y, n_classes, config or SoftmaxRegressionConfig())


def predict_edges(model, features):
    """(label indices, probability matrix); argmax ties go to the lower index."""
    probs = model.predict_proba(features)
    return np.argmax(probs, axis=1), probs
