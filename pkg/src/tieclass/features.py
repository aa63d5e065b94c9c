"""Per-community interaction features, tightness scores, and feature matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .communities import LocalCommunity
from .graph import EgoNetwork, Graph

PAD = -1


@dataclass(frozen=True)
class FeatureMatrix:
    """k rows of [interaction share | individual features], tightness-ordered.

    Rows beyond the community size are all-zero padding with owner PAD.
    """

    rows: np.ndarray        # (k, |I|+|f|) float64
    row_owners: np.ndarray  # (k,) int64, PAD for padding rows
    k: int


def _community_edge_rows(members: np.ndarray, g: Graph):
    """Edges of g with both endpoints in members: (pairs, interaction rows)."""
    nm = len(members)
    pairs = []
    rows = []
    for u in members:
        nb = g.adj[u]
        if not len(nb):
            continue
        idx = np.searchsorted(members, nb)
        idx[idx >= nm] = nm - 1
        hit = nb[(members[idx] == nb) & (nb > u)]
        for w in hit:
            pairs.append((int(u), int(w)))
            rows.append(g.edge_index[(int(u), int(w))])
    return pairs, np.array(rows, dtype=np.int64)


def community_interaction_matrix(C: LocalCommunity, g: Graph) -> np.ndarray:
    """Interaction share vectors for every member of C, aligned with C.members.

    Component j for member u is u's summed dimension-j counts inside C over
    the dimension-j total across all unordered member pairs; a silent
    dimension contributes 0.
    """
    members = np.asarray(C.members, dtype=np.int64)
    out = np.zeros((len(members), g.n_interaction_dims), dtype=np.float64)
    pairs, rows = _community_edge_rows(members, g)
    if len(rows) == 0:
        return out
    counts = g.interactions[rows].astype(np.float64)
    denom = counts.sum(axis=0)
    for (u, v), c in zip(pairs, counts):
        out[np.searchsorted(members, u)] += c
        out[np.searchsorted(members, v)] += c
    nz = denom > 0
    out[:, nz] /= denom[nz]
    out[:, ~nz] = 0.0
    return out


def interact(u: int, C: LocalCommunity, j: int, g: Graph) -> float:
    """Share of C's dimension-j interaction mass that involves u.

    j is a 0-based dimension index.  Returns 0 when the whole community is
    silent on dimension j.
    """
    if u not in C.members:
        raise ValueError(f"node {u} is not a member of the community")
    if not 0 <= j < g.n_interaction_dims:
        raise ValueError(f"dimension {j} out of range 0..{g.n_interaction_dims - 1}")
    mat = community_interaction_matrix(C, g)
    pos = int(np.searchsorted(np.asarray(C.members), u))
    return float(mat[pos, j])


def interaction_vector(u: int, C: LocalCommunity, g: Graph) -> np.ndarray:
    """All interaction shares of u within C; every component lies in [0, 1]."""
    if u not in C.members:
        raise ValueError(f"node {u} is not a member of the community")
    mat = community_interaction_matrix(C, g)
    pos = int(np.searchsorted(np.asarray(C.members), u))
    return mat[pos].copy()


def community_tightness(C: LocalCommunity, net: EgoNetwork) -> np.ndarray:
    """Tightness of every member of C, aligned with C.members.

    For |C| > 1 this is (friends inside C / friends in the whole ego
    network) * (friends inside C / (|C|-1)); singleton communities score 1.
    Members with no ego-network friends at all score 0.
    """
    members = np.asarray(C.members, dtype=np.int64)
    size = len(members)
    if size == 1:
        return np.ones(1, dtype=np.float64)

    net_deg = net.member_degrees()
    pos_in_net = np.searchsorted(net.members, members)
    friend_net = net_deg[pos_in_net].astype(np.float64)

    friend_in = np.zeros(size, dtype=np.float64)
    member_set = set(int(v) for v in members)
    for u, v in net.member_edges:
        u, v = int(u), int(v)
        if u in member_set and v in member_set:
            friend_in[np.searchsorted(members, u)] += 1.0
            friend_in[np.searchsorted(members, v)] += 1.0

    out = np.zeros(size, dtype=np.float64)
    ok = friend_net > 0
    out[ok] = (friend_in[ok] / friend_net[ok]) * (friend_in[ok] / (size - 1))
    return out


def tightness(u: int, C: LocalCommunity, net: EgoNetwork) -> float:
    """Tightness of one member; see community_tightness."""
    if u not in C.members:
        raise ValueError(f"node {u} is not a member of the community")
    pos = int(np.searchsorted(np.asarray(C.members), u))
    return float(community_tightness(C, net)[pos])


def member_feature_rows(C: LocalCommunity, g: Graph) -> np.ndarray:
    """[interaction share | individual features] per member, in member order."""
    members = np.asarray(C.members, dtype=np.int64)
    return np.hstack(
        [community_interaction_matrix(C, g), g.node_features[members]]
    )


def build_feature_matrix(
    C: LocalCommunity,
    g: Graph,
    net: EgoNetwork,
    k: int,
    rows=None,
    tightness_values=None,
) -> FeatureMatrix:
    """Assemble the k x (|I|+|f|) matrix of the top-k members by tightness.

    Ordering is strictly non-increasing tightness with ties broken toward
    the lower node id; matrices of small communities are zero-padded.
    ``rows`` / ``tightness_values`` accept precomputed member rows and
    scores (aligned with C.members) to avoid recomputation in bulk runs.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    members = np.asarray(C.members, dtype=np.int64)
    rows_all = member_feature_rows(C, g) if rows is None else rows
    tight = community_tightness(C, net) if tightness_values is None else tightness_values

    order = np.lexsort((members, -tight))[: min(k, len(members))]
    width = rows_all.shape[1]
    rows = np.zeros((k, width), dtype=np.float64)
    owners = np.full(k, PAD, dtype=np.int64)
    rows[: len(order)] = rows_all[order]
    owners[: len(order)] = members[order]
    return FeatureMatrix(rows=rows, row_owners=owners, k=k)
