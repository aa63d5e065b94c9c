"""Local community detection inside ego networks via Girvan-Newman."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._gn import edge_betweenness_kernel, gn_dendrogram_kernel
from .graph import EgoNetwork

logger = logging.getLogger(__name__)

DEFAULT_MEMBER_CAP = 5000


@dataclass(frozen=True)
class LocalCommunity:
    """One community of one ego network; members partition the member set."""

    ego: int
    members: tuple         # sorted ascending
    community_index: int

    @property
    def size(self):
        return len(self.members)


@dataclass
class Dendrogram:
    """Snapshots recorded while the divisive loop removes edges.

    ``steps[i] = (removed_edge, partition, modularity)`` where ``removed_edge``
    is None for the initial intact-graph snapshot and partitions are tuples of
    sorted member tuples.
    """

    steps: list

    def best_partition(self, tol=1e-12):
        """Max-modularity snapshot; ties go to fewer communities, then earlier."""
        best = None
        for _, partition, q in self.steps:
            if best is None:
                best = (partition, q)
                continue
            if q > best[1] + tol:
                best = (partition, q)
            elif q >= best[1] - tol and len(partition) < len(best[0]):
                best = (partition, q)
        return best[0]


def _localize(net: EgoNetwork):
    """Map member ids onto 0..size-1; member order is ascending so local
    lexicographic edge order matches the canonical global one."""
    members = net.members
    local = np.searchsorted(members, net.member_edges) if len(net.member_edges) else net.member_edges
    return members, local.astype(np.int64).reshape(-1, 2)


def edge_betweenness(net: EgoNetwork) -> dict:
    """Exact shortest-path edge betweenness of the ego network.

    Unordered node pairs are counted once; result maps canonical member
    edges to non-negative reals.
    """
    if net.size == 0 or len(net.member_edges) == 0:
        return {}
    members, local_edges = _localize(net)
    bet = edge_betweenness_kernel(net.size, local_edges)
    return {
        (int(members[u]), int(members[v])): float(b)
        for (u, v), b in zip(local_edges, bet)
    }


def modularity(net: EgoNetwork, partition) -> float:
    """Newman modularity of a partition of the ego network's members.

    Q = sum_c [ e_c/m - (d_c/2m)^2 ] over the (intact) member graph; a
    zero-edge network has Q defined as 0.
    """
    seen = set()
    for part in partition:
        for v in part:
            if v in seen:
                raise ValueError(f"node {v} appears in more than one part")
            seen.add(v)
    members = {int(v) for v in net.members}
    if seen != members:
        raise ValueError("partition does not cover the member set exactly")

    m = len(net.member_edges)
    if m == 0:
        return 0.0
    part_of = {}
    for i, part in enumerate(partition):
        for v in part:
            part_of[int(v)] = i
    e_c = np.zeros(len(partition))
    d_c = np.zeros(len(partition))
    for u, v in net.member_edges:
        if part_of[int(u)] == part_of[int(v)]:
            e_c[part_of[int(u)]] += 1.0
        d_c[part_of[int(u)]] += 1.0
        d_c[part_of[int(v)]] += 1.0
    return float(np.sum(e_c / m - (d_c / (2.0 * m)) ** 2))


def gn_dendrogram(net: EgoNetwork, recompute_every: int = 1) -> Dendrogram:
    """Record the divisive loop: remove the max-betweenness edge (canonically
    smallest on ties), then the component partition and its modularity.

    ``recompute_every`` is a speed knob: betweenness is recomputed after
    every r removals instead of every removal (r=1 is the exact loop).
    """
    if recompute_every < 1:
        raise ValueError("recompute_every must be >= 1")
    members, local_edges = _localize(net)
    if len(local_edges) == 0:
        partition = tuple((int(v),) for v in members)
        return Dendrogram(steps=[(None, partition, 0.0)])

    labels_steps, q_steps, removed = gn_dendrogram_kernel(
        net.size, local_edges, recompute_every
    )
    steps = []
    for i in range(labels_steps.shape[0]):
        parts = _labels_to_partition(members, labels_steps[i])
        edge = None
        if i > 0:
            u, v = removed[i - 1]
            edge = (int(members[u]), int(members[v]))
        steps.append((edge, parts, float(q_steps[i])))
    return Dendrogram(steps=steps)


def _labels_to_partition(members, labels):
    groups = {}
    for pos, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(int(members[pos]))
    # labels are assigned in ascending order of smallest member already
    return tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))


def detect_local_communities(
    net: EgoNetwork,
    member_cap: int = DEFAULT_MEMBER_CAP,
    recompute_every: int = 1,
) -> list:
    """Partition the ego network into local communities.

    Runs the divisive loop to exhaustion and returns the max-modularity
    partition (ties: fewer communities, then the earlier snapshot).
    Networks above ``member_cap`` members fall back to one community.
    """
    if net.size == 0:
        return []
    if net.size > member_cap:
        logger.warning(
            "ego network of %d has %d members (> cap %d); returning one community",
            net.ego,
            net.size,
            member_cap,
        )
        return [
            LocalCommunity(
                ego=net.ego,
                members=tuple(int(v) for v in net.members),
                community_index=0,
            )
        ]
    dendro = gn_dendrogram(net, recompute_every=recompute_every)
    partition = dendro.best_partition()
    parts = sorted(partition, key=lambda p: p[0])
    return [
        LocalCommunity(ego=net.ego, members=tuple(part), community_index=i)
        for i, part in enumerate(parts)
    ]
