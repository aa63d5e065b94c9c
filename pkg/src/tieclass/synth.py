"""Synthetic social graphs with planted relationship types and interactions.

Users are partitioned into typed affiliation groups (one family each, at
most one workplace and one school); edges appear with probability p_in
inside a group and p_out across groups.  Interaction counts follow a
zero-inflated Poisson whose zero-inflation is tuned so a target fraction of
edges carries no interaction at all.  Cross-group edges are labeled
OTHER_LABEL and are excluded from the three-class evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, minmax_normalize

OTHER_LABEL = "other"

DEFAULT_RATES = {
    # picture-like, article-like, game-like, picture-comment, article-comment, game-comment
    "family": (3.0, 0.5, 0.1, 2.2, 0.3, 0.05),
    "colleague": (2.0, 1.8, 0.15, 1.0, 1.6, 0.1),
    "schoolmate": (2.5, 1.0, 1.8, 1.4, 0.5, 1.2),
    OTHER_LABEL: (0.5, 0.25, 0.15, 0.3, 0.15, 0.1),
}


@dataclass
class GenConfig:
    n_users: int = 5000
    seed: int = 0
    family_size_mean: float = 5.0
    colleague_size_mean: float = 15.0
    schoolmate_size_mean: float = 10.0
    colleague_fraction: float = 0.6
    schoolmate_fraction: float = 0.6
    p_in: float = 0.8
    p_out: float = 0.002
    zero_pair_target: float = 0.6
    rates: dict = field(default_factory=lambda: {k: tuple(v) for k, v in DEFAULT_RATES.items()})
    n_feature_dims: int = 2

    def validate(self):
        if self.n_users < 4:
            raise ValueError("n_users must be >= 4")
        for p in (self.p_in, self.p_out, self.colleague_fraction, self.schoolmate_fraction):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        for mean in (self.family_size_mean, self.colleague_size_mean, self.schoolmate_size_mean):
            if mean < 2:
                raise ValueError("group size means must be >= 2")
        if not 0.0 < self.zero_pair_target < 1.0:
            raise ValueError("zero_pair_target must lie in (0, 1)")
        dims = {len(v) for v in self.rates.values()}
        if len(dims) != 1:
            raise ValueError("all rate vectors must share one length")
        if any(r < 0 for v in self.rates.values() for r in v):
            raise ValueError("rates must be non-negative")
        if self.p_in <= 0:
            raise ValueError("p_in must be positive (expected degree would be 0)")
        return self

    @property
    def n_interaction_dims(self):
        return len(next(iter(self.rates.values())))


@dataclass
class GroundTruth:
    """Per-edge labels and the planted typed groups behind them."""

    edge_labels: dict            # canonical (u, v) -> label string
    groups: list                 # (type name, tuple of member ids)
    memberships: dict            # node -> list of group indices


def _sample_sizes(rng, total, mean):
    """Shifted-Poisson group sizes (>= 2) covering `total` users."""
    sizes = []
    left = total
    while left > 0:
        s = 2 + int(rng.poisson(mean - 2.0))
        if s >= left - 1:
            s = left
        sizes.append(s)
        left -= s
    return sizes


def _partition_into_groups(rng, users, mean, conflict_groups, memberships):
    """Cut shuffled users into groups, avoiding pairs that already share one.

    A greedy pass pushes a user to the end of the queue when it conflicts
    with the group under construction; leftovers that cannot be placed are
    dropped from this group type.
    """
    queue = list(rng.permutation(users))
    sizes = _sample_sizes(rng, len(queue), mean)
    groups = []
    for size in sizes:
        chosen = []
        skipped = []
        while queue and len(chosen) < size:
            u = queue.pop()
            clash = any(
                memberships.get(u) and set(memberships[u]) & set(memberships.get(w, ()))
                for w in chosen
            )
            if clash:
                skipped.append(u)
            else:
                chosen.append(u)
        queue = skipped + queue
        if len(chosen) >= 2:
            groups.append(chosen)
        else:
            queue = chosen + queue
    return groups


def _zero_edge_probability(z, rates_per_edge):
    """P(all dimensions zero) for each edge under zero-inflation z."""
    return np.prod(z + (1.0 - z) * np.exp(-rates_per_edge), axis=1)


def _tune_zero_inflation(rates_per_edge, target):
    """Bisection on the expected all-zero edge fraction (monotone in z)."""
    base = float(_zero_edge_probability(0.0, rates_per_edge).mean())
    if base >= target:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(_zero_edge_probability(mid, rates_per_edge).mean()) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate(cfg: GenConfig):
    """Build (Graph, GroundTruth) deterministically from the config seed."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_users

    # typed groups: everyone gets a family; workplace/school participation is partial
    memberships = {}
    groups = []
    plans = [
        ("family", np.arange(n), cfg.family_size_mean),
        (
            "colleague",
            rng.permutation(n)[: int(round(cfg.colleague_fraction * n))],
            cfg.colleague_size_mean,
        ),
        (
            "schoolmate",
            rng.permutation(n)[: int(round(cfg.schoolmate_fraction * n))],
            cfg.schoolmate_size_mean,
        ),
    ]
    for type_name, users, mean in plans:
        placed = _partition_into_groups(rng, users, mean, groups, memberships)
        for members in placed:
            gid = len(groups)
            groups.append((type_name, tuple(sorted(int(u) for u in members))))
            for u in members:
                memberships.setdefault(int(u), []).append(gid)

    # intra-group edges, labeled by the group's type
    edge_labels = {}
    for type_name, members in groups:
        members = np.asarray(members)
        size = len(members)
        iu, iv = np.triu_indices(size, k=1)
        keep = rng.random(len(iu)) < cfg.p_in
        for a, b in zip(members[iu[keep]], members[iv[keep]]):
            edge_labels[(int(a), int(b))] = type_name

    # cross-group edges, labeled OTHER_LABEL
    n_pairs = n * (n - 1) // 2
    want = int(rng.binomial(n_pairs, cfg.p_out))
    made = 0
    attempts = 0
    while made < want and attempts < 20 * want + 100:
        attempts += 1
        a, b = int(rng.integers(n)), int(rng.integers(n))
        if a == b:
            continue
        key = (a, b) if a < b else (b, a)
        if key in edge_labels:
            continue
        if set(memberships.get(a, ())) & set(memberships.get(b, ())):
            continue
        edge_labels[key] = OTHER_LABEL
        made += 1

    edge_list = np.array(sorted(edge_labels), dtype=np.int64)
    if len(edge_list) == 0:
        raise ValueError("configuration produced an empty edge set")

    # individual features: school cohorts are tight, workplaces looser, rest uniform
    features = rng.random((n, cfg.n_feature_dims))
    for type_name, members in groups:
        if type_name == "schoolmate":
            mu = rng.random()
            features[list(members), 0] = np.clip(
                mu + 0.03 * rng.standard_normal(len(members)), 0.0, 1.0
            )
        elif type_name == "colleague" and cfg.n_feature_dims > 1:
            mu = rng.random()
            features[list(members), 1] = np.clip(
                mu + 0.1 * rng.standard_normal(len(members)), 0.0, 1.0
            )

    # zero-inflated Poisson interactions, calibrated to the all-zero target
    label_names = sorted(cfg.rates)
    rate_matrix = np.array([cfg.rates[name] for name in label_names], dtype=np.float64)
    edge_type_idx = np.array(
        [label_names.index(edge_labels[(int(u), int(v))]) for u, v in edge_list]
    )
    rates_per_edge = rate_matrix[edge_type_idx]
    z = _tune_zero_inflation(rates_per_edge, cfg.zero_pair_target)
    counts = rng.poisson(rates_per_edge)
    silent = rng.random(rates_per_edge.shape) < z
    counts[silent] = 0

    g = Graph(
        n=n,
        edge_list=edge_list,
        node_features=minmax_normalize(features),
        interactions=counts.astype(np.int64),
        ext_ids=np.arange(n, dtype=np.int64),
    )
    return g, GroundTruth(edge_labels=edge_labels, groups=groups, memberships=memberships)


def summarize(g: Graph, gt: GroundTruth):
    """Sanity report: degrees, group-size distribution, sparsity, label mix."""
    degrees = np.array([g.degree(v) for v in range(g.n)]) if g.n else np.array([0])
    sizes = np.array([len(m) for _, m in gt.groups]) if gt.groups else np.array([0])
    zero_fraction = (
        float((g.interactions.sum(axis=1) == 0).mean()) if g.m else 0.0
    )
    label_counts = {}
    for label in gt.edge_labels.values():
        label_counts[label] = label_counts.get(label, 0) + 1
    return {
        "n_nodes": g.n,
        "n_edges": g.m,
        "degree_mean": float(degrees.mean()),
        "degree_median": float(np.median(degrees)),
        "degree_max": int(degrees.max()),
        "group_count": len(gt.groups),
        "group_size_median": float(np.median(sizes)),
        "group_size_p80": float(np.percentile(sizes, 80)) if gt.groups else 0.0,
        "zero_interaction_edge_fraction": zero_fraction,
        "label_counts": label_counts,
    }


def t_statistic_intra_vs_inter(g: Graph, gt: GroundTruth):
    """Welch t-statistic of total interaction counts, intra vs cross edges."""
    totals = g.interactions.sum(axis=1).astype(np.float64)
    is_intra = np.array(
        [gt.edge_labels[(int(u), int(v))] != OTHER_LABEL for u, v in g.edge_list]
    )
    a, b = totals[is_intra], totals[~is_intra]
    if len(a) < 2 or len(b) < 2:
        return math.inf
    var = a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b)
    return float((a.mean() - b.mean()) / math.sqrt(var)) if var > 0 else math.inf
