"""Undirected social graph with node features and per-edge interaction counts."""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field


class GraphFormatError(ValueError):
    """Raised when an input file violates the documented formats."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


def canonical(u, v):
    """Edge key with the smaller endpoint first."""
    return (u, v) if u < v else (v, u)


@dataclass
class Graph:
    """Immutable undirected graph over dense node ids 0..n-1.

    Edges are stored once under canonical order (min, max); interaction
    count vectors are indexed by edge row.  ``ext_ids[i]`` is the external
    id that was remapped to dense id ``i``.
    """

    n: int
    edge_list: np.ndarray          # (m, 2) int64, canonical, lexicographically sorted
    node_features: np.ndarray      # (n, |f|) float64, min-max normalized per dimension
    interactions: np.ndarray       # (m, |I|) int64, zero rows for silent edges
    ext_ids: np.ndarray            # (n,) int64 dense -> external
    adj: list = field(repr=False, default=None)           # per-node sorted neighbor arrays
    edge_index: dict = field(repr=False, default=None)    # canonical pair -> edge row

    def __post_init__(self):
        if self.adj is None:
            self.adj = _build_adjacency(self.n, self.edge_list)
        if self.edge_index is None:
            self.edge_index = {
                (int(u), int(v)): i for i, (u, v) in enumerate(self.edge_list)
            }

    @property
    def m(self):
        return self.edge_list.shape[0]

    @property
    def n_feature_dims(self):
        return self.node_features.shape[1]

    @property
    def n_interaction_dims(self):
        return self.interactions.shape[1]

    def degree(self, v):
        return len(self.adj[v])

    def has_edge(self, u, v):
        return canonical(u, v) in self.edge_index

    def interaction_vector_for(self, u, v):
        """Counts for edge (u, v); zeros if the pair is not an edge."""
        row = self.edge_index.get(canonical(u, v))
        if row is None:
            return np.zeros(self.n_interaction_dims, dtype=np.int64)
        return self.interactions[row]


@dataclass(frozen=True)
class EgoNetwork:
    """Subgraph induced on one node's neighbors; the ego itself is excluded."""

    ego: int
    members: np.ndarray        # sorted ascending
    member_edges: np.ndarray   # (me, 2) int64, canonical, lexicographically sorted

    @property
    def size(self):
        return len(self.members)

    def member_degrees(self):
        """Degree of every member within the ego network, aligned with members."""
        deg = np.zeros(len(self.members), dtype=np.int64)
        if len(self.member_edges):
            pos = np.searchsorted(self.members, self.member_edges.ravel())
            np.add.at(deg, pos, 1)
        return deg


def _build_adjacency(n, edge_list):
    adj = [[] for _ in range(n)]
    for u, v in edge_list:
        adj[int(u)].append(int(v))
        adj[int(v)].append(int(u))
    return [np.array(sorted(a), dtype=np.int64) for a in adj]


def ego_network(g: Graph, v: int) -> EgoNetwork:
    """Extract the ego network of v: its neighbors and the edges among them."""
    if not 0 <= v < g.n:
        raise ValueError(f"node id {v} out of range 0..{g.n - 1}")
    members = g.adj[v]
    edges = []
    nm = len(members)
    for u in members:
        nb = g.adj[u]
        # neighbors of u that are also members and larger than u (each edge once)
        idx = np.searchsorted(members, nb)
        idx[idx >= nm] = nm - 1 if nm else 0
        hit = nb[(members[idx] == nb) & (nb > u)] if nm else nb[:0]
        for w in hit:
            edges.append((int(u), int(w)))
    edges.sort()
    member_edges = (
        np.array(edges, dtype=np.int64) if edges else np.empty((0, 2), dtype=np.int64)
    )
    return EgoNetwork(ego=int(v), members=members, member_edges=member_edges)


def _parse_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            yield lineno, line


def _header_int(path, line, lineno, key):
    prefix = f"#{key}="
    if not line.startswith(prefix):
        raise GraphFormatError(path, lineno, f"expected header '{prefix}<int>'")
    try:
        value = int(line[len(prefix):])
    except ValueError:
        raise GraphFormatError(path, lineno, f"malformed header '{line}'") from None
    if value < 1:
        raise GraphFormatError(path, lineno, f"{key} must be >= 1, got {value}")
    return value


def minmax_normalize(features):
    """Scale each column onto [0, 1]; constant columns collapse to 0 (idempotent)."""
    lo = features.min(axis=0)
    hi = features.max(axis=0)
    span = hi - lo
    out = np.zeros_like(features)
    nz = span > 0
    out[:, nz] = (features[:, nz] - lo[nz]) / span[nz]
    return out


def load_graph(edge_path, feature_path, interaction_path) -> Graph:
    """Load and validate a graph from the three documented text files.

    External ids are remapped onto dense 0..n-1 ids (ascending external
    order); the mapping is kept on the returned Graph.  Node features are
    min-max normalized per dimension.
    """
    # feature file defines the node universe
    n_f = None
    feat_rows = {}
    for lineno, line in _parse_lines(feature_path):
        if line.startswith("#"):
            if n_f is None:
                n_f = _header_int(feature_path, line, lineno, "|f|")
            continue
        if n_f is None:
            raise GraphFormatError(feature_path, lineno, "missing '#|f|=<int>' header")
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphFormatError(feature_path, lineno, f"malformed line '{line}'")
        try:
            ext = int(parts[0])
            values = [float(x) for x in parts[1].split(",")]
        except ValueError:
            raise GraphFormatError(
                feature_path, lineno, f"malformed line '{line}'"
            ) from None
        if ext < 0:
            raise GraphFormatError(feature_path, lineno, f"negative node id {ext}")
        if len(values) != n_f:
            raise GraphFormatError(
                feature_path,
                lineno,
                f"feature length {len(values)} != |f|={n_f} for node {ext}",
            )
        if ext in feat_rows:
            raise GraphFormatError(feature_path, lineno, f"duplicate node {ext}")
        feat_rows[ext] = values
    if not feat_rows:
        raise GraphFormatError(feature_path, 0, "no feature rows")

    ext_ids = np.array(sorted(feat_rows), dtype=np.int64)
    dense = {int(e): i for i, e in enumerate(ext_ids)}
    features = np.array([feat_rows[int(e)] for e in ext_ids], dtype=np.float64)

    # edges
    edges = set()
    for lineno, line in _parse_lines(edge_path):
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphFormatError(edge_path, lineno, f"malformed line '{line}'")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(edge_path, lineno, f"malformed line '{line}'") from None
        if a == b:
            raise GraphFormatError(edge_path, lineno, f"self-loop on node {a}")
        for x in (a, b):
            if x not in dense:
                raise GraphFormatError(edge_path, lineno, f"node {x} has no feature row")
        key = canonical(dense[a], dense[b])
        if key in edges:
            raise GraphFormatError(edge_path, lineno, f"duplicate edge {a} {b}")
        edges.add(key)
    edge_list = (
        np.array(sorted(edges), dtype=np.int64) if edges else np.empty((0, 2), dtype=np.int64)
    )
    edge_row = {(int(u), int(v)): i for i, (u, v) in enumerate(edge_list)}

    # interactions, defined only on existing edges
    n_i = None
    inter = None
    seen = set()
    for lineno, line in _parse_lines(interaction_path):
        if line.startswith("#"):
            if n_i is None:
                n_i = _header_int(interaction_path, line, lineno, "|I|")
                inter = np.zeros((len(edge_list), n_i), dtype=np.int64)
            continue
        if n_i is None:
            raise GraphFormatError(
                interaction_path, lineno, "missing '#|I|=<int>' header"
            )
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(interaction_path, lineno, f"malformed line '{line}'")
        try:
            a, b = int(parts[0]), int(parts[1])
            counts = [int(x) for x in parts[2].split(",")]
        except ValueError:
            raise GraphFormatError(
                interaction_path, lineno, f"malformed line '{line}'"
            ) from None
        if len(counts) != n_i:
            raise GraphFormatError(
                interaction_path,
                lineno,
                f"interaction length {len(counts)} != |I|={n_i}",
            )
        if any(c < 0 for c in counts):
            raise GraphFormatError(interaction_path, lineno, "negative interaction count")
        if a not in dense or b not in dense:
            raise GraphFormatError(
                interaction_path, lineno, f"unknown node in pair {a} {b}"
            )
        key = canonical(dense[a], dense[b])
        if key not in edge_row:
            raise GraphFormatError(
                interaction_path,
                lineno,
                f"interaction on non-edge {a} {b}; interactions are defined only on edges",
            )
        if key in seen:
            raise GraphFormatError(interaction_path, lineno, f"duplicate pair {a} {b}")
        seen.add(key)
        inter[edge_row[key]] = counts
    if n_i is None:
        raise GraphFormatError(interaction_path, 0, "missing '#|I|=<int>' header")

    return Graph(
        n=len(ext_ids),
        edge_list=edge_list,
        node_features=minmax_normalize(features),
        interactions=inter,
        ext_ids=ext_ids,
    )


def save_graph(g: Graph, edge_path, feature_path, interaction_path):
    """Write a graph back out in the load formats, using external ids.

    Loading the written files reproduces the graph bit-identically: floats
    are written with full round-trip precision and min-max normalization is
    idempotent.
    """
    with open(edge_path, "w", encoding="utf-8") as fh:
        for u, v in g.edge_list:
            fh.write(f"{g.ext_ids[u]}\t{g.ext_ids[v]}\n")
    with open(feature_path, "w", encoding="utf-8") as fh:
        fh.write(f"#|f|={g.n_feature_dims}\n")
        for i in range(g.n):
            row = ",".join(repr(float(x)) for x in g.node_features[i])
            fh.write(f"{g.ext_ids[i]}\t{row}\n")
    with open(interaction_path, "w", encoding="utf-8") as fh:
        fh.write(f"#|I|={g.n_interaction_dims}\n")
        for row, (u, v) in enumerate(g.edge_list):
            counts = g.interactions[row]
            if counts.any():
                fh.write(
                    f"{g.ext_ids[u]}\t{g.ext_ids[v]}\t"
                    + ",".join(str(int(c)) for c in counts)
                    + "\n"
                )


def load_edge_labels(path, g: Graph):
    """Read 'u<TAB>v<TAB>label' ground truth, keyed by dense canonical edge."""
    rev = {int(e): i for i, e in enumerate(g.ext_ids)}
    labels = {}
    for lineno, line in _parse_lines(path):
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(path, lineno, f"malformed line '{line}'")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(path, lineno, f"malformed line '{line}'") from None
        if a not in rev or b not in rev:
            raise GraphFormatError(path, lineno, f"unknown node in pair {a} {b}")
        key = canonical(rev[a], rev[b])
        if key in labels:
            raise GraphFormatError(path, lineno, f"duplicate label for edge {a} {b}")
        labels[key] = parts[2]
    return labels


def save_edge_labels(labels, g: Graph, path):
    """Write ground-truth edge labels using external ids, canonical order."""
    with open(path, "w", encoding="utf-8") as fh:
        for (u, v) in sorted(labels):
            fh.write(f"{g.ext_ids[u]}\t{g.ext_ids[v]}\t{labels[(u, v)]}\n")
