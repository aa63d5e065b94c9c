"""Label vocabulary and ground-truth derivation for communities."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

DEFAULT_LABELS = ("family", "colleague", "schoolmate")


@dataclass(frozen=True)
class LabelSet:
    """Ordered class names; the ordering is shared by training and inference."""

    names: tuple = DEFAULT_LABELS

    def __post_init__(self):
        if not self.names:
            raise ValueError("label set must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise ValueError("label names must be unique")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name):
        return self.names.index(name)

    def __contains__(self, name):
        return name in self.names


@dataclass(frozen=True)
class ClassResult:
    """Softmax probabilities over the label set for one community."""

    r: np.ndarray

    def __post_init__(self):
        if abs(float(self.r.sum()) - 1.0) > 1e-9 or (self.r < 0).any():
            raise ValueError("class probabilities must be non-negative and sum to 1")

    @property
    def label_index(self):
        return int(np.argmax(self.r))


def derive_community_labels(communities, edge_labels, label_set: LabelSet):
    """Majority ground-truth label per community from labeled ego-member edges.

    ``edge_labels`` maps canonical edges to label strings.  Communities with
    no labeled ego-member edge, a tied majority, or only labels outside the
    label set stay unlabeled (absent from the result).
    """
    out = {}
    for comm in communities:
        counts = Counter()
        for member in comm.members:
            key = (comm.ego, member) if comm.ego < member else (member, comm.ego)
            name = edge_labels.get(key)
            if name is not None and name in label_set:
                counts[name] += 1
        if not counts:
            continue
        ranked = counts.most_common()
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            continue
        out[(comm.ego, comm.community_index)] = label_set.index(ranked[0][0])
    return out
