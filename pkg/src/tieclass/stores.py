"""Text-file stores for the artifacts passed between pipeline phases.

Formats (tab-separated, '#' comments, floats written with round-trip
precision):

    communities:   ego <TAB> community_index <TAB> member,member,...
    tightness:     ego <TAB> node <TAB> community_index <TAB> value
    class results: ego <TAB> community_index <TAB> p_1,...,p_|L|
    predictions:   u <TAB> v <TAB> predicted_label <TAB> p_1,...,p_|L|
"""

from __future__ import annotations

import numpy as np

from .communities import LocalCommunity


class MissingEgoError(KeyError):
    """Phase I output does not cover a required ego network."""


class CommunityStore:
    """Phase I output: local communities per ego, with membership lookup."""

    def __init__(self):
        self.by_ego = {}
        self._member_index = {}

    def add(self, ego, communities):
        self.by_ego[ego] = list(communities)
        self._member_index[ego] = {
            m: c.community_index for c in communities for m in c.members
        }

    def egos(self):
        return sorted(self.by_ego)

    def communities(self, ego):
        if ego not in self.by_ego:
            raise MissingEgoError(f"no phase-1 output for ego {ego}")
        return self.by_ego[ego]

    def all_communities(self):
        for ego in self.egos():
            yield from self.by_ego[ego]

    def community_of(self, ego, node) -> LocalCommunity:
        """The unique community of `node` inside `ego`'s ego network."""
        if ego not in self.by_ego:
            raise MissingEgoError(f"no phase-1 output for ego {ego}")
        cidx = self._member_index[ego].get(node)
        if cidx is None:
            raise KeyError(f"node {node} is not a member of ego network {ego}")
        return self.by_ego[ego][cidx]

    def write(self, path, ext_ids=None):
        ids = (lambda x: int(ext_ids[x])) if ext_ids is not None else int
        with open(path, "w", encoding="utf-8") as fh:
            for ego in self.egos():
                for comm in self.by_ego[ego]:
                    members = ",".join(str(ids(m)) for m in comm.members)
                    fh.write(f"{ids(ego)}\t{comm.community_index}\t{members}\n")

    @classmethod
    def read(cls, path, ext_to_dense=None):
        conv = (lambda x: ext_to_dense[int(x)]) if ext_to_dense is not None else int
        store = cls()
        pending = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                ego_s, cidx_s, members_s = line.split("\t")
                ego = conv(ego_s)
                members = tuple(sorted(conv(m) for m in members_s.split(",")))
                pending.setdefault(ego, []).append(
                    LocalCommunity(
                        ego=ego, members=members, community_index=int(cidx_s)
                    )
                )
        for ego, comms in pending.items():
            store.add(ego, sorted(comms, key=lambda c: c.community_index))
        return store


def write_tightness(path, tightness, store: CommunityStore, ext_ids=None):
    """tightness maps (ego, node) -> value."""
    ids = (lambda x: int(ext_ids[x])) if ext_ids is not None else int
    with open(path, "w", encoding="utf-8") as fh:
        for ego in store.egos():
            for comm in store.communities(ego):
                for node in comm.members:
                    fh.write(
                        f"{ids(ego)}\t{ids(node)}\t{comm.community_index}\t"
                        f"{tightness[(ego, node)]!r}\n"
                    )


def read_tightness(path, ext_to_dense=None):
    conv = (lambda x: ext_to_dense[int(x)]) if ext_to_dense is not None else int
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            ego_s, node_s, _cidx, value = line.split("\t")
            out[(conv(ego_s), conv(node_s))] = float(value)
    return out


def write_class_results(path, results, ext_ids=None):
    """results maps (ego, community_index) -> probability vector."""
    ids = (lambda x: int(ext_ids[x])) if ext_ids is not None else int
    with open(path, "w", encoding="utf-8") as fh:
        for (ego, cidx) in sorted(results):
            probs = ",".join(repr(float(p)) for p in results[(ego, cidx)])
            fh.write(f"{ids(ego)}\t{cidx}\t{probs}\n")


def read_class_results(path, ext_to_dense=None):
    conv = (lambda x: ext_to_dense[int(x)]) if ext_to_dense is not None else int
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            ego_s, cidx_s, probs_s = line.split("\t")
            out[(conv(ego_s), int(cidx_s))] = np.array(
                [float(p) for p in probs_s.split(",")]
            )
    return out


def write_predictions(path, predictions, label_set, ext_ids=None):
    """predictions maps canonical (u, v) -> (label_index, probability vector)."""
    ids = (lambda x: int(ext_ids[x])) if ext_ids is not None else int
    with open(path, "w", encoding="utf-8") as fh:
        for (u, v) in sorted(predictions):
            idx, probs = predictions[(u, v)]
            fh.write(
                f"{ids(u)}\t{ids(v)}\t{label_set.names[idx]}\t"
                + ",".join(repr(float(p)) for p in probs)
                + "\n"
            )


def read_predictions(path):
    """Predictions keyed by external-id canonical pair."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            u_s, v_s, label, probs_s = line.split("\t")
            u, v = int(u_s), int(v_s)
            key = (u, v) if u < v else (v, u)
            out[key] = (label, np.array([float(p) for p in probs_s.split(",")]))
    return out
