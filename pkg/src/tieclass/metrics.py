"""Multiclass precision/recall/F1 evaluation for edge predictions."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .labels import LabelSet
from .stores import read_predictions


class EvaluationError(ValueError):
    """Prediction/truth files do not align."""


@dataclass
class MetricsReport:
    labels: tuple
    confusion: np.ndarray      # rows = truth, cols = predicted
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self):
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
            "per_class": {
                name: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
                for i, name in enumerate(self.labels)
            },
            "micro": {
                "precision": self.micro_precision,
                "recall": self.micro_recall,
                "f1": self.micro_f1,
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def format_text(self):
        lines = [
            f"{'class':<14}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
        ]
        for i, name in enumerate(self.labels):
            lines.append(
                f"{name:<14}{self.precision[i]:>10.3f}{self.recall[i]:>10.3f}"
                f"{self.f1[i]:>10.3f}{int(self.support[i]):>10d}"
            )
        lines.append(
            f"{'micro':<14}{self.micro_precision:>10.3f}{self.micro_recall:>10.3f}"
            f"{self.micro_f1:>10.3f}{int(self.support.sum()):>10d}"
        )
        lines.append(
            f"{'macro':<14}{self.macro_precision:>10.3f}{self.macro_recall:>10.3f}"
            f"{self.macro_f1:>10.3f}{int(self.support.sum()):>10d}"
        )
        return "\n".join(lines)


def _f1(p, r):
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def compute_metrics(y_true, y_pred, label_set: LabelSet) -> MetricsReport:
    """Confusion-matrix metrics; every 0/0 ratio is defined as 0."""
    k = len(label_set)
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        confusion[t, p] += 1

    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    true_pos = np.diag(confusion).astype(np.float64)
    precision = np.divide(
        true_pos, predicted, out=np.zeros(k), where=predicted > 0
    )
    recall = np.divide(true_pos, support, out=np.zeros(k), where=support > 0)
    f1 = np.array([_f1(precision[i], recall[i]) for i in range(k)])

    total = confusion.sum()
    micro = float(true_pos.sum() / total) if total else 0.0
    return MetricsReport(
        labels=tuple(label_set.names),
        confusion=confusion,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        micro_precision=micro,
        micro_recall=micro,
        micro_f1=micro,
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
    )


def _read_truth(path):
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            u_s, v_s, label = line.split("\t")
            u, v = int(u_s), int(v_s)
            out[(u, v) if u < v else (v, u)] = label
    return out


def evaluate_files(pred_path, truth_path, label_set: LabelSet) -> MetricsReport:
    """Score a prediction file against ground truth (external-id keyed).

    Truth edges whose label is outside the label set are excluded; a truth
    edge with no prediction is an error.
    """
    preds = read_predictions(pred_path)
    truth = _read_truth(truth_path)
    y_true, y_pred = [], []
    for key, label in sorted(truth.items()):
        if label not in label_set:
            continue
        if key not in preds:
            raise EvaluationError(
                f"edge {key[0]} {key[1]} present in truth but missing in predictions"
            )
        y_true.append(label_set.index(label))
        y_pred.append(label_set.index(preds[key][0]))
    return compute_metrics(y_true, y_pred, label_set)
