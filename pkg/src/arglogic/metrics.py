"""Accuracy, per-class F1, macro one-vs-rest AUC, and paired bootstrap."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ValidationError, labels_for_mode


@dataclass
class MetricsReport:
    task_mode: str
    accuracy: float
    macro_f1: float
    f1: dict[str, float]
    macro_auc: float
    support_counts: dict[str, int]
    n_pairs: int


def _f1(tp, fp, fn) -> float:
    # 0/0 convention -> 0
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def _rank_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    """One-vs-rest AUC via the rank statistic, ties credited 0.5."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    # average ranks over tied groups
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    n_pos = int(positives.sum())
    n_neg = len(scores) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    r_pos = ranks[positives].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def compute_metrics(predictions: dict, golds: dict[str, str],
                    task_mode: str) -> MetricsReport:
    """Metric suite over gold-labeled pairs.

    `predictions` maps pair_id to an object with .predicted and .scores
    (relation -> continuous value used for AUC).
    """
    if not golds:
        raise ValidationError("empty evaluation set")
    labels = labels_for_mode(task_mode)
    pair_ids = sorted(golds)
    for pid in pair_ids:
        if golds[pid] not in labels:
            raise ValidationError(f"gold label {golds[pid]!r} illegal for {task_mode}")
        if pid not in predictions:
            raise ValidationError(f"missing prediction for pair {pid!r}")

    gold_arr = np.array([labels.index(golds[pid]) for pid in pair_ids])
    pred_arr = np.array([labels.index(predictions[pid].predicted) for pid in pair_ids])
    accuracy = float(np.mean(gold_arr == pred_arr))

    f1 = {}
    counts = {}
    for li, label in enumerate(labels):
        tp = int(np.sum((gold_arr == li) & (pred_arr == li)))
        fp = int(np.sum((gold_arr != li) & (pred_arr == li)))
        fn = int(np.sum((gold_arr == li) & (pred_arr != li)))
        f1[label] = _f1(tp, fp, fn)
        counts[label] = int(np.sum(gold_arr == li))
    macro_f1 = float(np.mean([f1[label] for label in labels]))

    aucs = []
    for li, label in enumerate(labels):
        scores = np.array([predictions[pid].scores.get(label, 0.0)
                           for pid in pair_ids])
        auc = _rank_auc(scores, gold_arr == li)
        if not np.isnan(auc):
            aucs.append(auc)
    macro_auc = float(np.mean(aucs)) if aucs else float("nan")

    return MetricsReport(task_mode, accuracy, macro_f1, f1, macro_auc,
                         counts, len(pair_ids))


def format_table(report: MetricsReport, name: str = "model") -> str:
    """Aligned plain-text row in ACC / AUC / F1 / per-class-F1 order."""
    labels = labels_for_mode(report.task_mode)
    headers = ["ACC", "AUC", "F1"] + [f"F1_{lbl[:3]}" for lbl in labels]
    values = [report.accuracy, report.macro_auc, report.macro_f1]
    values += [report.f1[lbl] for lbl in labels]
    head = f"{'':16s}" + "".join(f"{h:>8s}" for h in headers)
    row = f"{name:16s}" + "".join(f"{100 * v:8.1f}" for v in values)
    return head + "\n" + row


# ---------------------------------------------------------------------------
# paired bootstrap

BOOTSTRAP_METRICS = ("accuracy", "macro_f1")
SIGNIFICANCE_LEVELS = {0.05: "*", 0.01: "+", 0.001: "++"}


def _confusion_metrics(gold, pred, n_labels):
    acc = float(np.mean(gold == pred))
    f1s = []
    for li in range(n_labels):
        tp = np.sum((gold == li) & (pred == li))
        fp = np.sum((gold != li) & (pred == li))
        fn = np.sum((gold == li) & (pred != li))
        f1s.append(_f1(tp, fp, fn))
    return {"accuracy": acc, "macro_f1": float(np.mean(f1s))}


def paired_bootstrap(pred_a: dict, pred_b: dict, golds: dict[str, str],
                     task_mode: str, n_resamples: int = 10_000,
                     seed: int = 0) -> dict[str, float]:
    """One-sided test: p = fraction of resamples where system A does not
    outperform system B on the metric.  Per-resample seeds are derived
    as seed + index, so the test is deterministic and parallelizable."""
    labels = labels_for_mode(task_mode)
    pair_ids = sorted(golds)
    if set(pair_ids) - set(pred_a) or set(pair_ids) - set(pred_b):
        raise ValidationError("prediction sets are not aligned on the gold pairs")
    n = len(pair_ids)
    gold = np.array([labels.index(golds[pid]) for pid in pair_ids])
    a = np.array([labels.index(pred_a[pid].predicted) for pid in pair_ids])
    b = np.array([labels.index(pred_b[pid].predicted) for pid in pair_ids])

    losses = {m: 0 for m in BOOTSTRAP_METRICS}
    for i in range(n_resamples):
        idx = np.random.default_rng(seed + i).integers(0, n, size=n)
        ma = _confusion_metrics(gold[idx], a[idx], len(labels))
        mb = _confusion_metrics(gold[idx], b[idx], len(labels))
        for m in BOOTSTRAP_METRICS:
            if ma[m] <= mb[m]:
                losses[m] += 1
    return {m: losses[m] / n_resamples for m in BOOTSTRAP_METRICS}


def significance_marker(p: float) -> str:
    marker = ""
    for level in sorted(SIGNIFICANCE_LEVELS, reverse=True):
        if p < level:
            marker = SIGNIFICANCE_LEVELS[level]
    return marker
