"""Unsupervised baselines operating on the same score bundles."""

from __future__ import annotations

import numpy as np

from .infer import PairPrediction
from .model import (
    ATTACK,
    NEUTRAL,
    SUPPORT,
    ArgumentGraph,
    ScoreBundle,
    default_label,
    labels_for_mode,
)


def _one_hot(label: str, task_mode: str) -> dict[str, float]:
    return {rel: 1.0 if rel == label else 0.0 for rel in labels_for_mode(task_mode)}


def _wrap(pair_id, label, task_mode) -> PairPrediction:
    return PairPrediction(pair_id, _one_hot(label, task_mode), label, 0.0, True)


def predict_random(graph: ArgumentGraph, seed: int) -> dict[str, PairPrediction]:
    """Uniform over the legal labels, reproducible per seed."""
    rng = np.random.default_rng(seed)
    labels = labels_for_mode(graph.task_mode)
    out = {}
    for pair in sorted(graph.direct_pairs(), key=lambda p: p.pair_id):
        label = labels[rng.integers(len(labels))]
        out[pair.pair_id] = _wrap(pair.pair_id, label, graph.task_mode)
    return out


def _mean_polarity(dists) -> tuple[float, float, float]:
    n = len(dists)
    pos = sum(d.p_pos for d in dists) / n
    neg = sum(d.p_neg for d in dists) / n
    neu = sum(d.p_neu for d in dists) / n
    return pos, neg, neu


def _argmax_polarity(pos, neg, neu) -> str:
    best = max(pos, neg, neu)
    # ties resolve toward neutral, then negative
    if neu >= best:
        return "neu"
    if neg >= best:
        return "neg"
    return "pos"


def predict_sentiment(graph: ArgumentGraph,
                      bundles: dict[str, ScoreBundle]) -> dict[str, PairPrediction]:
    """Label from the statement's and claim's average target sentiment:
    matching polarities -> support, opposite -> attack, else neutral.
    Binary mode replaces the neutral case by whichever of agreement or
    opposition mass is larger."""
    mode = graph.task_mode
    fallback = default_label(mode)
    out = {}
    for pair in sorted(graph.direct_pairs(), key=lambda p: p.pair_id):
        bundle = bundles.get(pair.pair_id)
        if bundle is None or not bundle.senti_pairs:
            out[pair.pair_id] = _wrap(pair.pair_id, fallback, mode)
            continue
        s_pos, s_neg, s_neu = _mean_polarity([sp.s_stmt for sp in bundle.senti_pairs])
        c_pos, c_neg, c_neu = _mean_polarity([sp.s_claim for sp in bundle.senti_pairs])
        ps = _argmax_polarity(s_pos, s_neg, s_neu)
        pc = _argmax_polarity(c_pos, c_neg, c_neu)
        if ps in ("pos", "neg") and ps == pc:
            label = SUPPORT
        elif {ps, pc} == {"pos", "neg"}:
            label = ATTACK
        elif mode == "ternary":
            label = NEUTRAL
        else:
            agreement = s_pos * c_pos + s_neg * c_neg
            opposition = s_pos * c_neg + s_neg * c_pos
            label = SUPPORT if agreement >= opposition else ATTACK
        out[pair.pair_id] = _wrap(pair.pair_id, label, mode)
    return out


def predict_entailment(graph: ArgumentGraph,
                       bundles: dict[str, ScoreBundle]) -> dict[str, PairPrediction]:
    """Support if the statement entails the claim, attack if it
    contradicts it, neutral otherwise; binary mode picks the larger of
    entail/contradict (ties -> support)."""
    mode = graph.task_mode
    fallback = default_label(mode)
    out = {}
    for pair in sorted(graph.direct_pairs(), key=lambda p: p.pair_id):
        bundle = bundles.get(pair.pair_id)
        if bundle is None or bundle.nli is None:
            out[pair.pair_id] = _wrap(pair.pair_id, fallback, mode)
            continue
        nli = bundle.nli
        if mode == "binary":
            label = SUPPORT if nli.p_ent >= nli.p_con else ATTACK
        else:
            best = max(nli.p_ent, nli.p_con, nli.p_neu)
            if nli.p_neu >= best:
                label = NEUTRAL
            elif nli.p_con >= best:
                label = ATTACK
            else:
                label = SUPPORT
        out[pair.pair_id] = _wrap(pair.pair_id, label, mode)
    return out


BASELINES = {
    "random": lambda graph, bundles, seed: predict_random(graph, seed),
    "sentiment": lambda graph, bundles, seed: predict_sentiment(graph, bundles),
    "entailment": lambda graph, bundles, seed: predict_entailment(graph, bundles),
}
