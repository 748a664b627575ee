"""Splitting, the four evaluation metrics, and Table-style report rendering."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class FoldPlan:
    folds: int
    fold_ids: tuple  # per fold, frozenset of test doc ids
    seed: int


@dataclass(frozen=True)
class MetricsReport:
    exact_match: float
    f1_macro: float
    f1_micro: float
    normalized_entropy: float
    corpus: str = "corpus"
    method: str = "expert"
    K: int = 0
    fold: object = "mean"  # int or "mean"
    config_hash: str = ""
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "corpus": self.corpus,
            "method": self.method,
            "K": self.K,
            "fold": self.fold,
            "em": self.exact_match,
            "f1_macro": self.f1_macro,
            "f1_micro": self.f1_micro,
            "ne": self.normalized_entropy,
            "config_hash": self.config_hash,
            "seed": self.seed,
        }
        out.update(self.extra)
        return out


def make_folds(corpus: Corpus, folds: int = 8, seed: int = 0) -> FoldPlan:
    ids = corpus.doc_ids()
    if folds > len(ids):
        raise EvalError(f"{folds} folds exceed {len(ids)} documents")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    buckets = [[] for _ in range(folds)]
    for pos, idx in enumerate(order):
        buckets[pos % folds].append(ids[idx])
    return FoldPlan(folds=folds,
                    fold_ids=tuple(frozenset(b) for b in buckets),
                    seed=seed)


def holdout_split(corpus: Corpus, train_fraction: float = 0.8,
                  seed: int = 0):
    if not 0.0 < train_fraction < 1.0:
        raise EvalError("train fraction must be in (0, 1)")
    ids = corpus.doc_ids()
    n = len(ids)
    if n < 2:
        raise EvalError("need at least 2 documents to split")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(np.floor(n * train_fraction))
    n_train = min(max(n_train, 1), n - 1)  # neither side empty
    train = [ids[i] for i in order[:n_train]]
    test = [ids[i] for i in order[n_train:]]
    return train, test


# ---------------------------------------------------------------------------
# metrics

def exact_match(gold, pred) -> float:
    if len(gold) != len(pred):
        raise EvalError("gold/pred length mismatch")
    hits = sum(1 for g, p in zip(gold, pred) if set(g) == set(p))
    return hits / len(gold)


def f1_scores(gold, pred, label_space):
    """(micro, macro) F1 from pooled and per-class confusion counts.

    Classes with no true positives, false positives, or false negatives
    contribute F1 = 0 to the macro mean.
    """
    if len(gold) != len(pred):
        raise EvalError("gold/pred length mismatch")
    tp = {c: 0 for c in label_space}
    fp = {c: 0 for c in label_space}
    fn = {c: 0 for c in label_space}
    for g, p in zip(gold, pred):
        g, p = set(g), set(p)
        for c in g & p:
            tp[c] += 1
        for c in p - g:
            fp[c] += 1
        for c in g - p:
            fn[c] += 1
    TP = sum(tp.values())
    FP = sum(fp.values())
    FN = sum(fn.values())
    micro = 2 * TP / (2 * TP + FP + FN) if (2 * TP + FP + FN) > 0 else 0.0
    per_class = []
    for c in label_space:
        denom = 2 * tp[c] + fp[c] + fn[c]
        per_class.append(2 * tp[c] / denom if denom > 0 else 0.0)
    macro = sum(per_class) / len(per_class)
    return micro, macro


def normalized_entropy(label_counts) -> float:
    """Shannon entropy of the class-size distribution over K classes
    (zero-count classes included), divided by ln K."""
    counts = np.asarray(list(label_counts), dtype=np.float64)
    if counts.shape[0] < 1:
        raise EvalError("need at least one class")
    total = counts.sum()
    if total <= 0:
        raise EvalError("total count is zero")
    if counts.shape[0] == 1:
        warnings.warn("single-class label space: entropy is degenerate")
        return 0.0
    p = counts / total
    nz = p[p > 0]
    h = float(-(nz * np.log(nz)).sum())
    return h / np.log(counts.shape[0])


def label_counts(docs, label_space) -> list:
    counts = {c: 0 for c in label_space}
    for d in docs:
        for l in d.labels:
            counts[l] += 1
    return [counts[c] for c in label_space]


# ---------------------------------------------------------------------------
# Table-2-style rendering

_METHODS = ("expert", "supervised-ca", "unsupervised-ca")
_METRIC_COLS = (("Em", "exact_match"), ("Fma", "f1_macro"),
                ("Fmi", "f1_micro"), ("Ne", "normalized_entropy"))


def results_table(reports):
    """Markdown + JSON comparison keyed by (corpus, K) with one column group
    per method; missing cells render as an em dash."""
    reports = [r for r in reports if r.fold == "mean"] or list(reports)
    cells = {}
    keys = []
    for r in reports:
        key = (r.corpus, r.K)
        if key not in cells:
            cells[key] = {}
            keys.append(key)
        cells[key][r.method] = r
    header = ["corpus", "K"]
    for m in _METHODS:
        header.extend(f"{m}:{name}" for name, _ in _METRIC_COLS)
    lines = ["| " + " | ".join(header) + " |",
             "| " + " | ".join("---" for _ in header) + " |"]
    rows_json = []
    for corpus_id, K in keys:
        row = [corpus_id, str(K)]
        row_json = {"corpus": corpus_id, "K": K}
        for m in _METHODS:
            r = cells[(corpus_id, K)].get(m)
            for name, attr in _METRIC_COLS:
                if r is None:
                    row.append("—")
                    row_json[f"{m}:{name}"] = None
                else:
                    v = getattr(r, attr)
                    row.append(f"{v:.2f}")
                    row_json[f"{m}:{name}"] = round(v, 2)
        lines.append("| " + " | ".join(row) + " |")
        rows_json.append(row_json)
    return "\n".join(lines) + "\n", rows_json


def save_report(report: MetricsReport, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_report(path) -> MetricsReport:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {"corpus", "method", "K", "fold", "em", "f1_macro", "f1_micro",
             "ne", "config_hash", "seed"}
    return MetricsReport(
        exact_match=raw["em"], f1_macro=raw["f1_macro"],
        f1_micro=raw["f1_micro"], normalized_entropy=raw["ne"],
        corpus=raw["corpus"], method=raw["method"], K=raw["K"],
        fold=raw["fold"], config_hash=raw.get("config_hash", ""),
        seed=raw.get("seed", 0),
        extra={k: v for k, v in raw.items() if k not in known},
    )
