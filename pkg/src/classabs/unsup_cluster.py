"""Unsupervised class abstraction: seeded k-means over embedding vectors and
majority-vote document labeling (ties produce multi-labels)."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .corpus import Corpus


class KMeansError(Exception):
    pass


@dataclass(frozen=True)
class KMeansModel:
    k: int
    centroids: np.ndarray
    inertia: float
    iterations: int
    seed: int


@dataclass(frozen=True)
class KSelectionReport:
    rows: tuple  # (k, inertia, aic, bic)
    chosen_k: int
    criterion: str
    degenerate: tuple  # k values with zero inertia


def _plusplus_init(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[int(rng.integers(n))]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            idx = int(rng.choice(n, p=probs))
        else:
            idx = int(rng.integers(n))
        centroids[c] = X[idx]
        d2 = np.minimum(d2, ((X - centroids[c]) ** 2).sum(axis=1))
    return centroids


def _assign(X, centroids):
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1), d2


def kmeans_fit(points, k: int, seed: int = 0,
               max_iter: int = 300) -> KMeansModel:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise KMeansError("points must be a non-empty 2-D array")
    distinct = np.unique(X, axis=0).shape[0]
    if k > distinct:
        raise KMeansError(f"k={k} exceeds {distinct} distinct points")
    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(X, k, rng)
    labels = None
    prev_inertia = np.inf
    iters = 0
    for iters in range(1, max_iter + 1):
        new_labels, d2 = _assign(X, centroids)
        # empty-cluster repair: give the point farthest from its centroid
        for c in range(k):
            if not np.any(new_labels == c):
                dist_own = d2[np.arange(X.shape[0]), new_labels]
                far = int(np.argmax(dist_own))
                new_labels[far] = c
                centroids[c] = X[far]
        inertia = float(((X - centroids[new_labels]) ** 2).sum())
        assert inertia <= prev_inertia + 1e-9, "Lloyd inertia increased"
        prev_inertia = inertia
        if labels is not None and np.array_equal(labels, new_labels):
            labels = new_labels
            break
        labels = new_labels
        for c in range(k):
            centroids[c] = X[labels == c].mean(axis=0)
    inertia = float(((X - centroids[labels]) ** 2).sum())
    return KMeansModel(k=k, centroids=centroids.copy(), inertia=inertia,
                       iterations=iters, seed=seed)


def assign(model: KMeansModel, points):
    """Nearest centroid by Euclidean distance; ties go to the lowest id."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.centroids.shape[1]:
        raise KMeansError("dimension mismatch")
    labels, _ = _assign(X, model.centroids)
    return labels


def select_k(points, k_range, seed: int = 0) -> KSelectionReport:
    """Fit each candidate k and score it with spherical-Gaussian AIC/BIC:

        AIC = n*d*ln(inertia/(n*d)) + 2*k*d
        BIC = n*d*ln(inertia/(n*d)) + k*d*ln(n)

    The chosen k minimizes BIC; zero-inertia fits score -inf and are flagged.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise KMeansError("empty k range")
    X = np.asarray(points, dtype=np.float64)
    n, d = X.shape
    rows = []
    degenerate = []
    for k in ks:
        model = kmeans_fit(X, k, seed=seed)
        if model.inertia <= 0.0:
            degenerate.append(k)
            rows.append((k, model.inertia, -np.inf, -np.inf))
            warnings.warn(f"k={k}: zero inertia (perfect fit)")
            continue
        base = n * d * np.log(model.inertia / (n * d))
        rows.append((k, model.inertia,
                     float(base + 2 * k * d),
                     float(base + k * d * np.log(n))))
    chosen = min(rows, key=lambda r: (r[3], r[0]))[0]
    return KSelectionReport(rows=tuple(rows), chosen_k=chosen,
                            criterion="bic", degenerate=tuple(degenerate))


def label_documents(corpus: Corpus, unit_assignments: dict, k: int) -> Corpus:
    """Document labels = most frequent cluster(s) among its units (sentences,
    words, or a single document-level unit); a tie keeps all tied clusters."""
    per_doc = {d.id: [] for d in corpus.documents}
    for (doc_id, _unit), cluster in unit_assignments.items():
        if doc_id not in per_doc:
            raise KMeansError(f"assignment references unknown doc {doc_id!r}")
        per_doc[doc_id].append(int(cluster))
    docs = []
    for d in corpus.documents:
        units = per_doc[d.id]
        if not units:
            raise KMeansError(f"document {d.id!r} has no assigned units")
        counts = {}
        for c in units:
            counts[c] = counts.get(c, 0) + 1
        top = max(counts.values())
        docs.append(replace(
            d, labels=frozenset(c for c, n in counts.items() if n == top)
        ))
    return replace(corpus, documents=tuple(docs),
                   active_level=f"abstract-{k}",
                   label_space=tuple(range(k)))


def selection_report_to_json(report: KSelectionReport) -> dict:
    return {
        "criterion": report.criterion,
        "chosen_k": report.chosen_k,
        "degenerate": list(report.degenerate),
        "rows": [
            {"k": k, "inertia": inertia, "aic": aic, "bic": bic}
            for k, inertia, aic, bic in report.rows
        ],
    }
