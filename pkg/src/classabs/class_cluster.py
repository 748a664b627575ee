"""Supervised class combination: WPGMA clustering of fine classes in LSI space.

Fine classes are represented by the centroid of their member-document LSI
vectors; the closest pair (Euclidean) is merged repeatedly, with the merged
cluster's distance to any other cluster being the arithmetic mean of its two
constituents' distances.  Cutting the merge sequence at K clusters yields the
abstract label mapping.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .corpus import Corpus


class ClusterError(Exception):
    pass


@dataclass(frozen=True)
class ClassRepresentation:
    label: str
    centroid: np.ndarray
    support: int


@dataclass(frozen=True)
class DistanceMatrix:
    labels: tuple
    d: np.ndarray  # symmetric, zero diagonal


@dataclass(frozen=True)
class MergeTree:
    labels: tuple  # leaf i corresponds to labels[i]
    merges: tuple  # (cluster_a, cluster_b, height, new_cluster_id)


@dataclass(frozen=True)
class LabelMapping:
    mapping: dict  # fine label -> abstract class id in 0..K-1
    K: int


def class_centroids(corpus: Corpus, doc_vecs: np.ndarray):
    """Mean LSI vector per fine class; multi-label documents contribute to
    every class they carry."""
    if doc_vecs.shape[0] != len(corpus.documents):
        raise ClusterError("doc_vecs not aligned with corpus")
    sums = {l: None for l in corpus.label_space}
    counts = {l: 0 for l in corpus.label_space}
    for doc, vec in zip(corpus.documents, doc_vecs):
        for l in doc.labels:
            counts[l] += 1
            sums[l] = vec.copy() if sums[l] is None else sums[l] + vec
    reps = []
    for l in sorted(corpus.label_space):
        if counts[l] == 0:
            raise ClusterError(f"class {l!r} has no documents")
        reps.append(ClassRepresentation(
            label=l, centroid=sums[l] / counts[l], support=counts[l]
        ))
    return reps


def pairwise_distances(reps) -> DistanceMatrix:
    if len(reps) < 2:
        raise ClusterError("need at least 2 class representations")
    dims = {r.centroid.shape[0] for r in reps}
    if len(dims) != 1:
        raise ClusterError("inconsistent centroid dimensions")
    X = np.stack([r.centroid for r in reps])
    diff = X[:, None, :] - X[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0
    return DistanceMatrix(labels=tuple(r.label for r in reps), d=d)


def wpgma_cluster(dist: DistanceMatrix) -> MergeTree:
    """Merge the closest pair first; d(i u j, x) = (d(i,x) + d(j,x)) / 2.

    Ties are broken by the smallest (a, b) cluster-id pair.  Leaf ids are
    0..F-1 in label order; merge m creates cluster id F+m.
    """
    F = len(dist.labels)
    if F < 2:
        raise ClusterError("need at least 2 clusters")
    d = {}
    for i in range(F):
        for j in range(i + 1, F):
            d[(i, j)] = float(dist.d[i, j])
    active = list(range(F))
    merges = []
    next_id = F
    while len(active) > 1:
        best = None
        for ia, a in enumerate(active):
            for b in active[ia + 1:]:
                key = (a, b)
                cand = (d[key], a, b)
                if best is None or cand < best:
                    best = cand
        height, a, b = best
        new_dist = {}
        for x in active:
            if x in (a, b):
                continue
            da = d[(min(a, x), max(a, x))]
            db = d[(min(b, x), max(b, x))]
            new_dist[x] = (da + db) / 2.0
        active = [x for x in active if x not in (a, b)]
        for x in active:
            d[(min(next_id, x), max(next_id, x))] = new_dist[x]
        active.append(next_id)
        merges.append((a, b, height, next_id))
        next_id += 1
    return MergeTree(labels=dist.labels, merges=tuple(merges))


def cut_tree(tree: MergeTree, K: int) -> LabelMapping:
    """Apply only the first F-K merges; abstract ids are assigned by the
    ascending smallest contained leaf id."""
    F = len(tree.labels)
    if not 1 <= K <= F:
        raise ClusterError(f"K={K} out of range 1..{F}")
    parent = list(range(F + len(tree.merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, _h, new_id in tree.merges[:F - K]:
        parent[find(a)] = new_id
        parent[find(b)] = new_id
    groups = {}
    for leaf in range(F):
        groups.setdefault(find(leaf), []).append(leaf)
    ordered = sorted(groups.values(), key=min)
    mapping = {}
    for abstract_id, leaves in enumerate(ordered):
        for leaf in leaves:
            mapping[tree.labels[leaf]] = abstract_id
    return LabelMapping(mapping=mapping, K=K)


def relabel_corpus(corpus: Corpus, mapping: LabelMapping) -> Corpus:
    missing = set().union(*(d.labels for d in corpus.documents)) - set(mapping.mapping)
    if missing:
        raise ClusterError(f"mapping not total: missing {sorted(missing)[0]!r}")
    docs = tuple(
        replace(d, labels=frozenset(mapping.mapping[l] for l in d.labels))
        for d in corpus.documents
    )
    return replace(corpus, documents=docs,
                   active_level=f"abstract-{mapping.K}",
                   label_space=tuple(range(mapping.K)))


def mergetree_to_json(tree: MergeTree) -> dict:
    return {
        "labels": list(tree.labels),
        "merges": [
            {"a": a, "b": b, "height": h, "id": nid}
            for a, b, h, nid in tree.merges
        ],
    }


def mapping_to_json(mapping: LabelMapping) -> dict:
    return {"K": mapping.K,
            "mapping": {l: c for l, c in sorted(mapping.mapping.items())}}


def save_json(obj: dict, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
