"""Synthetic corpora with a planted fine-class / coarse-group structure.

Each fine class owns a disjoint signature vocabulary; classes in the same
coarse group additionally share a group vocabulary.  Documents mix signature,
group and noise tokens.  A matching synthetic embedding table places group
vocabularies far apart so the planted grouping is recoverable from document
embeddings.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .corpus import Corpus, Document, LabelHierarchy, LEVEL_BELIEF

NOISE_VOCAB_SIZE = 50

OUTLIER_CLASS = "outlier"
OUTLIER_THEME = "outlier_theme"
OUTLIER_MAIN = "outlier_main"


def _class_label(ci: int) -> str:
    return f"class{ci:02d}"


def _group_label(gi: int) -> str:
    return f"group{gi}"


def _sig_token(ci: int, t: int) -> str:
    return f"c{ci:02d}w{t:02d}"


def _group_token(gi: int, t: int) -> str:
    return f"g{gi}w{t:02d}"


def _noise_token(t: int) -> str:
    return f"noise{t:03d}"


def generate_synthetic_corpus(fine_classes: int, groups: int,
                              docs_per_class: int, sig_size: int = 8,
                              noise_rate: float = 0.1, seed: int = 0,
                              doc_len: int = 14,
                              sig_share: float = 0.35) -> Corpus:
    """Deterministic corpus with `fine_classes` beliefs in `groups` themes.

    Non-noise tokens are drawn from the class signature with probability
    `sig_share`, otherwise from the group vocabulary.
    """
    if fine_classes % groups != 0:
        raise ValueError(
            f"fine class count {fine_classes} not divisible by {groups} groups"
        )
    if docs_per_class < 1:
        raise ValueError("docs_per_class must be >= 1")
    if sig_size < 1:
        raise ValueError("signature vocabulary must be non-empty")

    per_group = fine_classes // groups
    rng = np.random.default_rng(seed)
    docs = []
    for ci in range(fine_classes):
        gi = ci // per_group
        label = _class_label(ci)
        for di in range(docs_per_class):
            tokens = []
            for _ in range(doc_len):
                if rng.random() < noise_rate:
                    tokens.append(_noise_token(int(rng.integers(NOISE_VOCAB_SIZE))))
                elif rng.random() < sig_share:
                    tokens.append(_sig_token(ci, int(rng.integers(sig_size))))
                else:
                    tokens.append(_group_token(gi, int(rng.integers(sig_size))))
            docs.append(Document(
                id=f"d{ci:02d}_{di:03d}", lang="en",
                text=" ".join(tokens), labels=frozenset([label]),
            ))
    hierarchy = LabelHierarchy(
        belief_to_theme={
            _class_label(ci): _group_label(ci // per_group)
            for ci in range(fine_classes)
        },
        theme_to_main={_group_label(gi): "main0" for gi in range(groups)},
    )
    return Corpus(
        documents=tuple(docs), hierarchy=hierarchy,
        active_level=LEVEL_BELIEF,
        label_space=tuple(sorted(hierarchy.beliefs)),
        name=f"synthetic_f{fine_classes}_g{groups}_s{seed}",
    )


def add_outlier_class(corpus: Corpus, docs: int = 3, sig_size: int = 8,
                      doc_len: int = 14, seed: int = 0) -> Corpus:
    """Append a tiny class whose vocabulary is disjoint from everything else."""
    rng = np.random.default_rng(seed)
    extra = []
    for di in range(docs):
        tokens = [f"out{int(rng.integers(sig_size)):02d}" for _ in range(doc_len)]
        extra.append(Document(
            id=f"dout_{di:03d}", lang="en", text=" ".join(tokens),
            labels=frozenset([OUTLIER_CLASS]),
        ))
    hierarchy = LabelHierarchy(
        belief_to_theme={**corpus.hierarchy.belief_to_theme,
                         OUTLIER_CLASS: OUTLIER_THEME},
        theme_to_main={**corpus.hierarchy.theme_to_main,
                       OUTLIER_THEME: OUTLIER_MAIN},
    )
    return replace(
        corpus,
        documents=corpus.documents + tuple(extra),
        hierarchy=hierarchy,
        label_space=tuple(sorted(hierarchy.beliefs)),
        name=corpus.name + "_outlier",
    )


def synthetic_embeddings(fine_classes: int, groups: int, sig_size: int = 8,
                         dim: int = 16, seed: int = 0,
                         group_scale: float = 2.0, class_scale: float = 0.3,
                         noise_scale: float = 0.5):
    """Token -> vector map matching `generate_synthetic_corpus` vocabularies.

    Group vocabularies sit around well-separated group centers, so document
    mean embeddings cluster by planted group.  Returns a plain dict usable to
    build an EmbeddingTable or write a fastText-format file.
    """
    if groups > dim:
        raise ValueError("need dim >= groups for separated group centers")
    per_group = fine_classes // groups
    rng = np.random.default_rng(seed)
    # orthogonal group centers guarantee inter-group separation
    group_centers = np.zeros((groups, dim))
    for gi in range(groups):
        group_centers[gi, gi] = group_scale * 4.0
    class_centers = rng.normal(size=(fine_classes, dim)) * class_scale
    vectors = {}
    for gi in range(groups):
        for t in range(sig_size):
            vectors[_group_token(gi, t)] = (
                group_centers[gi] + rng.normal(size=dim) * 0.05
            )
    for ci in range(fine_classes):
        gi = ci // per_group
        for t in range(sig_size):
            vectors[_sig_token(ci, t)] = (
                group_centers[gi] + class_centers[ci]
                + rng.normal(size=dim) * 0.05
            )
    for t in range(NOISE_VOCAB_SIZE):
        vectors[_noise_token(t)] = rng.normal(size=dim) * noise_scale
    return vectors


def write_fasttext_file(vectors: dict, path):
    """Write a token->vector map in fastText text format (`count dim` header)."""
    dims = {v.shape[0] for v in vectors.values()}
    if len(dims) != 1:
        raise ValueError("inconsistent vector dimensions")
    dim = dims.pop()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for token in sorted(vectors):
            vals = " ".join(f"{x:.6f}" for x in vectors[token])
            fh.write(f"{token} {vals}\n")
