"""Pipeline orchestration: the three class-abstraction paths and the
cross-validated classification harness that scores them."""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from . import class_cluster, classify, lsi, unsup_cluster, vectorize
from .corpus import (Corpus, LEVEL_BELIEF, LEVEL_MAIN, LEVEL_THEME,
                     corpus_tokens, default_stopwords, segment_corpus,
                     project_labels)
from .evaluate import (EvalError, FoldPlan, MetricsReport, f1_scores,
                       exact_match, label_counts, make_folds,
                       normalized_entropy)

METHODS = ("expert", "supervised-ca", "unsupervised-ca")
EMBEDDING_KINDS = ("word", "sentence", "mean")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    method: str = "expert"
    K: int = 4
    lsi_topics: int = 100
    features: str = "tfidf"  # classifier features: tfidf | lsi
    min_df: int = 2
    embedding_kind: str = "mean"  # word | sentence | mean
    folds: int = 8
    seed: int = 0
    gbdt: classify.GbdtParams = field(default_factory=classify.GbdtParams)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.features not in ("tfidf", "lsi"):
            raise ConfigError(f"unknown feature kind {self.features!r}")
        if self.embedding_kind not in EMBEDDING_KINDS:
            raise ConfigError(f"unknown embedding kind {self.embedding_kind!r}")
        if self.K < 1:
            raise ConfigError("K must be >= 1")


def config_hash(config: PipelineConfig) -> str:
    blob = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# class-abstraction paths

def _expert_path(corpus: Corpus, config: PipelineConfig):
    sizes = corpus.hierarchy.level_sizes()
    for level in (LEVEL_MAIN, LEVEL_THEME, LEVEL_BELIEF):
        if sizes[level] == config.K:
            if level == LEVEL_BELIEF:
                return corpus, {"level": level}
            return project_labels(corpus, level), {"level": level}
    raise ConfigError(
        f"K={config.K} matches no hierarchy level (sizes {sizes})"
    )


def supervised_class_abstraction(corpus: Corpus, config: PipelineConfig):
    """tf-idf -> LSI -> class centroids -> WPGMA -> cut at K -> relabel."""
    vocab = vectorize.build_vocabulary(corpus, min_df=config.min_df)
    dtm = vectorize.tfidf(corpus, vocab)
    k = min(config.lsi_topics, min(dtm.matrix.shape) - 1) or 1
    model = lsi.fit_lsi(dtm, max(k, 1))
    vecs = lsi.doc_vectors(model)
    reps = class_cluster.class_centroids(corpus, vecs)
    dist = class_cluster.pairwise_distances(reps)
    tree = class_cluster.wpgma_cluster(dist)
    mapping = class_cluster.cut_tree(tree, config.K)
    relabeled = class_cluster.relabel_corpus(corpus, mapping)
    return relabeled, {"merge_tree": tree, "mapping": mapping}


def _unit_embeddings(corpus: Corpus, config: PipelineConfig,
                     embeddings, sentence_embeddings):
    """Returns (points, unit_keys, point_index_per_unit).

    word: points are the distinct in-vocabulary tokens, units are token
    occurrences; sentence: one unit per sentence; mean: one unit per document
    (its mean word embedding).
    """
    kind = config.embedding_kind
    if kind == "sentence":
        if sentence_embeddings is None:
            raise ConfigError("sentence embeddings required for kind=sentence")
        keys = []
        points = []
        for d in corpus.documents:
            for i in range(len(d.sentences)):
                keys.append((d.id, i))
                points.append(sentence_embeddings.vectors[(d.id, i)])
        return np.asarray(points), keys, list(range(len(keys)))
    if embeddings is None:
        raise ConfigError(f"word embeddings required for kind={kind}")
    stop = default_stopwords(corpus)
    if kind == "mean":
        keys = []
        points = []
        for d in corpus.documents:
            vec, _cov = vectorize.mean_word_embedding(d, embeddings, stop[d.lang])
            keys.append((d.id, 0))
            points.append(vec)
        return np.asarray(points), keys, list(range(len(keys)))
    # word: cluster distinct token vectors, vote over occurrences
    tokens = corpus_tokens(corpus, stop)
    vocab_tokens = sorted({
        t for toks in tokens for t in toks if t in embeddings.vectors
    })
    token_pos = {t: i for i, t in enumerate(vocab_tokens)}
    points = np.asarray([embeddings.vectors[t] for t in vocab_tokens])
    keys = []
    point_index = []
    for d, toks in zip(corpus.documents, tokens):
        unit = 0
        for t in toks:
            if t in token_pos:
                keys.append((d.id, unit))
                point_index.append(token_pos[t])
                unit += 1
    return points, keys, point_index


def unsupervised_class_abstraction(corpus: Corpus, config: PipelineConfig,
                                   embeddings=None,
                                   sentence_embeddings=None):
    """k-means over embedding units, then per-document majority vote."""
    if config.embedding_kind == "sentence" and not any(
            d.sentences for d in corpus.documents):
        corpus = segment_corpus(corpus)
    points, keys, point_index = _unit_embeddings(
        corpus, config, embeddings, sentence_embeddings
    )
    model = unsup_cluster.kmeans_fit(points, config.K, seed=config.seed)
    clusters = unsup_cluster.assign(model, points)
    assignments = {
        key: int(clusters[pi]) for key, pi in zip(keys, point_index)
    }
    relabeled = unsup_cluster.label_documents(corpus, assignments, config.K)
    return relabeled, {"kmeans": model, "assignments": assignments}


def apply_method(corpus: Corpus, config: PipelineConfig, embeddings=None,
                 sentence_embeddings=None):
    if config.method == "expert":
        return _expert_path(corpus, config)
    if config.method == "supervised-ca":
        return supervised_class_abstraction(corpus, config)
    return unsupervised_class_abstraction(
        corpus, config, embeddings=embeddings,
        sentence_embeddings=sentence_embeddings,
    )


# ---------------------------------------------------------------------------
# cross-validation of the classification task

def _fold_features(train_tokens, test_tokens, config: PipelineConfig):
    vocab = vectorize.build_vocabulary_from_tokens(
        train_tokens, min_df=config.min_df
    )
    train_dtm = vectorize.tfidf_from_tokens(train_tokens, vocab)
    test_dtm = vectorize.tfidf_from_tokens(test_tokens, vocab)
    if config.features == "lsi":
        k = max(1, min(config.lsi_topics, min(train_dtm.matrix.shape) - 1))
        model = lsi.fit_lsi(train_dtm, k)
        return lsi.doc_vectors(model), lsi.fold_in_matrix(model, test_dtm.matrix)
    return train_dtm.matrix, test_dtm.matrix


def cross_validate(corpus: Corpus, config: PipelineConfig,
                   plan: FoldPlan = None):
    """Train/evaluate per fold on the corpus's current label space and return
    (mean_report, fold_reports).  A fold whose training split misses a class
    is skipped from the mean with a warning."""
    if plan is None:
        plan = make_folds(corpus, folds=config.folds, seed=config.seed)
    tokens = corpus_tokens(corpus)
    by_id = dict(zip(corpus.doc_ids(), range(len(corpus))))
    space = list(corpus.label_space)
    chash = config_hash(config)
    fold_reports = []
    kept = []
    skipped = []
    for fi, test_ids in enumerate(plan.fold_ids):
        test_idx = sorted(by_id[i] for i in test_ids)
        train_idx = [i for i in range(len(corpus)) if i not in set(test_idx)]
        train_docs = [corpus.documents[i] for i in train_idx]
        test_docs = [corpus.documents[i] for i in test_idx]
        train_labels = set().union(*(d.labels for d in train_docs))
        missing = set(space) - train_labels
        base = dict(corpus=corpus.name, method=config.method, K=config.K,
                    fold=fi, config_hash=chash, seed=config.seed)
        if missing:
            warnings.warn(
                f"fold {fi}: classes {sorted(missing)} absent from training "
                "split; fold skipped from the mean"
            )
            skipped.append(fi)
            fold_reports.append(MetricsReport(
                exact_match=0.0, f1_macro=0.0, f1_micro=0.0,
                normalized_entropy=0.0,
                extra={"skipped": True}, **base,
            ))
            continue
        Xtr, Xte = _fold_features(
            [tokens[i] for i in train_idx], [tokens[i] for i in test_idx],
            config,
        )
        model = classify.train_gbdt(
            Xtr, [d.labels for d in train_docs], params=config.gbdt,
            classes=space,
        )
        pred = classify.predict(model, Xte)
        gold = [d.labels for d in test_docs]
        micro, macro = f1_scores(gold, pred, space)
        fold_reports.append(MetricsReport(
            exact_match=exact_match(gold, pred),
            f1_macro=macro, f1_micro=micro,
            normalized_entropy=normalized_entropy(
                label_counts(test_docs, space)
            ),
            **base,
        ))
        kept.append(fold_reports[-1])
    if not kept:
        raise EvalError("every fold was skipped; label space too sparse")
    mean = MetricsReport(
        exact_match=float(np.mean([r.exact_match for r in kept])),
        f1_macro=float(np.mean([r.f1_macro for r in kept])),
        f1_micro=float(np.mean([r.f1_micro for r in kept])),
        normalized_entropy=float(np.mean([r.normalized_entropy for r in kept])),
        corpus=corpus.name, method=config.method, K=config.K, fold="mean",
        config_hash=chash, seed=config.seed,
        extra={"skipped_folds": skipped, "ne_basis": "gold"},
    )
    return mean, fold_reports
