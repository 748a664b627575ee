"""tf-idf document-term matrices and pre-trained embedding ingestion."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, Document, corpus_tokens
from .stopwords import StopwordList


class VectorizeError(Exception):
    pass


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple
    doc_freq: tuple
    n_docs: int

    def __post_init__(self):
        if not self.terms:
            raise VectorizeError("empty vocabulary: min_df filtered every term")

    @property
    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class DocTermMatrix:
    matrix: sp.csr_matrix  # rows = documents in corpus order
    normalized: bool


def build_vocabulary_from_tokens(tokens, min_df: int = 2,
                                 n_docs: int = None) -> Vocabulary:
    df = {}
    for toks in tokens:
        for t in set(toks):
            df[t] = df.get(t, 0) + 1
    kept = sorted(t for t, c in df.items() if c >= min_df)
    return Vocabulary(
        terms=tuple(kept),
        doc_freq=tuple(df[t] for t in kept),
        n_docs=n_docs if n_docs is not None else len(tokens),
    )


def build_vocabulary(corpus: Corpus, min_df: int = 2,
                     stopword_map: dict = None) -> Vocabulary:
    return build_vocabulary_from_tokens(
        corpus_tokens(corpus, stopword_map), min_df=min_df
    )


def tfidf_from_tokens(tokens, vocab: Vocabulary,
                      normalize: bool = True) -> DocTermMatrix:
    """weight(d, t) = tf(d, t) * ln(N / df(t)); optional L2 row norm.

    N and df come from the vocabulary, so held-out documents are weighted
    with training statistics.
    """
    index = vocab.index
    idf = np.log(vocab.n_docs / np.asarray(vocab.doc_freq, dtype=np.float64))
    rows, cols, vals = [], [], []
    for i, toks in enumerate(tokens):
        counts = {}
        for t in toks:
            j = index.get(t)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j, c in sorted(counts.items()):
            w = c * idf[j]
            if w != 0.0:
                rows.append(i)
                cols.append(j)
                vals.append(w)
    m = sp.csr_matrix(
        (vals, (rows, cols)), shape=(len(tokens), len(vocab)),
        dtype=np.float64,
    )
    if normalize:
        norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
        norms[norms == 0.0] = 1.0  # zero rows stay zero
        m = sp.diags(1.0 / norms) @ m
        m = sp.csr_matrix(m)
    return DocTermMatrix(matrix=m, normalized=normalize)


def tfidf(corpus: Corpus, vocab: Vocabulary, normalize: bool = True,
          stopword_map: dict = None) -> DocTermMatrix:
    return tfidf_from_tokens(
        corpus_tokens(corpus, stopword_map), vocab, normalize=normalize
    )


# ---------------------------------------------------------------------------
# embeddings

@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict  # token -> np.ndarray of length dim

    def __post_init__(self):
        if self.dim <= 0:
            raise VectorizeError("embedding dimension must be positive")


@dataclass(frozen=True)
class SentenceEmbeddingSet:
    dim: int
    vectors: dict  # (doc id, sentence index) -> np.ndarray


def load_word_embeddings(path) -> EmbeddingTable:
    """Parse the fastText text format: header `count dim`, then token + floats."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorizeError(f"{path}:1: malformed header {header!r}")
        count, dim = int(header[0]), int(header[1])
        vectors = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if not parts or not parts[0]:
                continue
            token, rest = parts[0], parts[1:]
            if len(rest) != dim:
                raise VectorizeError(
                    f"{path}:{lineno}: expected {dim} floats, got {len(rest)}"
                )
            if token in vectors:
                warnings.warn(
                    f"duplicate embedding token {token!r}; keeping the last"
                )
            vectors[token] = np.asarray(rest, dtype=np.float64)
    if len(vectors) != count:
        warnings.warn(
            f"{path}: header announced {count} vectors, parsed {len(vectors)}"
        )
    return EmbeddingTable(dim=dim, vectors=vectors)


def embedding_table_from_dict(vectors: dict) -> EmbeddingTable:
    dims = {v.shape[0] for v in vectors.values()}
    if len(dims) != 1:
        raise VectorizeError("inconsistent vector dimensions")
    return EmbeddingTable(
        dim=dims.pop(),
        vectors={t: np.asarray(v, dtype=np.float64) for t, v in vectors.items()},
    )


def load_sentence_embeddings(path, corpus: Corpus) -> SentenceEmbeddingSet:
    """JSONL lines {"doc_id", "sentence_index", "vector"}; must cover every
    sentence of the (already segmented) corpus."""
    by_id = {d.id: d for d in corpus.documents}
    vectors = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            doc_id = raw["doc_id"]
            idx = int(raw["sentence_index"])
            vec = np.asarray(raw["vector"], dtype=np.float64)
            if doc_id not in by_id:
                raise VectorizeError(f"{path}:{lineno}: unknown doc id {doc_id!r}")
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise VectorizeError(
                    f"{path}:{lineno}: vector length {vec.shape[0]} != {dim}"
                )
            vectors[(doc_id, idx)] = vec
    for d in corpus.documents:
        for i in range(len(d.sentences)):
            if (d.id, i) not in vectors:
                raise VectorizeError(
                    f"missing sentence embedding for ({d.id!r}, {i})"
                )
    return SentenceEmbeddingSet(dim=dim or 0, vectors=vectors)


def mean_word_embedding(doc: Document, table: EmbeddingTable,
                        stopwords: StopwordList):
    """Mean of in-vocabulary token vectors (with multiplicity).

    Returns (vector, coverage); the zero vector with coverage 0 when no token
    is covered.
    """
    from .corpus import clean_text

    tokens = clean_text(doc.text, stopwords)
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not tokens or not hits:
        return np.zeros(table.dim), 0.0
    return np.mean(hits, axis=0), len(hits) / len(tokens)
