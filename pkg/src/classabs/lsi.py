"""Latent semantic indexing: truncated SVD of the tf-idf matrix.

The document-term matrix M (docs x terms) factorizes as M = D S T^t with
D (docs x k) and T (terms x k) orthonormal-column factors and S the
non-increasing positive singular values.  Document vectors are D scaled by S.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import svd as dense_svd
from scipy.sparse.linalg import svds

from .vectorize import DocTermMatrix

_DENSE_MAX_SIDE = 2000
_TRIM_REL = 1e-12


class LsiError(Exception):
    pass


@dataclass(frozen=True)
class LsiModel:
    T: np.ndarray  # terms x k
    S: np.ndarray  # k, non-increasing, > 0
    D: np.ndarray  # docs x k
    k: int


def _canonical_signs(T, D):
    # flip so the largest-magnitude entry of each term column is positive
    for c in range(T.shape[1]):
        i = int(np.argmax(np.abs(T[:, c])))
        if T[i, c] < 0:
            T[:, c] = -T[:, c]
            D[:, c] = -D[:, c]
    return T, D


def fit_lsi(dtm: DocTermMatrix, k: int) -> LsiModel:
    if k < 1:
        raise LsiError("k must be >= 1")
    M = dtm.matrix
    if M.nnz == 0:
        raise LsiError("all-zero document-term matrix")
    small = min(M.shape)
    if small <= _DENSE_MAX_SIDE or k >= small - 1:
        U, s, Vt = dense_svd(M.toarray(), full_matrices=False)
    else:
        U, s, Vt = svds(M, k=min(k, small - 1), which="LM",
                        v0=np.ones(small))
        order = np.argsort(s)[::-1]
        U, s, Vt = U[:, order], s[order], Vt[order, :]
    if k > s.shape[0]:
        warnings.warn(f"k={k} exceeds available rank {s.shape[0]}; clamping")
        k = s.shape[0]
    U, s, Vt = U[:, :k], s[:k], Vt[:k, :]
    keep = s > s[0] * _TRIM_REL
    if not np.all(keep):
        warnings.warn(
            f"k={k} exceeds matrix rank {int(keep.sum())}; clamping"
        )
        U, s, Vt = U[:, keep], s[keep], Vt[keep, :]
    T, D = _canonical_signs(Vt.T.copy(), U.copy())
    return LsiModel(T=T, S=s.copy(), D=D, k=int(s.shape[0]))


def doc_vectors(model: LsiModel) -> np.ndarray:
    return model.D * model.S


def fold_in(model: LsiModel, doc_tfidf) -> np.ndarray:
    """Project a tf-idf vector (over the training vocabulary) into LSI space."""
    if sp.issparse(doc_tfidf):
        v = np.asarray(doc_tfidf.todense()).ravel()
    else:
        v = np.asarray(doc_tfidf, dtype=np.float64).ravel()
    if v.shape[0] != model.T.shape[0]:
        raise LsiError(
            f"vector length {v.shape[0]} != vocabulary size {model.T.shape[0]}"
        )
    return v @ model.T


def fold_in_matrix(model: LsiModel, rows) -> np.ndarray:
    if rows.shape[1] != model.T.shape[0]:
        raise LsiError("vocabulary size mismatch")
    return np.asarray(rows @ model.T)


def semantic_similarity(v1, v2) -> float:
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise LsiError("dimension mismatch")
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    return float(np.dot(v1, v2) / (n1 * n2))


def model_to_json(model: LsiModel) -> dict:
    return {
        "k": model.k,
        "S": model.S.tolist(),
        "T": model.T.tolist(),
        "D": model.D.tolist(),
    }


def save_model(model: LsiModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh)
