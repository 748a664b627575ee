import numpy as np
import pytest
import scipy.sparse as sp

from classabs.lsi import (LsiError, doc_vectors, fit_lsi, fold_in,
                          fold_in_matrix, model_to_json, semantic_similarity)
from classabs.vectorize import DocTermMatrix


def _dtm(arr):
    return DocTermMatrix(matrix=sp.csr_matrix(np.asarray(arr, dtype=float)),
                         normalized=False)


def _recon(model):
    return model.D @ np.diag(model.S) @ model.T.T


def test_identity_svd():
    m = fit_lsi(_dtm(np.eye(5)), 5)
    assert np.allclose(m.S, 1.0)
    assert np.allclose(_recon(m), np.eye(5), atol=1e-10)


def test_rank_one_clamps_and_scales():
    u = np.array([3 / 5, 4 / 5])
    v = np.array([1 / np.sqrt(2), 1 / np.sqrt(2), 0])
    with pytest.warns(UserWarning, match="clamp"):
        m = fit_lsi(_dtm(3 * np.outer(u, v)), 2)
    assert m.k == 1
    assert m.S[0] == pytest.approx(3.0, abs=1e-10)
    vecs = doc_vectors(m)
    # rank-1 structure: all document vectors collinear
    assert abs(semantic_similarity(vecs[0], vecs[1])) == pytest.approx(1.0)


def test_rank2_matches_dense_oracle():
    rng = np.random.default_rng(42)
    A = rng.normal(size=(6, 8))
    m = fit_lsi(_dtm(A), 2)
    # independent oracle: best rank-2 error from a direct dense SVD
    _, s, _ = np.linalg.svd(A)
    oracle = np.sqrt((s[2:] ** 2).sum())
    err = np.linalg.norm(A - _recon(m))
    assert err == pytest.approx(oracle, abs=1e-6)


def test_orthonormal_and_nonincreasing():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(10, 7))
    m = fit_lsi(_dtm(A), 5)
    assert np.allclose(m.T.T @ m.T, np.eye(m.k), atol=1e-8)
    assert np.allclose(m.D.T @ m.D, np.eye(m.k), atol=1e-8)
    assert np.all(np.diff(m.S) <= 1e-12)
    assert np.all(m.S > 0)


def test_eckart_young_monotone():
    rng = np.random.default_rng(9)
    A = rng.normal(size=(12, 9))
    errs = [np.linalg.norm(A - _recon(fit_lsi(_dtm(A), k)))
            for k in range(1, 9)]
    assert all(errs[i + 1] <= errs[i] + 1e-12 for i in range(len(errs) - 1))


def test_all_zero_matrix_rejected():
    with pytest.raises(LsiError):
        fit_lsi(_dtm(np.zeros((3, 3))), 1)


def test_bit_deterministic():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(8, 6))
    m1 = fit_lsi(_dtm(A), 3)
    m2 = fit_lsi(_dtm(A), 3)
    assert np.array_equal(m1.T, m2.T)
    assert np.array_equal(m1.D, m2.D)
    assert np.array_equal(m1.S, m2.S)


def test_doc_vectors_shape_and_identity_case():
    m = fit_lsi(_dtm(2 * np.eye(4)), 4)
    vecs = doc_vectors(m)
    assert vecs.shape == (4, 4)
    # scaled standard basis rows up to column order/sign
    assert np.allclose(np.abs(vecs).sum(axis=1), 2.0)


def test_fold_in_training_rows():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(7, 9))
    m = fit_lsi(_dtm(A), 7)
    vecs = doc_vectors(m)
    for i in range(A.shape[0]):
        assert np.allclose(fold_in(m, A[i]), vecs[i], atol=1e-6)
    assert np.allclose(fold_in_matrix(m, A), vecs, atol=1e-6)


def test_fold_in_zero_vector_and_mismatch():
    m = fit_lsi(_dtm(np.eye(3)), 3)
    assert np.allclose(fold_in(m, np.zeros(3)), 0.0)
    with pytest.raises(LsiError):
        fold_in(m, np.zeros(4))


def test_similarity_basics():
    assert semantic_similarity([1, 2], [1, 2]) == pytest.approx(1.0)
    assert semantic_similarity([1, 0], [0, 1]) == 0.0
    assert semantic_similarity([1, 1], [2, 2]) == pytest.approx(1.0)
    assert semantic_similarity([0, 0], [1, 1]) == 0.0


def test_model_json_round_shape():
    m = fit_lsi(_dtm(np.eye(3)), 2)
    raw = model_to_json(m)
    assert raw["k"] == m.k and len(raw["S"]) == m.k
