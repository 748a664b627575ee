"""End-to-end acceptance checks.

Each test covers one release criterion and prints a single PASS/FAIL line so
the suite output doubles as an acceptance report.
"""
import sys
import time
import warnings
from math import comb

import numpy as np
import scipy.sparse as sp

from classabs import pipeline, synth, vectorize
from classabs.class_cluster import DistanceMatrix, wpgma_cluster
from classabs.classify import GbdtParams, predict_scores, train_gbdt
from classabs.cli import main as cli_main
from classabs.corpus import corpus_tokens
from classabs.evaluate import (MetricsReport, exact_match, f1_scores,
                               label_counts, normalized_entropy,
                               results_table)
from classabs.lsi import doc_vectors, fit_lsi
from classabs.pipeline import PipelineConfig, apply_method, cross_validate
from classabs.unsup_cluster import assign, kmeans_fit, select_k
from classabs.vectorize import DocTermMatrix


def _report(num, desc, ok):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc}"
    print(line, file=sys.stderr, flush=True)
    assert ok, line


def _ari(a, b):
    """Adjusted Rand index between two flat partitions."""
    a, b = list(a), list(b)
    ca, cb = sorted(set(a)), sorted(set(b))
    table = np.zeros((len(ca), len(cb)), dtype=np.int64)
    for x, y in zip(a, b):
        table[ca.index(x), cb.index(y)] += 1
    sum_ij = sum(comb(int(v), 2) for v in table.ravel())
    sum_a = sum(comb(int(v), 2) for v in table.sum(axis=1))
    sum_b = sum(comb(int(v), 2) for v in table.sum(axis=0))
    n = comb(len(a), 2)
    expected = sum_a * sum_b / n
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


# ---------------------------------------------------------------------------
# 1. metric implementations match an independent counting oracle

def _oracle_metrics(gold, pred, space):
    em = sum(1 for g, p in zip(gold, pred) if set(g) == set(p)) / len(gold)
    tp = fp = fn = 0
    per_class = []
    for c in space:
        ctp = sum(1 for g, p in zip(gold, pred) if c in g and c in p)
        cfp = sum(1 for g, p in zip(gold, pred) if c not in g and c in p)
        cfn = sum(1 for g, p in zip(gold, pred) if c in g and c not in p)
        tp, fp, fn = tp + ctp, fp + cfp, fn + cfn
        prec = ctp / (ctp + cfp) if ctp + cfp else 0.0
        rec = ctp / (ctp + cfn) if ctp + cfn else 0.0
        per_class.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    micro = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    return em, micro, sum(per_class) / len(per_class)


def test_criterion_1_metric_oracle_equivalence():
    t0 = time.monotonic()
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(200):
        L = int(rng.integers(2, 26))
        space = [f"c{i}" for i in range(L)]
        n = int(rng.integers(1, 40))
        top = min(3, L)
        gold = [set(rng.choice(space, size=rng.integers(1, top + 1),
                               replace=False)) for _ in range(n)]
        pred = [set(rng.choice(space, size=rng.integers(1, top + 1),
                               replace=False)) for _ in range(n)]
        em, micro, macro = _oracle_metrics(gold, pred, space)
        mi, ma = f1_scores(gold, pred, space)
        worst = max(worst, abs(exact_match(gold, pred) - em),
                    abs(mi - micro), abs(ma - macro))
    elapsed = time.monotonic() - t0
    _report(1, f"metrics match oracle on 200 random pairs "
               f"(max dev {worst:.2e}, {elapsed:.1f}s)",
            worst <= 1e-12 and elapsed < 5.0)


# ---------------------------------------------------------------------------
# 2. WPGMA agrees with a naive matrix-based reference

def _naive_wpgma(d0):
    """Full-matrix WPGMA: scan for the minimum, average the merged rows."""
    F = d0.shape[0]
    d = d0.astype(float).copy()
    ids = list(range(F))
    merges = []
    next_id = F
    while len(ids) > 1:
        best = None
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                cand = (d[i, j], ids[i], ids[j], i, j)
                if best is None or cand[:3] < best[:3]:
                    best = cand
        h, a, b, i, j = best
        row = (d[i] + d[j]) / 2.0
        keep = [x for x in range(len(ids)) if x not in (i, j)]
        nd = np.zeros((len(keep) + 1, len(keep) + 1))
        nd[:-1, :-1] = d[np.ix_(keep, keep)]
        nd[-1, :-1] = nd[:-1, -1] = row[keep]
        d = nd
        ids = [ids[x] for x in keep] + [next_id]
        merges.append((a, b, h, next_id))
        next_id += 1
    return merges


def test_criterion_2_wpgma_matches_reference():
    t0 = time.monotonic()
    rng = np.random.default_rng(7)
    ok = True
    for _ in range(100):
        F = int(rng.integers(2, 11))
        m = rng.uniform(0.1, 10.0, size=(F, F))
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 0.0)
        dist = DistanceMatrix(labels=tuple(f"l{i}" for i in range(F)), d=m)
        got = wpgma_cluster(dist).merges
        want = _naive_wpgma(m)
        for (ga, gb, gh, gi), (wa, wb, wh, wi) in zip(got, want):
            ok &= (ga, gb, gi) == (wa, wb, wi) and abs(gh - wh) <= 1e-12
    elapsed = time.monotonic() - t0
    _report(2, f"WPGMA equals naive reference on 100 matrices "
               f"({elapsed:.1f}s)", ok and elapsed < 5.0)


# ---------------------------------------------------------------------------
# 3. SVD factor properties on random sparse matrices

def test_criterion_3_svd_properties():
    rng = np.random.default_rng(3)
    worst_orth = worst_recon = worst_rank2 = 0.0
    monotone = True
    for _ in range(50):
        n = int(rng.integers(5, 61))
        m = int(rng.integers(5, 81))
        A = rng.normal(size=(n, m))
        A[rng.random(A.shape) < 0.6] = 0.0
        if not A.any():
            A[0, 0] = 1.0
        dtm = DocTermMatrix(matrix=sp.csr_matrix(A), normalized=False)
        r = min(n, m)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            full = fit_lsi(dtm, r)
        k = full.k
        worst_orth = max(
            worst_orth,
            np.abs(full.D.T @ full.D - np.eye(k)).max(),
            np.abs(full.T.T @ full.T - np.eye(k)).max(),
        )
        monotone &= bool(np.all(np.diff(full.S) <= 1e-12))
        recon = (full.D * full.S) @ full.T.T
        worst_recon = max(worst_recon, np.abs(recon - A).max())
        # rank-2 truncation against a dense oracle
        two = fit_lsi(dtm, 2)
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        oracle = U[:, :2] @ np.diag(s[:2]) @ Vt[:2]
        got = (two.D * two.S) @ two.T.T
        worst_rank2 = max(worst_rank2, np.abs(got - oracle).max())
    _report(3, f"SVD orthonormality {worst_orth:.1e}, reconstruction "
               f"{worst_recon:.1e}, rank-2 vs oracle {worst_rank2:.1e}",
            worst_orth <= 1e-8 and worst_recon <= 1e-8
            and worst_rank2 <= 1e-6 and monotone)


# ---------------------------------------------------------------------------
# 4. k-means recovers planted blobs and the BIC surrogate picks k=2

def test_criterion_4_kmeans_blob_recovery():
    hits = 0
    recovered = True
    for seed in range(20):
        rng = np.random.default_rng(seed + 100)
        # the spherical-BIC penalty d*ln(n) grows only logarithmically with
        # n while the payoff of over-splitting a true Gaussian cluster grows
        # linearly, so reliable selection needs high-dimensional blobs
        X = np.vstack([rng.normal(size=(20, 16)) * 0.2,
                       rng.normal(size=(20, 16)) * 0.2 + 4.0])
        truth = np.array([0] * 20 + [1] * 20)
        labels = assign(kmeans_fit(X, 2, seed=seed), X)
        recovered &= (labels == truth).mean() in (0.0, 1.0)
        if select_k(X, range(1, 5), seed=seed).chosen_k == 2:
            hits += 1
    _report(4, f"blobs recovered on all 20 seeds, BIC chose k=2 on "
               f"{hits}/20", recovered and hits >= 18)


# ---------------------------------------------------------------------------
# 5. end-to-end class abstraction on the planted-group corpus

GBDT30 = GbdtParams(n_trees=30)


def test_criterion_5_end_to_end_abstraction():
    t0 = time.monotonic()
    corpus = synth.generate_synthetic_corpus(12, 3, 30, noise_rate=0.3,
                                             seed=7)

    # (a) supervised abstraction at K=3 recovers the planted grouping
    sup3, art = apply_method(
        corpus, PipelineConfig(method="supervised-ca", K=3, gbdt=GBDT30))
    planted = [corpus.hierarchy.belief_to_theme[next(iter(d.labels))]
               for d in corpus.documents]
    got = [next(iter(d.labels)) for d in sup3.documents]
    ari = _ari(planted, got)

    # (b) classification is easier on the abstract space than the fine one
    cv_cfg = PipelineConfig(method="supervised-ca", K=3, gbdt=GBDT30,
                            folds=8, seed=1)
    mean3, _ = cross_validate(sup3, cv_cfg)
    fine, _ = apply_method(corpus, PipelineConfig(method="expert", K=12,
                                                  gbdt=GBDT30, folds=8,
                                                  seed=1))
    mean12, _ = cross_validate(fine, PipelineConfig(method="expert", K=12,
                                                    gbdt=GBDT30, folds=8,
                                                    seed=1))

    # (c) unsupervised abstraction keeps the class balance of the expert one
    table = vectorize.embedding_table_from_dict(
        synth.synthetic_embeddings(12, 3, seed=7))
    unsup_cfg = PipelineConfig(method="unsupervised-ca", K=3,
                               embedding_kind="mean", gbdt=GBDT30,
                               folds=8, seed=1)
    unsup3, _ = apply_method(corpus, unsup_cfg, embeddings=table)
    mean_u, _ = cross_validate(unsup3, unsup_cfg)
    expert3, _ = apply_method(corpus, PipelineConfig(method="expert", K=3,
                                                     gbdt=GBDT30, folds=8,
                                                     seed=1))
    mean_e, _ = cross_validate(expert3, PipelineConfig(method="expert", K=3,
                                                       gbdt=GBDT30, folds=8,
                                                       seed=1))
    elapsed = time.monotonic() - t0
    _report(5, f"ARI {ari:.2f}, F1mi K=3 {mean3.f1_micro:.3f} > K=12 "
               f"{mean12.f1_micro:.3f}, unsup Ne {mean_u.normalized_entropy:.3f} "
               f"vs expert {mean_e.normalized_entropy:.3f} ({elapsed:.0f}s)",
            ari >= 0.9 and mean3.f1_micro > mean12.f1_micro
            and mean_u.normalized_entropy
                >= mean_e.normalized_entropy - 0.05
            and elapsed < 60.0)


# ---------------------------------------------------------------------------
# 6. a tiny outlier class lowers the balance of the abstract label space

def test_criterion_6_outlier_lowers_entropy():
    base = synth.generate_synthetic_corpus(12, 3, 30, seed=7)
    with_out = synth.add_outlier_class(base, docs=3, seed=7)
    cfg = PipelineConfig(method="supervised-ca", K=3, gbdt=GBDT30)
    rel_base, _ = apply_method(base, cfg)
    rel_out, _ = apply_method(with_out, cfg)
    ne_base = normalized_entropy(
        label_counts(rel_base.documents, rel_base.label_space))
    ne_out = normalized_entropy(
        label_counts(rel_out.documents, rel_out.label_space))
    _report(6, f"Ne with outlier {ne_out:.3f} < without {ne_base:.3f}",
            ne_out < ne_base)


# ---------------------------------------------------------------------------
# 7. classifier sanity: separable corpus, loss curve, prior-only model

def test_criterion_7_classifier_sanity():
    corpus = synth.generate_synthetic_corpus(2, 2, 250, seed=0)
    cfg = PipelineConfig(method="expert", K=2, folds=8, seed=0)
    rel, _ = apply_method(corpus, cfg)
    mean, _ = cross_validate(rel, cfg)

    tokens = corpus_tokens(rel)
    vocab = vectorize.build_vocabulary_from_tokens(tokens)
    X = vectorize.tfidf_from_tokens(tokens, vocab).matrix
    Y = [d.labels for d in rel.documents]
    model = train_gbdt(X, Y, GbdtParams(n_trees=20))
    losses_ok = all(
        h[i + 1] <= h[i] + 1e-9
        for h in model.loss_history.values() for i in range(len(h) - 1)
    )
    prior = train_gbdt(X, Y, GbdtParams(n_trees=0))
    scores = predict_scores(prior, X)
    prior_ok = all(
        np.abs(scores[:, ci]
               - np.mean([1.0 if c in y else 0.0 for y in Y])).max() <= 1e-12
        for ci, c in enumerate(prior.classes)
    )
    _report(7, f"8-fold EM {mean.exact_match:.3f} on separable corpus, "
               f"loss non-increasing, prior-only exact",
            mean.exact_match >= 0.95 and losses_ok and prior_ok)


# ---------------------------------------------------------------------------
# 8. the CLI pipeline is byte-for-byte reproducible

def test_criterion_8_cli_reproducible(tmp_path):
    data = tmp_path / "data"
    assert cli_main(["synth", "--fine", "6", "--groups", "3",
                     "--docs-per-class", "10", "--seed", "4",
                     "--out", str(data)]) == 0
    args = ["run", "--corpus", str(data / "corpus.jsonl"),
            "--hierarchy", str(data / "hierarchy.json"),
            "--method", "supervised-ca", "--K", "3",
            "--n-trees", "10", "--folds", "4"]
    assert cli_main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "b")]) == 0
    same = ((tmp_path / "a" / "report_mean.json").read_bytes()
            == (tmp_path / "b" / "report_mean.json").read_bytes())
    _report(8, "repeated CLI runs produce byte-identical report_mean.json",
            same)


# ---------------------------------------------------------------------------
# 9. the results table renders the reference row format

def test_criterion_9_reference_table_row():
    report = MetricsReport(corpus="EN", method="expert", K=4,
                           exact_match=0.39, f1_macro=0.48, f1_micro=0.54,
                           normalized_entropy=0.92)
    md, _ = results_table([report])
    ok = "| EN | 4 | 0.39 | 0.48 | 0.54 | 0.92 |" in md
    _report(9, "expert row renders as 0.39 / 0.48 / 0.54 / 0.92", ok)
