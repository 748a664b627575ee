"""One-vs-rest gradient-boosted regression trees over sparse tf-idf features.

Tree structure is fit to the negative gradient of the logistic loss
(residual y - sigmoid(F)) with a variance-reduction split criterion; leaf
values take the Newton step sum(residual) / sum(p*(1-p)).  The split search
runs in a compiled kernel when available (see `SPLIT_BACKEND`), with a
pure-numpy fallback.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _split_py

if os.environ.get("CLASSABS_PURE_PYTHON"):
    _split = _split_py
else:
    try:
        from . import _split_cy as _split
    except ImportError:
        _split = _split_py

SPLIT_BACKEND = _split.BACKEND


class TrainError(Exception):
    pass


@dataclass(frozen=True)
class GbdtParams:
    n_trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 2
    tau: float = 0.5  # decision threshold on probabilities


@dataclass(frozen=True)
class GbdtModel:
    classes: tuple
    f0: dict            # class -> initial log-odds
    trees: dict         # class -> list of tree dicts (raw leaf values)
    params: GbdtParams
    loss_history: dict = field(default_factory=dict)  # class -> per-round loss


class SparseCols:
    """CSC view with nonzeros sorted by value within each column."""

    def __init__(self, X):
        if sp.issparse(X):
            csc = sp.csc_matrix(X, dtype=np.float64)
        else:
            csc = sp.csc_matrix(np.asarray(X, dtype=np.float64))
        csc.eliminate_zeros()
        self.n_rows, self.n_cols = csc.shape
        cols = np.repeat(np.arange(self.n_cols, dtype=np.int64),
                         np.diff(csc.indptr))
        order = np.lexsort((csc.data, cols))
        self.indptr = csc.indptr.astype(np.int64)
        self.rowidx = csc.indices.astype(np.int64)[order]
        self.vals = csc.data[order]

    def column_values(self, j, rows):
        """Feature j's values for the given rows (implicit zeros filled)."""
        out = np.zeros(rows.shape[0])
        pos = np.full(self.n_rows, -1, dtype=np.int64)
        pos[rows] = np.arange(rows.shape[0])
        lo, hi = self.indptr[j], self.indptr[j + 1]
        rr = self.rowidx[lo:hi]
        p = pos[rr]
        hit = p >= 0
        out[p[hit]] = self.vals[lo:hi][hit]
        return out


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _build_tree(cols: SparseCols, grad, hess, rows, depth, params):
    n_node = rows.shape[0]
    sum_node = float(grad[rows].sum())
    if depth >= params.max_depth or n_node < 2 * params.min_samples_leaf:
        return _leaf(grad, hess, rows)
    in_node = np.zeros(cols.n_rows, dtype=np.uint8)
    in_node[rows] = 1
    feat, thr, _gain = _split.best_split(
        cols.indptr, cols.rowidx, cols.vals, in_node,
        n_node, sum_node, grad, params.min_samples_leaf,
    )
    if feat < 0:
        return _leaf(grad, hess, rows)
    colvals = cols.column_values(feat, rows)
    go_left = colvals <= thr
    return {
        "feature": int(feat),
        "threshold": float(thr),
        "left": _build_tree(cols, grad, hess, rows[go_left], depth + 1, params),
        "right": _build_tree(cols, grad, hess, rows[~go_left], depth + 1, params),
    }


def _leaf(grad, hess, rows):
    denom = max(float(hess[rows].sum()), 1e-12)
    return {"value": float(grad[rows].sum() / denom)}


def _tree_apply(tree, cols: SparseCols, rows, out):
    if "value" in tree:
        out[rows] = tree["value"]
        return
    colvals = cols.column_values(tree["feature"], rows)
    go_left = colvals <= tree["threshold"]
    _tree_apply(tree["left"], cols, rows[go_left], out)
    _tree_apply(tree["right"], cols, rows[~go_left], out)


def tree_predict(tree, cols: SparseCols) -> np.ndarray:
    out = np.zeros(cols.n_rows)
    _tree_apply(tree, cols, np.arange(cols.n_rows, dtype=np.int64), out)
    return out


def _log_loss(y, F):
    p = np.clip(_sigmoid(F), 1e-12, 1 - 1e-12)
    return float(-(y * np.log(p) + (1 - y) * np.log(1 - p)).sum())


def train_gbdt(X, Y, params: GbdtParams = GbdtParams(),
               classes=None) -> GbdtModel:
    """Y is a list of per-document label sets; one ensemble per class."""
    cols = SparseCols(X)
    if cols.n_cols == 0:
        raise TrainError("empty feature matrix")
    if cols.n_rows != len(Y):
        raise TrainError("X rows not aligned with Y")
    if classes is None:
        classes = sorted(set().union(*Y))
    classes = tuple(classes)
    n = cols.n_rows
    all_rows = np.arange(n, dtype=np.int64)
    f0 = {}
    trees = {}
    history = {}
    for c in classes:
        y = np.array([1.0 if c in labels else 0.0 for labels in Y])
        if y.sum() == 0:
            raise TrainError(f"class {c!r} has no positive examples")
        p = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
        F = np.full(n, np.log(p / (1 - p)))
        f0[c] = float(F[0])
        trees[c] = []
        history[c] = [_log_loss(y, F)]
        for _ in range(params.n_trees):
            prob = _sigmoid(F)
            grad = y - prob
            hess = prob * (1 - prob)
            tree = _build_tree(cols, grad, hess, all_rows, 0, params)
            trees[c].append(tree)
            F = F + params.learning_rate * tree_predict(tree, cols)
            history[c].append(_log_loss(y, F))
    return GbdtModel(classes=classes, f0=f0, trees=trees, params=params,
                     loss_history={c: tuple(h) for c, h in history.items()})


def predict_scores(model: GbdtModel, X) -> np.ndarray:
    """Per-document class probabilities, columns in model.classes order."""
    cols = SparseCols(X)
    scores = np.empty((cols.n_rows, len(model.classes)))
    for ci, c in enumerate(model.classes):
        F = np.full(cols.n_rows, model.f0[c])
        for tree in model.trees[c]:
            F += model.params.learning_rate * tree_predict(tree, cols)
        scores[:, ci] = _sigmoid(F)
    return scores


def predict(model: GbdtModel, X, tau: float = None):
    """Label sets {c: p(c) >= tau}; empty sets fall back to the argmax class."""
    if tau is None:
        tau = model.params.tau
    scores = predict_scores(model, X)
    out = []
    for row in scores:
        labels = {model.classes[i] for i in np.nonzero(row >= tau)[0]}
        if not labels:
            labels = {model.classes[int(np.argmax(row))]}
        out.append(frozenset(labels))
    return out


# ---------------------------------------------------------------------------
# model export / import

def model_to_json(model: GbdtModel) -> dict:
    return {
        "classes": list(model.classes),
        "f0": {str(c): v for c, v in model.f0.items()},
        "trees": {str(c): model.trees[c] for c in model.classes},
        "params": {
            "n_trees": model.params.n_trees,
            "max_depth": model.params.max_depth,
            "learning_rate": model.params.learning_rate,
            "min_samples_leaf": model.params.min_samples_leaf,
            "tau": model.params.tau,
        },
    }


def model_from_json(raw: dict) -> GbdtModel:
    classes = tuple(raw["classes"])
    key = {str(c): c for c in classes}
    return GbdtModel(
        classes=classes,
        f0={key[c]: v for c, v in raw["f0"].items()},
        trees={key[c]: t for c, t in raw["trees"].items()},
        params=GbdtParams(**raw["params"]),
    )


def save_model(model: GbdtModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh)


def load_model(path) -> GbdtModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
