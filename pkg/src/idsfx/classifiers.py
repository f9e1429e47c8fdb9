"""Six built-in classifiers with one train/predict contract.

All fitting is deterministic given the ClassifierSpec seed.  The gradient-based models
(logistic regression, linear SVM) standardize features internally with
fit-time means/stds, since their fixed step sizes are meaningless across raw
intrusion-dataset feature scales; the fitted scaling is part of the model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, SchemaError
from .matrix import FeatureMatrix

log = logging.getLogger(__name__)

ALGORITHMS = (
    "gaussian_nb",
    "logistic_regression",
    "linear_svm",
    "knn",
    "decision_tree",
    "random_forest",
)

DEFAULT_HYPERPARAMS: dict[str, dict] = {
    "gaussian_nb": {"var_floor": 1e-9},
    "logistic_regression": {"lr": 0.1, "epochs": 500, "l2": 1e-4},
    "linear_svm": {"epochs": 200, "lam": 1e-4},
    "knn": {"k": 5},
    "decision_tree": {"min_samples_split": 2},
    "random_forest": {"n_trees": 100, "bootstrap": True,
                      "max_features": "sqrt", "min_samples_split": 2},
}


@dataclass
class ClassifierSpec:
    algorithm: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0

    def resolved_hyperparams(self) -> dict:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        hp = dict(DEFAULT_HYPERPARAMS[self.algorithm])
        unknown = set(self.hyperparams) - set(hp)
        if unknown:
            raise ConfigError(
                f"{self.algorithm}: unknown hyperparameters {sorted(unknown)}")
        hp.update(self.hyperparams)
        return hp


@dataclass
class TrainedClassifier:
    algorithm: str
    classes: np.ndarray          # original class codes seen at training
    state: dict
    meta: dict


def _as_matrix(x) -> np.ndarray:
    xv = x.values if isinstance(x, FeatureMatrix) else np.asarray(x, dtype=np.float64)
    return np.ascontiguousarray(xv, dtype=np.float64)


def _standardize_fit(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    return mu, sd


def train(spec: ClassifierSpec, x, y: np.ndarray) -> TrainedClassifier:
    hp = spec.resolved_hyperparams()
    xv = _as_matrix(x)
    y = np.asarray(y, dtype=np.int64)
    if xv.shape[0] != y.shape[0]:
        raise SchemaError(f"{xv.shape[0]} rows but {y.shape[0]} labels")
    if xv.shape[0] < 2:
        raise DomainError("need at least 2 training rows")
    if np.isnan(xv).any():
        raise DomainError("NaN in training features")
    classes = np.unique(y)
    if classes.size < 2 and spec.algorithm != "knn":
        raise DomainError(f"{spec.algorithm} needs at least 2 classes")
    yk = np.searchsorted(classes, y)   # compact codes 0..k-1

    fitter = _FITTERS[spec.algorithm]
    state = fitter(xv, yk, classes.size, hp, spec.seed)
    meta = {"rows": int(xv.shape[0]), "features": int(xv.shape[1]), "seed": spec.seed}
    return TrainedClassifier(algorithm=spec.algorithm, classes=classes,
                             state=state, meta=meta)


def predict(model: TrainedClassifier, x) -> np.ndarray:
    xv = _as_matrix(x)
    if xv.shape[1] != model.meta["features"]:
        raise SchemaError(
            f"input has {xv.shape[1]} features, model expects {model.meta['features']}")
    yk = _PREDICTORS[model.algorithm](model.state, xv)
    return model.classes[yk]


# ---------------------------------------------------------------- gaussian nb

def _fit_gnb(x, y, k, hp, seed):
    d = x.shape[1]
    theta = np.empty((k, d))
    var = np.empty((k, d))
    prior = np.empty(k)
    for c in range(k):
        xc = x[y == c]
        theta[c] = xc.mean(axis=0)
        var[c] = np.maximum(xc.var(axis=0), hp["var_floor"])
        prior[c] = xc.shape[0] / x.shape[0]
    return {"theta": theta, "var": var, "log_prior": np.log(prior)}


def _predict_gnb(state, x):
    theta, var = state["theta"], state["var"]
    # joint log-likelihood per class
    ll = np.empty((x.shape[0], theta.shape[0]))
    for c in range(theta.shape[0]):
        ll[:, c] = state["log_prior"][c] - 0.5 * np.sum(
            np.log(2.0 * np.pi * var[c]) + (x - theta[c]) ** 2 / var[c], axis=1)
    return np.argmax(ll, axis=1)


# ------------------------------------------------------- logistic regression

def _fit_logreg(x, y, k, hp, seed):
    mu, sd = _standardize_fit(x)
    xs = (x - mu) / sd
    n, d = xs.shape
    w = np.zeros((k, d))
    b = np.zeros(k)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), y] = 1.0
    lr, l2 = hp["lr"], hp["l2"]
    for _ in range(hp["epochs"]):
        scores = xs @ w.T + b
        scores -= scores.max(axis=1, keepdims=True)
        p = np.exp(scores)
        p /= p.sum(axis=1, keepdims=True)
        diff = p - onehot
        w -= lr * (diff.T @ xs / n + l2 * w)
        b -= lr * diff.mean(axis=0)
    return {"w": w, "b": b, "mu": mu, "sd": sd}


def _predict_linear(state, x):
    xs = (x - state["mu"]) / state["sd"]
    return np.argmax(xs @ state["w"].T + state["b"], axis=1)


# ------------------------------------------------------------------ linear svm

def _fit_svm(x, y, k, hp, seed):
    mu, sd = _standardize_fit(x)
    xs = np.ascontiguousarray((x - mu) / sd)
    n = xs.shape[0]
    rng = np.random.default_rng(seed)
    perms = np.empty((hp["epochs"], n), dtype=np.int64)
    for e in range(hp["epochs"]):
        perms[e] = rng.permutation(n)
    w, b = kernels.svm_sgd(xs, y, k, hp["epochs"], hp["lam"], perms)
    return {"w": w, "b": b, "mu": mu, "sd": sd}


# ------------------------------------------------------------------------ knn

def _fit_knn(x, y, k, hp, seed):
    if hp["k"] < 1:
        raise ConfigError("knn needs k >= 1")
    return {"x": x, "y": y, "k": int(min(hp["k"], x.shape[0])),
            "n_classes": int(max(k, 1))}


def _predict_knn(state, x, chunk: int = 512):
    xt, yt = state["x"], state["y"]
    k = state["k"]
    sq_t = np.einsum("ij,ij->i", xt, xt)
    out = np.empty(x.shape[0], dtype=np.int64)
    for lo in range(0, x.shape[0], chunk):
        xc = x[lo:lo + chunk]
        d2 = np.einsum("ij,ij->i", xc, xc)[:, None] - 2.0 * (xc @ xt.T) + sq_t
        # stable sort: equal distances resolve to the lower training index
        near = np.argsort(d2, axis=1, kind="stable")[:, :k]
        votes = yt[near]
        for i in range(votes.shape[0]):
            counts = np.bincount(votes[i], minlength=state["n_classes"])
            out[lo + i] = int(np.argmax(counts))  # vote ties: lowest class code
    return out


# -------------------------------------------------------------- decision tree

def _tree_state(arrays) -> dict:
    feature, threshold, left, right, leaf_class, n_nodes = arrays
    return {
        "feature": feature[:n_nodes].copy(),
        "threshold": threshold[:n_nodes].copy(),
        "left": left[:n_nodes].copy(),
        "right": right[:n_nodes].copy(),
        "leaf_class": leaf_class[:n_nodes].copy(),
    }


def _fit_tree(x, y, k, hp, seed):
    arrays = kernels.grow_tree(x, y, k, x.shape[1], hp["min_samples_split"], seed)
    return _tree_state(arrays)


def _predict_tree(state, x):
    return kernels.tree_predict(x, state["feature"], state["threshold"],
                                state["left"], state["right"], state["leaf_class"])


# -------------------------------------------------------------- random forest

def _fit_forest(x, y, k, hp, seed):
    n, m = x.shape
    if hp["max_features"] == "sqrt":
        m_try = max(1, int(np.sqrt(m)))
    elif hp["max_features"] == "all":
        m_try = m
    else:
        m_try = int(hp["max_features"])
        if not (1 <= m_try <= m):
            raise ConfigError(f"max_features must be in [1, {m}]")
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(hp["n_trees"]):
        if hp["bootstrap"]:
            boot = rng.integers(0, n, n)
            if np.unique(y[boot]).size < k:
                boot = rng.integers(0, n, n)  # resample once
            if np.unique(y[boot]).size < k:
                # rare classes legitimately vanish from a bootstrap sample;
                # the tree simply never votes for them
                log.warning("bootstrap sample lost %d class(es); growing tree anyway",
                            k - np.unique(y[boot]).size)
            xt = np.ascontiguousarray(x[boot])
            yt = np.ascontiguousarray(y[boot])
        else:
            xt, yt = x, y
        tree_seed = int(rng.integers(1, kernels.LCG_MOD - 1))
        trees.append(_tree_state(kernels.grow_tree(
            xt, yt, k, m_try, hp["min_samples_split"], tree_seed)))
    return {"trees": trees, "n_classes": k}


def _predict_forest(state, x):
    votes = np.zeros((x.shape[0], state["n_classes"]), dtype=np.int64)
    for tree in state["trees"]:
        pred = _predict_tree(tree, x)
        votes[np.arange(x.shape[0]), pred] += 1
    return np.argmax(votes, axis=1)  # ties: lowest class code


_FITTERS = {
    "gaussian_nb": _fit_gnb,
    "logistic_regression": _fit_logreg,
    "linear_svm": _fit_svm,
    "knn": _fit_knn,
    "decision_tree": _fit_tree,
    "random_forest": _fit_forest,
}

_PREDICTORS = {
    "gaussian_nb": _predict_gnb,
    "logistic_regression": _predict_linear,
    "linear_svm": _predict_linear,
    "knn": _predict_knn,
    "decision_tree": _predict_tree,
    "random_forest": _predict_forest,
}
