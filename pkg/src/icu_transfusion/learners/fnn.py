"""Fully connected ReLU network with a sigmoid head.

Training uses minibatch Adam on cross-entropy with early stopping on a
10% stratified validation split scored by AUROC. Gradients are exposed as
a pure function so they can be checked against finite differences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import FitError, ValidationError
from ..metrics import auroc_score
from .base import check_fit_inputs, check_predict_input
from .logistic import sigmoid

log = logging.getLogger(__name__)

LEGAL_WIDTHS = tuple(16 + 4 * (n - 1) for n in range(1, 62))  # 16..256 step 4


@dataclass
class FNNModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    n_features_in: int
    seed: int
    n_epochs_run: int
    best_val_auroc: float
    family: str = "FNN"

    def forward(self, X: np.ndarray) -> np.ndarray:
        a = X
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W + b
            a = z if i == last else np.maximum(z, 0.0)
        return a[:, 0]

    def predict_proba(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        return sigmoid(self.forward(X))

    def to_dict(self) -> dict:
        return {
            "family": "FNN",
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "n_features_in": self.n_features_in,
            "seed": self.seed,
            "n_epochs_run": self.n_epochs_run,
            "best_val_auroc": self.best_val_auroc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FNNModel":
        return cls(
            weights=[np.asarray(w, dtype=np.float64) for w in d["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in d["biases"]],
            n_features_in=int(d["n_features_in"]),
            seed=int(d["seed"]),
            n_epochs_run=int(d["n_epochs_run"]),
            best_val_auroc=float(d["best_val_auroc"]),
        )


def init_params(n_in: int, widths: list[int], rng: np.random.Generator):
    """He-scaled weights for the ReLU stack, small output layer, zero biases."""
    sizes = [n_in] + widths + [1]
    weights, biases = [], []
    for i in range(len(sizes) - 1):
        scale = np.sqrt(2.0 / sizes[i])
        weights.append(rng.normal(0.0, scale, size=(sizes[i], sizes[i + 1])))
        biases.append(np.zeros(sizes[i + 1]))
    return weights, biases


def loss_and_gradients(weights, biases, X, y):
    """Mean cross-entropy and gradients for every weight and bias."""
    n = X.shape[0]
    last = len(weights) - 1
    activations = [X]
    zs = []
    a = X
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        zs.append(z)
        a = z if i == last else np.maximum(z, 0.0)
        activations.append(a)
    logits = activations[-1][:, 0]
    p = sigmoid(logits)
    eps = 1e-12
    loss = float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))

    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    delta = ((p - y) / n)[:, None]
    for i in range(last, -1, -1):
        grad_w[i] = activations[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (zs[i - 1] > 0.0)
    return loss, grad_w, grad_b


def _stratified_holdout(y: np.ndarray, frac: float, rng: np.random.Generator):
    val_idx = []
    for c in (0, 1):
        rows = np.nonzero(y == c)[0]
        k = int(np.floor(rows.size * frac))
        if k > 0:
            val_idx.append(rng.permutation(rows)[:k])
    if not val_idx:
        return np.array([], dtype=np.int64)
    return np.sort(np.concatenate(val_idx))


def fit_fnn(X, y, hp: dict | None = None) -> FNNModel:
    hp = dict(hp or {})
    n_hidden_layers = int(hp.get("n_hidden_layers", 3))
    width = int(hp.get("neurons_per_layer", 16))
    lr = float(hp.get("learning_rate", 3e-3))
    max_epochs = int(hp.get("max_epochs", 200))
    patience = int(hp.get("patience", 10))
    batch_size = int(hp.get("batch_size", 256))
    seed = int(hp.get("seed", 0))
    if n_hidden_layers < 1:
        raise ValidationError("need at least one hidden layer")
    X, y = check_fit_inputs(X, y)
    if y.min() == y.max():
        raise FitError("FNN needs both classes in y")
    yf = y.astype(np.float64)
    rng = np.random.default_rng(seed)
    weights, biases = init_params(X.shape[1], [width] * n_hidden_layers, rng)

    val_idx = _stratified_holdout(y, 0.10, rng)
    use_val = val_idx.size >= 2 and len(np.unique(y[val_idx])) == 2
    if use_val:
        train_mask = np.ones(X.shape[0], dtype=bool)
        train_mask[val_idx] = False
        Xt, yt = X[train_mask], yf[train_mask]
        Xv, yv = X[val_idx], y[val_idx]
    else:
        Xt, yt = X, yf

    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    beta1, beta2, adam_eps = 0.9, 0.999, 1e-8
    t = 0

    best_auroc = -np.inf
    best_params = None
    since_best = 0
    epochs_run = 0
    n_train = Xt.shape[0]
    for epoch in range(1, max_epochs + 1):
        epochs_run = epoch
        order = rng.permutation(n_train)
        for start in range(0, n_train, batch_size):
            idx = order[start:start + batch_size]
            _, gw, gb = loss_and_gradients(weights, biases, Xt[idx], yt[idx])
            t += 1
            corr1 = 1.0 - beta1**t
            corr2 = 1.0 - beta2**t
            for i in range(len(weights)):
                m_w[i] = beta1 * m_w[i] + (1 - beta1) * gw[i]
                v_w[i] = beta2 * v_w[i] + (1 - beta2) * gw[i] ** 2
                weights[i] -= lr * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + adam_eps)
                m_b[i] = beta1 * m_b[i] + (1 - beta1) * gb[i]
                v_b[i] = beta2 * v_b[i] + (1 - beta2) * gb[i] ** 2
                biases[i] -= lr * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + adam_eps)
        if use_val:
            model = FNNModel(weights, biases, X.shape[1], seed, epoch, 0.0)
            val_auroc = auroc_score(model.predict_proba(Xv), yv)
            if val_auroc >= best_auroc:
                best_auroc = val_auroc
                best_params = ([w.copy() for w in weights], [b.copy() for b in biases])
                since_best = 0
            else:
                since_best += 1
                if since_best >= patience:
                    break
    if use_val and best_params is not None:
        weights, biases = best_params
    return FNNModel(weights=weights, biases=biases, n_features_in=X.shape[1],
                    seed=seed, n_epochs_run=epochs_run,
                    best_val_auroc=float(best_auroc) if use_val else float("nan"))
