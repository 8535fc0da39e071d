"""L2-regularized logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from .base import check_fit_inputs, check_predict_input


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_gradient(weights, intercept, X, y, l2):
    """Mean cross-entropy plus 0.5*l2*||w||^2 (intercept unpenalized)."""
    z = X @ weights + intercept
    p = sigmoid(z)
    eps = 1e-12
    ce = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    loss = ce + 0.5 * l2 * float(weights @ weights)
    resid = (p - y) / y.size
    grad_w = X.T @ resid + l2 * weights
    grad_b = float(resid.sum())
    return loss, grad_w, grad_b


@dataclass
class LogisticModel:
    weights: np.ndarray
    intercept: float
    n_features_in: int
    n_epochs_run: int
    converged: bool
    family: str = "LR"

    def decision_function(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        return X @ self.weights + self.intercept

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "family": "LR",
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "n_features_in": self.n_features_in,
            "n_epochs_run": self.n_epochs_run,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            intercept=float(d["intercept"]),
            n_features_in=int(d["n_features_in"]),
            n_epochs_run=int(d["n_epochs_run"]),
            converged=bool(d["converged"]),
        )


def fit_logistic(X, y, hp: dict | None = None) -> LogisticModel:
    """Gradient descent from zero init until grad inf-norm <= tol or max_epochs."""
    hp = dict(hp or {})
    lr = float(hp.get("learning_rate", 1.0))
    l2 = float(hp.get("l2", 1e-4))
    max_epochs = int(hp.get("max_epochs", 2000))
    tol = float(hp.get("tol", 1e-6))
    X, y = check_fit_inputs(X, y)
    if y.min() == y.max():
        raise FitError("logistic regression needs both classes in y")

    w = np.zeros(X.shape[1])
    b = 0.0
    converged = False
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        _, gw, gb = loss_and_gradient(w, b, X, y, l2)
        gmax = max(float(np.max(np.abs(gw))) if gw.size else 0.0, abs(gb))
        if gmax <= tol:
            converged = True
            break
        w -= lr * gw
        b -= lr * gb
    return LogisticModel(weights=w, intercept=b, n_features_in=X.shape[1],
                         n_epochs_run=epoch, converged=converged)
