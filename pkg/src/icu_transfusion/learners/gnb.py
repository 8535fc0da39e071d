"""Gaussian naive Bayes, the default meta-learner of the stacked model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from .base import check_fit_inputs, check_predict_input


@dataclass
class GNBModel:
    log_priors: np.ndarray  # (2,)
    means: np.ndarray  # (2, d)
    variances: np.ndarray  # (2, d), smoothing already added
    var_smoothing: float
    n_features_in: int
    family: str = "GNB"

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        jll = np.empty((X.shape[0], 2))
        for c in (0, 1):
            diff = X - self.means[c]
            jll[:, c] = self.log_priors[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.variances[c]) + diff**2 / self.variances[c],
                axis=1,
            )
        return jll

    def predict_proba(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        jll = self._joint_log_likelihood(X)
        # stable softmax over the two classes
        m = jll.max(axis=1, keepdims=True)
        e = np.exp(jll - m)
        return e[:, 1] / e.sum(axis=1)

    def to_dict(self) -> dict:
        return {
            "family": "GNB",
            "log_priors": self.log_priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "var_smoothing": self.var_smoothing,
            "n_features_in": self.n_features_in,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GNBModel":
        return cls(
            log_priors=np.asarray(d["log_priors"], dtype=np.float64),
            means=np.asarray(d["means"], dtype=np.float64),
            variances=np.asarray(d["variances"], dtype=np.float64),
            var_smoothing=float(d["var_smoothing"]),
            n_features_in=int(d["n_features_in"]),
        )


def fit_gaussian_nb(X, y, hp: dict | None = None) -> GNBModel:
    """Empirical priors and per-class Gaussians.

    Each class variance gets var_smoothing times the largest single-feature
    variance (over all rows) added, which keeps constant features usable.
    """
    hp = dict(hp or {})
    var_smoothing = float(hp.get("var_smoothing", 1e-9))
    X, y = check_fit_inputs(X, y)
    if y.min() == y.max():
        raise FitError("Gaussian NB needs both classes in y")
    means = np.empty((2, X.shape[1]))
    variances = np.empty((2, X.shape[1]))
    log_priors = np.empty(2)
    smoothing = var_smoothing * float(np.max(X.var(axis=0))) if X.size else 0.0
    for c in (0, 1):
        rows = X[y == c]
        log_priors[c] = np.log(rows.shape[0] / X.shape[0])
        means[c] = rows.mean(axis=0)
        variances[c] = rows.var(axis=0) + smoothing
    if np.any(variances <= 0):
        raise FitError("zero per-class variance encountered; use var_smoothing > 0")
    return GNBModel(log_priors=log_priors, means=means, variances=variances,
                    var_smoothing=var_smoothing, n_features_in=X.shape[1])
