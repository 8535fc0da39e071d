"""Meta-learner alternatives for the stack: stump AdaBoost and probability voting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from .base import check_fit_inputs, check_predict_input
from .logistic import sigmoid


@dataclass
class _Stump:
    feature: int
    cut: float
    polarity: float  # +1: x > cut predicts positive

    def decide(self, X: np.ndarray) -> np.ndarray:
        raw = np.where(X[:, self.feature] > self.cut, 1.0, -1.0)
        return self.polarity * raw


@dataclass
class AdaBoostModel:
    stumps: list[_Stump]
    stage_weights: list[float]
    n_features_in: int
    seed: int
    family: str = "ADABOOST"

    def decision_function(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        f = np.zeros(X.shape[0])
        for stump, a in zip(self.stumps, self.stage_weights):
            f += a * stump.decide(X)
        return f

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(2.0 * self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "family": "ADABOOST",
            "stumps": [[s.feature, s.cut, s.polarity] for s in self.stumps],
            "stage_weights": list(self.stage_weights),
            "n_features_in": self.n_features_in,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdaBoostModel":
        return cls(
            stumps=[_Stump(int(f), float(c), float(p)) for f, c, p in d["stumps"]],
            stage_weights=[float(a) for a in d["stage_weights"]],
            n_features_in=int(d["n_features_in"]),
            seed=int(d["seed"]),
        )


def _best_stump(X, y_signed, w):
    """Weighted-error-minimizing threshold stump over all columns."""
    n, d = X.shape
    best = (np.inf, None)
    total_w = float(w.sum())
    for f in range(d):
        order = np.argsort(X[:, f], kind="mergesort")
        xs = X[order, f]
        cuts_ok = np.nonzero(np.diff(xs))[0]
        if cuts_ok.size == 0:
            continue
        # "x > cut -> +1" misses the +1 labels at positions <= cut and the
        # -1 labels above it; flipping polarity complements the error
        w_pos = np.where(y_signed[order] > 0, w[order], 0.0)
        w_neg = np.where(y_signed[order] < 0, w[order], 0.0)
        cum_pos = np.cumsum(w_pos)
        cum_neg = np.cumsum(w_neg)
        err_plus = cum_pos[cuts_ok] + (cum_neg[-1] - cum_neg[cuts_ok])
        err_minus = total_w - err_plus
        for arr, pol in ((err_plus, 1.0), (err_minus, -1.0)):
            k = int(np.argmin(arr))
            if arr[k] < best[0]:
                cut = 0.5 * (xs[cuts_ok[k]] + xs[cuts_ok[k] + 1])
                best = (float(arr[k]), _Stump(f, cut, pol))
    return best


def fit_adaboost(X, y, hp: dict | None = None) -> AdaBoostModel:
    hp = dict(hp or {})
    n_stages = int(hp.get("n_stages", 50))
    seed = int(hp.get("seed", 0))
    X, y01 = check_fit_inputs(X, y)
    if y01.min() == y01.max():
        raise FitError("AdaBoost needs both classes in y")
    y_signed = np.where(y01 == 1, 1.0, -1.0)
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    stumps: list[_Stump] = []
    stage_weights: list[float] = []
    for _ in range(n_stages):
        err, stump = _best_stump(X, y_signed, w)
        if stump is None:
            break
        err = min(max(err, 1e-12), 1.0 - 1e-12)
        if err >= 0.5:
            break
        alpha = 0.5 * np.log((1.0 - err) / err)
        pred = stump.decide(X)
        w = w * np.exp(-alpha * y_signed * pred)
        w /= w.sum()
        stumps.append(stump)
        stage_weights.append(float(alpha))
        if err < 1e-10:
            break
    if not stumps:
        # no informative stump: fall back to the prior as a constant vote
        prior = float(np.mean(y01))
        stumps = [_Stump(0, -np.inf, 1.0)]
        stage_weights = [0.5 * np.log(max(prior, 1e-12) / max(1 - prior, 1e-12))]
    return AdaBoostModel(stumps=stumps, stage_weights=stage_weights,
                         n_features_in=X.shape[1], seed=seed)


@dataclass
class VotingModel:
    """Unweighted average of the incoming base probabilities."""

    n_features_in: int
    family: str = "VOTING"

    def predict_proba(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        return np.clip(X.mean(axis=1), 0.0, 1.0)

    def to_dict(self) -> dict:
        return {"family": "VOTING", "n_features_in": self.n_features_in}

    @classmethod
    def from_dict(cls, d: dict) -> "VotingModel":
        return cls(n_features_in=int(d["n_features_in"]))


def fit_voting(X, y, hp: dict | None = None) -> VotingModel:
    X, _ = check_fit_inputs(X, y)
    return VotingModel(n_features_in=X.shape[1])
