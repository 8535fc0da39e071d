"""Second-order (Newton) boosting on the logistic loss.

Per stage a regression tree is fit to per-row gradients g = p - y and
hessians h = p(1-p); split gain uses the regularized second-order formula
with lambda = 1 and `gamma` as the minimum admissible gain. The raw score
starts at the log-odds of the training positive rate and each stage adds
learning_rate times its tree output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import check_fit_inputs, check_predict_input
from .logistic import sigmoid
from .trees import Tree, bin_features, grow_tree_newton

LAMBDA = 1.0


@dataclass
class GBTModel:
    base_score: float
    learning_rate: float
    trees: list[Tree]
    n_features_in: int
    seed: int
    stage_train_logloss: list[float] = field(default_factory=list)
    family: str = "GBT"

    def decision_function(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        raw = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            raw += self.learning_rate * tree.predict(X)
        return raw

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> dict:
        return {
            "family": "GBT",
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "n_features_in": self.n_features_in,
            "seed": self.seed,
            "stage_train_logloss": list(self.stage_train_logloss),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GBTModel":
        return cls(
            base_score=float(d["base_score"]),
            learning_rate=float(d["learning_rate"]),
            trees=[Tree.from_dict(t) for t in d["trees"]],
            n_features_in=int(d["n_features_in"]),
            seed=int(d["seed"]),
            stage_train_logloss=[float(v) for v in d.get("stage_train_logloss", [])],
        )


def _logloss(y: np.ndarray, p: np.ndarray) -> float:
    eps = 1e-15
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def fit_gbt(X, y, hp: dict | None = None) -> GBTModel:
    hp = dict(hp or {})
    learning_rate = float(hp.get("learning_rate", 0.1))
    n_stages = int(hp.get("n_stages", 100))
    max_depth = int(hp.get("max_depth", 5))
    gamma = float(hp.get("gamma", 0.0))
    seed = int(hp.get("seed", 0))
    X, y = check_fit_inputs(X, y)
    yf = y.astype(np.float64)
    prevalence = float(yf.mean())
    if prevalence in (0.0, 1.0):
        # degenerate single-class target: clamp the log-odds
        prevalence = min(max(prevalence, 1e-12), 1 - 1e-12)
    base_score = float(np.log(prevalence / (1.0 - prevalence)))
    binned = bin_features(X)

    raw = np.full(X.shape[0], base_score)
    p = sigmoid(raw)
    trees: list[Tree] = []
    losses: list[float] = []
    for _ in range(n_stages):
        grad = p - yf
        hess = p * (1.0 - p)
        tree, row_value = grow_tree_newton(binned, grad, hess, max_depth=max_depth,
                                           lam=LAMBDA, gamma=gamma)
        trees.append(tree)
        raw += learning_rate * row_value
        p = sigmoid(raw)
        losses.append(_logloss(yf, p))
    return GBTModel(base_score=base_score, learning_rate=learning_rate, trees=trees,
                    n_features_in=X.shape[1], seed=seed, stage_train_logloss=losses)
