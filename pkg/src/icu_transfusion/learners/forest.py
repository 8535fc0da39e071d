"""Random forest of Gini CART trees with bootstrap rows and sqrt(d) candidates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import check_fit_inputs, check_predict_input
from .trees import Tree, bin_features, grow_tree_gini


@dataclass
class ForestModel:
    trees: list[Tree]
    n_features_in: int
    seed: int
    family: str = "RF"

    def predict_proba(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "family": "RF",
            "n_features_in": self.n_features_in,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=[Tree.from_dict(t) for t in d["trees"]],
            n_features_in=int(d["n_features_in"]),
            seed=int(d["seed"]),
        )


def fit_random_forest(X, y, hp: dict | None = None) -> ForestModel:
    """Each tree sees a size-n bootstrap and sqrt(d) random candidates per split.

    Probability output is the across-tree mean of leaf positive fractions.
    """
    hp = dict(hp or {})
    n_trees = int(hp.get("n_trees", 100))
    min_samples_split = int(hp.get("min_samples_split", 2))
    max_depth = int(hp.get("max_depth", 10))
    seed = int(hp.get("seed", 0))
    X, y = check_fit_inputs(X, y)
    n, d = X.shape
    rng = np.random.default_rng(seed)
    binned = bin_features(X)
    mtry = max(1, int(round(np.sqrt(d))))
    trees = []
    for _ in range(n_trees):
        rows = rng.integers(0, n, size=n)
        trees.append(
            grow_tree_gini(binned, rows, y, max_depth=max_depth,
                           min_samples_split=min_samples_split,
                           n_candidates=mtry, rng=rng)
        )
    return ForestModel(trees=trees, n_features_in=d, seed=seed)
