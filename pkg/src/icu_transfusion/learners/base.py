"""Shared model plumbing: specs, the fitted-model protocol, and dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import ValidationError

FAMILIES = ("LR", "RF", "GBT", "SVM", "FNN", "GNB")
META_FAMILIES = ("LR", "RF", "ADABOOST", "VOTING", "FNN", "GNB")


@dataclass(frozen=True)
class ModelSpec:
    family: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES + ("ADABOOST", "VOTING"):
            raise ValidationError(f"unknown model family {self.family!r}")

    def with_params(self, **kw) -> "ModelSpec":
        merged = dict(self.hyperparameters)
        merged.update(kw)
        return ModelSpec(self.family, merged)


@runtime_checkable
class FittedModel(Protocol):
    family: str
    n_features_in: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...

    def to_dict(self) -> dict: ...


def check_fit_inputs(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ValidationError("X must be 2-D")
    if y.shape != (X.shape[0],):
        raise ValidationError("y length must match X rows")
    if not np.all((y == 0) | (y == 1)):
        raise ValidationError("y must be 0/1")
    if not np.all(np.isfinite(X)):
        raise ValidationError("X must be finite (impute before fitting)")
    return X, y.astype(np.int64)


def check_predict_input(model, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features_in:
        raise ValidationError(
            f"{model.family}: input has {X.shape[1]} features, model was fit on {model.n_features_in}"
        )
    return X


def predict_proba(model: FittedModel, X) -> np.ndarray:
    """Probability of the positive class, one value in [0,1] per row."""
    p = model.predict_proba(X)
    return np.asarray(p, dtype=np.float64)


def fit_model(spec: ModelSpec, X, y, seed: int = 0) -> FittedModel:
    """Fit any family from its spec. `seed` is used unless hp pins one."""
    from . import fnn, forest, gbt, gnb, logistic, stumps, svm

    hp = dict(spec.hyperparameters)
    if spec.family in ("RF", "GBT", "SVM", "FNN", "ADABOOST"):
        hp.setdefault("seed", seed)
    fitters = {
        "LR": logistic.fit_logistic,
        "RF": forest.fit_random_forest,
        "GBT": gbt.fit_gbt,
        "SVM": svm.fit_svm,
        "FNN": fnn.fit_fnn,
        "GNB": gnb.fit_gaussian_nb,
        "ADABOOST": stumps.fit_adaboost,
        "VOTING": stumps.fit_voting,
    }
    return fitters[spec.family](X, y, hp)


def model_from_dict(payload: dict) -> FittedModel:
    from . import fnn, forest, gbt, gnb, logistic, stumps, svm

    loaders = {
        "LR": logistic.LogisticModel.from_dict,
        "RF": forest.ForestModel.from_dict,
        "GBT": gbt.GBTModel.from_dict,
        "SVM": svm.SVMModel.from_dict,
        "FNN": fnn.FNNModel.from_dict,
        "GNB": gnb.GNBModel.from_dict,
        "ADABOOST": stumps.AdaBoostModel.from_dict,
        "VOTING": stumps.VotingModel.from_dict,
    }
    family = payload.get("family")
    if family not in loaders:
        raise ValidationError(f"cannot deserialize model family {family!r}")
    return loaders[family](payload)
