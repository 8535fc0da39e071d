"""Model families with probability outputs, implemented from first principles."""

from .base import FAMILIES, META_FAMILIES, FittedModel, ModelSpec, fit_model, model_from_dict, predict_proba
from .fnn import FNNModel, fit_fnn
from .forest import ForestModel, fit_random_forest
from .gbt import GBTModel, fit_gbt
from .gnb import GNBModel, fit_gaussian_nb
from .logistic import LogisticModel, fit_logistic
from .stumps import AdaBoostModel, VotingModel, fit_adaboost, fit_voting
from .svm import SVMModel, fit_svm

__all__ = [
    "FAMILIES",
    "META_FAMILIES",
    "FittedModel",
    "ModelSpec",
    "fit_model",
    "model_from_dict",
    "predict_proba",
    "FNNModel",
    "fit_fnn",
    "ForestModel",
    "fit_random_forest",
    "GBTModel",
    "fit_gbt",
    "GNBModel",
    "fit_gaussian_nb",
    "LogisticModel",
    "fit_logistic",
    "AdaBoostModel",
    "VotingModel",
    "fit_adaboost",
    "fit_voting",
    "SVMModel",
    "fit_svm",
]
