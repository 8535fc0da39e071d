"""Train-only-fitted preprocessing: sparse drop, Pearson selection, MICE, min-max, PCA."""

from .matrix import FeatureMatrix, matrix_from_arrays
from .mice import MiceState, fit_mice, mice_impute, transform_mice
from .pca import PCAState, fit_pca, transform_pca
from .pipeline import FittedPreprocessor, apply_pipeline, fit_pipeline
from .steps import (
    MinMaxState,
    drop_sparse_features,
    fit_minmax,
    pairwise_pearson,
    select_features_pearson,
    transform_minmax,
)

__all__ = [
    "FeatureMatrix",
    "matrix_from_arrays",
    "MiceState",
    "fit_mice",
    "mice_impute",
    "transform_mice",
    "PCAState",
    "fit_pca",
    "transform_pca",
    "FittedPreprocessor",
    "apply_pipeline",
    "fit_pipeline",
    "MinMaxState",
    "drop_sparse_features",
    "fit_minmax",
    "pairwise_pearson",
    "select_features_pearson",
    "transform_minmax",
]
