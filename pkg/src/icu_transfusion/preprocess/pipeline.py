"""The frozen preprocessing chain fitted on training rows only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError, ValidationError
from .matrix import FeatureMatrix
from .mice import MiceState, fit_mice, transform_mice
from .pca import PCAState, fit_pca, transform_pca
from .steps import MinMaxState, drop_sparse_features, fit_minmax, select_features_pearson, transform_minmax


@dataclass
class FittedPreprocessor:
    kept_features: list[str]
    mice: MiceState
    minmax: MinMaxState
    pca: PCAState
    missingness_threshold: float
    r_max: float
    variance_target: float

    def to_dict(self) -> dict:
        return {
            "kept_features": list(self.kept_features),
            "mice": self.mice.to_dict(),
            "minmax": self.minmax.to_dict(),
            "pca": self.pca.to_dict(),
            "missingness_threshold": self.missingness_threshold,
            "r_max": self.r_max,
            "variance_target": self.variance_target,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedPreprocessor":
        return cls(
            kept_features=list(d["kept_features"]),
            mice=MiceState.from_dict(d["mice"]),
            minmax=MinMaxState.from_dict(d["minmax"]),
            pca=PCAState.from_dict(d["pca"]),
            missingness_threshold=float(d["missingness_threshold"]),
            r_max=float(d["r_max"]),
            variance_target=float(d["variance_target"]),
        )

    @property
    def n_components(self) -> int:
        return self.pca.k


def fit_pipeline(
    train: FeatureMatrix,
    missingness_threshold: float = 0.90,
    r_max: float = 0.9,
    variance_target: float = 0.90,
    mice_cycles: int = 10,
) -> tuple[FittedPreprocessor, FeatureMatrix]:
    """Fit sparse-drop, Pearson selection, MICE, min-max, PCA in that order.

    Returns the frozen chain and the transformed training matrix; the
    latter is exactly what apply_pipeline reproduces on the same rows.
    """
    if len(np.unique(train.labels)) < 2:
        raise ValidationError("training matrix must contain both classes")
    dense = drop_sparse_features(train, threshold=missingness_threshold)
    selected = select_features_pearson(dense, r_max=r_max)
    mice_state, _ = fit_mice(selected, cycles=mice_cycles)
    imputed = transform_mice(mice_state, selected)
    minmax_state = fit_minmax(imputed)
    scaled = transform_minmax(minmax_state, imputed)
    pca_state = fit_pca(scaled, variance_target=variance_target)
    transformed = transform_pca(pca_state, scaled)
    pre = FittedPreprocessor(
        kept_features=list(selected.columns),
        mice=mice_state,
        minmax=minmax_state,
        pca=pca_state,
        missingness_threshold=missingness_threshold,
        r_max=r_max,
        variance_target=variance_target,
    )
    return pre, transformed


def apply_pipeline(pre: FittedPreprocessor, m: FeatureMatrix) -> FeatureMatrix:
    """Replay the frozen chain; fitted state is never updated here."""
    missing_cols = [c for c in pre.kept_features if c not in m.columns]
    if missing_cols:
        raise SchemaError(f"matrix lacks required columns: {missing_cols}")
    selected = m.select_columns(pre.kept_features)
    imputed = transform_mice(pre.mice, selected)
    scaled = transform_minmax(pre.minmax, imputed)
    return transform_pca(pre.pca, scaled)
