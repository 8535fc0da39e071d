"""Principal components from the sample covariance eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .matrix import FeatureMatrix


@dataclass
class PCAState:
    columns: list[str]
    means: np.ndarray
    loadings: np.ndarray  # (k, d), rows orthonormal
    explained_variance_ratio: np.ndarray  # (k,)
    eigenvalues: np.ndarray  # all d, descending
    k: int

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "means": self.means.tolist(),
            "loadings": self.loadings.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PCAState":
        return cls(
            columns=list(d["columns"]),
            means=np.asarray(d["means"], dtype=np.float64),
            loadings=np.asarray(d["loadings"], dtype=np.float64),
            explained_variance_ratio=np.asarray(d["explained_variance_ratio"], dtype=np.float64),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=np.float64),
            k=int(d["k"]),
        )


def fit_pca(m: FeatureMatrix, variance_target: float = 0.90) -> PCAState:
    """Keep the smallest prefix of components reaching the variance target.

    Covariance uses the n-1 divisor; components are ordered by
    non-increasing eigenvalue and signed so each one's largest-magnitude
    coordinate is positive.
    """
    if not 0.0 < variance_target <= 1.0:
        raise ValidationError("variance target must be in (0,1]")
    if np.isnan(m.values).any():
        raise ValidationError("PCA requires a complete matrix")
    if m.n_rows < 2:
        raise ValidationError("PCA needs more than one row")
    means = m.values.mean(axis=0)
    centered = m.values - means
    cov = (centered.T @ centered) / (m.n_rows - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]
    total = float(eigvals.sum())
    if total <= 0:
        raise ValidationError("matrix has zero total variance")
    ratios = eigvals / total
    k = int(np.searchsorted(np.cumsum(ratios), variance_target - 1e-12) + 1)
    k = min(k, eigvals.size)
    loadings = eigvecs[:, :k].T.copy()
    # deterministic sign: largest-|coordinate| entry of each component positive
    for row in loadings:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return PCAState(columns=list(m.columns), means=means, loadings=loadings,
                    explained_variance_ratio=ratios[:k].copy(),
                    eigenvalues=eigvals, k=k)


def transform_pca(state: PCAState, m: FeatureMatrix) -> FeatureMatrix:
    if list(m.columns) != list(state.columns):
        raise ValidationError("PCA state fitted on different columns")
    if np.isnan(m.values).any():
        raise ValidationError("PCA transform requires a complete matrix")
    projected = (m.values - state.means) @ state.loadings.T
    names = [f"pc{i + 1}" for i in range(state.k)]
    return m.with_values(projected, columns=names)
