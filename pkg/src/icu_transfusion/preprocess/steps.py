"""Sparse-column rejection, Pearson redundancy pruning, min-max scaling."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .matrix import FeatureMatrix

log = logging.getLogger(__name__)


def drop_sparse_features(m: FeatureMatrix, threshold: float = 0.90) -> FeatureMatrix:
    """Remove columns whose missing fraction is strictly above `threshold`."""
    if not 0.0 < threshold <= 1.0:
        raise ValidationError("missingness threshold must be in (0,1]")
    frac = np.isnan(m.values).mean(axis=0)
    keep = frac <= threshold
    if not keep.any():
        raise ValidationError("every column exceeds the missingness threshold")
    kept_names = [c for c, k in zip(m.columns, keep) if k]
    dropped = [c for c, k in zip(m.columns, keep) if not k]
    if dropped:
        log.info("dropping %d sparse columns: %s", len(dropped), dropped)
    return m.select_columns(kept_names)


def pairwise_pearson(values: np.ndarray) -> np.ndarray:
    """Pearson r over pairwise-complete rows for every column pair.

    Pairs without at least two complete rows, or with zero variance on
    their complete rows, get NaN.
    """
    mask = ~np.isnan(values)
    x = np.where(mask, values, 0.0)
    mf = mask.astype(np.float64)
    n = mf.T @ mf
    sx = x.T @ mf  # sum of column i over rows complete in (i,j)
    sxx = (x * x).T @ mf
    sxy = x.T @ x
    with np.errstate(invalid="ignore", divide="ignore"):
        cov = sxy / n - (sx / n) * (sx.T / n)
        var_i = sxx / n - (sx / n) ** 2
        var_j = var_i.T
        r = cov / np.sqrt(var_i * var_j)
    r[n < 2] = np.nan
    return r


def select_features_pearson(m: FeatureMatrix, r_max: float = 0.9) -> FeatureMatrix:
    """Greedily drop the later column of every pair with |r| > r_max.

    Columns whose correlation is undefined (constant on complete pairs)
    are kept and logged.
    """
    if not 0.0 < r_max <= 1.0:
        raise ValidationError("r_max must be in (0,1]")
    r = pairwise_pearson(m.values)
    d = m.n_cols
    undefined = [m.columns[j] for j in range(d)
                 if np.isnan(r[j, [k for k in range(d) if k != j]]).all()]
    if undefined:
        log.warning("correlation undefined for columns (kept): %s", undefined)
    keep = np.ones(d, dtype=bool)
    for i in range(d):
        if not keep[i]:
            continue
        for j in range(i + 1, d):
            if keep[j] and not np.isnan(r[i, j]) and abs(r[i, j]) > r_max:
                keep[j] = False
                log.info("dropping %s: |r|=%.4f with %s", m.columns[j], abs(r[i, j]), m.columns[i])
    kept_names = [c for c, k in zip(m.columns, keep) if k]
    out = m.select_columns(kept_names)
    # post-assertion per the module contract
    rr = pairwise_pearson(out.values)
    np.fill_diagonal(rr, 0.0)
    if np.nanmax(np.abs(rr), initial=0.0) > r_max + 1e-12:
        raise AssertionError("pearson selection left a violating pair")
    return out


@dataclass
class MinMaxState:
    columns: list[str]
    mins: np.ndarray
    maxs: np.ndarray

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MinMaxState":
        return cls(columns=list(d["columns"]),
                   mins=np.asarray(d["mins"], dtype=np.float64),
                   maxs=np.asarray(d["maxs"], dtype=np.float64))


def fit_minmax(m: FeatureMatrix) -> MinMaxState:
    if np.isnan(m.values).any():
        raise ValidationError("min-max fitting requires a complete matrix")
    return MinMaxState(columns=list(m.columns),
                       mins=m.values.min(axis=0),
                       maxs=m.values.max(axis=0))


def transform_minmax(state: MinMaxState, m: FeatureMatrix) -> FeatureMatrix:
    """Affine map sending train min to 0 and train max to 1, then clipped.

    Constant training columns map to zero everywhere.
    """
    if list(m.columns) != list(state.columns):
        raise ValidationError("min-max state fitted on different columns")
    if np.isnan(m.values).any():
        raise ValidationError("min-max transform requires a complete matrix")
    span = state.maxs - state.mins
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    scaled = (m.values - state.mins) / safe_span
    scaled = np.clip(scaled, 0.0, 1.0)
    scaled[:, constant] = 0.0
    return m.with_values(scaled)
