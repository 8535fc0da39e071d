"""Chained-equations imputation with deterministic OLS column models.

Fitting runs `cycles` rounds over the incomplete columns in schema order;
each round refits an intercept-plus-all-other-columns regression on the
rows where the column is observed and rewrites its missing cells with
predictions. The final round's regressors are frozen. Transforming (any
matrix, including the training one) starts from train column means and
replays `cycles` chained prediction passes with the frozen regressors, so
fit-time output and a later transform of the training matrix agree cell
for cell.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .matrix import FeatureMatrix

log = logging.getLogger(__name__)

RIDGE_FALLBACK = 1e-8


@dataclass
class MiceState:
    columns: list[str]
    column_means: np.ndarray
    # per incomplete column: intercept followed by one coefficient per other column
    regressors: dict[str, np.ndarray]
    cycles: int

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "column_means": self.column_means.tolist(),
            "regressors": {k: v.tolist() for k, v in self.regressors.items()},
            "cycles": self.cycles,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MiceState":
        return cls(
            columns=list(d["columns"]),
            column_means=np.asarray(d["column_means"], dtype=np.float64),
            regressors={k: np.asarray(v, dtype=np.float64) for k, v in d["regressors"].items()},
            cycles=int(d["cycles"]),
        )


def _ols_fit(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least squares with intercept; ridge-stabilized when the solve is singular."""
    design = np.column_stack([np.ones(A.shape[0]), A])
    gram = design.T @ design
    rhs = design.T @ b
    try:
        coef = np.linalg.solve(gram, rhs)
        if not np.all(np.isfinite(coef)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        log.info("singular design in column regression; applying ridge %g", RIDGE_FALLBACK)
        gram = gram + RIDGE_FALLBACK * np.eye(gram.shape[0])
        coef = np.linalg.solve(gram, rhs)
    return coef


def fit_mice(m: FeatureMatrix, cycles: int = 10) -> tuple[MiceState, np.ndarray]:
    """Learn the column regressors; also returns the cycle-imputed cells."""
    if cycles < 1:
        raise ValidationError("cycles must be >= 1")
    values = m.values
    missing = np.isnan(values)
    if missing.all(axis=0).any():
        bad = [c for c, flag in zip(m.columns, missing.all(axis=0)) if flag]
        raise ValidationError(f"all-missing columns must be dropped first: {bad}")
    if missing.all(axis=1).any():
        raise ValidationError("all-missing rows are not imputable")
    means = np.nanmean(values, axis=0)
    work = np.where(missing, means, values)
    incomplete = [j for j in range(m.n_cols) if missing[:, j].any()]
    regressors: dict[str, np.ndarray] = {}
    all_others = {j: [k for k in range(m.n_cols) if k != j] for j in range(m.n_cols)}
    for _ in range(cycles):
        for j in incomplete:
            obs = ~missing[:, j]
            coef = _ols_fit(work[np.ix_(obs, all_others[j])], values[obs, j])
            regressors[m.columns[j]] = coef
            miss_rows = missing[:, j]
            if miss_rows.any():
                pred = coef[0] + work[np.ix_(miss_rows, all_others[j])] @ coef[1:]
                work[miss_rows, j] = pred
    # columns complete at fit time still get a regressor so held-out
    # matrices with arbitrary missingness patterns can be imputed
    for j in range(m.n_cols):
        if m.columns[j] not in regressors:
            regressors[m.columns[j]] = _ols_fit(work[:, all_others[j]], values[:, j])
    return MiceState(columns=list(m.columns), column_means=means,
                     regressors=regressors, cycles=cycles), work


def transform_mice(state: MiceState, m: FeatureMatrix) -> FeatureMatrix:
    """Mean-init then `cycles` chained passes with the frozen regressors."""
    if list(m.columns) != list(state.columns):
        raise ValidationError("MICE state fitted on different columns")
    values = m.values
    missing = np.isnan(values)
    work = np.where(missing, state.column_means, values)
    if not missing.any():
        return m.with_values(work)
    plan = []
    for j, name in enumerate(state.columns):
        coef = state.regressors.get(name)
        miss_rows = missing[:, j]
        if coef is not None and miss_rows.any():
            plan.append((j, [k for k in range(len(state.columns)) if k != j], coef, miss_rows))
    # columns are visited in schema order, same as during fitting
    plan.sort(key=lambda item: item[0])
    for _ in range(state.cycles):
        for j, others, coef, miss_rows in plan:
            work[miss_rows, j] = coef[0] + work[np.ix_(miss_rows, others)] @ coef[1:]
    return m.with_values(work)


def mice_impute(m: FeatureMatrix, cycles: int = 10) -> tuple[FeatureMatrix, MiceState]:
    """Impute `m` by chained-equation cycles; also returns the frozen state."""
    state, work = fit_mice(m, cycles=cycles)
    return m.with_values(work), state
