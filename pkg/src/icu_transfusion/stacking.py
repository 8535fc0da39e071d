"""Stacked generalization: RF, SVM, GBT bases under a pluggable meta-learner.

The meta-learner trains on out-of-fold base probabilities assembled from a
stratified k-fold partition of the training rows, so no base model ever
scores a row it saw during its own fit. The stored base models are then
refit on the full training split.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, ValidationError
from .learners import FittedModel, ModelSpec, fit_model, model_from_dict

log = logging.getLogger(__name__)

BASE_ORDER = ("RF", "SVM", "GBT")
META_CHOICES = ("GNB", "LR", "RF", "ADABOOST", "VOTING", "FNN")


@dataclass
class StackedModel:
    base_models: dict[str, FittedModel]  # keyed RF / SVM / GBT
    meta: FittedModel
    n_folds: int
    seed: int
    fold_of_row: np.ndarray = field(repr=False)  # training bookkeeping for leakage audits
    oof_matrix: np.ndarray = field(repr=False)
    meta_spec_hp: dict = field(default_factory=dict)
    family: str = "STACK"

    @property
    def n_features_in(self) -> int:
        return next(iter(self.base_models.values())).n_features_in

    def base_probabilities(self, X) -> np.ndarray:
        cols = [self.base_models[name].predict_proba(X) for name in BASE_ORDER]
        return np.column_stack(cols)

    def predict_proba(self, X) -> np.ndarray:
        return self.meta.predict_proba(self.base_probabilities(X))

    def to_dict(self) -> dict:
        return {
            "family": "STACK",
            "n_folds": self.n_folds,
            "seed": self.seed,
            "base_models": {name: self.base_models[name].to_dict() for name in BASE_ORDER},
            "meta": self.meta.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StackedModel":
        return cls(
            base_models={name: model_from_dict(d["base_models"][name]) for name in BASE_ORDER},
            meta=model_from_dict(d["meta"]),
            n_folds=int(d["n_folds"]),
            seed=int(d["seed"]),
            fold_of_row=np.array([], dtype=np.int64),
            oof_matrix=np.empty((0, 3)),
        )


def stratified_folds(y: np.ndarray, n_folds: int, seed: int, max_tries: int = 20) -> np.ndarray:
    """Fold id per row; every fold holds both classes or FitError is raised."""
    y = np.asarray(y)
    n = y.size
    for attempt in range(max_tries):
        rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
        fold = np.empty(n, dtype=np.int64)
        ok = True
        for cls in np.unique(y):
            rows = np.nonzero(y == cls)[0]
            perm = rng.permutation(rows)
            fold[perm] = np.arange(perm.size) % n_folds
        for f in range(n_folds):
            if len(np.unique(y[fold == f])) < 2 or not np.any(fold == f):
                ok = False
                break
        if ok:
            return fold
    raise FitError(f"could not stratify {n} rows into {n_folds} folds with both classes")


def fit_stack(
    X,
    y,
    base_specs: dict[str, ModelSpec] | None = None,
    meta_spec: ModelSpec | None = None,
    n_folds: int = 5,
    seed: int = 0,
    prefit_bases: dict[str, FittedModel] | None = None,
) -> StackedModel:
    """Assemble out-of-fold base probabilities, fit the meta-learner, refit bases.

    `prefit_bases` may supply full-train base fits (matching the specs) to
    reuse; fold-level fits are always performed here.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if n_folds < 2:
        raise ValidationError("stacking needs n_folds >= 2")
    if len(np.unique(y)) < 2:
        raise FitError("stacking needs both classes present")
    base_specs = dict(base_specs or {})
    for name in BASE_ORDER:
        base_specs.setdefault(name, ModelSpec(name))
        if base_specs[name].family != name:
            raise ValidationError(f"base spec for {name} has family {base_specs[name].family}")
    meta_spec = meta_spec or ModelSpec("GNB")
    if meta_spec.family not in META_CHOICES:
        raise ValidationError(f"meta family must be one of {META_CHOICES}")

    fold = stratified_folds(y, n_folds, seed)
    oof = np.full((X.shape[0], len(BASE_ORDER)), np.nan)
    for f in range(n_folds):
        test_rows = fold == f
        train_rows = ~test_rows
        for j, name in enumerate(BASE_ORDER):
            model = fit_model(base_specs[name], X[train_rows], y[train_rows],
                              seed=_fold_seed(seed, f, j))
            oof[test_rows, j] = model.predict_proba(X[test_rows])
    if np.isnan(oof).any():
        raise FitError("out-of-fold matrix has holes; fold assembly is broken")

    meta = fit_model(meta_spec, oof, y, seed=_fold_seed(seed, n_folds, 0))
    bases: dict[str, FittedModel] = {}
    for j, name in enumerate(BASE_ORDER):
        if prefit_bases and name in prefit_bases:
            bases[name] = prefit_bases[name]
        else:
            bases[name] = fit_model(base_specs[name], X, y, seed=_full_fit_seed(seed, j))
    return StackedModel(base_models=bases, meta=meta, n_folds=n_folds, seed=seed,
                        fold_of_row=fold, oof_matrix=oof)


def _fold_seed(seed: int, fold: int, base_idx: int) -> int:
    return int(np.random.SeedSequence((seed, fold, base_idx)).generate_state(1)[0])


def _full_fit_seed(seed: int, base_idx: int) -> int:
    return int(np.random.SeedSequence((seed, 999, base_idx)).generate_state(1)[0])


def predict_stack(model: StackedModel, X) -> np.ndarray:
    return model.predict_proba(X)
