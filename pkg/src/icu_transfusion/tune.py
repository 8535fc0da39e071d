"""Exhaustive hyperparameter grids and inner-CV selection by AUROC."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .learners import ModelSpec, fit_model
from .metrics import auroc_score
from .stacking import stratified_folds

log = logging.getLogger(__name__)

# published search axes, in publication order
FULL_AXES: dict[str, list[tuple[str, list]]] = {
    "RF": [
        ("n_trees", [100, 150, 200, 300, 500, 1000, 1500, 3000]),
        ("min_samples_split", [2, 4, 5, 10]),
        ("max_depth", [5, 8, 10, 12, 15, 20]),
    ],
    "SVM": [
        ("kernel", ["linear", "poly", "sigmoid", "rbf"]),
        ("C", [0.2, 0.5, 0.8, 1, 1.5, 3, 5, 10, 25, 50]),
    ],
    "GBT": [
        ("learning_rate", [0.01, 0.1]),
        ("n_stages", [100, 250, 500]),
        ("max_depth", [5, 7, 12, 15]),
        ("gamma", [0, 0.1, 1]),
    ],
    "FNN": [
        ("n_hidden_layers", [3, 4]),
        ("neurons_per_layer", [16 + 4 * (n - 1) for n in range(1, 62)]),
    ],
    # the duplicated smoothing value in the published list is deduplicated
    "MM": [
        ("meta_family", ["LR", "RF", "ADABOOST", "VOTING", "FNN", "GNB"]),
        ("var_smoothing", [1e-9, 1e-7, 1e-5, 1e-3, 0.1, 0.5]),
    ],
    "GNB": [
        ("var_smoothing", [1e-9, 1e-7, 1e-5, 1e-3, 0.1, 0.5]),
    ],
}

# desk-scale mode: every axis subsampled to at most two of its cheapest
# values, at most two grid points per family
REDUCED_AXES: dict[str, list[tuple[str, list]]] = {
    "RF": [("n_trees", [100, 150]), ("min_samples_split", [2]), ("max_depth", [5])],
    "SVM": [("kernel", ["linear"]), ("C", [0.2, 0.5])],
    "GBT": [("learning_rate", [0.01, 0.1]), ("n_stages", [100]), ("max_depth", [5]), ("gamma", [0])],
    "FNN": [("n_hidden_layers", [3]), ("neurons_per_layer", [16, 20])],
    "MM": [("meta_family", ["GNB"]), ("var_smoothing", [1e-9, 1e-7])],
    "GNB": [("var_smoothing", [1e-9, 1e-7])],
}


@dataclass(frozen=True)
class SearchSpace:
    family: str
    axes: list[tuple[str, list]]

    def __post_init__(self) -> None:
        if not self.axes or any(not values for _, values in self.axes):
            raise ValidationError("search space axes must be non-empty")

    @property
    def size(self) -> int:
        out = 1
        for _, values in self.axes:
            out *= len(values)
        return out


def search_space(family: str, mode: str = "full") -> SearchSpace:
    table = {"full": FULL_AXES, "reduced": REDUCED_AXES}.get(mode)
    if table is None:
        raise ValidationError(f"grid mode must be full or reduced, got {mode!r}")
    if family not in table:
        raise ValidationError(f"no search space for family {family!r}")
    return SearchSpace(family=family, axes=[(n, list(v)) for n, v in table[family]])


def grid(space: SearchSpace) -> list[ModelSpec]:
    """Cartesian product in deterministic axis order.

    In the MM space the meta family is itself an axis; the smoothing axis
    stays on every point (it only takes effect for the GNB meta), keeping
    the grid size the product of the axis cardinalities with no duplicates.
    """
    combos = [dict()]
    for name, values in space.axes:
        combos = [dict(s, **{name: v}) for s in combos for v in values]
    out = []
    for hp in combos:
        hp = dict(hp)
        meta_family = hp.pop("meta_family", None)
        if space.family == "MM":
            fam = meta_family
        elif space.family == "GNB":
            fam = "GNB"
        else:
            fam = space.family
        out.append(ModelSpec(fam, hp))
    return out


@dataclass
class TrialResult:
    spec: ModelSpec
    mean_auroc: float
    fold_aurocs: list[float]
    wall_time: float
    grid_index: int


_CAPACITY_KEYS = {
    "RF": ("max_depth", "n_trees"),
    "GBT": ("max_depth", "n_stages"),
    "FNN": ("n_hidden_layers", "neurons_per_layer"),
}


def _tie_break_key(trial: TrialResult) -> tuple:
    hp = trial.spec.hyperparameters
    caps = tuple(hp.get(k, 0) for k in _CAPACITY_KEYS.get(trial.spec.family, ()))
    return (-trial.mean_auroc, *caps, trial.grid_index)


def grid_search(
    X,
    y,
    space: SearchSpace,
    k_inner: int = 3,
    seed: int = 0,
) -> tuple[ModelSpec, list[TrialResult]]:
    """Stratified inner CV over the grid; best mean AUROC wins.

    Ties prefer lower capacity (depth, then size) and finally grid order.
    """
    specs = grid(space)
    if not specs:
        raise ValidationError("empty grid")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    fold = stratified_folds(y, k_inner, seed)
    trials: list[TrialResult] = []
    for gi, spec in enumerate(specs):
        t0 = time.perf_counter()
        fold_scores = []
        for f in range(k_inner):
            test_rows = fold == f
            model = fit_model(spec, X[~test_rows], y[~test_rows],
                              seed=int(np.random.SeedSequence((seed, gi, f)).generate_state(1)[0]))
            fold_scores.append(auroc_score(model.predict_proba(X[test_rows]), y[test_rows]))
        trials.append(
            TrialResult(
                spec=spec,
                mean_auroc=float(np.mean(fold_scores)),
                fold_aurocs=[float(s) for s in fold_scores],
                wall_time=time.perf_counter() - t0,
                grid_index=gi,
            )
        )
    best = min(trials, key=_tie_break_key)
    log.info("grid search %s: best %s (mean AUROC %.4f over %d folds)",
             space.family, best.spec.hyperparameters, best.mean_auroc, k_inner)
    return best.spec, trials
