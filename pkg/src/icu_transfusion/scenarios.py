"""Leave-one-year-out scenario harness.

Each scenario fits the preprocessing chain and every model family on four
years and scores the held-out fifth. Fitted state is hashed before and
after test-set evaluation; the hashes land in the report so leakage
audits can assert nothing was refit.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bundle import state_hash
from .errors import ValidationError
from .learners import FittedModel, ModelSpec, fit_model
from .metrics import CurveSeries, MetricsRow, aggregate_curves, calibration_curve, compute_metrics, pr_curve, roc_curve
from .preprocess import FeatureMatrix, apply_pipeline, fit_pipeline
from .stacking import StackedModel, fit_stack
from .tune import TrialResult, grid_search, search_space

log = logging.getLogger(__name__)

MODEL_ROWS = ("LR", "RF", "FNN", "GBT", "SVM", "MM")
TUNED_FAMILIES = ("RF", "SVM", "GBT", "FNN")

DEFAULT_SPECS: dict[str, dict] = {
    "LR": {"learning_rate": 0.5, "l2": 1e-4, "max_epochs": 300, "tol": 1e-6},
    "RF": {"n_trees": 100, "min_samples_split": 2, "max_depth": 8},
    "GBT": {"learning_rate": 0.1, "n_stages": 100, "max_depth": 5, "gamma": 0.0},
    "SVM": {"kernel": "linear", "C": 1.0},
    "FNN": {"n_hidden_layers": 3, "neurons_per_layer": 16, "learning_rate": 3e-3,
            "max_epochs": 60, "patience": 8},
    "GNB": {"var_smoothing": 1e-9},
}


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    grid_mode: str = "off"  # off | reduced | full
    n_folds: int = 5
    k_inner: int = 3
    decision_threshold: float = 0.5
    missingness_threshold: float = 0.90
    pearson_r_max: float = 0.9
    pca_variance_target: float = 0.90
    mice_cycles: int = 10
    calibration_bins: int = 10
    svm_max_passes: int = 0  # 0 keeps the family default
    n_jobs: int = 1
    model_overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.grid_mode not in ("off", "reduced", "full"):
            raise ValidationError("grid_mode must be off, reduced, or full")
        for name, value in (
            ("decision_threshold", self.decision_threshold),
            ("missingness_threshold", self.missingness_threshold),
            ("pearson_r_max", self.pearson_r_max),
            ("pca_variance_target", self.pca_variance_target),
        ):
            if not 0.0 < value <= 1.0:
                raise ValidationError(f"{name} must be in (0,1]")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "grid_mode": self.grid_mode, "n_folds": self.n_folds,
            "k_inner": self.k_inner, "decision_threshold": self.decision_threshold,
            "missingness_threshold": self.missingness_threshold,
            "pearson_r_max": self.pearson_r_max,
            "pca_variance_target": self.pca_variance_target,
            "mice_cycles": self.mice_cycles, "calibration_bins": self.calibration_bins,
            "svm_max_passes": self.svm_max_passes, "n_jobs": self.n_jobs,
            "model_overrides": self.model_overrides,
        }


@dataclass
class ScenarioSplit:
    held_out_year: int
    train: FeatureMatrix
    test: FeatureMatrix


def split_by_year(instances: FeatureMatrix, held_out_year: int) -> ScenarioSplit:
    """Train on every other year, test on the held-out one."""
    test_mask = instances.years == held_out_year
    if not test_mask.any():
        raise ValidationError(f"no instances in hold-out year {held_out_year}")
    if test_mask.all():
        raise ValidationError("no training instances outside the hold-out year")
    return ScenarioSplit(
        held_out_year=held_out_year,
        train=instances.take_rows(np.nonzero(~test_mask)[0]),
        test=instances.take_rows(np.nonzero(test_mask)[0]),
    )


@dataclass
class ScenarioReport:
    held_out_year: int
    train_years: list[int]
    n_train: int
    n_test: int
    metrics: list[MetricsRow]
    curves: dict[str, dict[str, CurveSeries]]
    best_specs: dict[str, dict]
    trial_summaries: dict[str, list[dict]]
    shared_encounters: int
    state_hash_before: str
    state_hash_after: str
    n_components: int
    timings: dict[str, float]
    svm_converged: bool

    def metrics_frame(self):
        import pandas as pd

        return pd.DataFrame([row.as_dict() for row in self.metrics])


def _family_seed(seed: int, year: int, family: str) -> int:
    key = (seed, year, sum(ord(c) for c in family))
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def _spec_for(family: str, config: ScenarioConfig, tuned: dict[str, ModelSpec]) -> ModelSpec:
    if family in tuned:
        spec = tuned[family]
    else:
        hp = dict(DEFAULT_SPECS.get(family, {}))
        hp.update(config.model_overrides.get(family, {}))
        spec = ModelSpec(family, hp)
    if family == "SVM" and config.svm_max_passes > 0 and "max_passes" not in spec.hyperparameters:
        spec = spec.with_params(max_passes=config.svm_max_passes)
    return spec


def run_one_scenario(instances: FeatureMatrix, held_out_year: int,
                     config: ScenarioConfig) -> ScenarioReport:
    timings: dict[str, float] = {}
    split = split_by_year(instances, held_out_year)
    shared = len(set(split.train.encounter_ids) & set(split.test.encounter_ids))
    train_years = sorted(int(y) for y in np.unique(split.train.years))

    t0 = time.perf_counter()
    pre, train_tf = fit_pipeline(
        split.train,
        missingness_threshold=config.missingness_threshold,
        r_max=config.pearson_r_max,
        variance_target=config.pca_variance_target,
        mice_cycles=config.mice_cycles,
    )
    timings["preprocess_fit"] = time.perf_counter() - t0
    Xtr, ytr = train_tf.values, train_tf.labels

    tuned: dict[str, ModelSpec] = {}
    trial_summaries: dict[str, list[dict]] = {}
    if config.grid_mode != "off":
        t0 = time.perf_counter()
        for family in TUNED_FAMILIES:
            space = search_space(family, config.grid_mode)
            if family == "SVM" and config.svm_max_passes > 0:
                space = type(space)(family="SVM", axes=space.axes)
            best, trials = grid_search(Xtr, ytr, space, k_inner=config.k_inner,
                                       seed=_family_seed(config.seed, held_out_year, family))
            tuned[family] = best
            trial_summaries[family] = [_trial_dict(t) for t in trials]
        timings["grid_search"] = time.perf_counter() - t0

    models: dict[str, FittedModel] = {}
    t0 = time.perf_counter()
    for family in ("LR", "RF", "GBT", "SVM", "FNN"):
        spec = _spec_for(family, config, tuned)
        models[family] = fit_model(spec, Xtr, ytr,
                                   seed=_family_seed(config.seed, held_out_year, family))
    timings["base_fits"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    meta_selector = None
    if config.grid_mode != "off":
        def meta_selector(oof, yy):
            best, trials = grid_search(oof, yy, search_space("MM", config.grid_mode),
                                       k_inner=config.k_inner,
                                       seed=_family_seed(config.seed, held_out_year, "MM"))
            trial_summaries["MM"] = [_trial_dict(t) for t in trials]
            return best

    stack = fit_stack(
        Xtr, ytr,
        base_specs={name: _spec_for(name, config, tuned) for name in ("RF", "SVM", "GBT")},
        meta_spec=_spec_for("GNB", config, tuned) if config.grid_mode == "off" else None,
        n_folds=config.n_folds,
        seed=_family_seed(config.seed, held_out_year, "STACK"),
        prefit_bases={name: models[name] for name in ("RF", "SVM", "GBT")},
        meta_selector=meta_selector,
    )
    timings["stack_fit"] = time.perf_counter() - t0

    hash_before = state_hash(pre, *[models[f] for f in ("LR", "RF", "GBT", "SVM", "FNN")], stack)

    t0 = time.perf_counter()
    test_tf = apply_pipeline(pre, split.test)
    Xte, yte = test_tf.values, test_tf.labels
    rows: list[MetricsRow] = []
    curves: dict[str, dict[str, CurveSeries]] = {}
    scorers: dict[str, FittedModel | StackedModel] = dict(models)
    scorers["MM"] = stack
    for name in MODEL_ROWS:
        scorer = scorers.get(name if name != "MM" else "MM")
        scores = scorer.predict_proba(Xte)
        rows.append(compute_metrics(scores, yte, threshold=config.decision_threshold, model=name))
        curves[name] = {
            "ROC": roc_curve(scores, yte, label=name),
            "PR": pr_curve(scores, yte, label=name),
            "calibration": calibration_curve(scores, yte, n_bins=config.calibration_bins, label=name),
        }
    timings["evaluate"] = time.perf_counter() - t0

    hash_after = state_hash(pre, *[models[f] for f in ("LR", "RF", "GBT", "SVM", "FNN")], stack)
    best_specs = {
        f: {"family": s.family, **s.hyperparameters}
        for f, s in ((fam, _spec_for(fam, config, tuned)) for fam in ("LR", "RF", "GBT", "SVM", "FNN"))
    }
    best_specs["MM"] = {"family": stack.meta.family,
                        **getattr(stack, "meta_spec_hp", {})}
    return ScenarioReport(
        held_out_year=held_out_year,
        train_years=train_years,
        n_train=split.train.n_rows,
        n_test=split.test.n_rows,
        metrics=rows,
        curves=curves,
        best_specs=best_specs,
        trial_summaries=trial_summaries,
        shared_encounters=shared,
        state_hash_before=hash_before,
        state_hash_after=hash_after,
        n_components=pre.n_components,
        timings=timings,
        svm_converged=bool(getattr(models["SVM"], "converged", True)),
    )


def _trial_dict(t: TrialResult) -> dict:
    return {
        "family": t.spec.family,
        "hyperparameters": dict(t.spec.hyperparameters),
        "mean_auroc": t.mean_auroc,
        "fold_aurocs": list(t.fold_aurocs),
        "wall_time": t.wall_time,
        "grid_index": t.grid_index,
    }


def _scenario_job(args):
    instances, year, config = args
    return run_one_scenario(instances, year, config)


def run_scenarios(instances: FeatureMatrix, config: ScenarioConfig,
                  held_out_years: list[int] | None = None) -> list[ScenarioReport]:
    """One report per held-out year; scenarios run independently."""
    years = sorted(int(y) for y in np.unique(instances.years))
    if len(years) < 2:
        raise ValidationError("need at least two distinct years for scenarios")
    targets = held_out_years if held_out_years is not None else years
    bad = [y for y in targets if y not in years]
    if bad:
        raise ValidationError(f"hold-out years with no instances: {bad}")
    if config.n_jobs > 1 and len(targets) > 1:
        with ProcessPoolExecutor(max_workers=min(config.n_jobs, len(targets))) as pool:
            reports = list(pool.map(_scenario_job, [(instances, y, config) for y in targets]))
    else:
        reports = [run_one_scenario(instances, y, config) for y in targets]
    return reports


def aggregate_model_curves(reports: list[ScenarioReport]) -> dict[str, dict[str, CurveSeries]]:
    """Cross-scenario mean/std bands per model and curve kind."""
    out: dict[str, dict[str, CurveSeries]] = {}
    for name in MODEL_ROWS:
        out[name] = {}
        for kind in ("ROC", "PR", "calibration"):
            series = [r.curves[name][kind] for r in reports if name in r.curves]
            out[name][kind] = aggregate_curves(series, label=f"{name} mean {kind}")
    return out
