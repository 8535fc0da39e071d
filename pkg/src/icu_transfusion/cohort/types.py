"""Domain row types and the synthetic cohort specification."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .. import schema
from ..errors import ValidationError


@dataclass(frozen=True)
class EncounterStatic:
    encounter_id: str
    age: int
    gender: str
    race: str
    ethnicity: str
    hospital_service: str
    admission_time: pd.Timestamp
    year: int
    mortality: bool

    def __post_init__(self) -> None:
        if self.age < 18:
            raise ValidationError(f"{self.encounter_id}: adult cohort requires age >= 18")
        if self.year not in schema.YEARS:
            raise ValidationError(f"{self.encounter_id}: year {self.year} outside {schema.YEARS}")


@dataclass(frozen=True)
class RawObservation:
    encounter_id: str
    time: pd.Timestamp
    variable: str
    value: float

    def __post_init__(self) -> None:
        if self.variable not in schema.FEATURE_INDEX:
            raise ValidationError(f"unknown variable {self.variable!r}")


@dataclass(frozen=True)
class TransfusionEvent:
    encounter_id: str
    time: pd.Timestamp
    product: str

    def __post_init__(self) -> None:
        if self.product not in schema.BLOOD_PRODUCTS:
            raise ValidationError(f"unknown blood product {self.product!r}")


@dataclass(frozen=True)
class CohortInstance:
    encounter_id: str
    event_index: int  # 0 for never-transfused, k for the k-th transfusion
    year: int
    label: int
    features: dict[str, float]  # absent keys are missing


@dataclass(frozen=True)
class FeatureTarget:
    """Class-conditional location/scale for one synthetic feature."""

    loc_non_transfused: float
    loc_transfused: float
    scale: float
    family: str = "normal"  # normal | lognormal (scale is sigma in log space)

    def __post_init__(self) -> None:
        if self.family not in ("normal", "lognormal"):
            raise ValidationError(f"unknown target family {self.family!r}")
        if self.scale <= 0:
            raise ValidationError("target scale must be positive")
        if min(self.loc_non_transfused, self.loc_transfused) <= 0 and self.family == "lognormal":
            raise ValidationError("lognormal targets need positive medians")


def _default_targets() -> dict[str, FeatureTarget]:
    def same(loc, scale, family="normal"):
        return FeatureTarget(loc, loc, scale, family)

    t = {
        # class-separated targets follow the published cohort medians
        "albumin": FeatureTarget(3.6, 3.0, 0.65),
        "blood_urea_nitrogen_(bun)": FeatureTarget(18.0, 23.0, 0.67, "lognormal"),
        "creatinine": FeatureTarget(1.0, 1.1, 0.70, "lognormal"),
        "hemoglobin": FeatureTarget(11.7, 7.8, 2.0),
        "lactic_acid": FeatureTarget(1.5, 1.5, 0.55, "lognormal"),
        "lipase": FeatureTarget(25.0, 27.0, 1.25, "lognormal"),
        "met_hgb": FeatureTarget(0.3, 0.5, 0.26),
        "pf_sp": FeatureTarget(250.0, 247.8, 95.0),
        "platelets": FeatureTarget(217.0, 179.0, 100.0),
        "partial_prothrombin_time_(ptt)": FeatureTarget(30.9, 31.9, 0.40, "lognormal"),
        # remaining vitals and labs carry no class signal by default
        "temperature": same(37.0, 0.7),
        "sbp_cuff": same(121.0, 20.0),
        "dbp_cuff": same(66.0, 12.0),
        "pulse": same(88.0, 16.0),
        "unassisted_resp_rate": same(18.0, 4.0),
        "spo2": same(97.0, 2.5),
        "end_tidal_co2": same(35.0, 6.0),
        "bicarb_(hco3)": same(24.0, 4.0),
        "chloride": same(103.0, 5.0),
        "glucose": same(7.4, 2.4),
        "magnesium": same(2.0, 0.3),
        "osmolarity": same(290.0, 10.0),
        "phosphorus": same(3.5, 1.0),
        "potassium": same(4.0, 0.5),
        "sodium": same(138.0, 4.0),
        "white_blood_cell_count": same(9.0, 0.45, "lognormal"),
        "carboxy_hgb": same(1.5, 0.8),
        "alanine_aminotransferase_(alt)": same(30.0, 0.9, "lognormal"),
        "alkaline_phosphatase": same(90.0, 0.5, "lognormal"),
        "bilirubin_direct": same(0.3, 0.9, "lognormal"),
        "bilirubin_total": same(0.8, 0.8, "lognormal"),
        "inr": same(1.2, 0.30, "lognormal"),
        "protein": same(6.5, 0.9),
        "b-type_natriuretic_peptide_(bnp)": same(150.0, 1.2, "lognormal"),
        "troponin": same(0.05, 1.4, "lognormal"),
        "fiO2": same(0.45, 0.15),
        "partial_pressure_of_carbon_dioxide_(paco2)": same(40.0, 7.0),
        "partial_pressure_of_oxygen_(pao2)": same(90.0, 0.35, "lognormal"),
        "ph": same(7.38, 0.06),
        "saturation_of_oxygen_(sao2)": same(96.0, 3.0),
        "hemoglobin_a1c": same(6.0, 0.20, "lognormal"),
        "best_map": same(80.0, 13.0),
        "pf_pa": same(250.0, 110.0),
    }
    assert set(t) == set(schema.FEATURE_NAMES)
    return t


def _default_missingness() -> dict[str, float]:
    rates = {name: 0.25 for name in schema.FEATURE_NAMES}
    rates.update(
        {
            "temperature": 0.03, "sbp_cuff": 0.03, "dbp_cuff": 0.03, "pulse": 0.02,
            "unassisted_resp_rate": 0.03, "spo2": 0.02, "best_map": 0.05, "fiO2": 0.30,
            "end_tidal_co2": 0.75,
            "bicarb_(hco3)": 0.10, "blood_urea_nitrogen_(bun)": 0.10, "chloride": 0.10,
            "creatinine": 0.08, "glucose": 0.10, "magnesium": 0.15, "phosphorus": 0.25,
            "potassium": 0.08, "sodium": 0.08, "hemoglobin": 0.05, "platelets": 0.08,
            "white_blood_cell_count": 0.08, "osmolarity": 0.55,
            "alanine_aminotransferase_(alt)": 0.30, "albumin": 0.30,
            "alkaline_phosphatase": 0.30, "bilirubin_direct": 0.45, "bilirubin_total": 0.35,
            "inr": 0.25, "partial_prothrombin_time_(ptt)": 0.25, "protein": 0.35,
            "lactic_acid": 0.35, "lipase": 0.70, "b-type_natriuretic_peptide_(bnp)": 0.75,
            "troponin": 0.60, "met_hgb": 0.55, "carboxy_hgb": 0.55,
            "partial_pressure_of_carbon_dioxide_(paco2)": 0.50,
            "partial_pressure_of_oxygen_(pao2)": 0.50, "ph": 0.50,
            "saturation_of_oxygen_(sao2)": 0.50, "hemoglobin_a1c": 0.85,
            "pf_sp": 0.35, "pf_pa": 0.55,
        }
    )
    return rates


@dataclass(frozen=True)
class SyntheticCohortSpec:
    n_encounters_per_year: int = 1000
    years: tuple[int, ...] = schema.YEARS
    transfused_fraction: float = 0.254
    mtp_fraction: float = 0.02  # fraction of transfused encounters with a dense burst
    feature_targets: dict[str, FeatureTarget] = field(default_factory=_default_targets)
    missingness: dict[str, float] = field(default_factory=_default_missingness)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_encounters_per_year < 1:
            raise ValidationError("n_encounters_per_year must be >= 1")
        if not self.years or any(y not in schema.YEARS for y in self.years):
            raise ValidationError(f"years must be within {schema.YEARS}")
        if not 0.0 < self.transfused_fraction < 1.0:
            raise ValidationError("transfused_fraction must be in (0,1)")
        if not 0.0 <= self.mtp_fraction < 1.0:
            raise ValidationError("mtp_fraction must be in [0,1)")
        unknown = set(self.feature_targets) - set(schema.FEATURE_NAMES)
        if unknown:
            raise ValidationError(f"targets for unknown variables: {sorted(unknown)}")
        missing = set(schema.FEATURE_NAMES) - set(self.feature_targets)
        if missing:
            raise ValidationError(f"targets missing for variables: {sorted(missing)}")
        for name, rate in self.missingness.items():
            if name not in schema.FEATURE_INDEX:
                raise ValidationError(f"missingness rate for unknown variable {name!r}")
            if not 0.0 <= rate < 0.9:
                raise ValidationError(f"missingness rate for {name} must be in [0,0.9)")

    def with_overrides(self, **kw) -> "SyntheticCohortSpec":
        return replace(self, **kw)
