"""Canonical clinical variable schema and categorical code lists.

The 43 routinely collected vitals and lab values below are the only feature
names the pipeline accepts. Demographics are kept in the static encounter
table and never enter the feature matrix.
"""

from __future__ import annotations

# name -> measurement unit (display only)
FEATURE_UNITS: dict[str, str] = {
    "temperature": "degC",
    "sbp_cuff": "mmHg",
    "dbp_cuff": "mmHg",
    "pulse": "beats per minute",
    "unassisted_resp_rate": "breaths per minute",
    "spo2": "%",
    "end_tidal_co2": "mmHg",
    "bicarb_(hco3)": "mmol/L",
    "blood_urea_nitrogen_(bun)": "mg/dL",
    "chloride": "mEq/L",
    "creatinine": "mg/dL",
    "glucose": "mmol/L",
    "magnesium": "mg/dL",
    "osmolarity": "mOsm/kg",
    "phosphorus": "mg/dL",
    "potassium": "mEq/L",
    "sodium": "mEq/L",
    "hemoglobin": "g/dL",
    "met_hgb": "g/dL",
    "platelets": "x10^9/L",
    "white_blood_cell_count": "x10^9/L",
    "carboxy_hgb": "%",
    "alanine_aminotransferase_(alt)": "U/L",
    "albumin": "g/L",
    "alkaline_phosphatase": "IU/L",
    "bilirubin_direct": "mg/dL",
    "bilirubin_total": "mg/dL",
    "inr": "-",
    "lactic_acid": "mmol/L",
    "partial_prothrombin_time_(ptt)": "s",
    "protein": "g/dL",
    "lipase": "U/L",
    "b-type_natriuretic_peptide_(bnp)": "pg/ml",
    "troponin": "ng/ml",
    "fiO2": "fraction 0-1",
    "partial_pressure_of_carbon_dioxide_(paco2)": "mmHg",
    "partial_pressure_of_oxygen_(pao2)": "mmHg",
    "ph": "-",
    "saturation_of_oxygen_(sao2)": "%",
    "hemoglobin_a1c": "%",
    "best_map": "mmHg",
    "pf_sp": "-",
    "pf_pa": "mmHg",
}

FEATURE_NAMES: tuple[str, ...] = tuple(FEATURE_UNITS)
FEATURE_INDEX: dict[str, int] = {name: i for i, name in enumerate(FEATURE_NAMES)}
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 43

YEARS: tuple[int, ...] = (2016, 2017, 2018, 2019, 2020)

GENDERS: tuple[str, ...] = ("Female", "Male")
RACES: tuple[str, ...] = ("African American or Black", "Caucasian or White", "Other")
ETHNICITIES: tuple[str, ...] = ("Hispanic or Latino", "Non-Hispanic or Latino", "Other")
HOSPITAL_SERVICES: tuple[str, ...] = (
    "Medicine",
    "OBGYN",
    "Cardiovascular",
    "Orthopedics",
    "General Surgery",
    "Neurosurgery",
    "Thoracic Surgery",
    "Oncology",
    "Urology",
    "Other",
)
BLOOD_PRODUCTS: tuple[str, ...] = ("RBC", "platelets", "plasma", "whole_blood")

ENCOUNTER_COLUMNS = (
    "encounter_id",
    "age",
    "gender",
    "race",
    "ethnicity",
    "hospital_service",
    "admission_time",
    "year",
    "mortality",
)
OBSERVATION_COLUMNS = ("encounter_id", "time", "variable", "value")
TRANSFUSION_COLUMNS = ("encounter_id", "time", "product")
