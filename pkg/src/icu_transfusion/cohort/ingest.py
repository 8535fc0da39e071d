"""CSV ingestion and emission for the three raw tables.

Files are UTF-8 with headers; timestamps ISO-8601. Validation rejects
malformed rows with the file and line, unknown variable names, and
observations or transfusions that reference unknown encounters or precede
their encounter's admission.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .. import schema
from ..errors import ReferentialError, SchemaError, ValidationError

_BOOL_MAP = {"true": True, "false": False, "1": True, "0": False}


def _read_csv(path, columns, name):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"{name} file not found: {path}")
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except Exception as exc:  # malformed CSV structure
        raise ValidationError(f"{path}: unreadable CSV ({exc})") from exc
    if list(df.columns) != list(columns):
        raise SchemaError(f"{path}: header must be {','.join(columns)}, got {','.join(df.columns)}")
    return df


def _parse_times(raw: pd.Series, path, what: str) -> pd.Series:
    parsed = pd.to_datetime(raw, errors="coerce", format="ISO8601")
    bad = parsed.isna() | (raw.str.len() == 0)
    if bad.any():
        line = int(np.nonzero(bad.to_numpy())[0][0]) + 2  # header is line 1
        raise ValidationError(f"{path}:{line}: bad {what} timestamp {raw.iloc[line - 2]!r}")
    return parsed


def _parse_floats(raw: pd.Series, path, what: str) -> np.ndarray:
    vals = pd.to_numeric(raw, errors="coerce")
    bad = vals.isna() | ~np.isfinite(vals.to_numpy(dtype=np.float64, na_value=np.nan))
    if bad.any():
        line = int(np.nonzero(bad.to_numpy())[0][0]) + 2
        raise ValidationError(f"{path}:{line}: bad {what} value {raw.iloc[line - 2]!r}")
    return vals.to_numpy(dtype=np.float64)


def ingest_tables(static_path, obs_path, txn_path):
    """Read and validate the three tables; returns (static, observations, transfusions)."""
    static_raw = _read_csv(static_path, schema.ENCOUNTER_COLUMNS, "encounters")
    obs_raw = _read_csv(obs_path, schema.OBSERVATION_COLUMNS, "observations")
    txn_raw = _read_csv(txn_path, schema.TRANSFUSION_COLUMNS, "transfusions")

    ids = static_raw["encounter_id"]
    if ids.duplicated().any():
        dup = ids[ids.duplicated()].iloc[0]
        raise ValidationError(f"{static_path}: duplicate encounter_id {dup!r}")
    ages = _parse_floats(static_raw["age"], static_path, "age")
    if (ages < 18).any():
        line = int(np.nonzero(ages < 18)[0][0]) + 2
        raise ValidationError(f"{static_path}:{line}: age below the adult cohort minimum")
    years = _parse_floats(static_raw["year"], static_path, "year").astype(np.int64)
    bad_year = ~np.isin(years, schema.YEARS)
    if bad_year.any():
        line = int(np.nonzero(bad_year)[0][0]) + 2
        raise ValidationError(f"{static_path}:{line}: year {years[line - 2]} outside {schema.YEARS}")
    for col, legal in (
        ("gender", schema.GENDERS),
        ("race", schema.RACES),
        ("ethnicity", schema.ETHNICITIES),
        ("hospital_service", schema.HOSPITAL_SERVICES),
    ):
        bad = ~static_raw[col].isin(legal)
        if bad.any():
            line = int(np.nonzero(bad.to_numpy())[0][0]) + 2
            raise SchemaError(f"{static_path}:{line}: unknown {col} {static_raw[col].iloc[line - 2]!r}")
    mortality_raw = static_raw["mortality"].str.lower()
    if (~mortality_raw.isin(_BOOL_MAP)).any():
        bad = ~mortality_raw.isin(_BOOL_MAP)
        line = int(np.nonzero(bad.to_numpy())[0][0]) + 2
        raise ValidationError(f"{static_path}:{line}: mortality must be boolean")
    static = pd.DataFrame(
        {
            "encounter_id": ids.to_numpy(dtype=object),
            "age": ages.astype(np.int64),
            "gender": static_raw["gender"].to_numpy(dtype=object),
            "race": static_raw["race"].to_numpy(dtype=object),
            "ethnicity": static_raw["ethnicity"].to_numpy(dtype=object),
            "hospital_service": static_raw["hospital_service"].to_numpy(dtype=object),
            "admission_time": _parse_times(static_raw["admission_time"], static_path, "admission"),
            "year": years,
            "mortality": mortality_raw.map(_BOOL_MAP).to_numpy(dtype=bool),
        }
    )

    known = pd.Index(static["encounter_id"])
    admit_by_id = dict(zip(static["encounter_id"], static["admission_time"]))

    bad_var = ~obs_raw["variable"].isin(schema.FEATURE_NAMES)
    if bad_var.any():
        line = int(np.nonzero(bad_var.to_numpy())[0][0]) + 2
        raise SchemaError(
            f"{obs_path}:{line}: unknown variable {obs_raw['variable'].iloc[line - 2]!r} "
            "(names must follow the canonical 43-variable schema)"
        )
    obs_enc = obs_raw["encounter_id"]
    unknown_enc = ~obs_enc.isin(known)
    if unknown_enc.any():
        line = int(np.nonzero(unknown_enc.to_numpy())[0][0]) + 2
        raise ReferentialError(f"{obs_path}:{line}: unknown encounter {obs_enc.iloc[line - 2]!r}")
    obs_times = _parse_times(obs_raw["time"], obs_path, "observation") if len(obs_raw) else pd.Series([], dtype="datetime64[ns]")
    obs_values = _parse_floats(obs_raw["value"], obs_path, "observation") if len(obs_raw) else np.array([])
    if len(obs_raw):
        admits = obs_enc.map(admit_by_id)
        early = obs_times.to_numpy() < admits.to_numpy()
        if early.any():
            row = int(np.nonzero(early)[0][0])
            raise ReferentialError(
                f"{obs_path}:{row + 2}: observation precedes admission of encounter "
                f"{obs_enc.iloc[row]!r}"
            )
    observations = pd.DataFrame(
        {
            "encounter_id": pd.Categorical(obs_enc.to_numpy(dtype=object), categories=known),
            "time": obs_times.to_numpy() if len(obs_raw) else pd.DatetimeIndex([]).to_numpy(),
            "variable": pd.Categorical(obs_raw["variable"].to_numpy(dtype=object),
                                       categories=list(schema.FEATURE_NAMES)),
            "value": obs_values,
        }
    )

    bad_prod = ~txn_raw["product"].isin(schema.BLOOD_PRODUCTS)
    if bad_prod.any():
        line = int(np.nonzero(bad_prod.to_numpy())[0][0]) + 2
        raise SchemaError(f"{txn_path}:{line}: unknown product {txn_raw['product'].iloc[line - 2]!r}")
    txn_enc = txn_raw["encounter_id"]
    unknown_txn = ~txn_enc.isin(known)
    if unknown_txn.any():
        line = int(np.nonzero(unknown_txn.to_numpy())[0][0]) + 2
        raise ReferentialError(f"{txn_path}:{line}: unknown encounter {txn_enc.iloc[line - 2]!r}")
    txn_times = _parse_times(txn_raw["time"], txn_path, "transfusion") if len(txn_raw) else pd.Series([], dtype="datetime64[ns]")
    if len(txn_raw):
        admits = txn_enc.map(admit_by_id)
        early = txn_times.to_numpy() < admits.to_numpy()
        if early.any():
            row = int(np.nonzero(early)[0][0])
            raise ReferentialError(
                f"{txn_path}:{row + 2}: transfusion precedes admission of encounter "
                f"{txn_enc.iloc[row]!r}"
            )
    transfusions = pd.DataFrame(
        {
            "encounter_id": txn_enc.to_numpy(dtype=object),
            "time": txn_times.to_numpy() if len(txn_raw) else pd.DatetimeIndex([]).to_numpy(),
            "product": txn_raw["product"].to_numpy(dtype=object),
        }
    ).sort_values(["encounter_id", "time"], kind="mergesort").reset_index(drop=True)
    return static, observations, transfusions


def write_tables(static, observations, transfusions, out_dir) -> dict[str, Path]:
    """Write the three CSVs with ISO-8601 timestamps; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "encounters": out / "encounters.csv",
        "observations": out / "observations.csv",
        "transfusions": out / "transfusions.csv",
    }
    fmt = "%Y-%m-%dT%H:%M:%S"
    static.to_csv(paths["encounters"], index=False, date_format=fmt)
    observations.to_csv(paths["observations"], index=False, date_format=fmt)
    transfusions.to_csv(paths["transfusions"], index=False, date_format=fmt)
    return paths
