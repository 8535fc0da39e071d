"""Synthetic encounter, observation, and transfusion table generator.

Hourly values are mean-reverting random walks around class-conditional
per-encounter means, so window medians concentrate on the configured
class targets. Transfused encounters get 1-4 events at least six hours
apart; a configurable fraction instead get a dense burst of more than
three transfusions inside six hours to exercise the downstream exclusion.
Everything is drawn from one seeded generator in a fixed order, making
the three tables a pure function of the spec.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .. import schema
from .types import SyntheticCohortSpec

_AR_RHO = 0.9
_BETWEEN_FRAC = 0.85  # encounter-mean spread as a fraction of target scale
_WITHIN_FRAC = 0.40  # stationary walk spread as a fraction of target scale
_CHUNK = 512
_HOUR_NS = 3_600_000_000_000

# class-conditional demographic frequencies mirroring the study population
_GENDER_P = {0: (0.462, 0.538), 1: (0.500, 0.500)}
_RACE_P = {0: (0.411, 0.507, 0.082), 1: (0.422, 0.494, 0.084)}
_ETH_P = {0: (0.031, 0.896, 0.073), 1: (0.030, 0.900, 0.070)}
_SERVICE_P = {
    0: (0.469, 0.004, 0.193, 0.020, 0.025, 0.075, 0.050, 0.013, 0.004, 0.147),
    1: (0.384, 0.006, 0.165, 0.025, 0.058, 0.034, 0.086, 0.035, 0.007, 0.200),
}
_MORTALITY_P = {0: 0.055, 1: 0.107}
_PRODUCT_P = (0.70, 0.15, 0.12, 0.03)


def _choice(rng, options, p_by_class, labels):
    out = np.empty(labels.size, dtype=object)
    for cls in (0, 1):
        rows = labels == cls
        out[rows] = rng.choice(np.asarray(options, dtype=object), size=int(rows.sum()),
                               p=np.asarray(p_by_class[cls]))
    return out


def _ar1_series(rng, n_enc: int, n_feat: int, length: int) -> np.ndarray:
    """Stationary AR(1) noise with unit marginal standard deviation."""
    s = np.empty((n_enc, n_feat, length))
    s[:, :, 0] = rng.normal(size=(n_enc, n_feat))
    innov_scale = np.sqrt(1.0 - _AR_RHO**2)
    for t in range(1, length):
        s[:, :, t] = _AR_RHO * s[:, :, t - 1] + innov_scale * rng.normal(size=(n_enc, n_feat))
    return s


def generate_synthetic_cohort(
    spec: SyntheticCohortSpec,
) -> tuple[pd.DataFrame, pd.DataFrame, pd.DataFrame]:
    """Return (encounters, observations, transfusions) frames for the spec."""
    rng = np.random.default_rng(spec.seed)
    names = schema.FEATURE_NAMES
    d = len(names)
    loc = np.empty((2, d))
    scale = np.empty(d)
    lognorm = np.zeros(d, dtype=bool)
    miss_rate = np.empty(d)
    for j, name in enumerate(names):
        t = spec.feature_targets[name]
        lognorm[j] = t.family == "lognormal"
        loc[0, j] = np.log(t.loc_non_transfused) if lognorm[j] else t.loc_non_transfused
        loc[1, j] = np.log(t.loc_transfused) if lognorm[j] else t.loc_transfused
        scale[j] = t.scale
        miss_rate[j] = spec.missingness.get(name, 0.25)

    static_rows = []
    txn_parts = []
    obs_enc_parts, obs_var_parts, obs_time_parts, obs_val_parts = [], [], [], []
    all_ids = []

    enc_offset = 0
    for year in spec.years:
        n = spec.n_encounters_per_year
        labels = (rng.random(n) < spec.transfused_fraction).astype(np.int64)
        ids = np.array([f"E{year}-{i:06d}" for i in range(n)], dtype=object)
        all_ids.append(ids)

        age = np.clip(np.round(rng.normal(62.0, 16.0, size=n)), 18, 100).astype(np.int64)
        gender = _choice(rng, schema.GENDERS, _GENDER_P, labels)
        race = _choice(rng, schema.RACES, _RACE_P, labels)
        ethnicity = _choice(rng, schema.ETHNICITIES, _ETH_P, labels)
        service = _choice(rng, schema.HOSPITAL_SERVICES, _SERVICE_P, labels)
        mortality = rng.random(n) < np.where(labels == 1, _MORTALITY_P[1], _MORTALITY_P[0])
        year_start = pd.Timestamp(f"{year}-01-01").value
        admit_ns = year_start + rng.integers(0, 350 * 24 * 60, size=n) * 60_000_000_000

        static_rows.append(
            pd.DataFrame(
                {
                    "encounter_id": ids,
                    "age": age,
                    "gender": gender,
                    "race": race,
                    "ethnicity": ethnicity,
                    "hospital_service": service,
                    "admission_time": pd.to_datetime(admit_ns),
                    "year": year,
                    "mortality": mortality,
                }
            )
        )

        # transfusion events: first one 24-72h in; later ones >= 6h apart,
        # except deliberate dense bursts (the downstream exclusion targets)
        txn_rows = np.nonzero(labels == 1)[0]
        n_txn = txn_rows.size
        first_h = 24.0 + 48.0 * rng.random(n_txn)
        is_mtp = rng.random(n_txn) < spec.mtp_fraction
        n_ev = np.where(
            is_mtp,
            4 + rng.integers(0, 3, size=n_txn),
            1 + np.minimum(rng.poisson(0.5, size=n_txn), 3),
        )
        max_ev = int(n_ev.max()) if n_txn else 0
        gaps = np.where(
            is_mtp[:, None],
            0.5 + rng.random((n_txn, max(max_ev - 1, 1))),
            6.0 + 18.0 * rng.random((n_txn, max(max_ev - 1, 1))),
        ) if n_txn else np.zeros((0, 1))
        event_h = np.concatenate(
            [first_h[:, None], first_h[:, None] + np.cumsum(gaps, axis=1)], axis=1
        ) if n_txn else np.zeros((0, 1))
        ev_mask = np.arange(event_h.shape[1])[None, :] < n_ev[:, None] if n_txn else np.zeros((0, 1), bool)
        ev_enc, ev_pos = np.nonzero(ev_mask)
        ev_times_ns = admit_ns[txn_rows[ev_enc]] + np.round(event_h[ev_enc, ev_pos] * _HOUR_NS).astype(np.int64)
        products = rng.choice(np.asarray(schema.BLOOD_PRODUCTS, dtype=object),
                              size=ev_enc.size, p=np.asarray(_PRODUCT_P))
        txn_parts.append(
            pd.DataFrame(
                {
                    "encounter_id": ids[txn_rows[ev_enc]],
                    "time": pd.to_datetime(ev_times_ns),
                    "product": products,
                }
            )
        )

        # hourly observation grids: [admit, admit+24h] for never-transfused,
        # (first event - 24h, last event] coverage for transfused
        start_h = np.zeros(n, dtype=np.int64)
        length = np.full(n, 25, dtype=np.int64)
        if n_txn:
            last_h = event_h[np.arange(n_txn), n_ev - 1]
            start_h[txn_rows] = np.ceil(first_h).astype(np.int64) - 24
            length[txn_rows] = np.floor(last_h).astype(np.int64) - start_h[txn_rows] + 1

        present = rng.random((n, d)) >= miss_rate[None, :]
        enc_mean = loc[labels][:, :] + rng.normal(size=(n, d)) * (scale * _BETWEEN_FRAC)[None, :]

        for chunk_start in range(0, n, _CHUNK):
            chunk = slice(chunk_start, min(chunk_start + _CHUNK, n))
            c_len = length[chunk]
            L = int(c_len.max())
            c_n = c_len.size
            noise = _ar1_series(rng, c_n, d, L) * (scale * _WITHIN_FRAC)[None, :, None]
            series = enc_mean[chunk][:, :, None] + noise
            series[:, lognorm, :] = np.exp(series[:, lognorm, :])
            np.maximum(series, 0.0, out=series)

            hour_idx = np.arange(L)
            valid = present[chunk][:, :, None] & (hour_idx[None, None, :] < c_len[:, None, None])
            e_idx, v_idx, h_idx = np.nonzero(valid)
            obs_enc_parts.append((enc_offset + chunk_start + e_idx).astype(np.int32))
            obs_var_parts.append(v_idx.astype(np.int16))
            t_ns = admit_ns[chunk][e_idx] + (start_h[chunk][e_idx] + h_idx) * _HOUR_NS
            obs_time_parts.append(t_ns)
            obs_val_parts.append(series[e_idx, v_idx, h_idx])
        enc_offset += n

    static = pd.concat(static_rows, ignore_index=True)
    transfusions = (
        pd.concat(txn_parts, ignore_index=True)
        .sort_values(["encounter_id", "time"], kind="mergesort")
        .reset_index(drop=True)
        if txn_parts
        else pd.DataFrame(columns=list(schema.TRANSFUSION_COLUMNS))
    )
    id_lookup = np.concatenate(all_ids)
    enc_codes = np.concatenate(obs_enc_parts) if obs_enc_parts else np.array([], dtype=np.int32)
    obs_enc_parts.clear()
    times_ns = np.concatenate(obs_time_parts) if obs_time_parts else np.array([], dtype=np.int64)
    obs_time_parts.clear()
    var_codes = np.concatenate(obs_var_parts) if obs_var_parts else np.array([], dtype=np.int16)
    obs_var_parts.clear()
    values = np.concatenate(obs_val_parts) if obs_val_parts else np.array([])
    obs_val_parts.clear()
    observations = pd.DataFrame(
        {
            "encounter_id": pd.Categorical.from_codes(enc_codes, categories=id_lookup),
            "time": pd.to_datetime(times_ns),
            "variable": pd.Categorical.from_codes(var_codes, categories=list(names)),
            "value": values,
        },
        copy=False,
    )
    del enc_codes, times_ns, var_codes, values
    return static, observations, transfusions
