"""Labeled instance construction by per-window median aggregation."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from .. import schema
from ..preprocess.matrix import FeatureMatrix

log = logging.getLogger(__name__)

_WINDOW_NS = 24 * 3_600_000_000_000
_EVT_STRIDE = 100_000  # events per encounter stay far below this


def _variable_codes(observations: pd.DataFrame) -> np.ndarray:
    var = observations["variable"]
    if isinstance(var.dtype, pd.CategoricalDtype):
        mapping = pd.Index(schema.FEATURE_NAMES).get_indexer(var.cat.categories)
        return mapping[var.cat.codes.to_numpy()].astype(np.int64)
    return pd.Index(schema.FEATURE_NAMES).get_indexer(var).astype(np.int64)


def _median_pivot(enc_codes, event_idx, var_codes, values, d):
    """Median per (encounter, event, variable) pivoted to a dense matrix."""
    med = (
        pd.DataFrame(
            {
                "key": enc_codes.astype(np.int64) * _EVT_STRIDE + event_idx,
                "var": var_codes,
                "value": values,
            }
        )
        .groupby(["key", "var"], sort=True)["value"]
        .median()
        .reset_index()
    )
    row_key, row_pos = np.unique(med["key"].to_numpy(), return_inverse=True)
    out = np.full((row_key.size, d), np.nan)
    out[row_pos, med["var"].to_numpy()] = med["value"].to_numpy()
    return out, (row_key // _EVT_STRIDE).astype(np.int64), (row_key % _EVT_STRIDE).astype(np.int64)


def build_instances(static, observations, transfusions) -> FeatureMatrix:
    """One positive instance per transfusion event, one negative per
    never-transfused encounter.

    Positive features are per-variable medians over the half-open
    (event-24h, event] window; negative features over the closed
    [admission, admission+24h] window. Variables unobserved in the window
    stay missing; instances with every feature missing are dropped.
    """
    static_ids = pd.Index(static["encounter_id"])
    admit_ns = static["admission_time"].to_numpy().astype("datetime64[ns]").astype(np.int64)
    years = static["year"].to_numpy().astype(np.int64)
    d = len(schema.FEATURE_NAMES)

    enc = observations["encounter_id"]
    if isinstance(enc.dtype, pd.CategoricalDtype):
        cat_to_static = static_ids.get_indexer(enc.cat.categories).astype(np.int32)
        obs_codes = cat_to_static[enc.cat.codes.to_numpy()]
    else:
        obs_codes = static_ids.get_indexer(enc).astype(np.int32)
    obs_known = obs_codes >= 0  # rows of excluded/unknown encounters are ignored
    obs_codes = np.where(obs_known, obs_codes, 0).astype(np.int32)
    obs_ns = observations["time"].to_numpy().astype("datetime64[ns]").astype(np.int64)
    obs_vars = _variable_codes(observations)
    obs_vals = observations["value"].to_numpy(dtype=np.float64)

    transfused_mask = np.zeros(len(static_ids), dtype=bool)
    ev_codes = np.array([], dtype=np.int64)
    ev_ns = np.array([], dtype=np.int64)
    ev_index = np.array([], dtype=np.int64)
    if len(transfusions):
        ev_codes = static_ids.get_indexer(transfusions["encounter_id"]).astype(np.int64)
        ev_ns = transfusions["time"].to_numpy().astype("datetime64[ns]").astype(np.int64)
        order = np.lexsort((ev_ns, ev_codes))
        ev_codes, ev_ns = ev_codes[order], ev_ns[order]
        # event_index is the 1-based rank of the event within its encounter
        starts = np.r_[0, np.nonzero(np.diff(ev_codes))[0] + 1]
        offsets = np.repeat(starts, np.diff(np.r_[starts, ev_codes.size]))
        ev_index = np.arange(ev_codes.size) - offsets + 1
        transfused_mask[ev_codes] = True

    obs_years = years[obs_codes] if obs_codes.size else np.array([], dtype=np.int64)
    obs_of_transfused = transfused_mask[obs_codes] if obs_codes.size else np.array([], dtype=bool)
    delta = obs_ns - admit_ns[obs_codes] if obs_codes.size else np.array([], dtype=np.int64)
    neg_in_all = obs_known & ~obs_of_transfused & (delta >= 0) & (delta <= _WINDOW_NS)
    pos_in_all = obs_known & obs_of_transfused
    del delta, obs_of_transfused

    blocks = []
    n_pos_rows = 0
    for year in np.unique(years):
        y_obs = obs_years == year

        neg_in = neg_in_all & y_obs
        if neg_in.any():
            vals, enc_r, evt_r = _median_pivot(
                obs_codes[neg_in], np.zeros(int(neg_in.sum()), dtype=np.int64),
                obs_vars[neg_in], obs_vals[neg_in], d,
            )
            blocks.append((vals, enc_r, evt_r, np.zeros(enc_r.size, dtype=np.int64)))

        pos_in = pos_in_all & y_obs
        ev_in = years[ev_codes] == year if ev_codes.size else np.array([], dtype=bool)
        if pos_in.any() and ev_in.any():
            obs_df = pd.DataFrame(
                {
                    "code": obs_codes[pos_in],
                    "var": obs_vars[pos_in],
                    "t": obs_ns[pos_in],
                    "value": obs_vals[pos_in],
                }
            )
            ev_df = pd.DataFrame(
                {"code": ev_codes[ev_in], "evt": ev_index[ev_in], "ev_ns": ev_ns[ev_in]}
            )
            merged = obs_df.merge(ev_df, on="code", how="inner")
            lag = merged["ev_ns"].to_numpy() - merged["t"].to_numpy()
            merged = merged.loc[(lag >= 0) & (lag < _WINDOW_NS)]
            if len(merged):
                vals, enc_r, evt_r = _median_pivot(
                    merged["code"].to_numpy(), merged["evt"].to_numpy(),
                    merged["var"].to_numpy(), merged["value"].to_numpy(), d,
                )
                blocks.append((vals, enc_r, evt_r, np.ones(enc_r.size, dtype=np.int64)))
                n_pos_rows += enc_r.size

    if ev_codes.size and n_pos_rows < ev_codes.size:
        log.info("%d transfusion events had empty windows and yield no instance",
                 ev_codes.size - n_pos_rows)

    if not blocks:
        return FeatureMatrix(
            values=np.empty((0, d)), columns=list(schema.FEATURE_NAMES),
            encounter_ids=np.array([], dtype=object), event_index=np.array([], dtype=np.int64),
            years=np.array([], dtype=np.int64), labels=np.array([], dtype=np.int64),
        )

    values = np.vstack([b[0] for b in blocks])
    enc_rows = np.concatenate([b[1] for b in blocks])
    evt_rows = np.concatenate([b[2] for b in blocks])
    labels = np.concatenate([b[3] for b in blocks])

    keep = ~np.isnan(values).all(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        log.info("dropping %d all-missing instances", dropped)
    values, enc_rows, evt_rows, labels = values[keep], enc_rows[keep], evt_rows[keep], labels[keep]

    order = np.lexsort((evt_rows, enc_rows))
    values, enc_rows, evt_rows, labels = values[order], enc_rows[order], evt_rows[order], labels[order]
    return FeatureMatrix(
        values=values,
        columns=list(schema.FEATURE_NAMES),
        encounter_ids=static_ids.to_numpy(dtype=object)[enc_rows],
        event_index=evt_rows,
        years=years[enc_rows],
        labels=labels,
    )
