"""Massive-transfusion and no-data exclusions with a reason log."""

from __future__ import annotations

import numpy as np
import pandas as pd

REASON_MTP = "mtp_over_3_in_6h"
REASON_NO_DATA = "no_observations_in_any_window"

_WINDOW_NS = 24 * 3_600_000_000_000
_SIX_H_NS = 6 * 3_600_000_000_000


def mtp_encounters(transfusions: pd.DataFrame) -> list[str]:
    """Encounters with more than three transfusions in some closed 6-hour window.

    Windows are anchored at event times: a maximal violating window can
    always be slid left until it starts at an event, so this is exact.
    """
    flagged = []
    if not len(transfusions):
        return flagged
    for enc, group in transfusions.groupby("encounter_id", sort=True, observed=True):
        times = np.sort(group["time"].to_numpy().astype("datetime64[ns]").astype(np.int64))
        if times.size <= 3:
            continue
        ends = np.searchsorted(times, times + _SIX_H_NS, side="right")
        if np.any(ends - np.arange(times.size) > 3):
            flagged.append(str(enc))
    return flagged


def _obs_codes_and_admits(static, observations):
    """Observation rows as (static-row index, time ns), fully vectorized."""
    static_ids = pd.Index(static["encounter_id"])
    enc = observations["encounter_id"]
    if isinstance(enc.dtype, pd.CategoricalDtype):
        cat_to_static = static_ids.get_indexer(enc.cat.categories)
        codes = cat_to_static[enc.cat.codes.to_numpy()]
    else:
        codes = static_ids.get_indexer(enc)
    times = observations["time"].to_numpy().astype("datetime64[ns]").astype(np.int64)
    return codes.astype(np.int32), times


def apply_exclusions(static, observations, transfusions):
    """Returns (retained encounter ids, exclusion log frame).

    Excluded are encounters breaching the massive-transfusion rule and
    encounters none of whose candidate processing windows contains any
    observation: [admission, admission+24h] for the never-transfused,
    the union of (event-24h, event] windows otherwise.
    """
    static_ids = pd.Index(static["encounter_id"])
    n_static = len(static_ids)
    admit_ns = static["admission_time"].to_numpy().astype("datetime64[ns]").astype(np.int64)

    mtp = set(mtp_encounters(transfusions))

    obs_codes, obs_ns = _obs_codes_and_admits(static, observations)
    transfused_mask = np.zeros(n_static, dtype=bool)
    if len(transfusions):
        txn_codes = static_ids.get_indexer(transfusions["encounter_id"])
        transfused_mask[txn_codes[txn_codes >= 0]] = True

    # never-transfused: any observation inside the closed post-admission day
    neg_supported = np.zeros(n_static, dtype=bool)
    if obs_ns.size:
        delta = obs_ns - admit_ns[obs_codes]
        in_window = (delta >= 0) & (delta <= _WINDOW_NS)
        neg_supported[obs_codes[in_window]] = True

    # transfused: any event whose half-open look-back day holds an observation
    pos_supported = np.zeros(n_static, dtype=bool)
    if len(transfusions) and obs_ns.size:
        of_transfused = np.nonzero(transfused_mask[obs_codes])[0]
        sub_codes = obs_codes[of_transfused]
        sub_ns = obs_ns[of_transfused]
        order = np.argsort(sub_ns, kind="mergesort")
        obs_sorted = pd.DataFrame(
            {"code": sub_codes[order].astype(np.int64), "t": sub_ns[order], "obs_t": sub_ns[order]}
        )
        ev_ns = transfusions["time"].to_numpy().astype("datetime64[ns]").astype(np.int64)
        ev_order = np.argsort(ev_ns, kind="mergesort")
        ev_sorted = pd.DataFrame({"code": txn_codes[ev_order].astype(np.int64), "t": ev_ns[ev_order]})
        hit = pd.merge_asof(ev_sorted, obs_sorted, on="t", by="code",
                            direction="backward", tolerance=_WINDOW_NS - 1)
        supported_codes = hit.loc[hit["obs_t"].notna(), "code"].to_numpy()
        pos_supported[np.unique(supported_codes)] = True

    log_rows: list[tuple[str, str]] = []
    retained: list[str] = []
    for idx, enc in enumerate(static_ids):
        if enc in mtp:
            log_rows.append((enc, REASON_MTP))
            continue
        ok = pos_supported[idx] if transfused_mask[idx] else neg_supported[idx]
        if ok:
            retained.append(enc)
        else:
            log_rows.append((enc, REASON_NO_DATA))
    log = pd.DataFrame(log_rows, columns=["encounter_id", "reason"])
    return np.array(retained, dtype=object), log
