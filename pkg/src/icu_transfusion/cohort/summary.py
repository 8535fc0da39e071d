"""Cohort characteristics report: per-class medians, counts, and tests.

Transfused encounters contribute their index (first) transfusion instance
only; never-transfused encounters contribute their single instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats as sps

from .. import schema
from ..errors import CohortError
from ..preprocess.matrix import FeatureMatrix


def chi_square_test(table: np.ndarray) -> tuple[float, float, int]:
    """Pearson chi-square for an r x c contingency table; returns (stat, p, dof)."""
    table = np.asarray(table, dtype=np.float64)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        return 0.0, 1.0, 0
    total = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    stat = float(((table - expected) ** 2 / expected).sum())
    dof = (table.shape[0] - 1) * (table.shape[1] - 1)
    return stat, float(sps.chi2.sf(stat, dof)), dof


def kruskal_wallis(groups: list[np.ndarray]) -> tuple[float, float]:
    """Kruskal-Wallis H with tie correction; p from the chi-square tail."""
    groups = [np.asarray(g, dtype=np.float64) for g in groups if len(g)]
    if len(groups) < 2:
        raise CohortError("Kruskal-Wallis needs at least two non-empty groups")
    pooled = np.concatenate(groups)
    n = pooled.size
    ranks = sps.rankdata(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start:start + g.size]
        h += r.sum() ** 2 / g.size
        start += g.size
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts))
    correction = 1.0 - tie_term / (n**3 - n) if n > 1 else 1.0
    if correction <= 0:
        return 0.0, 1.0  # all values identical
    h /= correction
    return float(h), float(sps.chi2.sf(h, len(groups) - 1))


def pearson_r(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Pearson correlation and its two-sided t-test p-value."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    n = x.size
    if n < 3:
        raise CohortError("need at least 3 paired values for a correlation")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc @ xc) * (yc @ yc))
    if denom == 0:
        raise CohortError("zero variance in correlation input")
    r = float((xc @ yc) / denom)
    r = max(min(r, 1.0), -1.0)
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * sps.t.sf(abs(t), n - 2))


@dataclass
class CohortSummary:
    categorical: pd.DataFrame  # characteristic, category, total, non_transfused, transfused, p_value
    continuous: pd.DataFrame  # characteristic, medians and 2.5/97.5 quantiles per class, p_value
    hemoglobin_label_r: float
    hemoglobin_label_p: float
    n_total: int
    n_transfused: int
    n_non_transfused: int

    def to_text(self) -> str:
        lines = [
            f"encounters: {self.n_total} "
            f"(transfused {self.n_transfused}, non-transfused {self.n_non_transfused})",
            "",
            self.categorical.to_string(index=False),
            "",
            self.continuous.to_string(index=False),
            "",
            f"hemoglobin vs label: r={self.hemoglobin_label_r:.3f} p={self.hemoglobin_label_p:.3g}",
        ]
        return "\n".join(lines)


def _interval_row(values: np.ndarray) -> tuple[float, float, float]:
    if values.size == 0:
        return float("nan"), float("nan"), float("nan")
    return (
        float(np.median(values)),
        float(np.quantile(values, 0.025)),
        float(np.quantile(values, 0.975)),
    )


def cohort_summary(static: pd.DataFrame, instances: FeatureMatrix) -> CohortSummary:
    """Build the demographics/labs report from index-transfusion instances."""
    index_rows = (instances.labels == 0) | (instances.event_index == 1)
    fm_enc = instances.encounter_ids[index_rows]
    fm_labels = instances.labels[index_rows]
    fm_values = instances.values[index_rows]
    if len(np.unique(fm_labels)) < 2:
        raise CohortError("cohort summary needs both transfused and non-transfused encounters")

    label_by_enc = dict(zip(fm_enc, fm_labels))
    static = static[static["encounter_id"].isin(label_by_enc)].copy()
    static_labels = static["encounter_id"].map(label_by_enc).to_numpy()

    cat_rows = []
    for col, categories in (
        ("gender", schema.GENDERS),
        ("race", schema.RACES),
        ("ethnicity", schema.ETHNICITIES),
        ("hospital_service", schema.HOSPITAL_SERVICES),
        ("mortality", (False, True)),
    ):
        table = np.zeros((len(categories), 2))
        col_vals = static[col].to_numpy()
        for i, cat in enumerate(categories):
            for cls in (0, 1):
                table[i, cls] = np.sum((col_vals == cat) & (static_labels == cls))
        stat, p, _ = chi_square_test(table.T)
        for i, cat in enumerate(categories):
            n0, n1 = table[i]
            tot = n0 + n1
            cat_rows.append(
                {
                    "characteristic": col,
                    "category": str(cat),
                    "total_n": int(tot),
                    "non_transfused_n": int(n0),
                    "transfused_n": int(n1),
                    "p_value": p,
                }
            )
    categorical = pd.DataFrame(cat_rows)

    cont_rows = []
    ages = static["age"].to_numpy(dtype=np.float64)
    groups = [ages[static_labels == 0], ages[static_labels == 1]]
    _, p = kruskal_wallis(groups)
    m_all = _interval_row(ages)
    m0 = _interval_row(groups[0])
    m1 = _interval_row(groups[1])
    cont_rows.append(
        {
            "characteristic": "age",
            "median_total": m_all[0], "lo_total": m_all[1], "hi_total": m_all[2],
            "median_non_transfused": m0[0], "lo_non_transfused": m0[1], "hi_non_transfused": m0[2],
            "median_transfused": m1[0], "lo_transfused": m1[1], "hi_transfused": m1[2],
            "p_value": p,
        }
    )
    for j, name in enumerate(instances.columns):
        col = fm_values[:, j]
        present = ~np.isnan(col)
        g0 = col[present & (fm_labels == 0)]
        g1 = col[present & (fm_labels == 1)]
        if g0.size == 0 or g1.size == 0:
            p = float("nan")
        else:
            _, p = kruskal_wallis([g0, g1])
        m_all = _interval_row(col[present])
        m0 = _interval_row(g0)
        m1 = _interval_row(g1)
        cont_rows.append(
            {
                "characteristic": name,
                "median_total": m_all[0], "lo_total": m_all[1], "hi_total": m_all[2],
                "median_non_transfused": m0[0], "lo_non_transfused": m0[1], "hi_non_transfused": m0[2],
                "median_transfused": m1[0], "lo_transfused": m1[1], "hi_transfused": m1[2],
                "p_value": p,
            }
        )
    continuous = pd.DataFrame(cont_rows)

    hb_col = instances.column_position("hemoglobin") if "hemoglobin" in instances.columns else None
    if hb_col is not None:
        hb = fm_values[:, hb_col]
        ok = ~np.isnan(hb)
        r, rp = pearson_r(hb[ok], fm_labels[ok].astype(np.float64))
    else:
        r, rp = float("nan"), float("nan")

    return CohortSummary(
        categorical=categorical,
        continuous=continuous,
        hemoglobin_label_r=r,
        hemoglobin_label_p=rp,
        n_total=int(len(static)),
        n_transfused=int(np.sum(static_labels == 1)),
        n_non_transfused=int(np.sum(static_labels == 0)),
    )
