"""Cohort construction: synthetic tables, ingestion, exclusions, instances, summary."""

from .exclusions import REASON_MTP, REASON_NO_DATA, apply_exclusions, mtp_encounters
from .ingest import ingest_tables, write_tables
from .instances import build_instances
from .summary import CohortSummary, chi_square_test, cohort_summary, kruskal_wallis, pearson_r
from .synthetic import generate_synthetic_cohort
from .types import (
    CohortInstance,
    EncounterStatic,
    FeatureTarget,
    RawObservation,
    SyntheticCohortSpec,
    TransfusionEvent,
)

__all__ = [
    "REASON_MTP",
    "REASON_NO_DATA",
    "apply_exclusions",
    "mtp_encounters",
    "ingest_tables",
    "write_tables",
    "build_instances",
    "CohortSummary",
    "chi_square_test",
    "cohort_summary",
    "kruskal_wallis",
    "pearson_r",
    "generate_synthetic_cohort",
    "CohortInstance",
    "EncounterStatic",
    "FeatureTarget",
    "RawObservation",
    "SyntheticCohortSpec",
    "TransfusionEvent",
]


def construct_cohort(static, observations, transfusions):
    """Exclusions then instance building; returns (instances, exclusion_log).

    The observation frame is not copied: instance building skips rows of
    encounters absent from the retained static table.
    """
    retained, excl_log = apply_exclusions(static, observations, transfusions)
    static_kept = static[static["encounter_id"].isin(set(retained))]
    kept_ids = set(static_kept["encounter_id"])
    txn_kept = transfusions[transfusions["encounter_id"].isin(kept_ids)]
    return build_instances(static_kept, observations, txn_kept), excl_log
