"""Instance-by-feature matrix with row metadata and NaN missing markers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaError, ValidationError


@dataclass
class FeatureMatrix:
    """Rows are labeled instances, columns are named clinical features.

    Missing cells are NaN. Row metadata travels with the matrix so splits
    and audits can always recover (encounter, event, year, label).
    """

    values: np.ndarray
    columns: list[str]
    encounter_ids: np.ndarray
    event_index: np.ndarray
    years: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValidationError("feature matrix must be 2-D")
        self.columns = list(self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("duplicate column names in feature matrix")
        if self.values.shape[1] != len(self.columns):
            raise ValidationError(
                f"{self.values.shape[1]} value columns vs {len(self.columns)} names"
            )
        n = self.values.shape[0]
        self.encounter_ids = np.asarray(self.encounter_ids)
        self.event_index = np.asarray(self.event_index, dtype=np.int64)
        self.years = np.asarray(self.years, dtype=np.int64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        for name, arr in (
            ("encounter_ids", self.encounter_ids),
            ("event_index", self.event_index),
            ("years", self.years),
            ("labels", self.labels),
        ):
            if arr.shape != (n,):
                raise ValidationError(f"metadata {name} length {arr.shape} != row count {n}")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column_position(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise SchemaError(f"unknown feature column {name!r}") from None

    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def take_rows(self, idx: np.ndarray) -> "FeatureMatrix":
        idx = np.asarray(idx)
        return FeatureMatrix(
            values=self.values[idx],
            columns=list(self.columns),
            encounter_ids=self.encounter_ids[idx],
            event_index=self.event_index[idx],
            years=self.years[idx],
            labels=self.labels[idx],
        )

    def select_columns(self, names: list[str]) -> "FeatureMatrix":
        missing = [c for c in names if c not in self.columns]
        if missing:
            raise SchemaError(f"matrix lacks columns: {missing}")
        pos = [self.columns.index(c) for c in names]
        return FeatureMatrix(
            values=self.values[:, pos],
            columns=list(names),
            encounter_ids=self.encounter_ids,
            event_index=self.event_index,
            years=self.years,
            labels=self.labels,
        )

    def with_values(self, values: np.ndarray, columns: list[str] | None = None) -> "FeatureMatrix":
        """Same rows and metadata, new cell values (and optionally new columns)."""
        return FeatureMatrix(
            values=values,
            columns=list(self.columns) if columns is None else list(columns),
            encounter_ids=self.encounter_ids,
            event_index=self.event_index,
            years=self.years,
            labels=self.labels,
        )

    def copy(self) -> "FeatureMatrix":
        return FeatureMatrix(
            values=self.values.copy(),
            columns=list(self.columns),
            encounter_ids=self.encounter_ids.copy(),
            event_index=self.event_index.copy(),
            years=self.years.copy(),
            labels=self.labels.copy(),
        )


def matrix_from_arrays(
    values: np.ndarray,
    columns: list[str],
    labels: np.ndarray,
    years: np.ndarray | None = None,
    encounter_ids: np.ndarray | None = None,
    event_index: np.ndarray | None = None,
) -> FeatureMatrix:
    """Convenience constructor for tests and ad-hoc matrices."""
    n = np.asarray(values).shape[0]
    if years is None:
        years = np.zeros(n, dtype=np.int64)
    if encounter_ids is None:
        encounter_ids = np.array([f"row{i}" for i in range(n)], dtype=object)
    if event_index is None:
        event_index = np.zeros(n, dtype=np.int64)
    return FeatureMatrix(
        values=np.asarray(values, dtype=np.float64),
        columns=columns,
        encounter_ids=encounter_ids,
        event_index=event_index,
        years=years,
        labels=np.asarray(labels),
    )
