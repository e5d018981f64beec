"""scikit-learn style wrapper around the scanner."""

from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .engine import resolve_enabled, scan_table
from .ingest import Table, load_table, table_from_rows
from .model import Resources, resolve_preset
from .report import normalize_mode


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and np.isnan(value):
        return ""
    return str(value)


def check_table(X, missing_tokens=None) -> Table:
    """Turn a path, DataFrame, 2-D array or list of rows into a :class:`Table`."""
    kwargs = {} if missing_tokens is None else {"missing_tokens": missing_tokens}
    if isinstance(X, Table):
        return X
    if isinstance(X, (str, os.PathLike)):
        return load_table(X, **kwargs)
    if hasattr(X, "columns") and hasattr(X, "itertuples"):
        names = [str(c) for c in X.columns]
        rows = [[_cell(v) for v in r] for r in X.itertuples(index=False, name=None)]
        return table_from_rows(rows, names, **kwargs)
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D table, got an array with {arr.ndim} dimensions")
    rows = [[_cell(v) for v in r] for r in arr.tolist()]
    return table_from_rows(rows, **kwargs)


class DataSmellDetector(TransformerMixin, BaseEstimator):
    """Detect data smells column by column.

    ``fit`` scans the table; ``transform`` returns a boolean matrix of shape
    ``(rows, columns)`` marking every cell flagged by at least one enabled
    detector.  ``transform(None)`` reuses the fitted scan instead of scanning
    again.
    """

    def __init__(self, preset="default", density_threshold=None, mode="density",
                 detectors=None, exclude=None, params=None, resources=None, sample_cap=10):
        self.preset = preset
        self.density_threshold = density_threshold
        self.mode = mode
        self.detectors = detectors
        self.exclude = exclude
        self.params = params
        self.resources = resources
        self.sample_cap = sample_cap

    def _config(self):
        cfg = resolve_preset(self.preset)
        return cfg.with_overrides(self.params, density_threshold=self.density_threshold,
                                  sample_cap=self.sample_cap)

    def fit(self, X, y=None):
        cfg = self._config()
        table = check_table(X, cfg.missing_tokens)
        self.report_ = scan_table(
            table, cfg, self.resources or Resources(),
            resolve_enabled(self.detectors, self.exclude), normalize_mode(self.mode),
        )
        self.n_features_in_ = len(table.columns)
        self.feature_names_in_ = np.array([c.name for c in table.columns], dtype=object)
        self.n_rows_ = table.row_count
        self.findings_ = self.report_.findings
        self.column_reports_ = self.report_.columns
        self.smelly_columns_ = [c.name for c in self.report_.columns if c.smelly]
        return self

    def _flags(self, report, n_rows):
        out = np.zeros((n_rows, len(report.columns)), dtype=bool)
        for f in report.findings:
            if f.rows is not None and len(f.rows):
                out[f.rows, f.column_index] = True
        return out

    def transform(self, X=None):
        check_is_fitted(self, "report_")
        if X is None:
            return self._flags(self.report_, self.n_rows_)
        cfg = self._config()
        table = check_table(X, cfg.missing_tokens)
        if len(table.columns) != self.n_features_in_:
            raise ValueError(
                f"X has {len(table.columns)} columns, detector was fitted with {self.n_features_in_}"
            )
        report = scan_table(table, cfg, self.resources or Resources(),
                            resolve_enabled(self.detectors, self.exclude), normalize_mode(self.mode))
        return self._flags(report, table.row_count)

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X, y)
        return self._flags(self.report_, self.n_rows_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "report_")
        return self.feature_names_in_.copy()
