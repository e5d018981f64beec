"""Lint tabular data for data smells."""

from ._version import __version__
from .engine import resolve_enabled, scan_column, scan_table
from .errors import ConfigError, ConsistencyError, FormatError, SmellError
from .ingest import BaseType, ColumnData, Table, classify_value, infer_column_types, load_table
from .model import (Finding, Granularity, Resources, SmellCategory, SmellDescriptor, StrengthConfig,
                    register_descriptors, resolve_preset)
from .report import (CorpusSummary, aggregate_corpus, classify_attribute, compute_density,
                     render_report)
from .resources import load_resources

__all__ = [
    "__version__", "BaseType", "ColumnData", "ConfigError", "ConsistencyError", "CorpusSummary",
    "DataSmellDetector", "Finding", "FormatError", "Granularity", "Resources", "SmellCategory",
    "SmellDescriptor", "SmellError", "StrengthConfig", "Table", "aggregate_corpus",
    "classify_attribute", "classify_value", "compute_density", "infer_column_types",
    "load_resources", "load_table", "register_descriptors", "render_report", "resolve_enabled",
    "resolve_preset", "scan_column", "scan_table",
]


def __getattr__(name):
    # sklearn is only imported when the estimator is actually used
    if name == "DataSmellDetector":
        from .estimator import DataSmellDetector

        return DataSmellDetector
    raise AttributeError(name)
