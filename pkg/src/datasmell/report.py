"""Density, smelly-attribute verdicts, report rendering and corpus aggregation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._version import __version__
from .errors import ConsistencyError, ConfigError
from .model import Finding, Granularity

SCHEMA_VERSION = 1
MODES = ("density_threshold", "any_finding")
MODE_ALIASES = {"density": "density_threshold", "any": "any_finding"}

# (label, low, high) with high None meaning unbounded
DEFAULT_BINS = (("0", 0, 0), ("1-2", 1, 2), ("3-5", 3, 5), ("6-10", 6, 10), (">10", 11, None))
CSV_HEADER = ("path", "rows", "columns", "smelly_attributes", "findings_total")


def normalize_mode(mode: str) -> str:
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ConfigError(f"unknown verdict mode {mode!r}; expected density or any")
    return mode


def compute_density(flagged_count: int, non_missing_count: int) -> Fraction:
    if flagged_count < 0 or non_missing_count < 0:
        raise ConsistencyError("counts must be non-negative")
    if flagged_count > non_missing_count:
        raise ConsistencyError(
            f"flagged_count {flagged_count} exceeds non-missing count {non_missing_count}"
        )
    if non_missing_count == 0:
        return Fraction(0)
    return Fraction(flagged_count, non_missing_count)


def fmt6(x) -> str:
    # Fraction keeps this exact up to the final rounding
    return f"{float(x):.6f}" if not isinstance(x, Fraction) else _fraction6(x)


def _fraction6(x: Fraction) -> str:
    scaled = x * 1_000_000
    n = scaled.numerator // scaled.denominator
    rem = scaled - n
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and n % 2):
        n += 1
    return f"{n // 1_000_000}.{n % 1_000_000:06d}"


@dataclass
class SmellEntry:
    smell_id: str
    granularity: Granularity
    flagged_count: int
    density: Fraction
    findings: int
    params: dict

    def to_dict(self) -> dict:
        return {
            "smell_id": self.smell_id,
            "granularity": self.granularity.value,
            "flagged_count": self.flagged_count,
            "density": _Fixed(self.density),
            "findings": self.findings,
            "params": self.params,
        }


def classify_attribute(entries: Iterable[SmellEntry], mode: str = "density_threshold",
                       threshold: float = 0.10) -> bool:
    mode = normalize_mode(mode)
    entries = list(entries)
    if mode == "any_finding":
        return any(e.findings > 0 for e in entries)
    limit = Fraction(str(threshold))
    return any(
        e.findings > 0 and (e.density >= limit or e.granularity == Granularity.COLUMN)
        for e in entries
    )


def summarize_findings(findings: Sequence[Finding], non_missing: int) -> list[SmellEntry]:
    """One entry per smell id; flagged rows are the union over its findings."""
    by_id: dict[str, list[Finding]] = {}
    for f in findings:
        by_id.setdefault(f.smell_id, []).append(f)
    entries = []
    for smell_id in sorted(by_id):
        group = by_id[smell_id]
        if all(f.rows is not None for f in group):
            flagged = int(len(np.unique(np.concatenate([f.rows for f in group]))))
        else:
            flagged = sum(f.flagged_count for f in group)
        granularity = (
            Granularity.COLUMN if any(f.granularity == Granularity.COLUMN for f in group)
            else Granularity.INSTANCE
        )
        entries.append(SmellEntry(
            smell_id=smell_id,
            granularity=granularity,
            flagged_count=flagged,
            density=compute_density(flagged, non_missing),
            findings=len(group),
            params=group[0].params_used,
        ))
    return entries


@dataclass
class ColumnReport:
    name: str
    index: int
    strict_type: str
    dominant: tuple
    non_missing_count: int
    entries: list
    findings: list
    smelly: bool
    verdict_rule: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "index": self.index,
            "strict_type": self.strict_type,
            "dominant": {"type": self.dominant[0], "fraction": _Fixed(self.dominant[1])},
            "non_missing_count": self.non_missing_count,
            "smells": [e.to_dict() for e in self.entries],
            "findings": [f.to_dict() for f in self.findings],
            "smelly": self.smelly,
            "verdict_rule": self.verdict_rule,
        }


@dataclass
class TableReport:
    path: str
    row_count: int
    columns: list
    mode: str
    density_threshold: float
    config_digest: str
    config: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    ragged_rows: int = 0
    replaced_chars: int = 0

    @property
    def column_count(self) -> int:
        return len(self.columns)

    @property
    def smelly_attributes(self) -> int:
        return sum(1 for c in self.columns if c.smelly)

    @property
    def findings_total(self) -> int:
        return sum(len(c.findings) for c in self.columns)

    @property
    def findings(self) -> list:
        return [f for c in self.columns for f in c.findings]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "datasmell", "version": __version__},
            "config_digest": self.config_digest,
            "config": self.config,
            "path": self.path,
            "rows": self.row_count,
            "column_count": self.column_count,
            "verdict": {
                "mode": self.mode,
                "density_threshold": _Fixed(self.density_threshold),
            },
            "input": {"ragged_rows": self.ragged_rows, "replaced_chars": self.replaced_chars},
            "columns": [c.to_dict() for c in sorted(self.columns, key=lambda c: c.index)],
            "warnings": sorted(self.warnings),
            "smelly_attributes": self.smelly_attributes,
            "findings_total": self.findings_total,
        }


def config_digest(config: dict) -> str:
    raw = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str).encode()
    return "sha256:" + hashlib.sha256(raw).hexdigest()


class _Fixed:
    """Marker for numbers rendered with exactly six decimals in JSON."""

    def __init__(self, value):
        self.value = value


def _dumps(obj, indent=2) -> str:
    fixed: list[str] = []

    def default(o):
        if isinstance(o, _Fixed):
            fixed.append(fmt6(o.value))
            return f"\x00fixed{len(fixed) - 1}\x00"
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        raise TypeError(f"not serializable: {type(o).__name__}")

    text = json.dumps(obj, sort_keys=True, indent=indent, ensure_ascii=False, default=default)
    for i, value in enumerate(fixed):
        text = text.replace(f'"\\u0000fixed{i}\\u0000"', value, 1)
    return text


def render_report(report: "TableReport | CorpusSummary", fmt: str = "json") -> bytes:
    if fmt not in ("json", "text"):
        raise ConfigError(f"unknown report format {fmt!r}")
    if isinstance(report, CorpusSummary):
        body = _dumps(report.to_dict()) if fmt == "json" else _corpus_text(report)
    else:
        body = _dumps(report.to_dict()) if fmt == "json" else _table_text(report)
    return (body + "\n").encode("utf-8")


def _shorten(value: str, width: int = 40) -> str:
    value = repr(value)
    return value if len(value) <= width else value[: width - 3] + "..."


def _table_text(report: TableReport, samples: int = 3) -> str:
    lines = [
        f"{report.path}: {report.row_count} rows, {report.column_count} columns, "
        f"{report.smelly_attributes} smelly attribute(s), {report.findings_total} finding(s)",
        f"verdict: {report.mode} (threshold {fmt6(report.density_threshold)}); "
        f"config {report.config_digest[:19]}",
    ]
    for w in sorted(report.warnings):
        lines.append(f"warning: {w}")
    smelly = [c for c in sorted(report.columns, key=lambda c: c.index) if c.smelly]
    if not smelly:
        lines.append("no smelly attributes")
    for col in smelly:
        lines.append("")
        lines.append(f"[{col.index}] {col.name}  ({col.strict_type}, "
                     f"{col.non_missing_count} non-missing)")
        lines.append(f"    {'smell':<12} {'flagged':>8} {'density':>9}")
        for e in col.entries:
            lines.append(f"    {e.smell_id:<12} {e.flagged_count:>8} {fmt6(e.density):>9}")
        for f in col.findings:
            shown = ", ".join(f"row {r}: {_shorten(v)}" for r, v in f.samples[:samples])
            lines.append(f"    - {f.smell_id}: {f.evidence}")
            if shown:
                lines.append(f"      e.g. {shown}")
    return "\n".join(lines)


# corpus ---------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetSummary:
    path: str
    rows: int
    columns: int
    smelly_attributes: int
    findings_total: int

    @classmethod
    def from_report(cls, report: TableReport) -> "DatasetSummary":
        return cls(report.path, report.row_count, report.column_count,
                   report.smelly_attributes, report.findings_total)


def bin_label(count: int, bins=DEFAULT_BINS) -> str:
    for label, lo, hi in bins:
        if count >= lo and (hi is None or count <= hi):
            return label
    raise ConsistencyError(f"no histogram bin for {count}")


@dataclass
class CorpusSummary:
    datasets: list
    skipped: list = field(default_factory=list)
    bins: tuple = DEFAULT_BINS

    @property
    def histogram(self) -> dict:
        hist = {label: 0 for label, _, _ in self.bins}
        for d in self.datasets:
            hist[bin_label(d.smelly_attributes, self.bins)] += 1
        return hist

    @property
    def smelly_datasets(self) -> int:
        return sum(1 for d in self.datasets if d.smelly_attributes > 0)

    def combine(self, other: "CorpusSummary") -> "CorpusSummary":
        if self.bins != other.bins:
            raise ConfigError("cannot combine summaries with different bins")
        return CorpusSummary(
            datasets=sorted(self.datasets + other.datasets, key=lambda d: d.path),
            skipped=sorted(self.skipped + other.skipped),
            bins=self.bins,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for d in self.datasets:
            writer.writerow([d.path, d.rows, d.columns, d.smelly_attributes, d.findings_total])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "datasmell", "version": __version__},
            "datasets": [d.__dict__ for d in self.datasets],
            "histogram": [{"bin": k, "datasets": v} for k, v in self.histogram.items()],
            "skipped": [{"path": p, "reason": r} for p, r in self.skipped],
            "dataset_count": len(self.datasets),
            "smelly_datasets": self.smelly_datasets,
        }


def aggregate_corpus(reports: Iterable, skipped: Iterable = (), bins=DEFAULT_BINS) -> CorpusSummary:
    """Fold per-dataset reports (or DatasetSummary rows) into a corpus summary."""
    datasets = []
    for r in reports:
        datasets.append(r if isinstance(r, DatasetSummary) else DatasetSummary.from_report(r))
    skipped = sorted((str(p), str(reason)) for p, reason in skipped)
    if not datasets and not skipped:
        raise ConsistencyError("aggregate_corpus needs at least one dataset report")
    return CorpusSummary(sorted(datasets, key=lambda d: d.path), skipped, tuple(bins))


def _corpus_text(summary: CorpusSummary) -> str:
    lines = [f"{len(summary.datasets)} dataset(s) scanned, {len(summary.skipped)} skipped, "
             f"{summary.smelly_datasets} with smelly attributes", "", "smelly attributes per dataset:"]
    for label, n in summary.histogram.items():
        lines.append(f"  {label:>5}: {n}")
    lines.append("")
    for d in summary.datasets:
        lines.append(f"  {d.path}: {d.smelly_attributes} smelly / {d.columns} columns, "
                     f"{d.findings_total} finding(s)")
    for path, reason in summary.skipped:
        lines.append(f"  skipped {path}: {reason}")
    return "\n".join(lines)
