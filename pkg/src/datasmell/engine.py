"""Runs the enabled detectors over every column of a table."""

from __future__ import annotations

from typing import Iterable

from . import consistency as cons
from . import instance as inst
from .errors import ConfigError
from .ingest import BaseType, ColumnData, Table
from .model import SHIPPED_IDS, Resources, StrengthConfig, _jsonable
from .report import (ColumnReport, TableReport, classify_attribute, config_digest,
                     normalize_mode, summarize_findings)
from .views import date_view

CASCADE_IDS = frozenset({"C-CASING", "C-SPACING", "C-ABBREV", "B-AMBIG-VAL", "C-SYN"})
DATE_IDS = frozenset({"UE-DATE-DT", "US-AMBIG-DT", "B-SUSP-DT", "C-DT-FMT"})


def resolve_enabled(detectors: Iterable[str] | None = None,
                    exclude: Iterable[str] | None = None) -> tuple:
    """Validated, catalogue-ordered tuple of enabled detector ids."""
    chosen = list(detectors) if detectors else list(SHIPPED_IDS)
    dropped = list(exclude or ())
    unknown = sorted(set(chosen + dropped) - set(SHIPPED_IDS))
    if unknown:
        raise ConfigError(f"unknown detector id(s): {', '.join(unknown)}")
    if detectors and set(chosen) & set(dropped):
        both = ", ".join(sorted(set(chosen) & set(dropped)))
        raise ConfigError(f"detector(s) both enabled and excluded: {both}")
    keep = set(chosen) - set(dropped)
    return tuple(i for i in SHIPPED_IDS if i in keep)


def scan_column(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None,
                enabled: Iterable[str] = SHIPPED_IDS, warnings: list | None = None) -> list:
    """All findings for one column, ordered by smell id then evidence."""
    res = res or Resources()
    on = set(enabled)
    found = []
    if col.non_missing_count == 0:
        return found
    view = date_view(col) if on & DATE_IDS else None

    if "B-DUMMY" in on:
        found += inst.detect_dummy_value(col, cfg, res)
    if on & {"UE-INT-STR", "UE-FLT-STR"}:
        found += [f for f in inst.detect_number_as_text(col, cfg) if f.smell_id in on]
    if "UE-INT-FLT" in on:
        found += inst.detect_int_as_float(col, cfg)
    if "UE-DATE-DT" in on:
        found += inst.detect_date_as_datetime(col, cfg, view)
    if "UE-MIXED" in on:
        found += inst.detect_intermingled(col, cfg)
    if "US-SMALL" in on:
        found += inst.detect_small_number(col, cfg)
    if "US-LONG" in on:
        found += inst.detect_long_value(col, cfg)
    if "US-CASING" in on:
        found += inst.detect_casing(col, cfg)
    if "US-AMBIG-DT" in on:
        found += inst.detect_ambiguous_datetime(col, cfg, view)
    if "B-SUSP-DT" in on:
        found += inst.detect_suspect_interval(col, cfg, view)
    if "C-DT-FMT" in on:
        found += cons.detect_format_inconsistency(col, cfg, view)

    if on & CASCADE_IDS and col.dominant_is(BaseType.TEXT):
        cascade = cons.column_cascade(col, cfg, res)
        if "C-CASING" in on:
            found += cons.detect_case_inconsistency(col, cfg, cascade)
        if "C-SPACING" in on:
            found += cons.detect_space_inconsistency(col, cfg, cascade)
        if "C-ABBREV" in on:
            found += cons.detect_abbrev_inconsistency(col, cfg, res, cascade)
        if "B-AMBIG-VAL" in on:
            found += cons.detect_ambiguous_value(col, cfg, res, cascade, warnings)
        if "C-SYN" in on and res.has_synonym_source:
            found += cons.detect_synonyms(col, cfg, res, cascade)
    found.sort(key=lambda f: (f.smell_id, f.evidence, f.flagged_count))
    return found


def scan_config(cfg: StrengthConfig, res: Resources, enabled, mode: str) -> dict:
    return {
        "strength": cfg.to_dict(),
        "detectors": list(enabled),
        "mode": mode,
        "resources": res.fingerprint(),
    }


def scan_table(table: Table, cfg: StrengthConfig, res: Resources | None = None,
               enabled: Iterable[str] | None = None, mode: str = "density_threshold") -> TableReport:
    res = res or Resources()
    enabled = resolve_enabled(enabled)
    mode = normalize_mode(mode)
    warnings: list[str] = []
    if "C-SYN" in enabled and not res.has_synonym_source:
        warnings.append("C-SYN inert: no thesaurus or vector resource configured")
    columns = []
    for col in table.columns:
        col_warnings: list[str] = []
        findings = scan_column(col, cfg, res, enabled, col_warnings)
        warnings += [f"column {col.index} ({col.name}): {w}" for w in col_warnings]
        entries = summarize_findings(findings, col.non_missing_count)
        columns.append(ColumnReport(
            name=col.name,
            index=col.index,
            strict_type=col.strict_type.label,
            dominant=(col.dominant[0].label, float(col.dominant[1])),
            non_missing_count=col.non_missing_count,
            entries=entries,
            findings=findings,
            smelly=classify_attribute(entries, mode, cfg.density_threshold),
            verdict_rule=mode,
        ))
    config = _jsonable(scan_config(cfg, res, enabled, mode))
    return TableReport(
        path=table.path,
        row_count=table.row_count,
        columns=columns,
        mode=mode,
        density_threshold=cfg.density_threshold,
        config_digest=config_digest(config),
        config=config,
        warnings=warnings,
        ragged_rows=table.ragged_rows,
        replaced_chars=table.replaced_chars,
    )
