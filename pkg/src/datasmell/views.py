"""Per-column derived data shared by several detectors."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass

import numpy as np

from .dates import (DIGIT_SHAPE, ISO_FAST, ColumnDateTimeProfile, hypothesize, interpret,
                    profile_column)
from .ingest import BaseType, ColumnData

TEMPORAL_TYPES = (BaseType.DATEONLY, BaseType.TIMEONLY, BaseType.DATETIME)

DAY_MONTH = 1
NO_DESIGNATOR = 2
YEAR_ABSENT = 4
REASON_TEXT = {
    DAY_MONTH: "day/month order",
    NO_DESIGNATOR: "no AM/PM designator",
    YEAR_ABSENT: "year absent",
}
_REASON_BITS = {v: k for k, v in REASON_TEXT.items()}
_EPOCH = _dt.datetime(1970, 1, 1)


@dataclass
class DateView:
    """Interpretation of every distinct temporal value of one column.

    Arrays are indexed by value code.  ``ts`` holds seconds since 1970 of the
    preferred surviving reading (NaN for non-temporal values).
    """

    profile: ColumnDateTimeProfile
    signature: list
    ts: np.ndarray
    has_year: np.ndarray
    midnight: np.ndarray
    reasons: np.ndarray

    @property
    def parsed(self) -> np.ndarray:
        return ~np.isnan(self.ts)


def _seconds(moment: _dt.datetime) -> float:
    return (moment - _EPOCH).total_seconds()


def _iso_seconds(tokens: list) -> np.ndarray:
    try:
        stamps = np.array(tokens, dtype="datetime64[us]")
    except ValueError:
        stamps = np.array([_dt.datetime.fromisoformat(t) for t in tokens], dtype="datetime64[us]")
    return stamps.astype(np.int64) / 1e6


def date_view(col: ColumnData) -> DateView | None:
    """Build the view, or return None when the column holds no temporal value."""
    codes = col.present_of(*TEMPORAL_TYPES).tolist()
    if not codes:
        return None
    n = len(col.values)
    signature: list = [None] * n
    ts = np.full(n, np.nan)
    has_year = np.zeros(n, dtype=bool)
    has_date = np.zeros(n, dtype=bool)
    midnight = np.zeros(n, dtype=bool)
    reasons = np.zeros(n, dtype=np.int8)
    pending: list[tuple[int, tuple]] = []
    iso_codes: list[int] = []
    iso_tokens: list[str] = []
    iso_timed: list[bool] = []
    shapes: dict[str, tuple] = {}
    values = col.values

    def feed():
        for c in codes:
            token = values[c].strip()
            if ISO_FAST.fullmatch(token):
                # one reading only; share the hypothesis of the first token per shape
                shape = token.translate(DIGIT_SHAPE)
                hyps = shapes.get(shape)
                if hyps is None:
                    hyps = shapes[shape] = hypothesize(token)
                if hyps:
                    signature[c] = hyps[0].signature
                    has_year[c] = has_date[c] = True
                    iso_codes.append(c)
                    iso_tokens.append(token.replace(" ", "T"))
                    iso_timed.append(len(token) > 10)
                yield hyps
                continue
            hyps = hypothesize(token)
            if hyps:
                first = hyps[0]
                signature[c] = first.signature
                has_year[c] = first.has_year
                has_date[c] = first.has_date
                if len(hyps) == 1:
                    moment = first.as_datetime()
                    ts[c] = _seconds(moment)
                    midnight[c] = first.clock != "" and moment.time() == _dt.time()
                else:
                    pending.append((c, hyps))
            yield hyps

    profile = profile_column(feed(), counts=(int(col.counts[c]) for c in codes), keep=False)
    if iso_codes:
        idx = np.array(iso_codes, dtype=np.int64)
        secs = _iso_seconds(iso_tokens)
        ts[idx] = secs
        midnight[idx] = np.array(iso_timed, dtype=bool) & (np.mod(secs, 86400) == 0)
    for c, hyps in pending:
        it = interpret(hyps, profile)
        ts[c] = _seconds(it.preferred)
        midnight[c] = it.midnight
        bits = 0
        for reason in it.reasons:
            bits |= _REASON_BITS[reason]
        reasons[c] = bits
    if profile.has_dates and not profile.year_present:
        reasons[has_date & ~has_year] |= YEAR_ABSENT
    return DateView(profile, signature, ts, has_year, midnight, reasons)
