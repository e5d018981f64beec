"""Instance-granularity detectors (Believability, Encoding and Syntactic smells).

Each detector is a pure function of a column, a configuration and, where
needed, resources or the column's :class:`~datasmell.views.DateView`.  They
evaluate distinct values once and broadcast the verdict to rows via codes.
"""

from __future__ import annotations

import datetime as _dt
import re
from collections import Counter
from decimal import Decimal, InvalidOperation

import numpy as np

from .ingest import BaseType, ColumnData, strip_value
from .model import Finding, Granularity, Resources, StrengthConfig, _jsonable
from .views import DAY_MONTH, NO_DESIGNATOR, REASON_TEXT, YEAR_ABSENT, DateView

NUMERIC_TYPES = (BaseType.INTEGER, BaseType.FLOAT)
_FAMILY = {
    BaseType.INTEGER: "numeric",
    BaseType.FLOAT: "numeric",
    BaseType.DATEONLY: "temporal",
    BaseType.TIMEONLY: "temporal",
    BaseType.DATETIME: "temporal",
    BaseType.TEXT: "text",
}
_SENTINEL_NAMES = {
    "1970-01-01": "epoch sentinel",
    "1900-01-01": "1900 sentinel",
    "9999-12-31": "maximum-date sentinel",
}


def make_finding(
    col: ColumnData,
    smell_id: str,
    rows: np.ndarray,
    evidence: str,
    params: dict,
    cfg: StrengthConfig,
    granularity: Granularity = Granularity.INSTANCE,
) -> Finding:
    rows = np.unique(np.asarray(rows, dtype=np.int64))
    head = rows[: int(cfg.sample_cap)].tolist()
    values = col.values
    codes = col.codes
    samples = tuple((r, values[codes[r]]) for r in head)
    return Finding(
        smell_id=smell_id,
        column_index=col.index,
        granularity=granularity,
        flagged_count=int(len(rows)),
        samples=samples,
        evidence=evidence,
        params_used=_jsonable(params),
        rows=rows,
    )


def _code_mask(col: ColumnData, flagged_codes) -> np.ndarray:
    mask = np.zeros(len(col.values), dtype=bool)
    mask[list(flagged_codes)] = True
    return mask


def _summary(counter: Counter) -> str:
    return "; ".join(f"{k}: {counter[k]}" for k in sorted(counter))


def _occurrences(col: ColumnData, flagged_codes) -> int:
    return int(sum(int(col.counts[c]) for c in flagged_codes))


def _is_ascending_run(token: str, k: int) -> bool:
    if len(token) < k or not token.isdigit():
        return False
    return all(ord(b) - ord(a) == 1 for a, b in zip(token, token[1:]))


def detect_dummy_value(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None):
    res = res or Resources()
    p = cfg.get("B-DUMMY")
    lexicon = {x.casefold() for x in res.dummy_lexicon}
    r, k = int(p["repeat_min"]), int(p["ascending_min"])
    flagged = []
    why: Counter = Counter()
    values, counts = col.values, col.counts
    for c in col.present().tolist():
        token = strip_value(values[c])
        if token.casefold() in lexicon:
            reason = "placeholder lexicon"
        elif len(token) >= r and token.count(token[0]) == len(token):
            reason = "repeated character"
        elif len(token) >= k and _is_ascending_run(token, k):
            reason = "ascending digits"
        else:
            continue
        why[reason] += int(counts[c])
        flagged.append(c)
    if not flagged:
        return []
    rows = col.rows_for(_code_mask(col, flagged))
    return [make_finding(col, "B-DUMMY", rows, _summary(why), p, cfg)]


def detect_number_as_text(col: ColumnData, cfg: StrengthConfig):
    """Integer-as-String and Float-as-String in one pass."""
    out = []
    dom_type, dom_frac = col.dominant
    tags = col.tags
    for smell_id, base in (("UE-INT-STR", BaseType.INTEGER), ("UE-FLT-STR", BaseType.FLOAT)):
        p = cfg.get(smell_id)
        is_base = tags == base
        if not is_base.any():
            continue
        text_context = dom_type == BaseType.TEXT and dom_frac >= p["dominance"]
        quoted = col.quoted if col.quoted is not None else np.zeros(len(tags), dtype=bool)
        hit = is_base & (quoted | text_context)
        rows = np.flatnonzero(hit)
        if not len(rows):
            continue
        why = Counter()
        n_quoted = int((is_base & quoted).sum())
        if n_quoted:
            why["quoted"] = n_quoted
        if text_context:
            why["in text-dominated column"] = int(is_base.sum())
        out.append(make_finding(col, smell_id, rows, _summary(why), p, cfg))
    return out


_PLAIN_INTEGRAL = re.compile(r"[+-]?[0-9]*\.?0*")


def _integral(token: str) -> bool:
    if "e" not in token and "E" not in token:
        return _PLAIN_INTEGRAL.fullmatch(token) is not None and any(ch.isdigit() for ch in token)
    try:
        d = Decimal(token)
    except InvalidOperation:
        return False
    return d.is_finite() and d == d.to_integral_value()


def detect_int_as_float(col: ColumnData, cfg: StrengthConfig):
    if not col.dominant_is(*NUMERIC_TYPES):
        return []
    p = cfg.get("UE-INT-FLT")
    floats = col.present_of(BaseType.FLOAT).tolist()
    flagged = [c for c in floats if _integral(strip_value(col.values[c]))]
    if not flagged:
        return []
    n_float = _occurrences(col, floats)
    n_flag = _occurrences(col, flagged)
    fraction = n_flag / n_float
    evidence = f"zero fractional part: {n_flag} of {n_float} float values"
    if fraction >= p["integral_fraction"]:
        evidence += f"; integral fraction {fraction:.6f} exceeds {p['integral_fraction']}"
    rows = col.rows_for(_code_mask(col, flagged))
    return [make_finding(col, "UE-INT-FLT", rows, evidence, p, cfg)]


def detect_date_as_datetime(col: ColumnData, cfg: StrengthConfig, view: DateView | None):
    if view is None or not col.dominant_is(BaseType.DATETIME):
        return []
    p = cfg.get("UE-DATE-DT")
    is_dt = col.value_tags == BaseType.DATETIME
    mask = is_dt & view.midnight
    if not mask.any():
        return []
    n_dt = int(col.counts[is_dt].sum())
    n_mid = int(col.counts[mask].sum())
    fraction = n_mid / n_dt
    evidence = f"midnight time suffix on {n_mid} of {n_dt} date/time values"
    if fraction >= p["midnight_fraction"]:
        evidence += (
            f"; midnight fraction {fraction:.6f} reaches {p['midnight_fraction']}: "
            "column holds dates stored as date/time"
        )
    return [make_finding(col, "UE-DATE-DT", col.rows_for(mask), evidence, p, cfg)]


def detect_small_number(col: ColumnData, cfg: StrengthConfig):
    if not col.dominant_is(*NUMERIC_TYPES):
        return []
    p = cfg.get("US-SMALL")
    limit = Decimal(str(p["threshold"]))
    codes = col.present_of(*NUMERIC_TYPES)
    tokens = [strip_value(col.values[c]) for c in codes.tolist()]
    x = np.abs(np.array(tokens, dtype=np.float64)) if tokens else np.zeros(0)
    t = float(limit)
    sure = (x > 0) & (x < t * (1 - 1e-9))
    # exact decimal comparison where float rounding could matter
    unsure = np.flatnonzero(~sure & ((x == 0) | (np.abs(x - t) <= t * 1e-9) | ~np.isfinite(x)))
    keep = sure.copy()
    for i in unsure.tolist():
        d = abs(Decimal(tokens[i]))
        keep[i] = 0 < d < limit
    flagged = codes[keep].tolist()
    if not flagged:
        return []
    evidence = f"{_occurrences(col, flagged)} values with 0 < |x| < {p['threshold']}"
    return [make_finding(col, "US-SMALL", col.rows_for(_code_mask(col, flagged)), evidence, p, cfg)]


def longest_run(value: str) -> int:
    return max(map(len, value.split()), default=0)


def detect_long_value(col: ColumnData, cfg: StrengthConfig):
    if not col.dominant_is(BaseType.TEXT):
        return []
    p = cfg.get("US-LONG")
    limit = int(p["min_run"])
    flagged = [c for c in col.present().tolist() if longest_run(col.values[c]) >= limit]
    if not flagged:
        return []
    longest = max(longest_run(col.values[c]) for c in flagged)
    evidence = f"{_occurrences(col, flagged)} values with a run of >= {limit} characters (longest {longest})"
    return [make_finding(col, "US-LONG", col.rows_for(_code_mask(col, flagged)), evidence, p, cfg)]


_LETTER_RUN = re.compile(r"[^\W\d_]+")


def casing_class(value: str) -> str | None:
    """Classify letter casing; digits and punctuation are neutral.

    Returns ``None`` when the value has no cased letter at all.
    """
    words = _LETTER_RUN.findall(value)
    letters = "".join(words)
    if letters.lower() == letters.upper():
        return None
    if letters == letters.lower():
        return "lower"
    if letters == letters.upper():
        return "UPPER"
    if all(w[0].isupper() and w[1:] == w[1:].lower() for w in words):
        return "Title"
    if any(any(ch.isupper() for ch in w[1:]) and any(ch.islower() for ch in w) for w in words):
        return "mixed"
    return "other"


def detect_casing(col: ColumnData, cfg: StrengthConfig):
    if not col.dominant_is(BaseType.TEXT):
        return []
    p = cfg.get("US-CASING")
    classes: dict[int, str] = {}
    tally: Counter = Counter()
    for c in col.present().tolist():
        cls = casing_class(col.values[c])
        if cls is not None:
            classes[c] = cls
            tally[cls] += int(col.counts[c])
    total = sum(tally.values())
    if not total:
        return []
    major, count = min(tally.items(), key=lambda kv: (-kv[1], kv[0]))
    if count / total < p["dominance"]:
        return []
    flagged = [c for c, cls in classes.items() if cls != major]
    if not flagged:
        return []
    others = Counter({k: v for k, v in tally.items() if k != major})
    evidence = f"{major} covers {count / total:.6f} of cased values; deviating: {_summary(others)}"
    return [make_finding(col, "US-CASING", col.rows_for(_code_mask(col, flagged)), evidence, p, cfg)]


def detect_ambiguous_datetime(col: ColumnData, cfg: StrengthConfig, view: DateView | None):
    if view is None or view.profile.parseable == 0:
        return []
    p = cfg.get("US-AMBIG-DT")
    mask = view.reasons != 0
    if not mask.any():
        return []
    why: Counter = Counter()
    for bit in (DAY_MONTH, NO_DESIGNATOR, YEAR_ABSENT):
        hit = (view.reasons & bit) != 0
        if hit.any():
            why[REASON_TEXT[bit]] = int(col.counts[hit].sum())
    evidence = _summary(why)
    return [make_finding(col, "US-AMBIG-DT", col.rows_for(mask), evidence, p, cfg)]


def _reference_date(value) -> _dt.date:
    if value is None:
        return _dt.date.today()
    if isinstance(value, _dt.date):
        return value
    return _dt.date.fromisoformat(str(value))


def _add_years(day: _dt.date, years: int) -> _dt.date:
    try:
        return day.replace(year=day.year + years)
    except ValueError:
        return day.replace(year=day.year + years, day=28)


def _day_number(day: _dt.date) -> int:
    return (day - _dt.date(1970, 1, 1)).days


def detect_suspect_interval(col: ColumnData, cfg: StrengthConfig, view: DateView | None):
    if view is None or not col.dominant_is(BaseType.DATETIME, BaseType.DATEONLY):
        return []
    p = dict(cfg.get("B-SUSP-DT"))
    reference = _reference_date(p.get("reference_date"))
    p["reference_date"] = reference.isoformat()
    upper = _add_years(reference, int(p["slack_years"]))
    floor_year = int(p["floor_year"])
    usable = view.parsed & view.has_year
    why: Counter = Counter()
    day = np.full(len(view.ts), np.iinfo(np.int64).min)
    day[usable] = np.floor(view.ts[usable] / 86400).astype(np.int64)
    flagged = np.zeros(len(view.ts), dtype=bool)
    for text in p["sentinels"]:
        hit = usable & (day == _day_number(_dt.date.fromisoformat(text)))
        if hit.any():
            why["sentinel date (" + _SENTINEL_NAMES.get(text, text) + ")"] += int(col.counts[hit].sum())
            flagged |= hit
    lo = _day_number(_dt.date(floor_year, 1, 1)) if floor_year > 1 else np.iinfo(np.int64).min + 1
    outside = usable & ~flagged & ((day < lo) | (day > _day_number(upper)))
    if outside.any():
        why[f"outside [{floor_year}, {upper.isoformat()}]"] += int(col.counts[outside].sum())
        flagged |= outside
    rows = col.rows_for(flagged)

    # gap rule: only for series already ordered by time
    row_ok = usable[col.codes]
    order_rows = np.flatnonzero(row_ok)
    if len(order_rows) >= int(p["min_rows"]):
        series = view.ts[col.codes[order_rows]]
        gaps = np.diff(series)
        if len(gaps) and (gaps >= 0).all():
            positive = gaps[gaps > 0]
            if len(positive):
                median = float(np.median(positive))
                big = np.flatnonzero(gaps > p["gap_factor"] * median)
                if len(big):
                    gap_rows = np.unique(np.concatenate([order_rows[big], order_rows[big + 1]]))
                    why[f"gap > {p['gap_factor']} x median gap"] += len(gap_rows)
                    rows = np.union1d(rows, gap_rows)
    if not len(rows):
        return []
    return [make_finding(col, "B-SUSP-DT", rows, _summary(why), p, cfg)]


def detect_intermingled(col: ColumnData, cfg: StrengthConfig):
    p = cfg.get("UE-MIXED")
    per_tag = np.bincount(col.value_tags.astype(np.int64), weights=col.counts,
                          minlength=len(BaseType))
    fam_counts: Counter = Counter()
    type_counts: Counter = Counter()
    for t in BaseType:
        if t != BaseType.MISSING and per_tag[t] > 0:
            fam_counts[_FAMILY[t]] += int(per_tag[t])
            type_counts[t] += int(per_tag[t])
    if len(fam_counts) < 2:
        return []
    total = sum(fam_counts.values())
    family, count = min(fam_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if count / total < p["min_dominance"]:
        return []
    minority_tags = [int(t) for t in BaseType if t in _FAMILY and _FAMILY[t] != family]
    minority = np.isin(col.value_tags, np.array(minority_tags, dtype=np.int8))
    rows = col.rows_for(minority)
    others = Counter({t.label: n for t, n in type_counts.items() if _FAMILY[t] != family})
    evidence = f"dominant {family} {count / total:.6f}; minority types: {_summary(others)}"
    return [make_finding(col, "UE-MIXED", rows, evidence, p, cfg)]
