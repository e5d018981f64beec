"""Format-hypothesis parsing for date and time tokens.

Every token is matched against a small set of skeletons (ISO-like, numeric
``n/n/nnnn`` families, month-name forms, bare clock times).  Each skeleton
yields one :class:`FormatHypothesis` per calendar-valid role assignment, so
``03/04/05`` produces both a day-first and a month-first reading.  At column
level :func:`profile_column` intersects the admitted assignments of all rows
sharing a signature; a single ``14/04/05`` is enough to pin the day-first
order for the whole column.
"""

from __future__ import annotations

import datetime as _dt
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

YEAR_PIVOT = 68

_MONTHS = {
    name: i + 1
    for i, names in enumerate(
        [
            ("jan", "january"), ("feb", "february"), ("mar", "march"),
            ("apr", "april"), ("may",), ("jun", "june"), ("jul", "july"),
            ("aug", "august"), ("sep", "september"), ("oct", "october"),
            ("nov", "november"), ("dec", "december"),
        ]
    )
    for name in names
}
_ABBR = [None, "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"]
_FULL = [None, "january", "february", "march", "april", "may", "june", "july",
         "august", "september", "october", "november", "december"]

_TIME = (
    r"(?P<H>\d{1,2}):(?P<M>\d{2})(?::(?P<S>\d{2})(?:\.(?P<F>\d{1,6}))?)?"
    r"(?:(?P<apsp> ?)(?P<ap>[AaPp]\.?[Mm]\.?))?"
)
_TZ = r"(?P<tz>Z|[+-]\d{2}:?\d{2})?"
_SUFFIX = r"(?:(?P<dtsep>[ T])" + _TIME + _TZ + r")?"

_NUM3 = re.compile(
    r"(?P<a>\d{1,4})(?P<s1>[/.\-])(?P<b>\d{1,2})(?P=s1)(?P<c>\d{1,4})" + _SUFFIX
)
_NUM2 = re.compile(r"(?P<a>\d{1,2})(?P<s1>/)(?P<b>\d{1,2})" + _SUFFIX)
_DMON = re.compile(
    r"(?P<d>\d{1,2})(?P<s1>[ \-])(?P<mon>[A-Za-z]{3,9})(?P<dot>\.?)"
    r"(?:(?P=s1)(?P<y>\d{4}|\d{2}))?" + _SUFFIX
)
_MOND = re.compile(
    r"(?P<mon>[A-Za-z]{3,9})(?P<dot>\.?)(?P<s1>[ \-])(?P<d>\d{1,2})"
    r"(?:(?P<comma>,?) (?P<y>\d{4}))?" + _SUFFIX
)
_TIME_ONLY = re.compile(_TIME)

# cheap pre-filter: plausible characters, at least one digit, bounded length
_SKELETON = re.compile(r"[0-9A-Za-z][0-9A-Za-z:/.,+ \-]{2,39}")

_DATE_ROLES = {"day": "D", "month": "M", "year2": "Y", "year4": "Y"}
_ORDER_RANK = {"YMD": 0, "DMY": 1, "MDY": 2, "DM": 3, "MD": 4, "": 5}
_CLOCK_RANK = {"": 0, "h24": 1, "h12": 2}

_TWELVE_HOURS = _dt.timedelta(hours=12)
_PLACEHOLDER_DAY = _dt.date(2000, 1, 1)


@dataclass(frozen=True)
class FormatHypothesis:
    """One reading of a token.

    ``roles`` lists the role of each slot of the signature in token order
    (month-name slots included, fractional seconds excluded).  ``value`` is a
    :class:`datetime.datetime`, :class:`datetime.date` or
    :class:`datetime.time` depending on the token kind.  Tokens without a year
    resolve against the leap year 2000 and report ``has_year`` False.
    """

    signature: str
    roles: tuple
    designator: str
    value: object
    tz: str = ""
    order: str = field(default="", compare=False)
    clock: str = field(default="", compare=False)

    @property
    def key(self) -> tuple:
        return (self.order, self.clock)

    @property
    def has_year(self) -> bool:
        return "year2" in self.roles or "year4" in self.roles

    @property
    def has_date(self) -> bool:
        return bool(self.order)

    @property
    def kind(self) -> str:
        if self.order and self.clock:
            return "DateTime"
        return "DateOnly" if self.order else "TimeOnly"

    def as_datetime(self) -> _dt.datetime:
        v = self.value
        if isinstance(v, _dt.datetime):
            return v
        if isinstance(v, _dt.date):
            return _dt.datetime.combine(v, _dt.time())
        return _dt.datetime.combine(_PLACEHOLDER_DAY, v)

    def readings(self) -> tuple:
        """All instants this hypothesis could denote (two for a bare 12h clock)."""
        v = self.as_datetime()
        if self.clock == "h12" and self.designator == "none":
            return (v, v + _TWELVE_HOURS)
        return (v,)


def _sort_key(h: FormatHypothesis):
    return (_ORDER_RANK.get(h.order, 9), _CLOCK_RANK[h.clock], h.roles, h.designator)


def _make(signature, roles, designator, value, tz=""):
    order = "".join(_DATE_ROLES[r] for r in roles if r in _DATE_ROLES)
    clock = "h24" if "hour24" in roles else ("h12" if "hour12" in roles else "")
    return FormatHypothesis(signature, roles, designator, value, tz, order, clock)


def _slot(text: str) -> str:
    return "nnnn" if len(text) == 4 else "n"


def _month_style(word: str, dot: str) -> str:
    full = word.lower() in _FULL
    if word.isupper():
        base = "MONTH" if full else "MON"
    elif word.islower():
        base = "month" if full else "mon"
    else:
        base = "Month" if full else "Mon"
    if full and word.lower() == "may":
        base = base[:3]
    return base + dot


def _designator_style(ap: str) -> str:
    dotted = "." in ap
    upper = ap[0].isupper()
    if dotted:
        return "A.M." if upper else "a.m."
    return "AM" if upper else "am"


def _year(text: str, pivot: int) -> tuple[str, int]:
    if len(text) == 4:
        return "year4", int(text)
    y = int(text)
    return "year2", (2000 + y if y <= pivot else 1900 + y)


def _time_options(m: re.Match, year_first: bool):
    """Yield (signature, roles, designator, time, tz) for the clock part of *m*."""
    h, mi = int(m["H"]), int(m["M"])
    s = int(m["S"]) if m["S"] else 0
    frac = m["F"]
    micro = int(frac.ljust(6, "0")) if frac else 0
    if mi > 59 or s > 59:
        return []
    sig = "HH:MM"
    roles = ["minute"]
    if m["S"]:
        sig += ":SS"
        roles.append("second")
        if frac:
            sig += "." + "f" * len(frac)
    tz = m.groupdict().get("tz") or ""
    tz_sig = ""
    if tz:
        tz_sig = "Z" if tz == "Z" else ("±hh:mm" if ":" in tz else "±hhmm")
    out = []
    if m["ap"]:
        if not 1 <= h <= 12:
            return []
        designator = "pm" if m["ap"][0] in "Pp" else "am"
        hour = h % 12 + (12 if designator == "pm" else 0)
        full_sig = sig + m["apsp"] + _designator_style(m["ap"]) + tz_sig
        out.append((full_sig, ("hour12", *roles), designator, _dt.time(hour, mi, s, micro), tz))
        return out
    if h <= 23:
        out.append((sig + tz_sig, ("hour24", *roles), "none", _dt.time(h, mi, s, micro), tz))
    if not year_first and not tz and 1 <= h <= 12:
        out.append((sig, ("hour12", *roles), "none", _dt.time(h % 12, mi, s, micro), tz))
    return out


def _combine(date_sig, date_roles, day, m, year_first) -> list[FormatHypothesis]:
    if not m["dtsep"]:
        return [_make(date_sig, date_roles, "none", day)]
    out = []
    for tsig, troles, designator, clock, tz in _time_options(m, year_first):
        value = _dt.datetime.combine(day, clock)
        out.append(_make(date_sig + m["dtsep"] + tsig, date_roles + troles, designator, value, tz))
    return out


def _valid_date(y, mo, d):
    try:
        return _dt.date(y, mo, d)
    except ValueError:
        return None


def _numeric3(m: re.Match, pivot: int) -> list[FormatHypothesis]:
    a, b, c, sep = m["a"], m["b"], m["c"], m["s1"]
    sig = f"{_slot(a)}{sep}{_slot(b)}{sep}{_slot(c)}"
    out = []
    if len(a) == 4:
        if len(c) > 2:
            return []
        day = _valid_date(int(a), int(b), int(c))
        if day is not None:
            out += _combine(sig, ("year4", "month", "day"), day, m, True)
        return out
    if len(a) > 2 or len(c) not in (2, 4):
        return []
    yrole, year = _year(c, pivot)
    for roles, mo, d in (
        (("day", "month", yrole), int(b), int(a)),
        (("month", "day", yrole), int(a), int(b)),
    ):
        day = _valid_date(year, mo, d)
        if day is not None:
            out += _combine(sig, roles, day, m, False)
    return out


def _numeric2(m: re.Match) -> list[FormatHypothesis]:
    a, b = m["a"], m["b"]
    sig = f"{_slot(a)}/{_slot(b)}"
    out = []
    for roles, mo, d in ((("day", "month"), int(b), int(a)), (("month", "day"), int(a), int(b))):
        day = _valid_date(2000, mo, d)
        if day is not None:
            out += _combine(sig, roles, day, m, False)
    return out


def _named(m: re.Match, day_first: bool, pivot: int) -> list[FormatHypothesis]:
    month = _MONTHS.get(m["mon"].lower())
    if month is None:
        return []
    mon_sig = _month_style(m["mon"], m["dot"])
    d = int(m["d"])
    if m["y"]:
        yrole, year = _year(m["y"], pivot)
    else:
        yrole, year = None, 2000
    day = _valid_date(year, month, d)
    if day is None:
        return []
    sep = m["s1"]
    if day_first:
        sig = f"{_slot(m['d'])}{sep}{mon_sig}"
        roles = ("day", "month")
        if yrole:
            sig += sep + ("nnnn" if yrole == "year4" else "nn")
            roles += (yrole,)
    else:
        sig = f"{mon_sig}{sep}{_slot(m['d'])}"
        roles = ("month", "day")
        if yrole:
            sig += m["comma"] + " nnnn"
            roles += (yrole,)
    return _combine(sig, roles, day, m, False)


@lru_cache(maxsize=1 << 16)
def _hypothesize(token: str, pivot: int) -> tuple:
    if not _SKELETON.fullmatch(token) or not any(ch.isdigit() for ch in token):
        return ()
    out: list[FormatHypothesis] = []
    m = _TIME_ONLY.fullmatch(token)
    if m:
        for sig, roles, designator, clock, _tz in _time_options(m, False):
            out.append(_make(sig, roles, designator, clock))
        return tuple(sorted(out, key=_sort_key))
    first = token[0]
    if first.isdigit():
        m = _NUM3.fullmatch(token)
        if m:
            out = _numeric3(m, pivot)
        else:
            m = _NUM2.fullmatch(token)
            if m:
                out = _numeric2(m)
            else:
                m = _DMON.fullmatch(token)
                if m:
                    out = _named(m, True, pivot)
    else:
        m = _MOND.fullmatch(token)
        if m:
            out = _named(m, False, pivot)
    return tuple(sorted(out, key=_sort_key))


# Plain ISO tokens are by far the most common temporal values.  Their reading
# is unique (four-digit year first, 24-hour clock), so callers may validate them
# with ``fromisoformat`` and share one hypothesis per digit shape instead of
# parsing every distinct value.  Fractions other than 3 or 6 digits fall back.
ISO_FAST = re.compile(r"\d{4}-\d{2}-\d{2}(?:[ T]\d{2}:\d{2}(?::\d{2}(?:\.(?:\d{3}|\d{6}))?)?)?")
DIGIT_SHAPE = str.maketrans("0123456789", "9999999999")


def iso_kind(token: str) -> str:
    """``DateOnly``/``DateTime`` for a valid ISO-shaped token, ``""`` if invalid."""
    try:
        _dt.datetime.fromisoformat(token)
    except ValueError:
        return ""
    return "DateOnly" if len(token) == 10 else "DateTime"


def hypothesize(raw: str, pivot: int = YEAR_PIVOT) -> tuple:
    """Return every calendar-valid reading of *raw*, in canonical order.

    The result is empty when the token matches no supported skeleton.
    """
    return _hypothesize(raw.strip(), pivot)


_SIG_TOKENS = re.compile(
    r"nnnn|nn|n|MONTH|Month|month|MON\.?|Mon\.?|mon\.?|HH|MM|SS|f+|A\.M\.|a\.m\.|AM|am|±hh:mm|±hhmm|."
)


def render(h: FormatHypothesis) -> str:
    """Re-render a hypothesis under its own signature (numeric slots unpadded)."""
    v = h.as_datetime()
    slots = iter(h.roles)
    parts = []
    for tok in _SIG_TOKENS.findall(h.signature):
        if tok in ("nnnn", "nn", "n") or tok.lower().startswith("mon"):
            role = next(slots)
            if role == "day":
                parts.append(str(v.day))
            elif role == "month":
                if tok.lower().startswith("mon"):
                    name = (_FULL if tok.lower().startswith("month") else _ABBR)[v.month]
                    if tok[0].isupper():
                        name = name.upper() if tok[1].isupper() else name.title()
                    parts.append(name + ("." if tok.endswith(".") else ""))
                else:
                    parts.append(str(v.month))
            elif role == "year4":
                parts.append(f"{v.year:04d}")
            elif role == "year2":
                parts.append(f"{v.year % 100:02d}")
        elif tok == "HH":
            role = next(slots)
            hour = v.hour
            if role == "hour12":
                hour = hour % 12 or 12
            parts.append(str(hour))
        elif tok == "MM":
            next(slots)
            parts.append(f"{v.minute:02d}")
        elif tok == "SS":
            next(slots)
            parts.append(f"{v.second:02d}")
        elif tok.startswith("f"):
            parts.append(f"{v.microsecond:06d}"[: len(tok)])
        elif tok in ("AM", "am", "A.M.", "a.m."):
            word = {"am": "am", "pm": "pm"}[h.designator]
            if tok[0].isupper():
                word = word.upper()
            if "." in tok:
                word = f"{word[0]}.{word[1]}."
            parts.append(word)
        elif tok in ("±hh:mm", "±hhmm", "Z") and h.tz:
            parts.append(h.tz)
        else:
            parts.append(tok)
    return "".join(parts)


@dataclass
class ColumnDateTimeProfile:
    per_row_hypotheses: list
    surviving_roles: frozenset
    by_signature: dict
    signature_counts: dict
    year_present: bool
    has_dates: bool
    designator_present: bool
    max_first_slot: int
    max_second_slot: int
    parseable: int
    skipped: int

    @property
    def signatures(self) -> frozenset:
        return frozenset(self.signature_counts)

    def majority_signature(self) -> str | None:
        if not self.signature_counts:
            return None
        return min(self.signature_counts, key=lambda s: (-self.signature_counts[s], s))


def profile_column(
    hypotheses: Iterable[Sequence[FormatHypothesis]],
    counts: Iterable[int] | None = None,
    keep: bool = True,
) -> ColumnDateTimeProfile:
    """Aggregate per-row hypothesis sets into a column profile.

    *counts* lets callers pass one hypothesis set per distinct value together
    with its multiplicity.  Elimination is a plain intersection, so distinct
    values and rows give the same surviving assignments.
    """
    kept = [] if keep else None
    surviving = None
    by_sig: dict[str, frozenset] = {}
    sig_counts: Counter = Counter()
    year_present = has_dates = designator_present = False
    max1 = max2 = 0
    parseable = skipped = 0
    counts_iter = iter(counts) if counts is not None else None
    for hyps in hypotheses:
        n = next(counts_iter) if counts_iter is not None else 1
        if kept is not None:
            kept.append(hyps)
        if not hyps:
            skipped += n
            continue
        parseable += n
        keys = frozenset(h.key for h in hyps)
        surviving = keys if surviving is None else surviving & keys
        sig = hyps[0].signature
        sig_counts[sig] += n
        by_sig[sig] = by_sig[sig] & keys if sig in by_sig else keys
        first = hyps[0]
        if first.has_date:
            has_dates = True
            year_present = year_present or first.has_year
        designator_present = designator_present or first.designator != "none"
        if first.roles[0] in ("day", "month") and first.signature[0] == "n":
            v = first.as_datetime()
            a, b = (v.day, v.month) if first.roles[0] == "day" else (v.month, v.day)
            max1, max2 = max(max1, a), max(max2, b)
    return ColumnDateTimeProfile(
        per_row_hypotheses=kept if kept is not None else [],
        surviving_roles=surviving if surviving is not None else frozenset(),
        by_signature=by_sig,
        signature_counts=dict(sig_counts),
        year_present=year_present,
        has_dates=has_dates,
        designator_present=designator_present,
        max_first_slot=max1,
        max_second_slot=max2,
        parseable=parseable,
        skipped=skipped,
    )


@dataclass(frozen=True)
class Interpretation:
    preferred: _dt.datetime | None
    readings: frozenset
    reasons: tuple
    midnight: bool

    @property
    def ambiguous(self) -> bool:
        return bool(self.reasons)


def interpret(hyps: Sequence[FormatHypothesis], profile: ColumnDateTimeProfile) -> Interpretation:
    """Resolve one row's hypotheses against the column profile."""
    if not hyps:
        return Interpretation(None, frozenset(), (), False)
    allowed = profile.by_signature.get(hyps[0].signature, frozenset())
    candidates = [h for h in hyps if h.key in allowed] or list(hyps)
    readings = frozenset(r for h in candidates for r in h.readings())
    reasons = []
    if len({h.as_datetime().date() for h in candidates}) > 1:
        reasons.append("day/month order")
    if any(h.clock == "h12" and h.designator == "none" for h in candidates) and len(readings) > 1:
        reasons.append("no AM/PM designator")
    if candidates[0].has_date and not candidates[0].has_year and not profile.year_present:
        reasons.append("year absent")
    midnight = candidates[0].clock != "" and all(r.time() == _dt.time() for r in readings)
    return Interpretation(candidates[0].as_datetime(), readings, tuple(reasons), midnight)
