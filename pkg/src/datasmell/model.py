"""Smell taxonomy, strength presets, findings and shared resources."""

from __future__ import annotations

import copy
import enum
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

import numpy as np

from .errors import ConfigError


class SmellCategory(str, enum.Enum):
    BELIEVABILITY = "Believability"
    UNDERSTANDABILITY_ENCODING = "UnderstandabilityEncoding"
    UNDERSTANDABILITY_SYNTACTIC = "UnderstandabilitySyntactic"
    CONSISTENCY = "Consistency"


class Granularity(str, enum.Enum):
    INSTANCE = "Instance"
    COLUMN = "Column"


_ID_PATTERN = re.compile(r"[A-Z]+(-[A-Z0-9]+)+")

NUMERIC = frozenset({"Integer", "Float"})
TEMPORAL = frozenset({"DateTime", "DateOnly", "TimeOnly"})
ANY_TYPE = frozenset({"Integer", "Float", "DateTime", "DateOnly", "TimeOnly", "Text"})


@dataclass(frozen=True)
class SmellDescriptor:
    id: str
    name: str
    category: SmellCategory
    granularity: Granularity
    applicable_types: frozenset
    doc: str
    example: str = ""
    requires_resource: str | None = None

    def __post_init__(self):
        if not _ID_PATTERN.fullmatch(self.id):
            raise ConfigError(f"malformed smell id {self.id!r}")


class Registry:
    """Ordered, append-only collection of smell descriptors."""

    def __init__(self, descriptors: Iterable[SmellDescriptor] = ()):
        self._items: dict[str, SmellDescriptor] = {}
        for d in descriptors:
            self.register(d)

    def register(self, descriptor: SmellDescriptor) -> None:
        if descriptor.id in self._items:
            raise ConfigError(f"duplicate smell id {descriptor.id!r}")
        self._items[descriptor.id] = descriptor

    def __getitem__(self, smell_id: str) -> SmellDescriptor:
        try:
            return self._items[smell_id]
        except KeyError:
            raise ConfigError(f"unknown smell id {smell_id!r}") from None

    def __contains__(self, smell_id: object) -> bool:
        return smell_id in self._items

    def __iter__(self) -> Iterator[SmellDescriptor]:
        return iter(self._items.values())

    def __len__(self) -> int:
        return len(self._items)

    def ids(self) -> list[str]:
        return list(self._items)


_B, _UE, _US, _C = (
    SmellCategory.BELIEVABILITY,
    SmellCategory.UNDERSTANDABILITY_ENCODING,
    SmellCategory.UNDERSTANDABILITY_SYNTACTIC,
    SmellCategory.CONSISTENCY,
)
_I, _COL = Granularity.INSTANCE, Granularity.COLUMN
_TEXT = frozenset({"Text"})
_DATES = frozenset({"DateTime", "DateOnly"})

_SHIPPED = (
    SmellDescriptor(
        "B-DUMMY", "Dummy Value", _B, _I, ANY_TYPE,
        "A placeholder stands in for a real value, typically to cover up a "
        "missing entry. Detected via a placeholder lexicon, single-character "
        "repetitions and runs of ascending digits.",
        "an age column holding 999 for people whose age was never recorded",
    ),
    SmellDescriptor(
        "B-SUSP-DT", "Suspect Date/Time Interval", _B, _I, _DATES,
        "Timestamps that are technically valid but implausible: sentinel "
        "dates such as the Unix epoch, dates far in the past or in the future, "
        "or gaps in an ordered series much larger than the typical spacing.",
        "1970-01-01 appearing in a column of order dates from 2019-2021",
    ),
    SmellDescriptor(
        "B-AMBIG-VAL", "Ambiguous Value", _B, _COL, _TEXT,
        "Distinct values that are nearly identical spellings of each other, or "
        "values known to have several meanings, so a reader cannot tell which "
        "entity is meant.",
        "'Bangalore Urban' and 'Bengaluru Urban' in one district column",
        requires_resource="ambiguity_lexicon (optional)",
    ),
    SmellDescriptor(
        "UE-INT-STR", "Integer as String", _UE, _I, ANY_TYPE,
        "An integral number is stored as text, e.g. written between quote "
        "characters or placed in a column that otherwise holds text, so "
        "arithmetic on it fails or silently concatenates.",
        'a quantity field written as "5"',
    ),
    SmellDescriptor(
        "UE-FLT-STR", "Floating Point Number as String", _UE, _I, ANY_TYPE,
        "A decimal or scientific number is stored as text.",
        'a price field written as "3.14"',
    ),
    SmellDescriptor(
        "UE-INT-FLT", "Integer as Floating Point Number", _UE, _I, NUMERIC,
        "An integral quantity carries a zero fractional part (5.0, 12.000), "
        "which usually means a count was routed through a float type.",
        "number of children recorded as 2.0",
    ),
    SmellDescriptor(
        "UE-DATE-DT", "Date as Date/Time", _UE, _I, frozenset({"DateTime"}),
        "A pure date carries a meaningless midnight time suffix, a typical "
        "artefact of an implicit date-to-timestamp conversion.",
        "appointment day stored as 2021-01-01 00:00:00",
    ),
    SmellDescriptor(
        "UE-MIXED", "Intermingled Data Type", _UE, _I, ANY_TYPE,
        "A column dominated by one kind of data (numbers, timestamps or text) "
        "also contains values of another kind, which forces loaders to fall "
        "back to the most general type.",
        "a numeric sensor column with a single 'n.a.' entry among 10,000 readings",
    ),
    SmellDescriptor(
        "US-SMALL", "Small Number", _US, _I, NUMERIC,
        "Numbers below 1 in magnitude (zero excluded). Products of several such "
        "values shrink quickly and are prone to rounding and underflow.",
        "probabilities such as 0.02 multiplied together downstream",
    ),
    SmellDescriptor(
        "US-LONG", "Long Data Value", _US, _I, _TEXT,
        "A value contains a very long run of characters without whitespace, "
        "often concatenated fields, encoded blobs or identifiers pasted into "
        "free text.",
        "a 40-character token such as a hash in a name column",
    ),
    SmellDescriptor(
        "US-CASING", "Casing", _US, _I, _TEXT,
        "Letter casing deviates from the style used by nearly all other values "
        "in the column (lower, UPPER, Title or mixed).",
        "'US' in a country column where every other entry is lower case",
    ),
    SmellDescriptor(
        "US-AMBIG-DT", "Ambiguous Date/Time Format", _US, _I, TEMPORAL,
        "A date or time admits several readings: day and month can be swapped, "
        "a 12-hour clock lacks an AM/PM designator, or the year is omitted.",
        "'08:00' with no way to tell morning from evening",
    ),
    SmellDescriptor(
        "C-CASING", "Casing Inconsistency", _C, _COL, _TEXT,
        "The same value is written with different letter casing across rows.",
        "'us' and 'US' side by side in one column",
    ),
    SmellDescriptor(
        "C-SPACING", "Spacing Inconsistency", _C, _COL, _TEXT,
        "The same value is written with different leading, trailing or "
        "internal whitespace across rows.",
        "'New  York' next to 'New York'",
    ),
    SmellDescriptor(
        "C-ABBREV", "Abbreviation Inconsistency", _C, _COL, _TEXT,
        "A term appears both abbreviated and spelled out, or as an acronym and "
        "in full, within one column.",
        "'Dr. Hill' next to 'Doctor Hill'",
        requires_resource="abbreviation_lexicon (optional)",
    ),
    SmellDescriptor(
        "C-DT-FMT", "Date/Time Format Inconsistency", _C, _COL, TEMPORAL,
        "Timestamps in one column follow more than one format.",
        "'2021-01-01' next to '01/02/2021'",
    ),
    SmellDescriptor(
        "C-SYN", "Synonym", _C, _COL, _TEXT,
        "Different words with the same meaning are used for one concept. "
        "Needs a thesaurus or a word-vector table.",
        "'couch' and 'sofa' in one furniture column",
        requires_resource="thesaurus or vectors",
    ),
)


def register_descriptors() -> Registry:
    """Return a fresh registry holding the shipped smells in catalogue order."""
    return Registry(_SHIPPED)


SHIPPED_IDS = tuple(d.id for d in _SHIPPED)

PRESETS = ("lenient", "default", "strict")

DEFAULT_MISSING_TOKENS = frozenset({"", "NA", "N/A", "na", "null", "NULL", "None", "-"})

DEFAULT_DUMMY_LEXICON = frozenset(
    {"999", "9999", "-1", "n/a", "tbd", "test", "dummy", "unknown",
     "xxx", "foo", "bar", "asdf"}
)

DEFAULT_SENTINEL_DATES = ("1900-01-01", "1970-01-01", "9999-12-31")

# per preset: (lenient, default, strict)
_PRESET_TABLE: dict[str, dict[str, tuple]] = {
    "B-DUMMY": {"repeat_min": (4, 3, 3), "ascending_min": (8, 6, 5)},
    "B-SUSP-DT": {
        "floor_year": (1800, 1900, 1900),
        "slack_years": (5, 1, 0),
        "gap_factor": (20.0, 10.0, 5.0),
        "min_rows": (10, 10, 10),
        "sentinels": (DEFAULT_SENTINEL_DATES,) * 3,
        "reference_date": (None, None, None),
    },
    "B-AMBIG-VAL": {"similarity": (0.95, 0.90, 0.85), "max_distinct": (50_000,) * 3},
    "UE-INT-STR": {"dominance": (0.95, 0.90, 0.80)},
    "UE-FLT-STR": {"dominance": (0.95, 0.90, 0.80)},
    "UE-INT-FLT": {"integral_fraction": (0.99, 0.95, 0.90)},
    "UE-DATE-DT": {"midnight_fraction": (0.99, 0.95, 0.90)},
    "UE-MIXED": {"min_dominance": (0.80, 0.60, 0.50)},
    "US-SMALL": {"threshold": (0.1, 1.0, 1.0)},
    "US-LONG": {"min_run": (50, 30, 20)},
    "US-CASING": {"dominance": (0.95, 0.90, 0.60)},
    "US-AMBIG-DT": {},
    "C-CASING": {},
    "C-SPACING": {},
    "C-ABBREV": {},
    "C-DT-FMT": {},
    "C-SYN": {"cosine": (0.85, 0.75, 0.65)},
}

_DENSITY = {"lenient": 0.20, "default": 0.10, "strict": 0.05}


def _jsonable(value):
    if isinstance(value, (tuple, list, frozenset, set)):
        items = [_jsonable(v) for v in value]
        return sorted(items) if isinstance(value, (set, frozenset)) else items
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


@dataclass(frozen=True)
class StrengthConfig:
    preset: str
    params: Mapping[str, Mapping[str, Any]]
    density_threshold: float = 0.10
    missing_tokens: frozenset = DEFAULT_MISSING_TOKENS
    sample_cap: int = 10

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if not 0.0 <= self.density_threshold <= 1.0:
            raise ConfigError("density_threshold must lie in [0, 1]")
        if int(self.sample_cap) < 1:
            raise ConfigError("sample_cap must be a positive integer")
        for smell_id in self.params:
            if smell_id not in _PRESET_TABLE:
                raise ConfigError(f"unknown detector id {smell_id!r} in params")

    def get(self, smell_id: str) -> dict:
        return dict(self.params.get(smell_id, {}))

    def with_overrides(
        self,
        params: Mapping[str, Mapping[str, Any]] | None = None,
        **fields,
    ) -> "StrengthConfig":
        merged = copy.deepcopy({k: dict(v) for k, v in self.params.items()})
        for smell_id, values in (params or {}).items():
            if smell_id not in merged:
                raise ConfigError(f"unknown detector id {smell_id!r} in params")
            for name, value in values.items():
                if name not in merged[smell_id]:
                    raise ConfigError(f"{smell_id} has no parameter {name!r}")
                merged[smell_id][name] = value
        fields = {k: v for k, v in fields.items() if v is not None}
        if "missing_tokens" in fields:
            fields["missing_tokens"] = frozenset(fields["missing_tokens"])
        base = dict(
            preset=self.preset,
            density_threshold=self.density_threshold,
            missing_tokens=self.missing_tokens,
            sample_cap=self.sample_cap,
        )
        base.update(fields)
        return StrengthConfig(params=merged, **base)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "params": _jsonable(self.params),
            "density_threshold": self.density_threshold,
            "missing_tokens": sorted(self.missing_tokens),
            "sample_cap": int(self.sample_cap),
        }


def resolve_preset(preset_name: str) -> StrengthConfig:
    """Build the fully populated configuration for a named preset."""
    if preset_name not in PRESETS:
        raise ConfigError(
            f"unknown preset {preset_name!r}; expected one of {', '.join(PRESETS)}"
        )
    slot = PRESETS.index(preset_name)
    params = {
        smell_id: {name: values[slot] for name, values in table.items()}
        for smell_id, table in _PRESET_TABLE.items()
    }
    return StrengthConfig(
        preset=preset_name, params=params, density_threshold=_DENSITY[preset_name]
    )


@dataclass(frozen=True)
class Finding:
    smell_id: str
    column_index: int
    granularity: Granularity
    flagged_count: int
    samples: tuple = ()
    evidence: str = ""
    params_used: Mapping[str, Any] = field(default_factory=dict)
    # row indexes of every flagged instance; kept in memory only
    rows: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.flagged_count < len(self.samples):
            raise ValueError("flagged_count smaller than the number of samples")

    def to_dict(self) -> dict:
        return {
            "smell_id": self.smell_id,
            "column_index": self.column_index,
            "granularity": self.granularity.value,
            "flagged_count": int(self.flagged_count),
            "samples": [[int(r), v] for r, v in self.samples],
            "evidence": self.evidence,
            "params_used": _jsonable(self.params_used),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Finding":
        return cls(
            smell_id=data["smell_id"],
            column_index=int(data["column_index"]),
            granularity=Granularity(data["granularity"]),
            flagged_count=int(data["flagged_count"]),
            samples=tuple((int(r), v) for r, v in data["samples"]),
            evidence=data["evidence"],
            params_used=dict(data["params_used"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class Resources:
    dummy_lexicon: frozenset = DEFAULT_DUMMY_LEXICON
    thesaurus: Mapping[str, frozenset] | None = None
    vectors: Mapping[str, np.ndarray] | None = None
    ambiguity_lexicon: frozenset = frozenset()
    abbreviations: Mapping[str, frozenset] | None = None

    def __post_init__(self):
        if self.vectors:
            dims = {len(v) for v in self.vectors.values()}
            if len(dims) != 1 or 0 in dims:
                raise ConfigError("all vectors must share one positive dimension")
            if any(not t for t in self.vectors):
                raise ConfigError("vector tokens must be non-empty")

    @property
    def has_synonym_source(self) -> bool:
        return bool(self.thesaurus) or bool(self.vectors)

    def fingerprint(self) -> dict:
        """Small, order-independent summary used in the config digest."""
        import hashlib

        def digest(obj) -> str:
            raw = json.dumps(_jsonable(obj), sort_keys=True).encode()
            return hashlib.sha256(raw).hexdigest()[:16]

        vectors = None
        if self.vectors:
            vectors = {k: [round(float(x), 9) for x in v] for k, v in self.vectors.items()}
        return {
            "dummy_lexicon": digest(self.dummy_lexicon),
            "thesaurus": digest(self.thesaurus or {}),
            "vectors": digest(vectors or {}),
            "ambiguity_lexicon": digest(self.ambiguity_lexicon),
            "abbreviations": digest(self.abbreviations or {}),
        }
