"""Delimited-file reading, per-value typing and column type inference.

Columns are stored dictionary-encoded: the distinct raw strings of a column
plus one integer code per row.  Typing, hypothesis parsing and most
detectors work on the distinct values and broadcast back to rows through the
codes, which keeps a million-row scan within a small memory budget.
"""

from __future__ import annotations

import codecs
import enum
import json
import re
import threading
from array import array
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .dates import ISO_FAST, hypothesize, iso_kind
from .errors import FormatError
from .model import DEFAULT_MISSING_TOKENS



class BaseType(enum.IntEnum):
    # numeric order doubles as the "width" used for tie-breaking
    MISSING = 0
    INTEGER = 1
    FLOAT = 2
    DATEONLY = 3
    TIMEONLY = 4
    DATETIME = 5
    TEXT = 6

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    BaseType.MISSING: "Missing",
    BaseType.INTEGER: "Integer",
    BaseType.FLOAT: "Float",
    BaseType.DATEONLY: "DateOnly",
    BaseType.TIMEONLY: "TimeOnly",
    BaseType.DATETIME: "DateTime",
    BaseType.TEXT: "Text",
}
_BY_LABEL = {v: k for k, v in _LABELS.items()}

INT_RE = re.compile(r"[+-]?[0-9]+")
FLOAT_RE = re.compile(r"[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?")


def strip_value(raw: str) -> str:
    token = raw.strip()
    if len(token) >= 2 and token[0] == '"' and token[-1] == '"':
        token = token[1:-1].strip()
    return token


# plain ints: enum attribute access is slow on 3.10 and these run per value
_KIND_CODE = {"DateTime": 5, "DateOnly": 3, "TimeOnly": 4, "": 6}


def _classify(raw: str, missing_tokens) -> int:
    token = strip_value(raw)
    if not token or token in missing_tokens:
        return 0
    if INT_RE.fullmatch(token):
        return 1
    if FLOAT_RE.fullmatch(token):
        return 2
    if ISO_FAST.fullmatch(token):
        return _KIND_CODE[iso_kind(token)]
    hyps = hypothesize(token)
    return _KIND_CODE[hyps[0].kind] if hyps else 6


def classify_value(raw: str, missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS) -> BaseType:
    return BaseType(_classify(raw, missing_tokens))


def widen(types: Iterable[BaseType]) -> BaseType:
    present = set(types) - {BaseType.MISSING}
    if not present:
        return BaseType.MISSING
    if len(present) == 1:
        return present.pop()
    if present <= {BaseType.INTEGER, BaseType.FLOAT}:
        return BaseType.FLOAT
    if present <= {BaseType.DATEONLY, BaseType.DATETIME}:
        return BaseType.DATETIME
    return BaseType.TEXT


def infer_column_types(tags: Sequence[BaseType], counts: Sequence[int] | None = None):
    """Return ``(strict_type, (dominant_type, fraction))`` for a column.

    *counts* optionally gives the multiplicity of each tag, so the function
    accepts both per-row tags and distinct-value tags.  Ties for the dominant
    type go to the wider type.
    """
    totals = np.zeros(len(BaseType), dtype=np.int64)
    tag_arr = np.asarray(tags, dtype=np.int64)
    if counts is None:
        np.add.at(totals, tag_arr, 1)
    else:
        np.add.at(totals, tag_arr, np.asarray(counts, dtype=np.int64))
    totals[BaseType.MISSING] = 0
    non_missing = int(totals.sum())
    if non_missing == 0:
        return BaseType.MISSING, (BaseType.MISSING, 1.0)
    strict = widen(BaseType(i) for i in np.flatnonzero(totals))
    best = max(range(len(totals)), key=lambda i: (totals[i], i))
    return strict, (BaseType(best), totals[best] / non_missing)


class Dialect(NamedTuple):
    delimiter: str = ","
    quotechar: str = '"'
    header: bool = True


@dataclass(eq=False)
class ColumnData:
    name: str
    index: int
    values: list
    codes: np.ndarray
    quoted: np.ndarray | None = None
    missing_tokens: frozenset = DEFAULT_MISSING_TOKENS
    value_tags: np.ndarray = field(init=False, repr=False)
    counts: np.ndarray = field(init=False, repr=False)
    strict_type: BaseType = field(init=False)
    dominant: tuple = field(init=False)
    non_missing_count: int = field(init=False)

    def __post_init__(self):
        self.codes = np.asarray(self.codes, dtype=np.int32)
        missing = self.missing_tokens
        self.value_tags = np.fromiter(
            (_classify(v, missing) for v in self.values),
            dtype=np.int8,
            count=len(self.values),
        )
        self.counts = np.bincount(self.codes, minlength=len(self.values)).astype(np.int64)
        self.strict_type, self.dominant = infer_column_types(self.value_tags, self.counts)
        self.non_missing_count = int(self.counts[self.value_tags != BaseType.MISSING].sum())

    @property
    def row_count(self) -> int:
        return len(self.codes)

    @property
    def raw(self) -> list:
        vals = self.values
        return [vals[c] for c in self.codes.tolist()]

    @property
    def tags(self) -> np.ndarray:
        return self.value_tags[self.codes]

    def dominant_is(self, *types: BaseType) -> bool:
        return self.dominant[0] in types

    def present(self) -> np.ndarray:
        """Codes of distinct values that occur and are not missing."""
        return np.flatnonzero((self.counts > 0) & (self.value_tags != 0))

    def present_of(self, *types: BaseType) -> np.ndarray:
        """Codes of occurring distinct values whose tag is one of *types*."""
        wanted = np.isin(self.value_tags, np.array([int(t) for t in types], dtype=np.int8))
        return np.flatnonzero((self.counts > 0) & wanted)

    def rows_for(self, code_mask: np.ndarray) -> np.ndarray:
        return np.flatnonzero(code_mask[self.codes])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "index": self.index,
            "raw": self.raw,
            "quoted": None if self.quoted is None else self.quoted.astype(int).tolist(),
            "tags": [_LABELS[BaseType(t)] for t in self.tags.tolist()],
            "strict_type": self.strict_type.label,
            "dominant": [self.dominant[0].label, round(float(self.dominant[1]), 12)],
            "non_missing_count": self.non_missing_count,
        }


@dataclass(eq=False)
class Table:
    path: str
    columns: list
    row_count: int
    dialect: Dialect = Dialect()
    ragged_rows: int = 0
    replaced_chars: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "path": self.path,
                "row_count": self.row_count,
                "dialect": list(self.dialect),
                "ragged_rows": self.ragged_rows,
                "replaced_chars": self.replaced_chars,
                "columns": [c.to_dict() for c in self.columns],
            },
            sort_keys=True,
        )


_replacements = threading.local()


def _count_and_replace(err: UnicodeDecodeError):
    _replacements.count = getattr(_replacements, "count", 0) + 1
    return "\ufffd", err.end


codecs.register_error("datasmell.replace", _count_and_replace)


def _records(lines: Iterator[str], delim: str, quote: str):
    """Yield ``(fields, quoted_indexes)`` per record; blank lines are skipped.

    Lines without a quote character take a plain ``split`` fast path; quoted
    lines run through a small RFC 4180 state machine that may pull further
    lines for embedded newlines.
    """
    for line in lines:
        if line.endswith("\n"):
            line = line[:-1]
        if not line:
            continue
        if quote not in line:
            yield line.split(delim), None
            continue
        fields: list[str] = []
        quoted: list[int] = []
        buf: list[str] = []
        i, n = 0, len(line)
        in_quotes = False
        field_start = True
        while True:
            if i >= n:
                if in_quotes:
                    nxt = next(lines, None)
                    if nxt is not None:
                        line = nxt[:-1] if nxt.endswith("\n") else nxt
                        i, n = 0, len(line)
                        buf.append("\n")
                        continue
                fields.append("".join(buf))
                break
            ch = line[i]
            if in_quotes:
                if ch == quote:
                    if i + 1 < n and line[i + 1] == quote:
                        buf.append(quote)
                        i += 2
                        continue
                    in_quotes = False
                else:
                    buf.append(ch)
            elif ch == delim:
                fields.append("".join(buf))
                buf = []
                field_start = True
                i += 1
                continue
            elif ch == quote and field_start:
                in_quotes = True
                quoted.append(len(fields))
            else:
                buf.append(ch)
            field_start = False
            i += 1
        yield fields, quoted


_CHUNK = 1 << 16


def _assemble(records, names, dialect, path, missing_tokens) -> Table:
    ncols = len(names)
    if ncols == 0:
        raise FormatError(f"{path}: no columns")
    maps = [dict() for _ in range(ncols)]
    codes = [array("i") for _ in range(ncols)]
    quoted_at: list[tuple[int, int]] = []
    ragged = 0
    row = 0
    pad = [""] * ncols
    chunk: list = []

    def flush():
        # column-wise dictionary encoding; setdefault hands out insertion-order codes
        for j, colvals in enumerate(zip(*chunk)):
            m = maps[j]
            sd = m.setdefault
            codes[j].extend([sd(v, len(m)) for v in colvals])
        chunk.clear()

    for fields, quoted in records:
        if len(fields) != ncols:
            ragged += 1
            fields = (fields + pad)[:ncols]
        chunk.append(fields)
        if quoted:
            quoted_at.extend((row, j) for j in quoted if j < ncols)
        row += 1
        if len(chunk) >= _CHUNK:
            flush()
    if chunk:
        flush()
    values = [list(m) for m in maps]

    quoted_arrays: list[np.ndarray | None] = [None] * ncols
    if quoted_at:
        mask = np.zeros((ncols, row), dtype=bool)
        for r, j in quoted_at:
            mask[j, r] = True
        # a writer that quotes every field carries no type information
        informative = False
        for j in range(ncols):
            filled = np.array([bool(v.strip()) for v in values[j]], dtype=bool)
            nonempty = filled[np.frombuffer(codes[j], dtype=np.int32)]
            if (nonempty & ~mask[j]).any():
                informative = True
                break
        if informative:
            quoted_arrays = [mask[j] if mask[j].any() else None for j in range(ncols)]

    columns = [
        ColumnData(
            name=names[j],
            index=j,
            values=values[j],
            codes=np.frombuffer(codes[j], dtype=np.int32).copy() if row else np.zeros(0, np.int32),
            quoted=quoted_arrays[j],
            missing_tokens=frozenset(missing_tokens),
        )
        for j in range(ncols)
    ]
    return Table(path=path, columns=columns, row_count=row, dialect=dialect, ragged_rows=ragged)


def load_table(
    path,
    delimiter: str = ",",
    quotechar: str = '"',
    header: bool = True,
    missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS,
) -> Table:
    """Read a delimited file into a :class:`Table`.

    Undecodable bytes are replaced and counted; short rows are padded with
    empty (missing) fields and long rows truncated, both counted in
    ``ragged_rows``.  Raises :class:`OSError` for unreadable files and
    :class:`FormatError` when no column can be found.
    """
    if len(delimiter) != 1 or len(quotechar) != 1:
        raise FormatError("delimiter and quote must be single characters")
    dialect = Dialect(delimiter, quotechar, header)
    _replacements.count = 0
    with open(path, encoding="utf-8", errors="datasmell.replace", newline=None) as fh:
        lines = iter(fh)
        records = _records(lines, delimiter, quotechar)
        first = next(records, None)
        if first is None:
            raise FormatError(f"{path}: empty input, no columns")
        fields, quoted = first
        if fields and fields[0].startswith("\ufeff"):
            fields[0] = fields[0][1:]
        if header:
            names = [f.strip() or f"col_{j}" for j, f in enumerate(fields)]
            body = records
        else:
            names = [f"col_{j}" for j in range(len(fields))]
            body = _chain(first, records)
        table = _assemble(body, names, dialect, str(path), missing_tokens)
    table.replaced_chars = _replacements.count
    return table


def _chain(first, rest):
    yield first
    yield from rest


def table_from_rows(
    rows: Iterable[Sequence[str]],
    names: Sequence[str] | None = None,
    quoted: Sequence[Sequence[bool]] | None = None,
    missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS,
    path: str = "<memory>",
) -> Table:
    """Build a table from in-memory rows of strings (column names optional)."""
    rows = [list(r) for r in rows]
    if names is None:
        width = max((len(r) for r in rows), default=0)
        names = [f"col_{j}" for j in range(width)]
    records = []
    for i, r in enumerate(rows):
        q = None
        if quoted is not None:
            q = [j for j, flag in enumerate(quoted[i]) if flag] or None
        records.append((r, q))
    return _assemble(iter(records), list(names), Dialect(), path, missing_tokens)


def column_from_values(values: Sequence[str], name: str = "col_0", quoted=None,
                       missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS) -> ColumnData:
    """Convenience constructor for a single column."""
    rows = [[v] for v in values]
    q = None if quoted is None else [[flag] for flag in quoted]
    return table_from_rows(rows, [name], q, missing_tokens).columns[0]


def type_from_label(label: str) -> BaseType:
    return _BY_LABEL[label]
