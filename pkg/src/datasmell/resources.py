"""Loaders for the optional text resources (lexicons, thesaurus, word vectors).

All files are UTF-8; blank lines and lines starting with ``#`` are ignored.
Malformed content raises :class:`ConfigError` so problems surface when the
configuration is loaded rather than halfway through a scan.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .model import DEFAULT_DUMMY_LEXICON, Resources


def _lines(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read resource {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def load_lexicon(path) -> frozenset:
    """One entry per line."""
    return frozenset(line for _, line in _lines(path))


def load_thesaurus(path) -> dict:
    """Lines ``token: syn1, syn2``; links are made symmetric."""
    out: dict[str, set] = {}
    for lineno, line in _lines(path):
        head, sep, tail = line.partition(":")
        syns = [s.strip().casefold() for s in tail.split(",") if s.strip()]
        if not sep or not head.strip() or not syns:
            raise ConfigError(f"{path}:{lineno}: expected 'token: synonym, ...'")
        token = head.strip().casefold()
        for s in syns:
            out.setdefault(token, set()).add(s)
            out.setdefault(s, set()).add(token)
    return {k: frozenset(v) for k, v in out.items()}


def load_abbreviations(path) -> dict:
    """Lines ``short = long``."""
    out: dict[str, set] = {}
    for lineno, line in _lines(path):
        short, sep, long = (x.strip() for x in line.partition("="))
        if not sep or not short or not long:
            raise ConfigError(f"{path}:{lineno}: expected 'short = long'")
        out.setdefault(short, set()).add(long)
    return {k: frozenset(v) for k, v in out.items()}


def load_vectors(path) -> dict:
    """Word vectors: ``token x1 ... xd`` per line, optional ``count d`` header."""
    rows = list(_lines(path))
    if not rows:
        raise ConfigError(f"{path}: empty vector file")
    expected_count = None
    first = rows[0][1].split()
    if len(first) == 2 and all(p.isdigit() for p in first):
        expected_count, dim = int(first[0]), int(first[1])
        rows = rows[1:]
    else:
        dim = len(first) - 1
    if dim < 1:
        raise ConfigError(f"{path}: vectors need at least one component")
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in rows:
        parts = line.split()
        if len(parts) != dim + 1:
            raise ConfigError(f"{path}:{lineno}: expected a token and {dim} components")
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: non-numeric component") from None
        if not np.isfinite(vec).all():
            raise ConfigError(f"{path}:{lineno}: non-finite component")
        vectors.setdefault(parts[0].casefold(), vec)
    if expected_count is not None and expected_count != len(rows):
        raise ConfigError(f"{path}: header announces {expected_count} vectors, found {len(rows)}")
    return vectors


_LOADERS = {
    "dummy_lexicon": load_lexicon,
    "thesaurus": load_thesaurus,
    "vectors": load_vectors,
    "ambiguity_lexicon": load_lexicon,
    "abbreviations": load_abbreviations,
}


def load_resources(paths: Mapping[str, str] | None = None) -> Resources:
    """Build :class:`Resources` from a mapping of resource kind to file path."""
    paths = dict(paths or {})
    unknown = set(paths) - set(_LOADERS)
    if unknown:
        raise ConfigError(f"unknown resource kind(s): {', '.join(sorted(unknown))}")
    kwargs = {kind: _LOADERS[kind](p) for kind, p in paths.items() if p}
    kwargs.setdefault("dummy_lexicon", DEFAULT_DUMMY_LEXICON)
    return Resources(**kwargs)
