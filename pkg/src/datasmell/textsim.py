"""Edit-distance similarity and candidate-pair generation.

``similar_pairs`` finds every pair whose normalized Damerau-Levenshtein
similarity reaches a threshold without comparing all pairs.  It combines a
length band with a partition filter: if two strings are within ``k`` edits,
then splitting one of them into ``2k + 1`` segments leaves at least one
segment intact and present in the other string, shifted by at most ``2k``
positions (a transposition costs two plain edits).  The filter therefore
never drops a qualifying pair; ``similar_pairs_exhaustive`` is the all-pairs
reference it is tested against.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

_EPS = 1e-9


def damerau_levenshtein(a: str, b: str) -> int:
    """Unrestricted Damerau-Levenshtein distance (Lowrance-Wagner)."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if not la or not lb:
        return la + lb
    inf = la + lb
    d = [[0] * (lb + 2) for _ in range(la + 2)]
    d[0][0] = inf
    for i in range(la + 1):
        d[i + 1][0] = inf
        d[i + 1][1] = i
    for j in range(lb + 1):
        d[0][j + 1] = inf
        d[1][j + 1] = j
    last_row: dict[str, int] = {}
    for i in range(1, la + 1):
        ai = a[i - 1]
        last_col = 0
        row, prev = d[i + 1], d[i]
        for j in range(1, lb + 1):
            bj = b[j - 1]
            i1 = last_row.get(bj, 0)
            j1 = last_col
            if ai == bj:
                cost = 0
                last_col = j
            else:
                cost = 1
            row[j + 1] = min(
                prev[j] + cost,
                row[j] + 1,
                prev[j + 1] + 1,
                d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1),
            )
        last_row[ai] = i
    return d[la + 1][lb + 1]


def similarity(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - damerau_levenshtein(a, b) / longest


def _max_edits(longest: int, threshold: float) -> int:
    return int(math.floor((1.0 - threshold) * longest + _EPS))


def _qualifies(a: str, b: str, threshold: float) -> bool:
    longest = max(len(a), len(b))
    k = _max_edits(longest, threshold)
    if abs(len(a) - len(b)) > k:
        return False
    return damerau_levenshtein(a, b) <= k


def similar_pairs_exhaustive(strings: Sequence[str], threshold: float) -> set:
    """All index pairs ``(i, j)``, ``i < j``, with similarity >= threshold."""
    return {
        (i, j)
        for i, j in combinations(range(len(strings)), 2)
        if _qualifies(strings[i], strings[j], threshold)
    }


def _segments(length: int, parts: int) -> list:
    q, r = divmod(length, parts)
    out, start = [], 0
    for i in range(parts):
        size = q + (1 if i < r else 0)
        out.append((start, size))
        start += size
    return out


def similar_pairs(strings: Sequence[str], threshold: float) -> set:
    """Same result as :func:`similar_pairs_exhaustive`, via lossless blocking."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    by_len: dict[int, list[int]] = {}
    for i, s in enumerate(strings):
        by_len.setdefault(len(s), []).append(i)

    layout: dict[int, list | None] = {}
    index: dict[tuple, list[int]] = {}
    for length, ids in by_len.items():
        kmax = _max_edits(int(math.floor(length / threshold + _EPS)), threshold)
        parts = 2 * kmax + 1
        if length < parts:
            layout[length] = None  # too short to segment: compare with everything in band
            continue
        segs = _segments(length, parts)
        layout[length] = segs
        for i in ids:
            s = strings[i]
            for n, (start, size) in enumerate(segs):
                index.setdefault((length, n, s[start:start + size]), []).append(i)

    hist = _histograms(strings)
    found: set = set()
    lengths = sorted(by_len)
    for j, b in enumerate(strings):
        lb = len(b)
        for la in lengths:
            k = _max_edits(max(la, lb), threshold)
            if abs(la - lb) > k:
                continue
            segs = layout[la]
            if segs is None:
                cands = by_len[la]
            else:
                shift = 2 * k
                hits: set = set()
                for n, (start, size) in enumerate(segs):
                    lo = max(0, start - shift)
                    hi = min(lb - size, start + shift)
                    for p in range(lo, hi + 1):
                        bucket = index.get((la, n, b[p:p + size]))
                        if bucket:
                            hits.update(bucket)
                cands = hits
            cands = [i for i in cands if i < j]
            if len(cands) > 16:
                # edit distance >= half the L1 distance of character counts
                arr = np.fromiter(cands, dtype=np.int64, count=len(cands))
                l1 = np.abs(hist[arr] - hist[j]).sum(axis=1)
                cands = arr[l1 <= 2 * k].tolist()
            for i in cands:
                pair = (i, j)
                if pair not in found and _qualifies(strings[i], b, threshold):
                    found.add(pair)
    return found


def _histograms(strings: Sequence[str]) -> np.ndarray:
    alphabet = {ch: n for n, ch in enumerate(sorted(set().union(*map(set, strings))))} if strings else {}
    hist = np.zeros((len(strings), max(len(alphabet), 1)), dtype=np.int32)
    for i, s in enumerate(strings):
        for ch in s:
            hist[i, alphabet[ch]] += 1
    return hist


def cosine_pairs(tokens: Sequence[str], vectors: Mapping[str, np.ndarray], threshold: float,
                 chunk: int = 2048) -> set:
    """Index pairs of *tokens* (both present in *vectors*) with cosine >= threshold."""
    ids = [i for i, t in enumerate(tokens) if t in vectors]
    if len(ids) < 2:
        return set()
    mat = np.vstack([np.asarray(vectors[tokens[i]], dtype=np.float64) for i in ids])
    norms = np.linalg.norm(mat, axis=1)
    norms[norms == 0] = 1.0
    mat = mat / norms[:, None]
    out = set()
    for lo in range(0, len(ids), chunk):
        block = mat[lo:lo + chunk] @ mat.T
        rows, cols = np.nonzero(block >= threshold - _EPS)
        for r, c in zip(rows.tolist(), cols.tolist()):
            a, b = lo + r, c
            if a < b:
                out.add((ids[a], ids[b]))
    return out


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    return float(a @ b / denom) if denom else 0.0
