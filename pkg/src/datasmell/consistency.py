"""Column-granularity consistency detectors built on one canonicalization cascade.

The distinct values of a column are merged stage by stage:

1. case-fold      ``"US"`` / ``"us"``
2. space-fold     ``" Berlin"`` / ``"Berlin"``, ``"New  York"`` / ``"New York"``
3. abbreviation   ``"Dr. Hill"`` / ``"Doctor Hill"``, ``"UN"`` / ``"United Nations"``
4. near-duplicate edit similarity on the folded forms
5. synonym        thesaurus links or word-vector cosine

Each stage unions the units left by the previous one, so a pair of values is
attributed to the first stage that unifies it and never reported twice.  A
stage group holding two or more units becomes one finding; its flagged count
is every occurrence outside the majority unit (ties go to the
lexicographically smaller form).
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping

import numpy as np

from .ingest import BaseType, ColumnData
from .instance import make_finding
from .model import Finding, Granularity, Resources, StrengthConfig
from .textsim import cosine, cosine_pairs, similar_pairs, similar_pairs_exhaustive
from .views import DateView, TEMPORAL_TYPES

STAGES = ("case-fold", "space-fold", "abbreviation", "near-duplicate", "synonym")
STAGE_SMELL = {
    "case-fold": "C-CASING",
    "space-fold": "C-SPACING",
    "abbreviation": "C-ABBREV",
    "near-duplicate": "B-AMBIG-VAL",
    "synonym": "C-SYN",
}
STOPWORDS = frozenset({"of", "the", "and", "for", "&"})
_DIGITS = re.compile(r"\d+")


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for i in range(len(self.parent)):
            out[self.find(i)].append(i)
        return list(out.values())


@dataclass
class VariantGroup:
    """Distinct raw forms unified at one cascade stage.

    ``units`` holds the groups left by the previous stage (lists of raw forms);
    the majority unit is the canonical one.
    """

    canonical: str
    variants: list
    relation: str
    units: list = field(default_factory=list, repr=False)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.variants)

    def key(self) -> tuple:
        return (self.relation, tuple(sorted(v for v, _ in self.variants)))


@dataclass
class CascadeResult:
    groups: list
    warnings: list
    units: list  # final units after the last stage that ran


def fold_case(value: str) -> str:
    return value.casefold()


def fold_space(value: str) -> str:
    return " ".join(value.casefold().split())


# abbreviation relation ------------------------------------------------------

def _letters(token: str) -> str:
    return "".join(ch for ch in token if ch.isalnum())


def _is_subsequence(short: str, long: str) -> bool:
    it = iter(long)
    return all(ch in it for ch in short)


def dotted_abbreviation(short: str, long: str) -> bool:
    """``short`` ends with a dot and abbreviates ``long`` ("dr." / "doctor")."""
    if not short.endswith(".") or short == long:
        return False
    a, b = _letters(short), _letters(long)
    if not a or not b or a[0] != b[0] or len(a) > len(b):
        return False
    return _is_subsequence(a, b)


def initials(tokens, drop_stopwords: bool = False) -> str:
    return "".join(
        _letters(t)[:1] for t in tokens if _letters(t) and not (drop_stopwords and t in STOPWORDS)
    )


def acronym_of(raw: str) -> str | None:
    """Letters of a single-token acronym ("UN", "U.N."), else None.

    The raw form must be written in capitals so ordinary short words such as
    "it" or "us" are not read as acronyms.
    """
    parts = raw.split()
    if len(parts) != 1:
        return None
    letters = _letters(parts[0])
    if len(letters) < 2 or not letters.isalpha() or letters != letters.upper():
        return None
    return letters.casefold()


class AbbreviationIndex:
    """Token canonicalization from a user lexicon of ``short = long`` links."""

    def __init__(self, lexicon: Mapping[str, frozenset] | None = None):
        self.token_group: dict[str, int] = {}
        self.value_group: dict[str, int] = {}
        if not lexicon:
            return
        pairs = []
        for short, longs in sorted(lexicon.items()):
            for long in sorted(longs):
                pairs.append((fold_space(short), fold_space(long)))
        names = sorted({x for p in pairs for x in p})
        pos = {x: i for i, x in enumerate(names)}
        uf = _UnionFind(len(names))
        for a, b in pairs:
            uf.union(pos[a], pos[b])
        for x in names:
            gid = uf.find(pos[x])
            self.value_group[x] = gid
            if " " not in x:
                self.token_group[x] = gid

    def canon(self, token: str):
        gid = self.token_group.get(token)
        return token if gid is None else ("#", gid)

    def tokens_related(self, a: str, b: str) -> bool:
        if a == b:
            return True
        if a in self.token_group and self.token_group.get(b, -1) == self.token_group[a]:
            return True
        return dotted_abbreviation(a, b) or dotted_abbreviation(b, a)

    def related(self, a_key: str, a_raw: str, b_key: str, b_raw: str) -> bool:
        """Whole-value abbreviation relation between two folded values."""
        ga = self.value_group.get(a_key)
        if ga is not None and ga == self.value_group.get(b_key):
            return True
        ta, tb = a_key.split(" "), b_key.split(" ")
        if len(ta) == len(tb) and all(self.tokens_related(x, y) for x, y in zip(ta, tb)):
            return True
        for acr_raw, other in ((a_raw, tb), (b_raw, ta)):
            acr = acronym_of(acr_raw)
            if acr and len(other) >= 2 and acr in (initials(other), initials(other, True)):
                return True
        return False

    def signatures(self, key: str) -> list:
        """Blocking keys: related values share at least one signature."""
        options = []
        for t in key.split(" "):
            first = ("@", _letters(t)[:1])
            gid = self.token_group.get(t)
            options.append((first,) if gid is None else (first, ("#", gid)))
        return [tuple(p) for p in product(*options)]


def _abbreviation_pairs(keys, raws, index: AbbreviationIndex, exhaustive: bool) -> set:
    """Pairs (i, j) of folded values related by the abbreviation rules."""
    n = len(keys)
    if exhaustive:
        return {
            (i, j) for i, j in combinations(range(n), 2)
            if index.related(keys[i], raws[i], keys[j], raws[j])
        }
    found = set()

    def check(i, j):
        if i != j:
            pair = (i, j) if i < j else (j, i)
            if pair not in found and index.related(keys[pair[0]], raws[pair[0]],
                                                   keys[pair[1]], raws[pair[1]]):
                found.add(pair)

    # whole-value lexicon links and token-canonical equality
    by_canon: dict = defaultdict(list)
    for i, k in enumerate(keys):
        gid = index.value_group.get(k)
        if gid is not None:
            by_canon[("v", gid)].append(i)
        if index.token_group:
            by_canon[("t",) + tuple(index.canon(t) for t in k.split(" "))].append(i)
    for members in by_canon.values():
        for i, j in combinations(members, 2):
            check(i, j)

    # dotted tokens: compare only against values sharing a blocking signature
    blocks: dict = defaultdict(list)
    dotted_in: dict = defaultdict(list)
    for i, k in enumerate(keys):
        has_dot = "." in k
        for sig in index.signatures(k):
            blocks[sig].append(i)
            if has_dot:
                dotted_in[sig].append(i)
    for sig, dotted in dotted_in.items():
        members = blocks[sig]
        for i in dotted:
            for j in members:
                check(i, j)

    # acronyms against the initials of multi-token values
    by_initials: dict = defaultdict(list)
    for i, k in enumerate(keys):
        tokens = k.split(" ")
        if len(tokens) >= 2:
            for ini in {initials(tokens), initials(tokens, True)}:
                by_initials[ini].append(i)
    for i, raw in enumerate(raws):
        acr = acronym_of(raw)
        if acr:
            for j in by_initials.get(acr, ()):
                check(i, j)
    return found


# near-duplicate and synonym relations --------------------------------------

def _digits_agree(a: str, b: str) -> bool:
    # "District 12" and "District 13" name different things
    return _DIGITS.findall(a) == _DIGITS.findall(b)


def near_duplicate_pairs(keys, threshold: float, exhaustive: bool = False) -> set:
    if exhaustive:
        return {(i, j) for i, j in similar_pairs_exhaustive(keys, threshold)
                if _digits_agree(keys[i], keys[j])}
    # only values with identical digit runs can qualify, so search each run separately
    parts: dict[tuple, list[int]] = defaultdict(list)
    for i, k in enumerate(keys):
        parts[tuple(_DIGITS.findall(k))].append(i)
    found = set()
    for ids in parts.values():
        if len(ids) < 2:
            continue
        for a, b in similar_pairs([keys[i] for i in ids], threshold):
            i, j = ids[a], ids[b]
            found.add((i, j) if i < j else (j, i))
    return found


def _thesaurus_index(thesaurus) -> dict:
    links: dict[str, set] = defaultdict(set)
    for token, syns in (thesaurus or {}).items():
        a = fold_space(token)
        for s in syns:
            b = fold_space(s)
            if a != b:
                links[a].add(b)
                links[b].add(a)
    return links


def synonym_pairs(keys, res: Resources, cos: float, exhaustive: bool = False) -> set:
    """Pairs of single-token values linked by the thesaurus or vector cosine."""
    single = [i for i, k in enumerate(keys) if k and " " not in k]
    links = _thesaurus_index(res.thesaurus)
    vectors = res.vectors or {}
    found = set()
    if exhaustive:
        for i, j in combinations(single, 2):
            a, b = keys[i], keys[j]
            if b in links.get(a, ()):
                found.add((i, j))
            elif a in vectors and b in vectors and cosine(vectors[a], vectors[b]) >= cos - 1e-9:
                found.add((i, j))
        return found
    pos = {keys[i]: i for i in single}
    for i in single:
        for other in links.get(keys[i], ()):
            j = pos.get(other)
            if j is not None and j != i:
                found.add((min(i, j), max(i, j)))
    if vectors:
        tokens = [keys[i] for i in single]
        for a, b in cosine_pairs(tokens, vectors, cos):
            i, j = single[a], single[b]
            found.add((min(i, j), max(i, j)))
    return found


# cascade --------------------------------------------------------------------

def _majority(forms, counts) -> int:
    """Index of the form with most occurrences; ties go to the smaller form."""
    return min(range(len(forms)), key=lambda i: (-counts[i], forms[i]))


def run_cascade(
    forms,
    counts,
    cfg: StrengthConfig,
    res: Resources | None = None,
    exhaustive: bool = False,
) -> CascadeResult:
    """Run all stages over distinct raw *forms* with occurrence *counts*.

    ``exhaustive`` replaces every blocked pair search with an all-pairs
    comparison; the result must be identical, which the test-suite checks.
    """
    res = res or Resources()
    counts = [int(c) for c in counts]
    warnings: list[str] = []
    groups: list[VariantGroup] = []
    # a unit is a sorted list of form indexes
    units = [[i] for i in sorted(range(len(forms)), key=lambda i: forms[i])]

    def unit_total(u):
        return sum(counts[i] for i in u)

    def unit_rep(u):
        return u[_majority([forms[i] for i in u], [counts[i] for i in u])]

    def merge(stage, pairs):
        nonlocal units
        uf = _UnionFind(len(units))
        for a, b in pairs:
            uf.union(a, b)
        merged = []
        for members in uf.groups():
            new_unit = sorted((i for m in members for i in units[m]), key=lambda i: forms[i])
            if len(members) >= 2:
                parts = sorted((units[m] for m in members), key=lambda u: forms[u[0]])
                reps = [unit_rep(u) for u in parts]
                best = _majority([forms[r] for r in reps], [unit_total(u) for u in parts])
                groups.append(VariantGroup(
                    canonical=forms[reps[best]],
                    variants=[(forms[i], counts[i]) for i in new_unit],
                    relation=stage,
                    units=[[forms[i] for i in u] for u in parts],
                ))
            merged.append(new_unit)
        units = sorted(merged, key=lambda u: forms[u[0]])

    def by_key(fn):
        seen: dict = {}
        pairs = []
        for n, u in enumerate(units):
            for i in u:
                k = fn(forms[i])
                if k in seen:
                    pairs.append((seen[k], n))
                else:
                    seen[k] = n
        return pairs

    merge("case-fold", by_key(fold_case))
    merge("space-fold", by_key(fold_space))

    # from here on every unit has exactly one space-folded key
    keys = [fold_space(forms[u[0]]) for u in units]
    raws = [forms[unit_rep(u)] for u in units]
    index = AbbreviationIndex(res.abbreviations)
    merge("abbreviation", _abbreviation_pairs(keys, raws, index, exhaustive))

    def key_pairs(finder):
        # finder works on the flat key list; map back to current units
        owner = {}
        flat = []
        for n, u in enumerate(units):
            for k in sorted({fold_space(forms[i]) for i in u}):
                owner[len(flat)] = n
                flat.append(k)
        return [(owner[a], owner[b]) for a, b in finder(flat) if owner[a] != owner[b]]

    p = cfg.get("B-AMBIG-VAL")
    if len(units) > int(p["max_distinct"]):
        warnings.append(
            f"B-AMBIG-VAL skipped: {len(units)} distinct values exceed cap {p['max_distinct']}"
        )
    else:
        merge("near-duplicate", key_pairs(
            lambda flat: near_duplicate_pairs(flat, float(p["similarity"]), exhaustive)))

    if res.has_synonym_source:
        c = float(cfg.get("C-SYN")["cosine"])
        merge("synonym", key_pairs(lambda flat: synonym_pairs(flat, res, c, exhaustive)))

    groups.sort(key=lambda g: (STAGES.index(g.relation), g.canonical, g.key()))
    return CascadeResult(groups=groups, warnings=warnings, units=units)


def column_cascade(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None,
                   exhaustive: bool = False) -> CascadeResult | None:
    if not col.dominant_is(BaseType.TEXT):
        return None
    present = col.present().tolist()
    forms = [col.values[c] for c in present]
    counts = [int(col.counts[c]) for c in present]
    return run_cascade(forms, counts, cfg, res, exhaustive)


def _group_finding(col: ColumnData, group: VariantGroup, cfg: StrengthConfig) -> Finding:
    smell_id = STAGE_SMELL[group.relation]
    majority = next(set(u) for u in group.units if group.canonical in u)
    minority = {f for f, _ in group.variants if f not in majority}
    index = {v: c for c, v in enumerate(col.values)}
    mask = np.zeros(len(col.values), dtype=bool)
    mask[[index[f] for f in minority]] = True
    variants = ", ".join(f"{f!r} x{n}" for f, n in sorted(group.variants, key=lambda v: (-v[1], v[0])))
    evidence = f"{group.relation} group {group.canonical!r}: {variants}"
    params = cfg.get(smell_id)
    return make_finding(col, smell_id, col.rows_for(mask), evidence, params, cfg, Granularity.COLUMN)


def _stage_findings(col, cfg, res, relation, cascade=None):
    cascade = cascade if cascade is not None else column_cascade(col, cfg, res)
    if cascade is None:
        return []
    return [_group_finding(col, g, cfg) for g in cascade.groups if g.relation == relation]


def detect_case_inconsistency(col: ColumnData, cfg: StrengthConfig, cascade=None):
    return _stage_findings(col, cfg, None, "case-fold", cascade)


def detect_space_inconsistency(col: ColumnData, cfg: StrengthConfig, cascade=None):
    return _stage_findings(col, cfg, None, "space-fold", cascade)


def detect_abbrev_inconsistency(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None,
                                cascade=None):
    return _stage_findings(col, cfg, res, "abbreviation", cascade)


def detect_ambiguous_value(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None,
                           cascade=None, warnings: list | None = None):
    res = res or Resources()
    cascade = cascade if cascade is not None else column_cascade(col, cfg, res)
    if cascade is None:
        return []
    if warnings is not None:
        warnings.extend(w for w in cascade.warnings if w.startswith("B-AMBIG-VAL"))
    out = _stage_findings(col, cfg, res, "near-duplicate", cascade)
    lexicon = {fold_space(x) for x in res.ambiguity_lexicon}
    if lexicon:
        hits = [c for c in col.present().tolist() if fold_space(col.values[c]) in lexicon]
        if hits:
            mask = np.zeros(len(col.values), dtype=bool)
            mask[hits] = True
            names = ", ".join(sorted(repr(col.values[c]) for c in hits))
            evidence = f"values with several known meanings: {names}"
            out.append(make_finding(col, "B-AMBIG-VAL", col.rows_for(mask), evidence,
                                    cfg.get("B-AMBIG-VAL"), cfg, Granularity.COLUMN))
    return out


def detect_synonyms(col: ColumnData, cfg: StrengthConfig, res: Resources | None = None,
                    cascade=None, warnings: list | None = None):
    res = res or Resources()
    if not res.has_synonym_source:
        if warnings is not None:
            warnings.append("C-SYN inert: no thesaurus or vector resource configured")
        return []
    return _stage_findings(col, cfg, res, "synonym", cascade)


def detect_format_inconsistency(col: ColumnData, cfg: StrengthConfig, view: DateView | None):
    if view is None or not col.dominant_is(*TEMPORAL_TYPES):
        return []
    counts = Counter()
    for c, sig in enumerate(view.signature):
        if sig is not None:
            counts[sig] += int(col.counts[c])
    if sum(counts.values()) < 2 or len(counts) < 2:
        return []
    major = min(counts, key=lambda s: (-counts[s], s))
    mask = np.array([s is not None and s != major for s in view.signature], dtype=bool)
    others = ", ".join(f"{s} x{counts[s]}" for s in sorted(counts) if s != major)
    evidence = f"{len(counts)} formats; majority {major} x{counts[major]}; others: {others}"
    return [make_finding(col, "C-DT-FMT", col.rows_for(mask), evidence, cfg.get("C-DT-FMT"), cfg,
                         Granularity.COLUMN)]


def groups_signature(result: CascadeResult) -> set:
    """Comparable summary of the groups, used to check blocked vs all-pairs runs."""
    return {g.key() for g in result.groups}
