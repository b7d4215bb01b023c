"""Brute-force reference implementations used only by the test suite.

Everything here is coded directly from the algorithm statements, independently
of the package under test: its own longest-match mini-tagger, Counter-based
axis-multiset comparison, naive gram enumeration, and a from-scratch FNV-1a
hash-bag embedder.  Tests compare package output against these.
"""
from __future__ import annotations

import math
from collections import Counter

EXCLUDED_INITIALS = set("PQUVWXYZ")


# --- code handling ---------------------------------------------------------


def oracle_canonical(code_text: str) -> str:
    return code_text.strip().replace(".", "").upper()


def oracle_is_excluded(code_text: str) -> bool:
    return oracle_canonical(code_text)[0] in EXCLUDED_INITIALS


def oracle_prefix4(code_text: str) -> str:
    return oracle_canonical(code_text)[:4]


# --- mini tagger -----------------------------------------------------------


def oracle_tag(name: str, lexicon: dict[str, str]) -> list[tuple[str, str, int, int]]:
    """Greedy longest-match; returns (surface, type, start, end) tuples."""
    spans = []
    i = 0
    while i < len(name):
        best = None
        for j in range(len(name), i, -1):
            if name[i:j] in lexicon:
                best = j
                break
        if best is None:
            i += 1
        else:
            spans.append((name[i:best], lexicon[name[i:best]], i, best))
            i = best
    return spans


def _keys(spans: list[tuple[str, str, int, int]]) -> Counter:
    return Counter((s, t) for s, t, _, _ in spans)


def _replace_occurrence(
    name: str, spans: list[tuple[str, str, int, int]], key: tuple[str, str], index: int, new: str
) -> str:
    """Replace the index-th span (in text order) carrying ``key``."""
    matching = [sp for sp in spans if (sp[0], sp[1]) == key]
    _, _, start, end = matching[index]
    return name[:start] + new + name[end:]


# --- augmentation techniques ----------------------------------------------


def _allowed_names(names: list[str], icd: list[tuple[str, str]]) -> list[str]:
    """Drop names whose every ICD code is excluded (Remark-2 at name level)."""
    codes_by_name: dict[str, list[str]] = {}
    for code, name in icd:
        codes_by_name.setdefault(name, []).append(code)
    out = []
    for name in names:
        codes = codes_by_name.get(name)
        if codes is None or any(not oracle_is_excluded(c) for c in codes):
            out.append(name)
    return out


def _kept_icd_names(icd: list[tuple[str, str]]) -> list[str]:
    seen = set()
    out = []
    for code, name in icd:
        if not oracle_is_excluded(code) and name not in seen:
            seen.add(name)
            out.append(name)
    return out


def oracle_ar1(
    training_names: list[str],
    icd: list[tuple[str, str]],
    lexicon: dict[str, str],
    mode: str,
) -> set[tuple[str, str]]:
    icd_names = _kept_icd_names(icd)
    corpus = []
    seen = set()
    for name in _allowed_names(training_names, icd) + icd_names:
        if name not in seen:
            seen.add(name)
            corpus.append(name)
    out = set()
    for d1 in corpus:
        spans1 = oracle_tag(d1, lexicon)
        k1 = _keys(spans1)
        for s1 in icd_names:
            spans2 = oracle_tag(s1, lexicon)
            k2 = _keys(spans2)
            shared = sum((k1 & k2).values())
            di1 = list((k1 - k2).elements())
            di2 = list((k2 - k1).elements())
            if shared == 0 or len(di1) != 1 or len(di2) != 1:
                continue
            if di1[0][1] != mode or di2[0][1] != mode:
                continue
            # The unpaired occurrence is the first one past those matched by s1.
            udn = _replace_occurrence(d1, spans1, di1[0], k2[di1[0]], di2[0][0])
            out.add((udn, s1))
    return out


def oracle_ar2(
    training_pairs: list[tuple[str, str]],
    icd: list[tuple[str, str]],
    lexicon: dict[str, str],
    mode: str,
) -> set[tuple[str, str]]:
    icd_names = _kept_icd_names(icd)
    icd_name_set = set(icd_names)
    pairs = [
        (u, s)
        for u, s in training_pairs
        if _allowed_names([u], icd) and _allowed_names([s], icd)
    ]
    out = set()
    for u1, s1 in pairs:
        spans_u = oracle_tag(u1, lexicon)
        spans_s = oracle_tag(s1, lexicon)
        if _keys(spans_u) != _keys(spans_s):
            continue
        k2 = _keys(spans_s)
        for s2 in icd_names:
            spans2 = oracle_tag(s2, lexicon)
            k3 = _keys(spans2)
            if len(spans_s) != len(spans2):
                continue
            di1 = list((k2 - k3).elements())
            di2 = list((k3 - k2).elements())
            if len(di1) != 1 or len(di2) != 1:
                continue
            if di1[0][1] != mode or di2[0][1] != mode:
                continue
            new_surface = di2[0][0]
            s3 = _replace_occurrence(s1, spans_s, di1[0], k3[di1[0]], new_surface)
            if s3 not in icd_name_set:
                continue
            u2 = _replace_occurrence(u1, spans_u, di1[0], 0, new_surface)
            out.add((u2, s3))
    return out


def oracle_mga_code_icd(icd: list[tuple[str, str]]) -> set[tuple[str, str]]:
    kept = [(oracle_canonical(c), n) for c, n in icd if not oracle_is_excluded(c)]
    name_by_canonical: dict[str, str] = {}
    for canonical, name in kept:
        name_by_canonical.setdefault(canonical, name)
    out = set()
    for canonical, name in kept:
        if len(canonical) == 6 and canonical[:4] in name_by_canonical:
            out.add((name, name_by_canonical[canonical[:4]]))
    return out


def oracle_mga_code_training(
    training_pairs: list[tuple[str, str]], icd: list[tuple[str, str]]
) -> set[tuple[str, str]]:
    kept = [(oracle_canonical(c), n) for c, n in icd if not oracle_is_excluded(c)]
    name_by_canonical: dict[str, str] = {}
    codes_by_name: dict[str, list[str]] = {}
    for canonical, name in kept:
        name_by_canonical.setdefault(canonical, name)
        codes_by_name.setdefault(name, []).append(canonical)
    pairs = [
        (u, s)
        for u, s in training_pairs
        if _allowed_names([u], icd) and _allowed_names([s], icd)
    ]
    out = set()
    for udn, sdn in pairs:
        for canonical in codes_by_name.get(sdn, []):
            if len(canonical) == 6 and canonical[:4] in name_by_canonical:
                out.add((udn, name_by_canonical[canonical[:4]]))
    return out


def oracle_mga_region(
    corpus_names: list[str],
    icd: list[tuple[str, str]],
    edges: dict[str, str],
    lexicon: dict[str, str],
    corpus_is_training: bool,
) -> set[tuple[str, str]]:
    icd_names = _kept_icd_names(icd)
    if corpus_is_training:
        corpus = _allowed_names(corpus_names, icd)
    else:
        corpus = icd_names
    nodes = set(edges) | set(edges.values())

    def is_proper_ancestor(anc: str, node: str) -> bool:
        current = node
        hops = 0
        while current in edges and hops <= len(edges):
            current = edges[current]
            hops += 1
            if current == anc:
                return True
        return False

    out = set()
    for d1 in corpus:
        k1 = _keys(oracle_tag(d1, lexicon))
        for s1 in icd_names:
            k2 = _keys(oracle_tag(s1, lexicon))
            shared = sum((k1 & k2).values())
            di1 = list((k1 - k2).elements())
            di2 = list((k2 - k1).elements())
            if shared < 1 or len(di1) != 1 or len(di2) != 1:
                continue
            (small, t1), (large, t2) = di1[0], di2[0]
            if t1 != "region" or t2 != "region":
                continue
            if small not in nodes or large not in nodes:
                continue
            if is_proper_ancestor(large, small):
                out.add((d1, s1))
    return out


# --- filtering -------------------------------------------------------------


def oracle_ngm(a: str, b: str) -> float:
    m = min(len(a), len(b))
    total = 0
    for n in range(1, m + 1):
        grams_a = {a[i : i + n] for i in range(len(a) - n + 1)}
        grams_b = {b[i : i + n] for i in range(len(b) - n + 1)}
        total += len(grams_a & grams_b)
    return total / m


def oracle_embed(text: str) -> list[float]:
    """Character unigram+bigram counts hashed into 256 buckets with FNV-1a."""
    counts = [0] * 256
    grams = list(text) + [text[i : i + 2] for i in range(len(text) - 1)]
    for gram in grams:
        h = 14695981039346656037
        for byte in gram.encode("utf-8"):
            h = ((h ^ byte) * 1099511628211) % (1 << 64)
        counts[h % 256] += 1
    norm = math.sqrt(sum(c * c for c in counts))
    return [c / norm for c in counts]


def oracle_cosine(a: str, b: str) -> float:
    va, vb = oracle_embed(a), oracle_embed(b)
    return sum(x * y for x, y in zip(va, vb))


# --- metrics ---------------------------------------------------------------


def oracle_metrics(
    gold: set[tuple[str, str]], predicted: set[tuple[str, str]]
) -> tuple[float, float, float]:
    m, n = len(gold), len(predicted)
    k = len(gold & predicted)
    precision = k / n if n else 0.0
    recall = k / m if m else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1
