"""A non-neural retrieval normalizer and pair-level metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from axisaug.filtering import EmbeddingProvider, HashEmbeddingProvider, cosine, ngm
from axisaug.model import DiseasePair, IcdEntry


@dataclass(frozen=True, slots=True)
class MetricReport:
    m: int
    n: int
    k: int
    precision: float
    recall: float
    f1: float
    accuracy_any_match: float
    predictions_empty: bool

    def as_lines(self) -> list[str]:
        lines = [
            f"gold_pairs = {self.m}",
            f"predicted_pairs = {self.n}",
            f"correct_pairs = {self.k}",
            f"precision = {self.precision:.6f}",
            f"recall = {self.recall:.6f}",
            f"f1 = {self.f1:.6f}",
            f"accuracy_any_match = {self.accuracy_any_match:.6f}",
        ]
        if self.predictions_empty:
            lines.append("predictions_empty = true")
        return lines


def score_predictions(
    gold: Sequence[DiseasePair], predicted: Sequence[DiseasePair]
) -> MetricReport:
    """Pair-level precision/recall/F1 over (udn, sdn) pairs, plus any-match accuracy."""
    if not gold:
        raise ValueError("gold pairs must be non-empty")
    gold_set = {(pair.udn, sdn) for pair in gold for sdn in pair.sdns}
    predicted_set = {(pair.udn, sdn) for pair in predicted for sdn in pair.sdns}
    m, n = len(gold_set), len(predicted_set)
    k = len(gold_set & predicted_set)
    precision = k / n if n else 0.0
    recall = k / m
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0

    gold_by_udn: dict[str, set[str]] = {}
    for udn, sdn in gold_set:
        gold_by_udn.setdefault(udn, set()).add(sdn)
    predicted_by_udn: dict[str, set[str]] = {}
    for udn, sdn in predicted_set:
        predicted_by_udn.setdefault(udn, set()).add(sdn)
    hits = sum(
        1
        for udn, sdns in gold_by_udn.items()
        if sdns & predicted_by_udn.get(udn, set())
    )
    return MetricReport(
        m=m,
        n=n,
        k=k,
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy_any_match=hits / len(gold_by_udn),
        predictions_empty=n == 0,
    )


def retrieve(
    udn: str,
    icd: Sequence[IcdEntry],
    knowledge: Sequence[DiseasePair],
    top_k: int = 1,
    provider: EmbeddingProvider | None = None,
) -> list[str]:
    """Rank standard names for one unnormalized name.

    An exact UDN hit among the augmented knowledge pairs puts its SDNs first
    (lexicographically); every other candidate is scored by
    max(ngm, cosine), ties broken by lexicographic name order.
    """
    if not icd:
        raise ValueError("ICD table must be non-empty")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    provider = provider or HashEmbeddingProvider()

    exact = sorted(
        {sdn for pair in knowledge if pair.udn == udn for sdn in pair.sdns}
    )
    candidates = []
    seen: set[str] = set(exact)
    for entry in icd:
        if entry.name not in seen:
            seen.add(entry.name)
            candidates.append(entry.name)

    vectors = provider.embed([udn] + candidates)
    udn_vector, candidate_vectors = vectors[0], vectors[1:]
    scored = sorted(
        (
            (-max(ngm(udn, name), cosine(udn_vector, vector)), name)
            for name, vector in zip(candidates, candidate_vectors)
        ),
    )
    ranked = exact + [name for _, name in scored]
    return ranked[:top_k]
