"""The four generation techniques: AR1, AR2, MGA-Code and MGA-Region.

All techniques are pure functions; run_augmentation shards their outer loops
across a thread pool and merges with sort+dedupe, so results are independent
of the worker count.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from axisaug.ingest import Dataset
from axisaug.model import (
    AR_PROVENANCE,
    AxisAnnotation,
    AxisType,
    AxisWord,
    DiseasePair,
    IcdEntry,
    Provenance,
    RegionTree,
    prefix4,
)
from axisaug.tagger import LexiconTagger, Tagger

METHOD_AR1 = "AR1"
METHOD_AR2 = "AR2"
METHOD_MGA_CODE = "MGA-Code"
METHOD_MGA_REGION = "MGA-Region"
ALL_METHODS = (METHOD_AR1, METHOD_AR2, METHOD_MGA_CODE, METHOD_MGA_REGION)

SOURCE_ICD = "ICD"
SOURCE_TRAINING = "TrainingSet"
ALL_SOURCES = (SOURCE_ICD, SOURCE_TRAINING)

AXIS_MODE_TOKENS = {
    "Region": AxisType.REGION,
    "Center": AxisType.CENTER,
    "Characteristic": AxisType.CHARACTERISTIC,
}


@dataclass(frozen=True, slots=True)
class AxisComparison:
    """Multiset comparison of two annotations' axis words on (surface, type)."""

    shared: tuple[tuple[AxisWord, AxisWord], ...]
    only_in_a: tuple[AxisWord, ...]
    only_in_b: tuple[AxisWord, ...]


def compare_axes(a: AxisAnnotation, b: AxisAnnotation) -> AxisComparison:
    """Pair up axis words that agree on surface and type; order-preserving."""
    used = [False] * len(b.axes)
    shared: list[tuple[AxisWord, AxisWord]] = []
    only_a: list[AxisWord] = []
    for word_a in a.axes:
        for i, word_b in enumerate(b.axes):
            if not used[i] and word_b.key == word_a.key:
                used[i] = True
                shared.append((word_a, word_b))
                break
        else:
            only_a.append(word_a)
    only_b = tuple(word for i, word in enumerate(b.axes) if not used[i])
    return AxisComparison(shared=tuple(shared), only_in_a=tuple(only_a), only_in_b=only_b)


def replace_span(name: str, word: AxisWord, new_surface: str) -> str:
    """Swap exactly the annotated span, leaving identical substrings elsewhere alone."""
    return name[: word.start] + new_surface + name[word.end :]


@dataclass(frozen=True)
class AugmentationConfig:
    methods: tuple[str, ...] = ALL_METHODS
    axis_modes: tuple[AxisType, ...] = (
        AxisType.REGION,
        AxisType.CENTER,
        AxisType.CHARACTERISTIC,
    )
    mga_sources: tuple[str, ...] = ALL_SOURCES
    dedupe: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("select at least one augmentation method")
        unknown = [m for m in self.methods if m not in ALL_METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}")
        unknown_sources = [s for s in self.mga_sources if s not in ALL_SOURCES]
        if unknown_sources:
            raise ValueError(f"unknown MGA sources: {unknown_sources}")
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")


@dataclass
class AugmentationReport:
    """Per-technique generation counts plus every skip/drop reason."""

    generated: dict[str, int] = field(default_factory=dict)
    zero_axis_names: int = 0
    ar2_pairs_with_unequal_axes: int = 0
    ar2_dropped_sdn_not_in_icd: int = 0
    mga_code_missing_parent: int = 0
    mga_code_unresolved_sdn: int = 0
    mga_region_not_in_tree: int = 0
    excluded_icd_entries: int = 0
    excluded_training_names: int = 0

    def as_lines(self) -> list[str]:
        lines = [f"generated.{tag} = {count}" for tag, count in sorted(self.generated.items())]
        lines += [
            f"skipped.zero_axis_names = {self.zero_axis_names}",
            f"skipped.ar2_pairs_with_unequal_axes = {self.ar2_pairs_with_unequal_axes}",
            f"skipped.ar2_dropped_sdn_not_in_icd = {self.ar2_dropped_sdn_not_in_icd}",
            f"skipped.mga_code_missing_parent = {self.mga_code_missing_parent}",
            f"skipped.mga_code_unresolved_sdn = {self.mga_code_unresolved_sdn}",
            f"skipped.mga_region_not_in_tree = {self.mga_region_not_in_tree}",
            f"skipped.excluded_icd_entries = {self.excluded_icd_entries}",
            f"skipped.excluded_training_names = {self.excluded_training_names}",
        ]
        return lines


def _sorted_unique(pairs: Iterable[DiseasePair], dedupe: bool = True) -> list[DiseasePair]:
    ordered = sorted(pairs, key=lambda p: (p.udn, p.sdns, p.provenance.value))
    if not dedupe:
        return ordered
    out: list[DiseasePair] = []
    for pair in ordered:
        if not out or out[-1] != pair:
            out.append(pair)
    return out


def ar1(
    corpus: Sequence[AxisAnnotation],
    icd: Sequence[AxisAnnotation],
    mode: AxisType,
    dedupe: bool = True,
) -> list[DiseasePair]:
    """Replace one differing axis of ``mode`` type in d1 with s1's counterpart.

    Requires at least one shared axis and exactly one differing axis on each
    side, both of the selected type.
    """
    provenance = AR_PROVENANCE[(1, mode)]
    out: list[DiseasePair] = []
    for d1 in corpus:
        for s1 in icd:
            cmp = compare_axes(d1, s1)
            if not cmp.shared or len(cmp.only_in_a) != 1 or len(cmp.only_in_b) != 1:
                continue
            if cmp.only_in_a[0].axis_type is not mode or cmp.only_in_b[0].axis_type is not mode:
                continue
            udn = replace_span(d1.name, cmp.only_in_a[0], cmp.only_in_b[0].surface)
            out.append(DiseasePair(udn=udn, sdns=(s1.name,), provenance=provenance))
    return _sorted_unique(out, dedupe)


def ar2(
    pairs: Sequence[tuple[AxisAnnotation, AxisAnnotation]],
    icd: Sequence[AxisAnnotation],
    icd_names: frozenset[str] | set[str],
    mode: AxisType,
    dedupe: bool = True,
) -> tuple[list[DiseasePair], int, int]:
    """Swap one axis consistently in both halves of a training pair.

    Only pairs whose UDN and SDN carry equal axis multisets participate; the
    substituted standard name must remain in the ICD table.  Returns
    (pairs, pairs skipped for unequal multisets, candidates dropped because
    the substituted SDN left the table).
    """
    provenance = AR_PROVENANCE[(2, mode)]
    out: list[DiseasePair] = []
    skipped_unequal = 0
    dropped = 0
    for u1, s1 in pairs:
        balance = compare_axes(u1, s1)
        if balance.only_in_a or balance.only_in_b:
            skipped_unequal += 1
            continue
        for s2 in icd:
            cmp = compare_axes(s1, s2)
            if len(s1.axes) != len(s2.axes) or len(cmp.only_in_a) != 1 or len(cmp.only_in_b) != 1:
                continue
            if cmp.only_in_a[0].axis_type is not mode or cmp.only_in_b[0].axis_type is not mode:
                continue
            replaced, replacement = cmp.only_in_a[0], cmp.only_in_b[0]
            s3 = replace_span(s1.name, replaced, replacement.surface)
            if s3 not in icd_names:
                dropped += 1
                continue
            # u1 carries the same axis multiset, so a span with this key exists.
            u1_word = next(w for w in u1.axes if w.key == replaced.key)
            u2 = replace_span(u1.name, u1_word, replacement.surface)
            out.append(DiseasePair(udn=u2, sdns=(s3,), provenance=provenance))
    return _sorted_unique(out, dedupe), skipped_unequal, dropped


def mga_code(
    icd: Sequence[IcdEntry],
    source: str,
    training: Sequence[tuple[str, str]] = (),
    dedupe: bool = True,
) -> tuple[list[DiseasePair], int, int]:
    """Relabel a 6-digit-coded name with its 4-digit parent's standard name.

    Source ICD walks the table's own 6-digit entries; source TrainingSet uses
    training UDNs whose SDN resolves by exact name lookup to a 6-digit code.
    Returns (pairs, candidates whose 4-digit parent is absent, training SDNs
    that resolve to no code at all).
    """
    name_by_canonical: dict[str, str] = {}
    codes_by_name: dict[str, list[object]] = {}
    for entry in icd:
        name_by_canonical.setdefault(entry.code.canonical, entry.name)
        codes_by_name.setdefault(entry.name, []).append(entry.code)

    unresolved = 0
    if source == SOURCE_ICD:
        provenance = Provenance.MGA_CODE_1
        candidates = [(entry.name, entry.code) for entry in icd if entry.code.granularity == 6]
    elif source == SOURCE_TRAINING:
        provenance = Provenance.MGA_CODE_2
        candidates = []
        for udn, sdn in training:
            codes = codes_by_name.get(sdn)
            if codes is None:
                unresolved += 1
                continue
            candidates.extend((udn, code) for code in codes if code.granularity == 6)
    else:
        raise ValueError(f"unknown MGA source {source!r}")

    out: list[DiseasePair] = []
    missing_parent = 0
    for name, code in candidates:
        parent_name = name_by_canonical.get(prefix4(code).canonical)
        if parent_name is None:
            missing_parent += 1
            continue
        out.append(DiseasePair(udn=name, sdns=(parent_name,), provenance=provenance))
    return _sorted_unique(out, dedupe), missing_parent, unresolved


def mga_region(
    corpus: Sequence[AxisAnnotation],
    icd: Sequence[AxisAnnotation],
    tree: RegionTree,
    source: str,
    dedupe: bool = True,
) -> tuple[list[DiseasePair], int]:
    """Relabel a smaller-region name with a larger-region standard name.

    The two names must share at least one axis and differ in exactly one
    region axis each, s1's region being a proper ancestor of d1's at any
    depth.  No surface replacement happens.  Returns (pairs, candidates
    skipped because a region is absent from the tree).
    """
    if source == SOURCE_ICD:
        provenance = Provenance.MGA_REGION_1
    elif source == SOURCE_TRAINING:
        provenance = Provenance.MGA_REGION_2
    else:
        raise ValueError(f"unknown MGA source {source!r}")
    out: list[DiseasePair] = []
    not_in_tree = 0
    for d1 in corpus:
        for s1 in icd:
            cmp = compare_axes(d1, s1)
            if not cmp.shared or len(cmp.only_in_a) != 1 or len(cmp.only_in_b) != 1:
                continue
            small, large = cmp.only_in_a[0], cmp.only_in_b[0]
            if small.axis_type is not AxisType.REGION or large.axis_type is not AxisType.REGION:
                continue
            if small.surface not in tree or large.surface not in tree:
                not_in_tree += 1
                continue
            if tree.is_ancestor(large.surface, small.surface):
                out.append(DiseasePair(udn=d1.name, sdns=(s1.name,), provenance=provenance))
    return _sorted_unique(out, dedupe), not_in_tree


def _unique(names: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for name in names:
        if name not in seen:
            seen.add(name)
            out.append(name)
    return out


def _shard(items: Sequence, workers: int) -> list[Sequence]:
    if workers <= 1 or len(items) <= 1:
        return [items]
    size = -(-len(items) // workers)
    return [items[i : i + size] for i in range(0, len(items), size)]


def run_augmentation(
    dataset: Dataset,
    config: AugmentationConfig | None = None,
    tagger: Tagger | None = None,
) -> tuple[list[DiseasePair], AugmentationReport]:
    """Run the selected techniques over a loaded dataset.

    Output is globally deduplicated on (udn, sdn, provenance) and sorted,
    byte-stable across runs and worker counts.
    """
    config = config or AugmentationConfig()
    tagger = tagger or LexiconTagger(dataset.lexicon)
    report = AugmentationReport()
    report_lock = threading.Lock()

    kept_icd = [e for e in dataset.icd if not e.code.is_excluded()]
    report.excluded_icd_entries = len(dataset.icd) - len(kept_icd)
    icd_names = frozenset(e.name for e in kept_icd)

    # A name carried by the training set is excluded from augmentation when
    # every ICD code it resolves to lies outside the label space.
    full_codes_by_name = dataset.codes_by_name()

    def allowed(name: str) -> bool:
        codes = full_codes_by_name.get(name)
        return codes is None or any(not c.is_excluded() for c in codes)

    # Pair-consuming techniques drop a pair when either side is excluded;
    # name corpora drop only the excluded name itself.
    training_pairs = [
        (pair.udn, sdn)
        for pair in dataset.pairs
        for sdn in pair.sdns
        if allowed(pair.udn) and allowed(sdn)
    ]
    training_names = _unique(
        name
        for pair in dataset.pairs
        for name in (pair.udn, *pair.sdns)
        if allowed(name)
    )
    report.excluded_training_names = len(
        {
            name
            for pair in dataset.pairs
            for name in (pair.udn, *pair.sdns)
            if not allowed(name)
        }
    )

    annotations: dict[str, AxisAnnotation] = {}
    zero_axis: set[str] = set()

    def annotate(name: str) -> AxisAnnotation:
        found = annotations.get(name)
        if found is None:
            found = tagger.annotate(name)
            annotations[name] = found
            if not found.axes:
                zero_axis.add(name)
        return found

    icd_annotated = [annotate(n) for n in _unique(e.name for e in kept_icd)]
    training_annotated = [annotate(n) for n in training_names]
    # Zero-axis names can never satisfy the comparison guards; they are
    # dropped from the comparison corpora and surfaced via the counter.
    icd_axed = [a for a in icd_annotated if a.axes]
    corpus_axed = [a for a in _dedupe_by_name(training_annotated + icd_annotated) if a.axes]
    training_axed = [a for a in training_annotated if a.axes]
    pair_annotations = [(annotate(u), annotate(s)) for u, s in training_pairs]

    results: dict[str, list[DiseasePair]] = {}

    def run_sharded(
        tag: str, items: Sequence, call: Callable[[Sequence], list[DiseasePair]]
    ) -> None:
        shards = _shard(items, config.workers)
        if len(shards) == 1:
            chunks = [call(shards[0])]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                chunks = list(pool.map(call, shards))
        results[tag] = _sorted_unique((p for chunk in chunks for p in chunk), config.dedupe)

    if METHOD_AR1 in config.methods:
        for mode in config.axis_modes:
            run_sharded(
                AR_PROVENANCE[(1, mode)].value,
                corpus_axed,
                lambda shard, m=mode: ar1(shard, icd_axed, m, dedupe=False),
            )

    if METHOD_AR2 in config.methods:
        report.ar2_pairs_with_unequal_axes = sum(
            1
            for u1, s1 in pair_annotations
            if compare_axes(u1, s1).only_in_a or compare_axes(u1, s1).only_in_b
        )
        for mode in config.axis_modes:

            def call_ar2(shard: Sequence, m: AxisType = mode) -> list[DiseasePair]:
                pairs, _, dropped = ar2(shard, icd_axed, icd_names, m, dedupe=False)
                with report_lock:
                    report.ar2_dropped_sdn_not_in_icd += dropped
                return pairs

            run_sharded(AR_PROVENANCE[(2, mode)].value, pair_annotations, call_ar2)

    if METHOD_MGA_CODE in config.methods:
        if SOURCE_ICD in config.mga_sources:
            pairs, missing, _ = mga_code(kept_icd, SOURCE_ICD, dedupe=config.dedupe)
            report.mga_code_missing_parent += missing
            results[Provenance.MGA_CODE_1.value] = pairs
        if SOURCE_TRAINING in config.mga_sources:
            pairs, missing, unresolved = mga_code(
                kept_icd, SOURCE_TRAINING, training_pairs, dedupe=config.dedupe
            )
            report.mga_code_missing_parent += missing
            report.mga_code_unresolved_sdn += unresolved
            results[Provenance.MGA_CODE_2.value] = pairs

    if METHOD_MGA_REGION in config.methods:
        for source, corpus in ((SOURCE_ICD, icd_axed), (SOURCE_TRAINING, training_axed)):
            if source not in config.mga_sources:
                continue
            provenance = (
                Provenance.MGA_REGION_1 if source == SOURCE_ICD else Provenance.MGA_REGION_2
            )

            def call_region(shard: Sequence, s: str = source) -> list[DiseasePair]:
                pairs, missing = mga_region(
                    shard, icd_axed, dataset.region_tree, s, dedupe=False
                )
                with report_lock:
                    report.mga_region_not_in_tree += missing
                return pairs

            run_sharded(provenance.value, corpus, call_region)

    report.zero_axis_names = len(zero_axis)
    for tag, pairs in results.items():
        report.generated[tag] = len(pairs)
    merged = _sorted_unique((p for pairs in results.values() for p in pairs), config.dedupe)
    return merged, report


def _dedupe_by_name(annotations: Sequence[AxisAnnotation]) -> list[AxisAnnotation]:
    seen: set[str] = set()
    out: list[AxisAnnotation] = []
    for annotation in annotations:
        if annotation.name not in seen:
            seen.add(annotation.name)
            out.append(annotation)
    return out
