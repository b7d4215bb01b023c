"""Loaders for the four external data files, with aggregated error reporting."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from axisaug.model import (
    AxisAugError,
    AxisType,
    DiseasePair,
    IcdCode,
    IcdEntry,
    MalformedCodeError,
    Provenance,
    RegionTree,
)

SDN_SEPARATOR = "##"


class LexiconError(AxisAugError):
    """Two lexicon entries assign conflicting types to one surface string."""


@dataclass
class LoadReport:
    """Per-file problems, already formatted as ``path:line: message`` strings.

    ``errors`` mark records that were skipped; ``warnings`` mark suspicious
    data that still loaded.
    """

    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def error(self, path: Path, line: int | None, message: str) -> None:
        self.errors.append(_format(path, line, message))

    def warn(self, path: Path, line: int | None, message: str) -> None:
        self.warnings.append(_format(path, line, message))

    def merge(self, other: "LoadReport") -> None:
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)

    @property
    def ok(self) -> bool:
        return not self.errors


def _format(path: Path, line: int | None, message: str) -> str:
    location = f"{path}:{line}" if line is not None else str(path)
    return f"{location}: {message}"


def _read_lines(path: Path) -> list[str]:
    # utf-8-sig strips a BOM if present and is a no-op otherwise.
    return path.read_text(encoding="utf-8-sig").splitlines()


def load_icd(path: Path) -> tuple[list[IcdEntry], LoadReport]:
    """Parse ``code<TAB>name`` lines into IcdEntry values, in file order."""
    report = LoadReport()
    entries: list[IcdEntry] = []
    seen_lines: set[tuple[str, str]] = set()
    name_by_code: dict[str, str] = {}
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        if "\t" not in raw:
            report.error(path, lineno, "expected code<TAB>name")
            continue
        code_text, name = raw.split("\t", 1)
        name = name.strip()
        if not name:
            report.error(path, lineno, "empty disease name")
            continue
        try:
            code = IcdCode.parse(code_text)
        except MalformedCodeError as exc:
            report.error(path, lineno, str(exc))
            continue
        key = (code.canonical, name)
        if key in seen_lines:
            continue
        seen_lines.add(key)
        previous = name_by_code.get(code.canonical)
        if previous is not None and previous != name:
            report.warn(
                path, lineno, f"code {code.raw} already names {previous!r}, also {name!r}"
            )
        name_by_code.setdefault(code.canonical, name)
        entries.append(IcdEntry(code=code, name=name))
    return entries, report


def load_pairs(path: Path) -> tuple[list[DiseasePair], LoadReport]:
    """Parse JSON-lines records with ``text`` and ``##``-joined ``normalized_result``."""
    report = LoadReport()
    pairs: list[DiseasePair] = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            report.error(path, lineno, f"invalid JSON: {exc.msg}")
            continue
        if not isinstance(record, dict) or "text" not in record or "normalized_result" not in record:
            report.error(path, lineno, "record needs fields 'text' and 'normalized_result'")
            continue
        udn = str(record["text"]).strip()
        sdns = tuple(
            s for s in (part.strip() for part in str(record["normalized_result"]).split(SDN_SEPARATOR)) if s
        )
        if not udn:
            report.error(path, lineno, "empty unnormalized name")
            continue
        if not sdns:
            report.error(path, lineno, "no standard name after splitting")
            continue
        pairs.append(DiseasePair(udn=udn, sdns=sdns, provenance=Provenance.ORIGINAL))
    return pairs, report


def load_region_tree(path: Path) -> tuple[RegionTree, LoadReport]:
    """Parse ``child<TAB>parent`` edges.

    Structural defects (cycles, a second parent) raise RegionTreeError;
    malformed lines are skipped and aggregated like the other loaders.
    """
    report = LoadReport()
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        if "\t" not in raw:
            report.error(path, lineno, "expected child<TAB>parent")
            continue
        child, parent = (part.strip() for part in raw.split("\t", 1))
        if not child or not parent:
            report.error(path, lineno, "empty region name")
            continue
        edges.append((child, parent))
    return RegionTree.from_edges(edges), report


_TYPE_TOKENS = {
    "center": AxisType.CENTER,
    "region": AxisType.REGION,
    "characteristic": AxisType.CHARACTERISTIC,
}


def load_lexicon(path: Path) -> tuple[dict[str, AxisType], LoadReport]:
    """Parse ``surface<TAB>type`` lines; conflicting duplicate surfaces are fatal."""
    report = LoadReport()
    lexicon: dict[str, AxisType] = {}
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        if "\t" not in raw:
            report.error(path, lineno, "expected surface<TAB>type")
            continue
        surface, token = (part.strip() for part in raw.split("\t", 1))
        axis_type = _TYPE_TOKENS.get(token)
        if not surface:
            report.error(path, lineno, "empty surface")
            continue
        if axis_type is None:
            report.error(path, lineno, f"unknown axis type {token!r}")
            continue
        existing = lexicon.get(surface)
        if existing is not None:
            if existing is not axis_type:
                raise LexiconError(
                    f"{path}:{lineno}: surface {surface!r} maps to both "
                    f"{existing.value} and {axis_type.value}"
                )
            report.warn(path, lineno, f"duplicate entry for {surface!r}")
            continue
        lexicon[surface] = axis_type
    return lexicon, report


@dataclass(frozen=True)
class Dataset:
    """Everything the pipeline consumes, loaded and cross-checked."""

    pairs: tuple[DiseasePair, ...]
    icd: tuple[IcdEntry, ...]
    region_tree: RegionTree
    lexicon: dict[str, AxisType]

    def icd_names(self) -> set[str]:
        return {entry.name for entry in self.icd}

    def codes_by_name(self) -> dict[str, list[IcdCode]]:
        """Exact-name lookup; a name used by several codes returns all of them."""
        table: dict[str, list[IcdCode]] = {}
        for entry in self.icd:
            table.setdefault(entry.name, []).append(entry.code)
        return table

    def names_by_canonical(self) -> dict[str, str]:
        table: dict[str, str] = {}
        for entry in self.icd:
            table.setdefault(entry.code.canonical, entry.name)
        return table


def load_dataset(
    icd_path: Path,
    pairs_path: Path,
    region_tree_path: Path,
    lexicon_path: Path,
) -> tuple[Dataset, LoadReport]:
    """Load all four files and flag training SDNs with no verbatim ICD match."""
    report = LoadReport()
    icd, icd_report = load_icd(icd_path)
    report.merge(icd_report)
    pairs, pairs_report = load_pairs(pairs_path)
    report.merge(pairs_report)
    tree, tree_report = load_region_tree(region_tree_path)
    report.merge(tree_report)
    lexicon, lexicon_report = load_lexicon(lexicon_path)
    report.merge(lexicon_report)

    dataset = Dataset(pairs=tuple(pairs), icd=tuple(icd), region_tree=tree, lexicon=lexicon)
    known = dataset.icd_names()
    for pair in pairs:
        for sdn in pair.sdns:
            if sdn not in known:
                report.warn(
                    pairs_path, None, f"standard name {sdn!r} (for {pair.udn!r}) not in ICD table"
                )
    return dataset, report
