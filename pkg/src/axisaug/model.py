"""Core value types: axis words, ICD codes, disease pairs, the region tree."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class AxisAugError(Exception):
    """Base class for all errors raised by this package."""


class MalformedCodeError(AxisAugError):
    """An ICD code string that cannot be parsed into a valid code."""


class RegionTreeError(AxisAugError):
    """A structural defect in the anatomical region tree (cycle, multiple parents)."""


class AxisType(str, enum.Enum):
    """The three kinds of axis word a disease name is decomposed into."""

    CENTER = "center"
    REGION = "region"
    CHARACTERISTIC = "characteristic"


@dataclass(frozen=True, slots=True)
class AxisWord:
    """One tagged span inside a disease name.

    ``start``/``end`` are character offsets into the containing name,
    end-exclusive, so ``name[start:end] == surface``.
    """

    surface: str
    axis_type: AxisType
    start: int
    end: int

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("axis word surface must be non-empty")
        if self.start < 0 or self.end - self.start != len(self.surface):
            raise ValueError(
                f"span [{self.start}, {self.end}) does not fit surface {self.surface!r}"
            )

    @property
    def key(self) -> tuple[str, AxisType]:
        """Identity used when comparing axis multisets: position is ignored."""
        return (self.surface, self.axis_type)


@dataclass(frozen=True, slots=True)
class AxisAnnotation:
    """A disease name together with its tagged axis words, in textual order."""

    name: str
    axes: tuple[AxisWord, ...]

    def __post_init__(self) -> None:
        prev_end = 0
        for word in self.axes:
            if word.start < prev_end:
                raise ValueError(f"overlapping axis spans in {self.name!r}")
            if word.end > len(self.name):
                raise ValueError(f"axis span out of bounds in {self.name!r}")
            if self.name[word.start : word.end] != word.surface:
                raise ValueError(
                    f"axis surface {word.surface!r} does not match its span in {self.name!r}"
                )
            prev_end = word.end

    def of_type(self, axis_type: AxisType) -> tuple[AxisWord, ...]:
        return tuple(w for w in self.axes if w.axis_type is axis_type)


# First canonical characters that mark a chapter outside the disease label space:
# P and Q, plus every letter strictly after T.
_EXCLUDED_INITIALS = frozenset("PQUVWXYZ")
_VALID_LENGTHS = frozenset({3, 4, 6})


@dataclass(frozen=True, slots=True)
class IcdCode:
    """An ICD-10 style code.

    ``canonical`` is the dot-free uppercased form all logic runs on;
    ``raw`` preserves the conventional dotted rendering.  Canonical length
    is the granularity: 3 (category), 4 (subcategory) or 6 (fine-grained).
    """

    raw: str
    canonical: str

    @classmethod
    def parse(cls, text: str) -> "IcdCode":
        stripped = text.strip()
        canonical = stripped.replace(".", "").upper()
        if not canonical:
            raise MalformedCodeError("empty code")
        if not canonical[0].isascii() or not canonical[0].isalpha():
            raise MalformedCodeError(f"code {stripped!r} does not start with a letter")
        if not canonical.isascii() or not canonical.isalnum():
            raise MalformedCodeError(f"code {stripped!r} contains invalid characters")
        if len(canonical) not in _VALID_LENGTHS:
            raise MalformedCodeError(
                f"code {stripped!r} has {len(canonical)} significant characters, expected 3, 4 or 6"
            )
        return cls(raw=stripped, canonical=canonical)

    @property
    def granularity(self) -> int:
        return len(self.canonical)

    def is_excluded(self) -> bool:
        """True when the code's chapter is outside the label space."""
        initial = self.canonical[0]
        if not initial.isalpha():
            raise MalformedCodeError(f"code {self.raw!r} does not start with a letter")
        return initial in _EXCLUDED_INITIALS


def prefix4(code: IcdCode) -> IcdCode:
    """The 4-character parent of a 6-character code, dotted raw form restored."""
    if code.granularity != 6:
        raise MalformedCodeError(
            f"prefix4 requires a 6-character code, got {code.raw!r}"
        )
    canonical = code.canonical[:4]
    return IcdCode(raw=canonical[:3] + "." + canonical[3:], canonical=canonical)


@dataclass(frozen=True, slots=True)
class IcdEntry:
    """One row of the standard table: a code and its standard disease name."""

    code: IcdCode
    name: str


class Provenance(str, enum.Enum):
    """How a pair entered the dataset.  Values are the on-disk tag strings."""

    ORIGINAL = "Original"
    AR1_REGION = "AR1-Region"
    AR1_CENTER = "AR1-Center"
    AR1_CHARACTERISTIC = "AR1-Characteristic"
    AR2_REGION = "AR2-Region"
    AR2_CENTER = "AR2-Center"
    AR2_CHARACTERISTIC = "AR2-Characteristic"
    MGA_CODE_1 = "MGA-Code-1"
    MGA_CODE_2 = "MGA-Code-2"
    MGA_REGION_1 = "MGA-Region-1"
    MGA_REGION_2 = "MGA-Region-2"


AR_PROVENANCE: dict[tuple[int, AxisType], Provenance] = {
    (1, AxisType.REGION): Provenance.AR1_REGION,
    (1, AxisType.CENTER): Provenance.AR1_CENTER,
    (1, AxisType.CHARACTERISTIC): Provenance.AR1_CHARACTERISTIC,
    (2, AxisType.REGION): Provenance.AR2_REGION,
    (2, AxisType.CENTER): Provenance.AR2_CENTER,
    (2, AxisType.CHARACTERISTIC): Provenance.AR2_CHARACTERISTIC,
}


@dataclass(frozen=True, slots=True)
class DiseasePair:
    """An unnormalized disease name mapped to one or more standard names."""

    udn: str
    sdns: tuple[str, ...]
    provenance: Provenance

    def __post_init__(self) -> None:
        if not self.udn:
            raise ValueError("unnormalized name must be non-empty")
        if not self.sdns or any(not s for s in self.sdns):
            raise ValueError(f"pair for {self.udn!r} needs non-empty standard names")


@dataclass(frozen=True)
class RegionTree:
    """Anatomical regions as a single-parent forest keyed by surface string."""

    parent_of: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: list[tuple[str, str]]) -> "RegionTree":
        parent_of: dict[str, str] = {}
        for child, parent in edges:
            if child == parent:
                raise RegionTreeError(f"region {child!r} is its own parent")
            existing = parent_of.get(child)
            if existing is not None and existing != parent:
                raise RegionTreeError(
                    f"region {child!r} has two parents: {existing!r} and {parent!r}"
                )
            parent_of[child] = parent
        tree = cls(parent_of=parent_of)
        for node in parent_of:
            tree.ancestors(node)  # raises on cycles
        return tree

    def __contains__(self, node: str) -> bool:
        return node in self.parent_of or node in self.parent_of.values()

    def ancestors(self, node: str) -> tuple[str, ...]:
        """Proper ancestors of ``node``, nearest first.  Empty for roots/unknowns."""
        chain: list[str] = []
        seen = {node}
        current = node
        while current in self.parent_of:
            current = self.parent_of[current]
            if current in seen:
                raise RegionTreeError(f"region tree contains a cycle through {current!r}")
            seen.add(current)
            chain.append(current)
        return tuple(chain)

    def is_ancestor(self, ancestor: str, node: str) -> bool:
        """Strict: a region is never its own ancestor."""
        return ancestor in self.ancestors(node)


@dataclass(frozen=True, slots=True)
class FilterVerdict:
    """The filter's decision on one (udn, sdn) pair, with both gate scores."""

    udn: str
    sdn: str
    ngm: float
    cosine: float
    alpha: float
    beta: float
    passed: bool

    @classmethod
    def evaluate(
        cls, udn: str, sdn: str, ngm: float, cosine: float, alpha: float, beta: float
    ) -> "FilterVerdict":
        # Both gates are strict: equality with the threshold rejects.
        return cls(
            udn=udn,
            sdn=sdn,
            ngm=ngm,
            cosine=cosine,
            alpha=alpha,
            beta=beta,
            passed=ngm > alpha and cosine > beta,
        )
