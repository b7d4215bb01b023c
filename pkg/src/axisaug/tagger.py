"""Axis-word tagging: lexicon-backed longest-match, plus a BIO codec.

The lexicon tagger stands in for a trained sequence model; anything that
produces AxisAnnotation values satisfies the Tagger protocol, and BIO files
let externally produced annotations flow in.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from axisaug.model import AxisAnnotation, AxisType, AxisWord

_TAG_TOKENS = {t.value: t for t in AxisType}


class Tagger(Protocol):
    def annotate(self, name: str) -> AxisAnnotation: ...


def tag(name: str, lexicon: dict[str, AxisType]) -> AxisAnnotation:
    """Greedy longest-match left-to-right; unmatched characters stay uncovered."""
    if not name:
        raise ValueError("cannot tag an empty name")
    axes: list[AxisWord] = []
    max_len = max((len(s) for s in lexicon), default=0)
    i = 0
    while i < len(name):
        match_len = 0
        for length in range(min(max_len, len(name) - i), 0, -1):
            if name[i : i + length] in lexicon:
                match_len = length
                break
        if match_len:
            surface = name[i : i + match_len]
            axes.append(
                AxisWord(surface=surface, axis_type=lexicon[surface], start=i, end=i + match_len)
            )
            i += match_len
        else:
            i += 1
    return AxisAnnotation(name=name, axes=tuple(axes))


@dataclass(frozen=True)
class LexiconTagger:
    lexicon: dict[str, AxisType]

    def annotate(self, name: str) -> AxisAnnotation:
        return tag(name, self.lexicon)


@dataclass(frozen=True)
class BioFileTagger:
    """Serves annotations previously read from a BIO file; unknown names get zero axes."""

    annotations: dict[str, AxisAnnotation]

    def annotate(self, name: str) -> AxisAnnotation:
        found = self.annotations.get(name)
        if found is not None:
            return found
        return AxisAnnotation(name=name, axes=())


def encode_bio(annotation: AxisAnnotation) -> list[str]:
    """One tag per character: B-/I-<type> inside axis spans, O elsewhere."""
    tags = ["O"] * len(annotation.name)
    for word in annotation.axes:
        tags[word.start] = f"B-{word.axis_type.value}"
        for i in range(word.start + 1, word.end):
            tags[i] = f"I-{word.axis_type.value}"
    return tags


def decode_bio(chars: Sequence[str], tags: Sequence[str]) -> tuple[AxisAnnotation, int]:
    """Rebuild an annotation from per-character tags.

    Returns the annotation and the number of orphan I- tags that had to be
    repaired to B- (an I- not preceded by a same-type B-/I-).
    """
    if len(chars) != len(tags):
        raise ValueError(f"{len(chars)} characters but {len(tags)} tags")
    name = "".join(chars)
    axes: list[AxisWord] = []
    repairs = 0
    run_start: int | None = None
    run_type: AxisType | None = None

    def close(end: int) -> None:
        nonlocal run_start, run_type
        if run_start is not None and run_type is not None:
            axes.append(
                AxisWord(
                    surface=name[run_start:end], axis_type=run_type, start=run_start, end=end
                )
            )
        run_start = run_type = None

    for i, tag_text in enumerate(tags):
        if tag_text == "O":
            close(i)
            continue
        if len(tag_text) < 3 or tag_text[1] != "-" or tag_text[0] not in "BI":
            raise ValueError(f"invalid BIO tag {tag_text!r}")
        axis_type = _TAG_TOKENS.get(tag_text[2:])
        if axis_type is None:
            raise ValueError(f"invalid BIO tag {tag_text!r}")
        if tag_text[0] == "B":
            close(i)
            run_start, run_type = i, axis_type
        else:
            if run_type is not axis_type:
                repairs += 1  # orphan I- becomes a fresh B-
                close(i)
                run_start, run_type = i, axis_type
    close(len(tags))
    return AxisAnnotation(name=name, axes=tuple(axes)), repairs


def write_bio_file(annotations: Iterable[AxisAnnotation], path: Path) -> None:
    """``char<TAB>tag`` per line, blank line between names."""
    blocks = []
    for annotation in annotations:
        tags = encode_bio(annotation)
        blocks.append(
            "\n".join(f"{ch}\t{tag_text}" for ch, tag_text in zip(annotation.name, tags))
        )
    path.write_text("\n\n".join(blocks) + ("\n" if blocks else ""), encoding="utf-8")


def read_bio_file(path: Path) -> tuple[list[AxisAnnotation], int]:
    """Inverse of write_bio_file; returns annotations and total I- repairs."""
    annotations: list[AxisAnnotation] = []
    repairs = 0
    chars: list[str] = []
    tags: list[str] = []

    def flush() -> None:
        nonlocal repairs
        if chars:
            annotation, fixed = decode_bio(chars, tags)
            annotations.append(annotation)
            repairs += fixed
            chars.clear()
            tags.clear()

    for lineno, raw in enumerate(path.read_text(encoding="utf-8-sig").splitlines(), start=1):
        if not raw.strip():
            flush()
            continue
        if "\t" not in raw:
            raise ValueError(f"{path}:{lineno}: expected char<TAB>tag")
        ch, tag_text = raw.split("\t", 1)
        chars.append(ch)
        tags.append(tag_text.strip())
    flush()
    return annotations, repairs
