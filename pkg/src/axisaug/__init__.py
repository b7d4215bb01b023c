"""Axis-word data augmentation and filtering for Chinese disease-name datasets."""
from __future__ import annotations

from axisaug.model import (
    AxisAnnotation,
    AxisAugError,
    AxisType,
    AxisWord,
    DiseasePair,
    FilterVerdict,
    IcdCode,
    IcdEntry,
    MalformedCodeError,
    Provenance,
    RegionTree,
    RegionTreeError,
    prefix4,
)

__all__ = [
    "AxisAnnotation",
    "AxisAugError",
    "AxisType",
    "AxisWord",
    "DiseasePair",
    "FilterVerdict",
    "IcdCode",
    "IcdEntry",
    "MalformedCodeError",
    "Provenance",
    "RegionTree",
    "RegionTreeError",
    "prefix4",
]

__version__ = "0.1.0"
