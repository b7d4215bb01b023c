from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from axisaug.model import (
    AxisAnnotation,
    AxisType,
    AxisWord,
    DiseasePair,
    FilterVerdict,
    IcdCode,
    MalformedCodeError,
    Provenance,
    RegionTree,
    RegionTreeError,
    prefix4,
)


def test_axis_type_has_exactly_three_variants():
    assert {t.value for t in AxisType} == {"center", "region", "characteristic"}


def test_axis_word_span_must_fit_surface():
    AxisWord(surface="毛发", axis_type=AxisType.REGION, start=3, end=5)
    with pytest.raises(ValueError):
        AxisWord(surface="毛发", axis_type=AxisType.REGION, start=3, end=6)
    with pytest.raises(ValueError):
        AxisWord(surface="", axis_type=AxisType.REGION, start=0, end=0)


def test_annotation_rejects_overlap_and_mismatch():
    with pytest.raises(ValueError):
        AxisAnnotation(
            name="毛发囊肿",
            axes=(
                AxisWord("毛发", AxisType.REGION, 0, 2),
                AxisWord("发囊", AxisType.CENTER, 1, 3),
            ),
        )
    with pytest.raises(ValueError):
        AxisAnnotation(name="毛发囊肿", axes=(AxisWord("囊肿", AxisType.CENTER, 0, 2),))


def test_annotation_allows_uncovered_connector_text():
    annotation = AxisAnnotation(
        name="左内踝关节骨折",
        axes=(
            AxisWord("踝关节", AxisType.REGION, 2, 5),
            AxisWord("骨折", AxisType.CENTER, 5, 7),
        ),
    )
    assert [w.surface for w in annotation.of_type(AxisType.REGION)] == ["踝关节"]


def test_icd_code_parse_and_granularity():
    code = IcdCode.parse("A18.201")
    assert code.canonical == "A18201"
    assert code.granularity == 6
    assert IcdCode.parse("a18.2").canonical == "A182"
    assert IcdCode.parse(" S82.8 ").granularity == 4
    assert IcdCode.parse("G03").granularity == 3


@pytest.mark.parametrize("bad", ["", "18.201", "A18.20", "A1", "A18.2011", "骨折", "A-8.2"])
def test_icd_code_parse_rejects_malformed(bad):
    with pytest.raises(MalformedCodeError):
        IcdCode.parse(bad)


def test_prefix4_examples():
    assert prefix4(IcdCode.parse("A18.201")).raw == "A18.2"
    assert prefix4(IcdCode.parse("K81.001")).raw == "K81.0"
    with pytest.raises(MalformedCodeError):
        prefix4(IcdCode.parse("A18.2"))


@given(
    st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ", min_size=1, max_size=1),
    st.integers(min_value=0, max_value=99),
    st.integers(min_value=0, max_value=999),
)
def test_prefix4_is_a_prefix_with_4_digit_granularity(letter, body, tail):
    code = IcdCode.parse(f"{letter}{body:02d}.{tail:03d}")
    parent = prefix4(code)
    assert parent.granularity == 4
    assert code.canonical.startswith(parent.canonical)


def test_is_excluded_examples():
    assert IcdCode.parse("P07.3").is_excluded() is True
    assert IcdCode.parse("T20.1").is_excluded() is False
    assert IcdCode.parse("Z99.9").is_excluded() is True


def test_is_excluded_all_26_letters():
    excluded = {letter for letter in "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
                if IcdCode.parse(f"{letter}01.1").is_excluded()}
    assert excluded == set("PQUVWXYZ")


def test_provenance_tag_strings():
    assert {p.value for p in Provenance} == {
        "Original",
        "AR1-Region",
        "AR1-Center",
        "AR1-Characteristic",
        "AR2-Region",
        "AR2-Center",
        "AR2-Characteristic",
        "MGA-Code-1",
        "MGA-Code-2",
        "MGA-Region-1",
        "MGA-Region-2",
    }


def test_disease_pair_needs_standard_names():
    with pytest.raises(ValueError):
        DiseasePair(udn="x", sdns=(), provenance=Provenance.ORIGINAL)
    with pytest.raises(ValueError):
        DiseasePair(udn="", sdns=("a",), provenance=Provenance.ORIGINAL)


def test_region_tree_ancestors_and_strictness():
    tree = RegionTree.from_edges([("右乳房乳腺", "乳房"), ("乳房", "乳腺"), ("副乳腺", "乳腺")])
    assert tree.ancestors("右乳房乳腺") == ("乳房", "乳腺")
    assert tree.is_ancestor("乳腺", "右乳房乳腺")
    assert tree.is_ancestor("乳腺", "副乳腺")
    assert not tree.is_ancestor("副乳腺", "右乳房乳腺")
    assert not tree.is_ancestor("乳腺", "乳腺")  # never its own ancestor
    assert "乳腺" in tree  # roots count as nodes
    assert "胃" not in tree


def test_region_tree_rejects_self_edge_and_multiparent_and_cycle():
    with pytest.raises(RegionTreeError):
        RegionTree.from_edges([("a", "a")])
    with pytest.raises(RegionTreeError, match="two parents"):
        RegionTree.from_edges([("a", "b"), ("a", "c")])
    with pytest.raises(RegionTreeError, match="cycle"):
        RegionTree.from_edges([("a", "b"), ("b", "c"), ("c", "a")])


def test_filter_verdict_is_strict_on_both_gates():
    passing = FilterVerdict.evaluate("u", "s", ngm=0.71, cosine=0.81, alpha=0.7, beta=0.8)
    assert passing.passed
    at_alpha = FilterVerdict.evaluate("u", "s", ngm=0.7, cosine=0.9, alpha=0.7, beta=0.8)
    assert not at_alpha.passed
    at_beta = FilterVerdict.evaluate("u", "s", ngm=0.9, cosine=0.8, alpha=0.7, beta=0.8)
    assert not at_beta.passed
