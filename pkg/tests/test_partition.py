import pytest

from mserhkb.generate import GenConfig, generate_ontology
from mserhkb.model import ClassAssert, Incl, NamedClass, Ontology
from mserhkb.partition import Variant, clashing_axioms, meta_elements, split
from conftest import BIRDS


def test_variant_parsing():
    assert Variant.parse("NAT_CACT") is Variant.NAT_CACT
    assert Variant.parse(" e-at ") is Variant.E_AT
    with pytest.raises(ValueError):
        Variant.parse("nat")


def test_golden_eagle_meta_elements(golden_eagle):
    assert meta_elements(golden_eagle) == {BIRDS + "GoldenEagle"}
    clashing = clashing_axioms(golden_eagle)
    # both GoldenEagle assertions plus the inclusion that names it
    assert ClassAssert(BIRDS + "EndangeredSpecies", BIRDS + "GoldenEagle") in clashing
    assert Incl(NamedClass(BIRDS + "GoldenEagle"), NamedClass(BIRDS + "Eagle")) in clashing
    assert len(clashing) == 3


def test_golden_eagle_splits(golden_eagle):
    at = split(golden_eagle, Variant.A_T)
    assert len(at.onto_side.abox) == 2 and not at.onto_side.tbox
    assert len(at.datalog_side.tbox) == 3 and not at.datalog_side.abox

    cact = split(golden_eagle, Variant.NAT_CACT)
    # every assertion mentions GoldenEagle, so the whole ABox goes to Datalog
    assert not cact.onto_side.abox and len(cact.onto_side.tbox) == 3
    assert len(cact.datalog_side.abox) == 2
    assert cact.datalog_side.tbox == (Incl(NamedClass(BIRDS + "GoldenEagle"), NamedClass(BIRDS + "Eagle")),)

    eat = split(golden_eagle, Variant.E_AT)
    assert eat.datalog_side == golden_eagle and len(eat.onto_side) == 0


@pytest.mark.parametrize("seed", range(40))
@pytest.mark.parametrize("v", list(Variant))
def test_split_covers_every_axiom(seed, v):
    o = generate_ontology(GenConfig(4, 2, 3, 8, 8, 0.4, seed))
    p = split(o, v)
    assert set(p.onto_side.axioms) | set(p.datalog_side.axioms) == set(o.axioms)
    # the ontology side never sees a clashing assertion
    assert not set(p.onto_side.abox) & p.clashing or v is Variant.A_T


def test_no_punning_means_no_clash():
    o = Ontology((Incl(NamedClass("http://x/A"), NamedClass("http://x/B")),), (ClassAssert("http://x/A", "http://x/a"),))
    assert meta_elements(o) == frozenset()
    assert clashing_axioms(o) == frozenset()
