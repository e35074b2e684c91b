import pytest

from mserhkb.generate import GenConfig, generate_ontology
from mserhkb.lme import bottom_local, extract_module
from mserhkb.model import (
    ExistsRole,
    Incl,
    NamedClass,
    Ontology,
    QualifiedExists,
    RoleExpr,
    RoleIncl,
    signature_of_axiom,
)
from conftest import BIRDS

EX = "http://x/"


def test_species_seed_takes_everything(golden_eagle):
    m = extract_module({BIRDS + "Species"}, golden_eagle)
    # assertions are never local, and they pull in the rest
    assert set(m.axioms) == set(golden_eagle.axioms)


def test_unrelated_tbox_axioms_are_dropped():
    keep = Incl(NamedClass(EX + "A"), NamedClass(EX + "B"))
    drop = Incl(NamedClass(EX + "C"), NamedClass(EX + "D"))
    m = extract_module({EX + "A"}, Ontology((keep, drop), ()))
    assert m.axioms == (keep,)
    assert m.signature == {EX + "A", EX + "B"}


def test_locality_of_existentials():
    sig = {EX + "A"}
    assert bottom_local(Incl(ExistsRole(RoleExpr(EX + "r")), NamedClass(EX + "A")), sig)
    assert not bottom_local(Incl(NamedClass(EX + "A"), QualifiedExists(RoleExpr(EX + "r"), EX + "B")), sig)
    assert bottom_local(RoleIncl(RoleExpr(EX + "r"), RoleExpr(EX + "s")), sig)


@pytest.mark.parametrize("seed", range(60))
def test_module_is_closed(seed):
    o = generate_ontology(GenConfig(6, 3, 4, 12, 3, 0.1, seed))
    m = extract_module({EX + "none", f"http://example.org/gen#C{seed % 6}"}, o)
    # nothing left outside is non-local for the final signature
    for a in o.axioms:
        if a not in m.axioms:
            assert bottom_local(a, m.signature)
    for a in m.axioms:
        assert signature_of_axiom(a) <= m.signature
