import random

import pytest

from chase_oracle import entailments
from conftest import BIRDS, load_ontology, load_query
from mserhkb.generate import GenConfig, generate_ontology, random_query
from mserhkb.hybrid import (
    ADMISSIBLE,
    OntologyOracle,
    QueryFn,
    answer_query,
    answer_with_stats,
    assemble,
    consistency_check,
    direct_answer,
    import_facts,
)
from mserhkb.parser import parse_query
from mserhkb.partition import Variant, split

SOCIAL = "http://example.org/social#"
EAGLE_ROWS = {
    (BIRDS + "Harry", BIRDS + "GoldenEagle", BIRDS + "Eagle"),
    (BIRDS + "Harry", BIRDS + "GoldenEagle", BIRDS + "Bird"),
    (BIRDS + "Harry", BIRDS + "Eagle", BIRDS + "Bird"),
    (BIRDS + "GoldenEagle", BIRDS + "EndangeredSpecies", BIRDS + "Species"),
}


def test_oracle_class_extension(golden_eagle):
    assert OntologyOracle(golden_eagle).class_extension(BIRDS + "Species") == {BIRDS + "GoldenEagle"}
    assert OntologyOracle(golden_eagle).class_extension(BIRDS + "Unknown") == frozenset()


def test_oracle_role_inclusion():
    o = load_ontology("friends.qlf")
    assert OntologyOracle(o).role_extension(SOCIAL + "friendOf") == {(SOCIAL + "a", SOCIAL + "b")}


def test_oracle_reflexive_role():
    o = load_ontology("reflexive.qlf")
    assert OntologyOracle(o).role_extension(SOCIAL + "knows") == {(SOCIAL + "a", SOCIAL + "a")}


def test_nat_cact_ontology_side_has_no_birds(golden_eagle):
    onto = split(golden_eagle, Variant.NAT_CACT).onto_side
    assert OntologyOracle(onto).class_extension(BIRDS + "Bird") == frozenset()


def test_baseline_returns_expected_rows(golden_eagle, eagle_query):
    got = answer_query(golden_eagle, eagle_query, Variant.E_AT, QueryFn.ALL,
                       subsumption_reflexivity=False)
    assert got.as_set() == EAGLE_ROWS
    assert got.header == ("x", "y", "z")


@pytest.mark.parametrize("v,f", [c for c in ADMISSIBLE if c[0] is not Variant.NAT_CACT])
@pytest.mark.parametrize("magic", [False, True])
def test_golden_eagle_every_sound_combo(golden_eagle, eagle_query, v, f, magic):
    got = answer_query(golden_eagle, eagle_query, v, f, magic, subsumption_reflexivity=False)
    assert got.as_set() == EAGLE_ROWS


def test_e_at_with_mod_rejected(golden_eagle, eagle_query):
    with pytest.raises(ValueError):
        assemble(golden_eagle, eagle_query, Variant.E_AT, QueryFn.MOD)


def test_imports_under_mod_are_a_subset(golden_eagle):
    q = load_query("species.rq")
    for v in (Variant.A_T, Variant.NAT_CAT, Variant.NAT_CACT):
        full = assemble(golden_eagle, q, v, QueryFn.ALL).imports
        mod = assemble(golden_eagle, q, v, QueryFn.MOD).imports
        assert mod.issubset(full)


def test_stats_fields(golden_eagle, eagle_query):
    _, info = answer_with_stats(assemble(golden_eagle, eagle_query, Variant.A_T, QueryFn.ALL, False))
    for key in ("importMillis", "evalMillis", "factsIn", "factsDerived", "importedFacts", "answerCount"):
        assert key in info
    assert info["answerCount"] == 4


@pytest.mark.parametrize("seed", range(150))
def test_imports_are_entailed(seed):
    o = generate_ontology(GenConfig(3, 2, 3, 5, 6, 0.3, seed, 0.2))
    if not consistency_check(o):
        return
    truth = entailments(o)
    q = random_query(random.Random(seed), o)
    for v in (Variant.A_T, Variant.NAT_CAT, Variant.NAT_CACT):
        for a in import_facts(assemble(o, q, v, QueryFn.ALL)):
            if a.pred == "instc":
                assert a.args in truth.instc
            else:
                assert a.args in truth.instr


@pytest.mark.parametrize("seed", range(150))
def test_e_at_is_plain_evaluation(seed):
    o = generate_ontology(GenConfig(3, 2, 3, 7, 7, 0.3, seed))
    q = random_query(random.Random(seed), o)
    assert answer_query(o, q, Variant.E_AT, QueryFn.ALL) == direct_answer(o, q)


@pytest.mark.parametrize("name,expected", [
    ("golden_eagle.qlf", True),
    ("split_probe.qlf", True),
    ("professors.qlf", False),
    ("irreflexive.qlf", False),
])
def test_consistency_fixtures(name, expected):
    assert consistency_check(load_ontology(name)) is expected


def test_reflexivity_adds_trivial_superclasses(golden_eagle, eagle_query):
    on = direct_answer(golden_eagle, eagle_query).as_set()
    assert EAGLE_ROWS < on
    assert (BIRDS + "Harry", BIRDS + "Bird", BIRDS + "Bird") in on


def test_reflexivity_switch():
    o = load_ontology("split_probe.qlf")
    q = parse_query("SELECT ?c WHERE { ?c rdfs:subClassOf ?c }")
    on = direct_answer(o, q, subsumption_reflexivity=True)
    off = direct_answer(o, q, subsumption_reflexivity=False)
    assert len(on) > 0 and len(off) == 0
