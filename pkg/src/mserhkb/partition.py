"""Meta-elements, clashing axioms and the four ways of splitting an ontology."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import Axiom, Ontology, signature_of_axiom


class Variant(enum.Enum):
    E_AT = "e-at"
    A_T = "a-t"
    NAT_CAT = "nat-cat"
    NAT_CACT = "nat-cact"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        key = text.strip().lower().replace("_", "-")
        for v in cls:
            if v.value == key:
                return v
        raise ValueError(f"unknown variant {text!r}; expected one of {[v.value for v in cls]}")


@dataclass(frozen=True)
class Partition:
    variant: Variant
    onto_side: Ontology
    datalog_side: Ontology
    meta_elements: frozenset[str]
    clashing: frozenset


def meta_elements(o: Ontology) -> frozenset[str]:
    v = o.vocab
    return (v.classes | v.object_properties) & v.individuals


def is_clashing(a: Axiom, meta: frozenset[str]) -> bool:
    return not meta.isdisjoint(signature_of_axiom(a))


def clashing_axioms(o: Ontology) -> frozenset:
    meta = meta_elements(o)
    if not meta:
        return frozenset()
    return frozenset(a for a in o.axioms if is_clashing(a, meta))


def split(o: Ontology, v: Variant) -> Partition:
    meta = meta_elements(o)
    clashing = clashing_axioms(o)
    a_c = tuple(a for a in o.abox if a in clashing)
    a_n = tuple(a for a in o.abox if a not in clashing)
    t_c = tuple(a for a in o.tbox if a in clashing)
    if v is Variant.E_AT:
        onto, dl = Ontology(), o
    elif v is Variant.A_T:
        onto, dl = Ontology((), o.abox), Ontology(o.tbox, ())
    elif v is Variant.NAT_CAT:
        onto, dl = Ontology(o.tbox, a_n), Ontology(o.tbox, a_c)
    elif v is Variant.NAT_CACT:
        onto, dl = Ontology(o.tbox, a_n), Ontology(t_c, a_c)
    else:
        raise ValueError(f"unknown variant {v!r}")
    return Partition(v, onto, dl, meta, clashing)
