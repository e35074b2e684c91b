"""Syntactic ⊥-locality modules.

An axiom is ⊥-local w.r.t. a signature when replacing every class and
property outside the signature by the empty concept/role turns it into a
tautology.  Assertions and reflexivity axioms are never local, so a module
always keeps the whole ABox and everything it can reach.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    OWL_THING,
    Axiom,
    ClassAssert,
    Diff,
    Disj,
    ExistsRole,
    Incl,
    Irrefl,
    NamedClass,
    Ontology,
    QualifiedExists,
    Refl,
    RoleAssert,
    RoleDisj,
    RoleIncl,
    signature_of_axiom,
)


@dataclass(frozen=True)
class Module:
    axioms: tuple
    signature: frozenset[str]

    def as_ontology(self) -> Ontology:
        return Ontology.from_axioms(self.axioms)


def _bottom(c, sig) -> bool:
    if isinstance(c, NamedClass):
        return c.iri not in sig
    if isinstance(c, ExistsRole):
        return c.role.name not in sig
    if isinstance(c, QualifiedExists):
        return c.role.name not in sig or (c.filler != OWL_THING and c.filler not in sig)
    raise TypeError(f"not a concept: {c!r}")


def bottom_local(a: Axiom, sig) -> bool:
    if isinstance(a, Incl):
        return _bottom(a.lhs, sig)
    if isinstance(a, Disj):
        return _bottom(a.lhs, sig) or _bottom(a.rhs, sig)
    if isinstance(a, RoleIncl):
        return a.lhs.name not in sig
    if isinstance(a, RoleDisj):
        return a.lhs.name not in sig or a.rhs.name not in sig
    if isinstance(a, Irrefl):
        return a.role not in sig
    if isinstance(a, (Refl, ClassAssert, RoleAssert, Diff)):
        return False
    raise TypeError(f"not an axiom: {a!r}")


def extract_module(seed, o: Ontology) -> Module:
    sig = set(seed)
    remaining = list(o.axioms)
    taken: list = []
    changed = True
    while changed:
        changed = False
        rest = []
        for a in remaining:
            if bottom_local(a, sig):
                rest.append(a)
            else:
                taken.append(a)
                sig |= signature_of_axiom(a)
                changed = True
        remaining = rest
    # keep the source order so the module prints like its ontology
    keep = set(taken)
    return Module(tuple(a for a in o.axioms if a in keep), frozenset(sig))
