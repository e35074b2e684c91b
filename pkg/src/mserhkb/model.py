"""Abstract syntax for OWL 2 QL ontologies, conjunctive SPARQL queries and answers.

IRIs are plain ``str`` values holding the fully expanded identifier; prefixes
only exist inside the parsers.  All node types are frozen dataclasses, so
ontologies and queries can be hashed, compared and shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

OWL = "http://www.w3.org/2002/07/owl#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"

OWL_THING = OWL + "Thing"
RDF_TYPE = RDF + "type"
RDFS_SUBCLASSOF = RDFS + "subClassOf"
RDFS_SUBPROPERTYOF = RDFS + "subPropertyOf"
OWL_DISJOINTWITH = OWL + "disjointWith"

QUERY_KEYWORDS = frozenset({RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, OWL_DISJOINTWITH})


def check_iri(value: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError(f"IRI must be a non-empty string, got {value!r}")
    if any(ch.isspace() for ch in value):
        raise ValueError(f"IRI contains whitespace: {value!r}")
    return value


# --- concepts and roles -------------------------------------------------------

@dataclass(frozen=True, order=True)
class RoleExpr:
    name: str
    inverse: bool = False

    def __post_init__(self):
        check_iri(self.name)

    def inv(self) -> "RoleExpr":
        return RoleExpr(self.name, not self.inverse)


@dataclass(frozen=True, order=True)
class NamedClass:
    iri: str

    def __post_init__(self):
        check_iri(self.iri)


@dataclass(frozen=True, order=True)
class ExistsRole:
    """Unqualified existential ``∃r`` (or ``∃r⁻``) used as a basic concept."""

    role: RoleExpr


@dataclass(frozen=True, order=True)
class QualifiedExists:
    """Right-hand side ``∃r.filler``; unqualified existentials use ``owl:Thing``."""

    role: RoleExpr
    filler: str = OWL_THING

    def __post_init__(self):
        check_iri(self.filler)


BasicConcept = Union[NamedClass, ExistsRole]
RhsConcept = Union[NamedClass, QualifiedExists]


# --- axioms -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Incl:
    lhs: BasicConcept
    rhs: RhsConcept


@dataclass(frozen=True, order=True)
class Disj:
    lhs: BasicConcept
    rhs: BasicConcept


@dataclass(frozen=True, order=True)
class RoleIncl:
    lhs: RoleExpr
    rhs: RoleExpr

    def __post_init__(self):
        if self.lhs.inverse:
            raise ValueError("role inclusion left side must not be inverse; use role_incl()")


@dataclass(frozen=True, order=True)
class RoleDisj:
    lhs: RoleExpr
    rhs: RoleExpr

    def __post_init__(self):
        if self.lhs.inverse:
            raise ValueError("role disjointness left side must not be inverse; use role_disj()")


@dataclass(frozen=True, order=True)
class Refl:
    role: str


@dataclass(frozen=True, order=True)
class Irrefl:
    role: str


@dataclass(frozen=True, order=True)
class ClassAssert:
    cls: str
    ind: str


@dataclass(frozen=True, order=True)
class RoleAssert:
    role: str
    subj: str
    obj: str


@dataclass(frozen=True, order=True)
class Diff:
    a: str
    b: str


Axiom = Union[Incl, Disj, RoleIncl, RoleDisj, Refl, Irrefl, ClassAssert, RoleAssert, Diff]
TBOX_KINDS = (Incl, Disj, RoleIncl, RoleDisj, Refl, Irrefl)
ABOX_KINDS = (ClassAssert, RoleAssert, Diff)
NEGATIVE_KINDS = (Disj, RoleDisj, Irrefl, Diff)


def role_incl(lhs: RoleExpr, rhs: RoleExpr) -> RoleIncl:
    """Build ``lhs ⊑ rhs``, moving an inverse on the left over to the right."""
    if lhs.inverse:
        return RoleIncl(lhs.inv(), rhs.inv())
    return RoleIncl(lhs, rhs)


def role_disj(lhs: RoleExpr, rhs: RoleExpr) -> RoleDisj:
    if lhs.inverse:
        return RoleDisj(lhs.inv(), rhs.inv())
    return RoleDisj(lhs, rhs)


def disj(lhs: BasicConcept, rhs: BasicConcept) -> Disj:
    """Build ``lhs ⊑ ¬rhs``.

    ``c ⊑ ¬∃r`` has no encoding of its own; it is stored as the equivalent
    ``∃r ⊑ ¬c``.
    """
    if isinstance(lhs, NamedClass) and isinstance(rhs, ExistsRole) and not rhs.role.inverse:
        return Disj(rhs, lhs)
    return Disj(lhs, rhs)


# --- signatures and vocabulary ------------------------------------------------

def _concept_names(c) -> Iterator[tuple[str, str]]:
    # yields (kind, iri) with kind in {"class", "role"}
    if isinstance(c, NamedClass):
        yield "class", c.iri
    elif isinstance(c, ExistsRole):
        yield "role", c.role.name
    elif isinstance(c, QualifiedExists):
        yield "role", c.role.name
        if c.filler != OWL_THING:
            yield "class", c.filler
    else:
        raise TypeError(f"not a concept: {c!r}")


def axiom_occurrences(a: Axiom) -> Iterator[tuple[str, str]]:
    """Yield ``(kind, iri)`` for every IRI occurrence, kind being class/role/individual."""
    if isinstance(a, (Incl, Disj)):
        yield from _concept_names(a.lhs)
        yield from _concept_names(a.rhs)
    elif isinstance(a, (RoleIncl, RoleDisj)):
        yield "role", a.lhs.name
        yield "role", a.rhs.name
    elif isinstance(a, (Refl, Irrefl)):
        yield "role", a.role
    elif isinstance(a, ClassAssert):
        yield "class", a.cls
        yield "individual", a.ind
    elif isinstance(a, RoleAssert):
        yield "role", a.role
        yield "individual", a.subj
        yield "individual", a.obj
    elif isinstance(a, Diff):
        yield "individual", a.a
        yield "individual", a.b
    else:
        raise TypeError(f"not an axiom: {a!r}")


def signature_of_axiom(a: Axiom) -> frozenset[str]:
    return frozenset(iri for _, iri in axiom_occurrences(a))


@dataclass(frozen=True)
class Vocabulary:
    classes: frozenset[str] = frozenset()
    object_properties: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()

    @classmethod
    def of(cls, axioms: Iterable[Axiom]) -> "Vocabulary":
        found: dict[str, set[str]] = {"class": set(), "role": set(), "individual": set()}
        for a in axioms:
            for kind, iri in axiom_occurrences(a):
                found[kind].add(iri)
        return cls(frozenset(found["class"]), frozenset(found["role"]),
                   frozenset(found["individual"]))

    def all(self) -> frozenset[str]:
        return self.classes | self.object_properties | self.individuals


@dataclass(frozen=True)
class Ontology:
    """An OWL 2 QL ontology ``⟨T, A⟩``; the vocabulary is derived, never declared."""

    tbox: tuple = ()
    abox: tuple = ()
    vocab: Vocabulary = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        tbox, abox = tuple(self.tbox), tuple(self.abox)
        for a in tbox:
            if not isinstance(a, TBOX_KINDS):
                raise TypeError(f"not a TBox axiom: {a!r}")
        for a in abox:
            if not isinstance(a, ABOX_KINDS):
                raise TypeError(f"not an ABox axiom: {a!r}")
        object.__setattr__(self, "tbox", tbox)
        object.__setattr__(self, "abox", abox)
        object.__setattr__(self, "vocab", Vocabulary.of(tbox + abox))

    @classmethod
    def from_axioms(cls, axioms: Iterable[Axiom]) -> "Ontology":
        axioms = list(axioms)
        return cls(tuple(a for a in axioms if isinstance(a, TBOX_KINDS)),
                   tuple(a for a in axioms if isinstance(a, ABOX_KINDS)))

    @property
    def axioms(self) -> tuple:
        return self.tbox + self.abox

    def __len__(self) -> int:
        return len(self.tbox) + len(self.abox)

    def recompute(self) -> "Ontology":
        return Ontology(self.tbox, self.abox)


def signature_of_ontology(o: Ontology) -> frozenset[str]:
    return o.vocab.all()


# --- queries and answers -------------------------------------------------------

@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


Term = Union[str, Variable]


@dataclass(frozen=True)
class TriplePattern:
    subj: Term
    pred: Term
    obj: Term

    def terms(self) -> tuple:
        return (self.subj, self.pred, self.obj)


@dataclass(frozen=True)
class Query:
    select_vars: tuple[str, ...]
    patterns: tuple[TriplePattern, ...]

    def __post_init__(self):
        object.__setattr__(self, "select_vars", tuple(self.select_vars))
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ValueError("query needs at least one triple pattern")
        if not self.select_vars:
            raise ValueError("query needs at least one selected variable")
        body_vars = self.variables()
        missing = [v for v in self.select_vars if v not in body_vars]
        if missing:
            raise ValueError(f"selected variables not in the query body: {missing}")

    def variables(self) -> set[str]:
        return {t.name for p in self.patterns for t in p.terms() if isinstance(t, Variable)}

    def iris(self) -> frozenset[str]:
        return frozenset(
            t for p in self.patterns for t in p.terms()
            if isinstance(t, str) and t not in QUERY_KEYWORDS
        )


def signature_of_query(q: Query, o: Ontology) -> frozenset[str]:
    """IRIs of the query; an IRI-free query takes the whole ontology signature."""
    found = q.iris()
    return found if found else signature_of_ontology(o)


@dataclass(frozen=True)
class AnswerTable:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        header = tuple(self.header)
        rows = tuple(sorted(set(tuple(r) for r in self.rows)))
        for r in rows:
            if len(r) != len(header):
                raise ValueError(f"row {r!r} does not match header {header!r}")
        object.__setattr__(self, "header", header)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def as_set(self) -> set[tuple[str, ...]]:
        return set(self.rows)

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()
