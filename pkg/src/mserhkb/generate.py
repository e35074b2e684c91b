"""Seeded synthetic ontologies and queries."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    OWL_DISJOINTWITH,
    OWL_THING,
    RDF_TYPE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    ClassAssert,
    Diff,
    ExistsRole,
    Incl,
    Irrefl,
    NamedClass,
    Ontology,
    QualifiedExists,
    Query,
    Refl,
    RoleAssert,
    RoleExpr,
    TriplePattern,
    Variable,
    disj,
    role_disj,
    role_incl,
)
from .parser import format_ontology

GEN_NS = "http://example.org/gen#"
GEN_PREFIXES = {"ex": GEN_NS}


@dataclass(frozen=True)
class GenConfig:
    num_classes: int = 5
    num_properties: int = 2
    num_individuals: int = 4
    num_tbox: int = 6
    num_abox: int = 6
    meta_probability: float = 0.0
    seed: int = 0
    negative_fraction: float = 0.15

    def __post_init__(self):
        if not 0.0 <= self.meta_probability <= 1.0:
            raise ValueError("meta_probability must lie in [0, 1]")
        if not 0.0 <= self.negative_fraction <= 1.0:
            raise ValueError("negative_fraction must lie in [0, 1]")
        for name in ("num_classes", "num_properties", "num_individuals", "num_tbox", "num_abox"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def _names(prefix: str, n: int) -> list[str]:
    return [f"{GEN_NS}{prefix}{i}" for i in range(n)]


class _Drawer:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg, self.rng = cfg, rng
        self.classes = _names("C", cfg.num_classes)
        self.props = _names("p", cfg.num_properties)
        self.inds = _names("a", cfg.num_individuals)

    def role(self) -> RoleExpr:
        return RoleExpr(self.rng.choice(self.props), self.rng.random() < 0.3)

    def basic(self):
        if self.props and (not self.classes or self.rng.random() < 0.25):
            return ExistsRole(self.role())
        return NamedClass(self.rng.choice(self.classes))

    def rhs(self):
        if self.props and (not self.classes or self.rng.random() < 0.25):
            filler = OWL_THING
            if self.classes and self.rng.random() < 0.5:
                filler = self.rng.choice(self.classes)
            return QualifiedExists(self.role(), filler)
        return NamedClass(self.rng.choice(self.classes))

    def individual(self) -> str:
        # punning: an individual position borrows a class name
        if self.classes and self.rng.random() < self.cfg.meta_probability:
            return self.rng.choice(self.classes)
        return self.rng.choice(self.inds) if self.inds else self.rng.choice(self.classes)

    def positive_tbox(self):
        r = self.rng.random()
        if self.props and r < 0.2:
            return role_incl(self.role(), self.role())
        if self.props and r < 0.25:
            return Refl(self.rng.choice(self.props))
        return Incl(self.basic(), self.rhs())

    def negative_tbox(self):
        r = self.rng.random()
        if self.props and r < 0.25:
            return role_disj(self.role(), self.role())
        if self.props and r < 0.35:
            return Irrefl(self.rng.choice(self.props))
        return disj(self.basic(), self.basic())

    def abox(self):
        r = self.rng.random()
        if self.props and r < 0.35:
            return RoleAssert(self.rng.choice(self.props), self.individual(), self.individual())
        if r > 1.0 - self.cfg.negative_fraction / 3:
            a, b = self.individual(), self.individual()
            if a != b:
                return Diff(a, b)
        return ClassAssert(self.rng.choice(self.classes), self.individual())


def generate_ontology(cfg: GenConfig) -> Ontology:
    rng = random.Random(cfg.seed)
    d = _Drawer(cfg, rng)
    tbox: dict = {}   # insertion-ordered set
    if d.classes or d.props:
        for _ in range(cfg.num_tbox):
            a = d.negative_tbox() if rng.random() < cfg.negative_fraction else d.positive_tbox()
            tbox.setdefault(a)
    abox: dict = {}
    if d.classes:
        for _ in range(cfg.num_abox):
            abox.setdefault(d.abox())
    return Ontology(tuple(tbox), tuple(abox))


def write_qlf(o: Ontology, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_ontology(o, GEN_PREFIXES))


_VAR_NAMES = ("x", "y", "z")
_KEYWORDS = (RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, OWL_DISJOINTWITH)


def random_query(rng: random.Random, o: Ontology, max_atoms: int = 3) -> Query:
    """A conjunctive query of at most ``max_atoms`` triples over the names of ``o``.

    Any position, including the predicate, may hold a variable.
    """
    names = sorted(o.vocab.all()) or [GEN_NS + "C0"]
    props = sorted(o.vocab.object_properties)

    def term(var_bias: float):
        if rng.random() < var_bias:
            return Variable(rng.choice(_VAR_NAMES))
        return rng.choice(names)

    patterns = []
    for _ in range(rng.randint(1, max_atoms)):
        r = rng.random()
        if r < 0.15:
            pred = Variable(rng.choice(_VAR_NAMES))
        elif r < 0.35 and props:
            pred = rng.choice(props)
        else:
            pred = rng.choice(_KEYWORDS[:2]) if rng.random() < 0.8 else rng.choice(_KEYWORDS)
        patterns.append(TriplePattern(term(0.7), pred, term(0.5)))
    body_vars = sorted({t.name for p in patterns for t in p.terms() if isinstance(t, Variable)})
    if not body_vars:
        p = patterns[0]
        patterns[0] = TriplePattern(Variable("x"), p.pred, p.obj)
        body_vars = sorted({t.name for p in patterns for t in p.terms() if isinstance(t, Variable)})
    k = rng.randint(1, len(body_vars))
    return Query(tuple(sorted(rng.sample(body_vars, k))), tuple(patterns))
