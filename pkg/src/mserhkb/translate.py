"""Translation of ontologies and queries into Datalog over the ``isac*``/``disj*``/``inst*``
vocabulary, plus the fixed rule base that saturates such fact sets.

Predicate names follow a sort convention: ``C`` is a named class, ``R`` an
existential ``∃r`` and ``I`` an inverse existential ``∃r⁻``.  So
``isacCR(c, r, d)`` reads ``c ⊑ ∃r.d`` and ``disjcIC(r, c)`` reads
``∃r⁻ ⊑ ¬c``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .datalog import Atom, Rule, Var
from .model import (
    OWL_DISJOINTWITH,
    OWL_THING,
    RDF_TYPE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    ClassAssert,
    Diff,
    Disj,
    ExistsRole,
    Incl,
    Irrefl,
    NamedClass,
    Ontology,
    QualifiedExists,
    Query,
    Refl,
    RoleAssert,
    RoleDisj,
    RoleIncl,
    Variable,
    Vocabulary,
)

SORTS = ("C", "R", "I")
QUERY_PRED = "q"
INCONSIST = "inconsist"

# predicate name -> arity, for everything the translation can produce
PREDICATES = {
    **{f"isac{x}C": 2 for x in SORTS},
    **{f"isac{x}{y}": 3 for x in SORTS for y in "RI"},
    "isarRR": 2, "isarRI": 2,
    **{f"disjc{x}{y}": 2 for x in SORTS for y in SORTS if (x, y) != ("C", "R")},
    "disjrRR": 2, "disjrRI": 2,
    "refl": 1, "irrefl": 1,
    "instc": 2, "instr": 3, "diff": 2,
    "individual": 1, "classname": 1, "rolename": 1,
    INCONSIST: 0,
}


def _sort(c) -> tuple[str, str]:
    """(sort letter, IRI) of a basic concept."""
    if isinstance(c, NamedClass):
        return "C", c.iri
    if isinstance(c, ExistsRole):
        return ("I" if c.role.inverse else "R"), c.role.name
    raise TypeError(f"not a basic concept: {c!r}")


def disj_atom(x: str, a, y: str, b) -> Atom:
    """``X(a) ⊑ ¬Y(b)``; the C/R combination is stored as ``disjcRC(b, a)``."""
    if (x, y) == ("C", "R"):
        return Atom("disjcRC", (b, a))
    return Atom(f"disjc{x}{y}", (a, b))


def tau_axiom(a) -> Atom:
    """The single ground fact encoding axiom ``a``."""
    if isinstance(a, Incl):
        x, lhs = _sort(a.lhs)
        rhs = a.rhs
        if isinstance(rhs, NamedClass):
            return Atom(f"isac{x}C", (lhs, rhs.iri))
        y = "I" if rhs.role.inverse else "R"
        return Atom(f"isac{x}{y}", (lhs, rhs.role.name, rhs.filler))
    if isinstance(a, Disj):
        x, lhs = _sort(a.lhs)
        y, rhs = _sort(a.rhs)
        return disj_atom(x, lhs, y, rhs)
    if isinstance(a, RoleIncl):
        return Atom("isarRI" if a.rhs.inverse else "isarRR", (a.lhs.name, a.rhs.name))
    if isinstance(a, RoleDisj):
        return Atom("disjrRI" if a.rhs.inverse else "disjrRR", (a.lhs.name, a.rhs.name))
    if isinstance(a, Refl):
        return Atom("refl", (a.role,))
    if isinstance(a, Irrefl):
        return Atom("irrefl", (a.role,))
    if isinstance(a, ClassAssert):
        return Atom("instc", (a.cls, a.ind))
    if isinstance(a, RoleAssert):
        return Atom("instr", (a.role, a.subj, a.obj))
    if isinstance(a, Diff):
        return Atom("diff", (a.a, a.b))
    raise TypeError(f"not an axiom: {a!r}")


def plumbing_facts(vocab: Vocabulary) -> set[Atom]:
    facts = {Atom("individual", (x,)) for x in vocab.individuals}
    facts |= {Atom("classname", (c,)) for c in vocab.classes}
    facts |= {Atom("rolename", (r,)) for r in vocab.object_properties}
    return facts


def tau_ontology(o: Ontology, plumbing: bool = True) -> set[Atom]:
    facts = {tau_axiom(a) for a in o.axioms}
    if plumbing:
        facts |= plumbing_facts(o.vocab)
    return facts


def datalog_var(name: str) -> Var:
    return Var(name[:1].upper() + name[1:])


def query_var_map(q: Query) -> dict[str, Var]:
    """Query variable name -> Datalog variable, upper-cased and kept distinct."""
    names = list(q.select_vars) + sorted(q.variables() - set(q.select_vars))
    out: dict[str, Var] = {}
    used: set[str] = set()
    for n in names:
        v = datalog_var(n).name
        base, k = v, 1
        while v in used:
            k += 1
            v = f"{base}_{k}"
        used.add(v)
        out[n] = Var(v)
    return out


def tau_query(q: Query, pred: str = QUERY_PRED) -> Rule:
    vmap = query_var_map(q)

    def t(term):
        return vmap[term.name] if isinstance(term, Variable) else term

    body = []
    for p in q.patterns:
        s, o = t(p.subj), t(p.obj)
        if p.pred == RDF_TYPE:
            body.append(Atom("instc", (o, s)))
        elif p.pred == RDFS_SUBCLASSOF:
            body.append(Atom("isacCC", (s, o)))
        elif p.pred == RDFS_SUBPROPERTYOF:
            body.append(Atom("isarRR", (s, o)))
        elif p.pred == OWL_DISJOINTWITH:
            body.append(Atom("disjcCC", (s, o)))
        else:
            body.append(Atom("instr", (t(p.pred), s, o)))
    head = Atom(pred, tuple(vmap[v] for v in q.select_vars))
    return Rule(head, tuple(body), label="query")


# --- the saturation rule base --------------------------------------------------

def _rhs_atom(x: str, lhs, y: str, rest: tuple) -> Atom:
    return Atom(f"isac{x}{y}", (lhs,) + rest)


def _pos(z: str, zeta, x: str, target, filler) -> Atom:
    """``Z(zeta) ⊑ X(target)`` where an existential target ignores its filler."""
    if x == "C":
        return Atom(f"isac{z}C", (zeta, target))
    return Atom(f"isac{z}{x}", (zeta, target, filler))


@lru_cache(maxsize=None)
def _rule_base() -> tuple[tuple[str, Rule], ...]:
    V = Var
    xi, c1, c2, c3, r, r2, s, t, x, y, f = (V("Xi"), V("C1"), V("C2"), V("C3"), V("R"),
                                           V("R2"), V("S"), V("T"), V("X"), V("Y"), V("F"))
    thing = OWL_THING
    out: list[tuple[str, Rule]] = []

    def add(family: str, head: Atom, *body: Atom):
        label = f"{family}:{head.pred}<-{'*'.join(b.pred for b in body)}"
        out.append((family, Rule(head, body, label=label)))

    def rest(y_sort):
        return (c2,) if y_sort == "C" else (r2, c2)

    # F1: chaining through a named class
    for xs in SORTS:
        for ys in SORTS:
            add("F1", _rhs_atom(xs, xi, ys, rest(ys)),
                Atom(f"isac{xs}C", (xi, c3)), _rhs_atom("C", c3, ys, rest(ys)))

    # F2: chaining through existentials, filler weakening, role lifting
    for xs in SORTS:
        for ys in SORTS:
            add("F2", _rhs_atom(xs, xi, ys, rest(ys)),
                Atom(f"isac{xs}R", (xi, r, c1)), _rhs_atom("R", r, ys, rest(ys)))
            add("F2", _rhs_atom(xs, xi, ys, rest(ys)),
                Atom(f"isac{xs}I", (xi, r, c1)), _rhs_atom("I", r, ys, rest(ys)))
        for ex in "RI":
            add("F2", Atom(f"isac{xs}{ex}", (xi, r, c2)),
                Atom(f"isac{xs}{ex}", (xi, r, c1)), Atom("isacCC", (c1, c2)))
        add("F2", Atom(f"isac{xs}R", (xi, s, c1)), Atom(f"isac{xs}R", (xi, r, c1)), Atom("isarRR", (r, s)))
        add("F2", Atom(f"isac{xs}I", (xi, s, c1)), Atom(f"isac{xs}R", (xi, r, c1)), Atom("isarRI", (r, s)))
        add("F2", Atom(f"isac{xs}I", (xi, s, c1)), Atom(f"isac{xs}I", (xi, r, c1)), Atom("isarRR", (r, s)))
        add("F2", Atom(f"isac{xs}R", (xi, s, c1)), Atom(f"isac{xs}I", (xi, r, c1)), Atom("isarRI", (r, s)))
    # a role inclusion is also an inclusion between the existentials
    add("F2", Atom("isacRR", (r, s, thing)), Atom("isarRR", (r, s)))
    add("F2", Atom("isacII", (r, s, thing)), Atom("isarRR", (r, s)))
    add("F2", Atom("isacRI", (r, s, thing)), Atom("isarRI", (r, s)))
    add("F2", Atom("isacIR", (r, s, thing)), Atom("isarRI", (r, s)))

    # F3: role hierarchy
    add("F3", Atom("isarRR", (r, t)), Atom("isarRR", (r, s)), Atom("isarRR", (s, t)))
    add("F3", Atom("isarRI", (r, t)), Atom("isarRR", (r, s)), Atom("isarRI", (s, t)))
    add("F3", Atom("isarRI", (r, t)), Atom("isarRI", (r, s)), Atom("isarRR", (s, t)))
    add("F3", Atom("isarRR", (r, t)), Atom("isarRI", (r, s)), Atom("isarRI", (s, t)))

    # F4: instance propagation; schema atom first so bound class/role names flow left to right
    add("F4", Atom("instc", (c2, x)), Atom("isacCC", (c1, c2)), Atom("instc", (c1, x)))
    add("F4", Atom("instc", (c1, x)), Atom("isacRC", (r, c1)), Atom("instr", (r, x, y)))
    add("F4", Atom("instc", (c1, y)), Atom("isacIC", (r, c1)), Atom("instr", (r, x, y)))
    add("F4", Atom("instr", (s, x, y)), Atom("isarRR", (r, s)), Atom("instr", (r, x, y)))
    add("F4", Atom("instr", (s, y, x)), Atom("isarRI", (r, s)), Atom("instr", (r, x, y)))
    add("F4", Atom("instr", (r, x, x)), Atom("refl", (r,)), Atom("individual", (x,)))
    # reflexivity is inherited upwards and puts every element into ∃r and ∃r⁻
    add("F4", Atom("refl", (s,)), Atom("refl", (r,)), Atom("isarRR", (r, s)))
    add("F4", Atom("refl", (s,)), Atom("refl", (r,)), Atom("isarRI", (r, s)))
    for ex in "RI":
        add("F4", Atom(f"isacC{ex}", (c1, r, thing)), Atom("refl", (r,)), Atom("classname", (c1,)))
        add("F4", Atom(f"isacR{ex}", (s, r, thing)), Atom("refl", (r,)), Atom("rolename", (s,)))
        add("F4", Atom(f"isacI{ex}", (s, r, thing)), Atom("refl", (r,)), Atom("rolename", (s,)))

    # F5: negative inclusions and consistency
    a, b, zeta = V("A"), V("B"), V("Z")
    for xs in SORTS:
        for ys in SORTS:
            h, bd = disj_atom(ys, b, xs, a), disj_atom(xs, a, ys, b)
            if h != bd:
                add("F5", h, bd)
    for zs in SORTS:
        for xs in SORTS:
            for ys in SORTS:
                add("F5", disj_atom(zs, zeta, ys, b), _pos(zs, zeta, xs, a, f), disj_atom(xs, a, ys, b))
    for xs in SORTS:
        # an existential whose witness cannot exist makes its left side empty
        add("F5", disj_atom(xs, xi, xs, xi), Atom(f"isac{xs}R", (xi, r, c1)), disj_atom("C", c1, "I", r))
        add("F5", disj_atom(xs, xi, xs, xi), Atom(f"isac{xs}I", (xi, r, c1)), disj_atom("C", c1, "R", r))
        add("F5", disj_atom(xs, xi, xs, xi), Atom(f"isac{xs}R", (xi, r, c1)), disj_atom("C", c1, "C", c1))
        add("F5", disj_atom(xs, xi, xs, xi), Atom(f"isac{xs}I", (xi, r, c1)), disj_atom("C", c1, "C", c1))
    add("F5", disj_atom("I", r, "I", r), disj_atom("R", r, "R", r))
    add("F5", disj_atom("R", r, "R", r), disj_atom("I", r, "I", r))
    add("F5", disj_atom("R", r, "R", r), Atom("disjrRR", (r, r)))
    add("F5", Atom("disjrRR", (s, r)), Atom("disjrRR", (r, s)))
    add("F5", Atom("disjrRI", (s, r)), Atom("disjrRI", (r, s)))
    add("F5", Atom("disjrRR", (r, t)), Atom("isarRR", (r, s)), Atom("disjrRR", (s, t)))
    add("F5", Atom("disjrRI", (r, t)), Atom("isarRR", (r, s)), Atom("disjrRI", (s, t)))
    add("F5", Atom("disjrRI", (r, t)), Atom("isarRI", (r, s)), Atom("disjrRR", (s, t)))
    add("F5", Atom("disjrRR", (r, t)), Atom("isarRI", (r, s)), Atom("disjrRI", (s, t)))

    y1, y2 = V("Y1"), V("Y2")

    def member(sort, name, who, other):
        if sort == "C":
            return Atom("instc", (name, who))
        if sort == "R":
            return Atom("instr", (name, who, other))
        return Atom("instr", (name, other, who))

    incon = Atom(INCONSIST, ())
    for xs in SORTS:
        for ys in SORTS:
            if (xs, ys) == ("C", "R"):
                continue
            add("F5", incon, disj_atom(xs, a, ys, b), member(xs, a, x, y1), member(ys, b, x, y2))
    add("F5", incon, Atom("disjrRR", (r, s)), Atom("instr", (r, x, y)), Atom("instr", (s, x, y)))
    add("F5", incon, Atom("disjrRI", (r, s)), Atom("instr", (r, x, y)), Atom("instr", (s, y, x)))
    add("F5", incon, Atom("irrefl", (r,)), Atom("instr", (r, x, x)))
    add("F5", incon, Atom("diff", (x, x)))
    # the domain is never empty, so reflexive roles constrain at least one element
    add("F5", incon, Atom("refl", (r,)), Atom("irrefl", (r,)))
    add("F5", incon, Atom("refl", (r,)), Atom("refl", (s,)), Atom("disjrRR", (r, s)))
    add("F5", incon, Atom("refl", (r,)), Atom("refl", (s,)), Atom("disjrRI", (r, s)))
    for xs in "RI":
        for ys in "RI":
            add("F5", incon, Atom("refl", (r,)), Atom("refl", (s,)), disj_atom(xs, r, ys, s))

    # F6: reflexivity of subsumption (optional)
    add("F6", Atom("isacCC", (c1, c1)), Atom("classname", (c1,)))
    add("F6", Atom("isarRR", (r, r)), Atom("rolename", (r,)))

    # identical rules can come out of different families; keep the first
    seen: set = set()
    unique = []
    for fam, rule in out:
        key = (rule.head, rule.body)
        if key not in seen:
            seen.add(key)
            unique.append((fam, rule))
    return tuple(unique)


def rql_rules(subsumption_reflexivity: bool = True, exclude: Iterable[str] = ()) -> tuple[Rule, ...]:
    """The saturation rule base.

    ``exclude`` drops rules by label; used to inject faults when testing the
    benchmark's mismatch detector.
    """
    exclude = set(exclude)
    return tuple(
        rule for fam, rule in _rule_base()
        if (subsumption_reflexivity or fam != "F6") and rule.label not in exclude
    )


def rule_families() -> dict[str, list[Rule]]:
    fams: dict[str, list[Rule]] = {}
    for fam, rule in _rule_base():
        fams.setdefault(fam, []).append(rule)
    return fams


# --- interface rules -----------------------------------------------------------

@dataclass(frozen=True)
class ImportSpec:
    """IRIs whose entailed extension is imported from the ontology side."""

    class_imports: frozenset[str] = frozenset()
    role_imports: frozenset[str] = frozenset()

    def __len__(self) -> int:
        return len(self.class_imports) + len(self.role_imports)

    def issubset(self, other: "ImportSpec") -> bool:
        return self.class_imports <= other.class_imports and self.role_imports <= other.role_imports

    def rules_text(self) -> str:
        """The interface rules in the external-atom notation, one per import."""
        lines = [f'instc("{c}", X) :- &g["{c}"](X).' for c in sorted(self.class_imports)]
        lines += [f'instr("{r}", X, Y) :- &g["{r}"](X, Y).' for r in sorted(self.role_imports)]
        return "\n".join(lines) + ("\n" if lines else "")


def interface_spec(n: Iterable[str], o: Ontology) -> ImportSpec:
    n = frozenset(n)
    return ImportSpec(n & o.vocab.classes, n & o.vocab.object_properties)
