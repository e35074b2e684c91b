"""Hybrid knowledge bases: an ontology side queried through an entailment oracle
plus a rule side evaluated as Datalog.

The interface rules only ever import from the ontology into the rules, so the
hybrid program has a single answer set.  :func:`answer` computes it by first
materialising every import and then taking the least fixpoint.
"""
from __future__ import annotations

import enum
import functools
import time
from dataclasses import dataclass, field

from .datalog import Atom, FactStore, Program, Var, answers, evaluate, magic_derived_facts, magic_transform
from .lme import extract_module
from .model import NEGATIVE_KINDS, AnswerTable, Diff, Ontology, Query, signature_of_ontology, signature_of_query
from .partition import Partition, Variant, split
from .translate import (
    INCONSIST,
    QUERY_PRED,
    ImportSpec,
    interface_spec,
    plumbing_facts,
    rql_rules,
    tau_ontology,
    tau_query,
)


class QueryFn(enum.Enum):
    ALL = "all"
    MOD = "mod"

    @classmethod
    def parse(cls, text: str) -> "QueryFn":
        key = text.strip().lower()
        for f in cls:
            if f.value == key:
                return f
        raise ValueError(f"unknown query function {text!r}; expected 'all' or 'mod'")


# E-AT has an empty ontology side, so Mod would only add useless interface rules
ADMISSIBLE = (
    (Variant.E_AT, QueryFn.ALL),
    (Variant.A_T, QueryFn.ALL),
    (Variant.A_T, QueryFn.MOD),
    (Variant.NAT_CAT, QueryFn.ALL),
    (Variant.NAT_CAT, QueryFn.MOD),
    (Variant.NAT_CACT, QueryFn.ALL),
    (Variant.NAT_CACT, QueryFn.MOD),
)


class OntologyOracle:
    """Entailed class and property extensions of an ontology, over named individuals.

    The ontology is saturated once, on first use.  Only :meth:`class_extension`
    and :meth:`role_extension` are part of the contract; any reasoner able to
    answer those two questions could stand in.
    """

    def __init__(self, o: Ontology):
        self.ontology = o
        self._store: FactStore | None = None

    def _saturated(self) -> FactStore:
        if self._store is None:
            program = Program(rql_rules(subsumption_reflexivity=False))
            self._store, _ = evaluate(program, tau_ontology(self.ontology))
        return self._store

    def class_extension(self, c: str) -> frozenset[str]:
        if c not in self.ontology.vocab.classes:
            return frozenset()
        inds = self.ontology.vocab.individuals
        return frozenset(x for (_, x) in self._saturated().lookup("instc", (0,), (c,)) if x in inds)

    def role_extension(self, r: str) -> frozenset[tuple[str, str]]:
        if r not in self.ontology.vocab.object_properties:
            return frozenset()
        inds = self.ontology.vocab.individuals
        return frozenset((x, y) for (_, x, y) in self._saturated().lookup("instr", (0,), (r,))
                         if x in inds and y in inds)


@functools.lru_cache(maxsize=64)
def shared_oracle(o: Ontology) -> OntologyOracle:
    """One saturation per distinct ontology side; several variants share the same one."""
    return OntologyOracle(o)


def oracle_class_extension(o: Ontology, c: str) -> frozenset[str]:
    return OntologyOracle(o).class_extension(c)


def oracle_role_extension(o: Ontology, r: str) -> frozenset[tuple[str, str]]:
    return OntologyOracle(o).role_extension(r)


@dataclass
class HybridKB:
    onto_side: Ontology
    rules: Program
    facts: frozenset          # τ of the Datalog side plus vocabulary facts
    imports: ImportSpec
    query_pred: str
    header: tuple[str, ...]
    partition: Partition
    timings: dict = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return len(self.header)


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def assemble(o: Ontology, qy: Query, v: Variant, f: QueryFn,
             subsumption_reflexivity: bool = True, exclude_rules=()) -> HybridKB:
    if v is Variant.E_AT and f is QueryFn.MOD:
        raise ValueError("E-AT cannot be combined with Mod: its ontology side is empty")
    timings = {}
    t0 = time.perf_counter()
    part = split(o, v)
    timings["splitMillis"] = _ms(t0)

    t0 = time.perf_counter()
    # vocabulary facts come from the whole input so every variant grounds the same names
    facts = tau_ontology(part.datalog_side, plumbing=False) | plumbing_facts(o.vocab)
    query_rule = tau_query(qy)
    rules = Program(rql_rules(subsumption_reflexivity, exclude_rules) + (query_rule,), QUERY_PRED)
    timings["tauMillis"] = _ms(t0)

    t0 = time.perf_counter()
    onto = part.onto_side
    if v is Variant.E_AT or len(onto) == 0:
        imports = ImportSpec()
    elif f is QueryFn.ALL:
        imports = interface_spec(signature_of_ontology(onto), onto)
    else:
        module = extract_module(signature_of_query(qy, o), onto)
        imports = interface_spec(module.signature, onto)
    timings["lmeMillis"] = _ms(t0) if f is QueryFn.MOD else 0.0

    return HybridKB(onto, rules, frozenset(facts), imports, QUERY_PRED,
                    tuple(qy.select_vars), part, timings)


def import_facts(k: HybridKB, oracle: OntologyOracle | None = None) -> set[Atom]:
    if not len(k.imports):
        return set()
    oracle = oracle or shared_oracle(k.onto_side)
    out: set[Atom] = set()
    for c in sorted(k.imports.class_imports):
        out.update(Atom("instc", (c, x)) for x in oracle.class_extension(c))
    for r in sorted(k.imports.role_imports):
        out.update(Atom("instr", (r, x, y)) for x, y in oracle.role_extension(r))
    return out


def answer_with_stats(k: HybridKB, magic: bool = False,
                      oracle: OntologyOracle | None = None) -> tuple[AnswerTable, dict]:
    t0 = time.perf_counter()
    imported = import_facts(k, oracle)
    import_ms = _ms(t0)

    base = FactStore(k.facts)
    for a in imported:
        base.add_atom(a)
    facts_in = len(base)
    t0 = time.perf_counter()
    goal = Atom(k.query_pred, tuple(Var(f"Q{i}") for i in range(k.arity)))
    if magic:
        mp = magic_transform(k.rules, goal)
        base.add_atom(mp.seed)
        store, stats = evaluate(mp.program, base)
        derived = magic_derived_facts(store, base)
        pred = mp.goal_pred
    else:
        store, stats = evaluate(k.rules, base)
        derived = stats.derived_facts
        pred = k.query_pred
    table = answers(store, pred, k.arity, k.header)
    info = dict(k.timings)
    info.update(importMillis=import_ms, evalMillis=_ms(t0), factsIn=facts_in,
                factsDerived=derived, rawDerived=stats.derived_facts, importedFacts=len(imported),
                iterations=stats.iterations, answerCount=len(table))
    return table, info


def answer(k: HybridKB, magic: bool = False) -> AnswerTable:
    return answer_with_stats(k, magic)[0]


def answer_query(o: Ontology, qy: Query, v: Variant = Variant.E_AT, f: QueryFn = QueryFn.ALL,
                 magic: bool = False, subsumption_reflexivity: bool = True) -> AnswerTable:
    return answer(assemble(o, qy, v, f, subsumption_reflexivity), magic)


def direct_answer(o: Ontology, qy: Query, subsumption_reflexivity: bool = True) -> AnswerTable:
    """Plain Datalog evaluation of the whole ontology, no oracle involved."""
    program = Program(rql_rules(subsumption_reflexivity) + (tau_query(qy),), QUERY_PRED)
    store, _ = evaluate(program, tau_ontology(o))
    return answers(store, QUERY_PRED, len(qy.select_vars), qy.select_vars)


def consistency_check(o: Ontology) -> bool:
    if any(isinstance(a, Diff) and a.a == a.b for a in o.abox):
        return False
    # every clash rule needs a negative axiom somewhere
    if not any(isinstance(a, NEGATIVE_KINDS) for a in o.axioms):
        return True
    store, _ = evaluate(Program(rql_rules(subsumption_reflexivity=False)), tau_ontology(o))
    return (INCONSIST, ()) not in store
