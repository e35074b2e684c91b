"""Hybrid query answering over OWL 2 QL ontologies with metamodeling."""
from .datalog import Atom, FactStore, Program, Rule, Var, evaluate, magic_transform
from .hybrid import QueryFn, answer, answer_query, assemble, consistency_check, direct_answer
from .lme import extract_module
from .model import AnswerTable, Ontology, Query
from .parser import ParseError, parse_ontology, parse_query
from .partition import Variant, split
from .translate import interface_spec, rql_rules, tau_ontology, tau_query

__all__ = [
    "AnswerTable", "Atom", "FactStore", "Ontology", "ParseError", "Program", "Query",
    "QueryFn", "Rule", "Var", "Variant", "answer", "answer_query", "assemble",
    "consistency_check", "direct_answer", "evaluate", "extract_module", "interface_spec",
    "magic_transform", "parse_ontology", "parse_query", "rql_rules", "split",
    "tau_ontology", "tau_query",
]
