"""Readers and writers for the line-oriented ontology format (QLF) and the
conjunctive SPARQL subset.

QLF example::

    @prefix ex: <http://example.org/> .
    ex:Eagle isa ex:Bird .
    exists ex:teaches- isa ex:Course .
    ex:Professor isa exists ex:teaches . ex:Course .
    ex:GoldenEagle(ex:Harry) .
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    OWL,
    OWL_DISJOINTWITH,
    OWL_THING,
    RDF,
    RDF_TYPE,
    RDFS,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    XSD,
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
    RoleExpr,
    RoleIncl,
    TriplePattern,
    Variable,
    disj,
    role_disj,
    role_incl,
)

DEFAULT_PREFIXES = {"rdf": RDF, "rdfs": RDFS, "owl": OWL, "xsd": XSD}

QLF_KEYWORDS = frozenset({"isa", "disjoint", "isarole", "disjointrole", "exists", "refl", "irrefl"})
DATATYPE_IRIS = frozenset({RDFS + "Literal", RDFS + "Datatype", OWL + "DatatypeProperty",
                           OWL + "DataProperty", OWL + "topDataProperty",
                           OWL + "bottomDataProperty"})

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<iriref><[^<>\s]*>)
  | (?P<var>[?$]{_NAME})
  | (?P<directive>@{_NAME})
  | (?P<pname>(?:{_NAME})?:[A-Za-z0-9_]*|{_NAME})
  | (?P<literal>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*'|[+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<neq>!=)
  | (?P<dtype>\^\^)
  | (?P<punct>[(),.{{}}\-*])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line = max(1, line)
        self.column = max(1, column)
        self.message = message
        super().__init__(f"{self.line}:{self.column}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens: list[Token] = []
    for lineno, line in enumerate(text.splitlines(), start=1 + line_offset):
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if m is None:
                raise ParseError(lineno, pos + 1, f"unexpected character {line[pos]!r}")
            kind = m.lastgroup
            if kind == "comment":
                break
            if kind != "ws":
                tokens.append(Token(kind, m.group(), lineno, pos + 1))
            pos = m.end()
        tokens.append(Token("eol", "", lineno, len(line) + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token], prefixes: dict[str, str]):
        self.tokens = tokens
        self.i = 0
        self.prefixes = prefixes

    def peek(self, k: int = 0) -> Token:
        j = self.i + k
        if j < len(self.tokens):
            return self.tokens[j]
        last = self.tokens[-1] if self.tokens else Token("eol", "", 1, 1)
        return Token("eof", "", last.line, last.col)

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("punct", "neq", "pname") and tok.text == text

    def expect(self, text: str, what: str | None = None) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind in ("iriref", "literal", "var"):
            raise ParseError(tok.line, tok.col, f"expected {what or repr(text)}, found {tok.text or tok.kind!r}")
        return tok

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(tok.line, tok.col, message)

    def iri(self, allow_keywords: bool = False) -> str:
        tok = self.next()
        if tok.kind == "literal" or tok.kind == "dtype":
            raise ParseError(tok.line, tok.col,
                             f"data properties, literals and datatypes are not supported (found literal {tok.text})")
        if tok.kind == "iriref":
            value = tok.text[1:-1]
            if not value:
                raise ParseError(tok.line, tok.col, "empty IRI")
        elif tok.kind == "pname":
            if tok.text in QLF_KEYWORDS and not allow_keywords:
                raise ParseError(tok.line, tok.col, f"expected an IRI, found keyword {tok.text!r}")
            value = self.expand(tok)
        else:
            raise ParseError(tok.line, tok.col, f"expected an IRI, found {tok.text or tok.kind!r}")
        if value.startswith(XSD) or value in DATATYPE_IRIS:
            raise ParseError(tok.line, tok.col,
                             f"data properties, literals and datatypes are not supported (found {tok.text})")
        return value

    def expand(self, tok: Token) -> str:
        if ":" not in tok.text:
            return tok.text
        prefix, local = tok.text.split(":", 1)
        if prefix not in self.prefixes:
            raise ParseError(tok.line, tok.col, f"undeclared prefix {prefix!r}")
        return self.prefixes[prefix] + local


def _prefix_decl(cur: _Cursor, sparql_style: bool = False) -> None:
    head = cur.next()
    name_tok = cur.next()
    if name_tok.kind != "pname" or not name_tok.text.endswith(":") or name_tok.text.count(":") != 1:
        cur.fail("expected a prefix name such as 'ex:'", name_tok)
    iri_tok = cur.next()
    if iri_tok.kind != "iriref":
        cur.fail("expected <IRI> in prefix declaration", iri_tok)
    if not sparql_style or cur.at("."):
        if not sparql_style:
            cur.expect(".", "'.' after prefix declaration")
        else:
            cur.next()
    cur.prefixes[name_tok.text[:-1]] = iri_tok.text[1:-1]
    del head


# --- QLF ----------------------------------------------------------------------

def _role_x(cur: _Cursor) -> RoleExpr:
    name = cur.iri()
    if name == OWL_THING:
        cur.fail("owl:Thing cannot be used as a property")
    inverse = False
    if cur.at("-"):
        cur.next()
        inverse = True
    return RoleExpr(name, inverse)


def _class_iri(cur: _Cursor) -> str:
    tok = cur.peek()
    value = cur.iri()
    if value == OWL_THING:
        cur.fail("owl:Thing is only allowed as the filler of an existential", tok)
    return value


def _basic(cur: _Cursor):
    if cur.peek().kind == "pname" and cur.peek().text == "exists":
        cur.next()
        return ExistsRole(_role_x(cur))
    return NamedClass(_class_iri(cur))


def _rhs(cur: _Cursor):
    if cur.peek().kind == "pname" and cur.peek().text == "exists":
        cur.next()
        role = _role_x(cur)
        # a '.' followed by something other than end of line introduces the filler
        if cur.at(".") and cur.peek(1).kind not in ("eol", "eof"):
            cur.next()
            filler = cur.iri()
            return QualifiedExists(role, filler)
        return QualifiedExists(role)
    return NamedClass(_class_iri(cur))


def _axiom(cur: _Cursor):
    tok = cur.peek()
    nxt = cur.peek(1)
    if tok.kind == "pname" and tok.text in ("refl", "irrefl") and nxt.text == "(":
        cur.next()
        cur.next()
        role = cur.iri()
        cur.expect(")")
        return Refl(role) if tok.text == "refl" else Irrefl(role)
    if tok.kind in ("pname", "iriref") and tok.text not in QLF_KEYWORDS and nxt.text == "(":
        pred = cur.iri()
        cur.next()
        first = cur.iri()
        if cur.at(","):
            cur.next()
            second = cur.iri()
            cur.expect(")")
            return RoleAssert(pred, first, second)
        cur.expect(")", "')' or ','")
        if pred == OWL_THING:
            cur.fail("owl:Thing assertions are not supported", tok)
        return ClassAssert(pred, first)
    if tok.kind in ("pname", "iriref") and tok.text not in QLF_KEYWORDS and nxt.kind == "neq":
        a = cur.iri()
        cur.next()
        b = cur.iri()
        return Diff(a, b)

    # role axioms: role 'isarole' roleX | role 'disjointrole' roleX
    j = 1
    if nxt.text == "-":
        j = 2
    op = cur.peek(j)
    if tok.text != "exists" and op.kind == "pname" and op.text in ("isarole", "disjointrole"):
        lhs = _role_x(cur)
        cur.next()
        rhs = _role_x(cur)
        return role_incl(lhs, rhs) if op.text == "isarole" else role_disj(lhs, rhs)

    lhs = _basic(cur)
    op = cur.next()
    if op.kind == "pname" and op.text == "isa":
        return Incl(lhs, _rhs(cur))
    if op.kind == "pname" and op.text == "disjoint":
        return disj(lhs, _basic(cur))
    raise ParseError(op.line, op.col, f"expected 'isa' or 'disjoint', found {op.text or op.kind!r}")


def parse_ontology(text: str, prefixes: dict[str, str] | None = None) -> Ontology:
    cur = _Cursor(tokenize(text), dict(DEFAULT_PREFIXES, **(prefixes or {})))
    axioms = []
    while cur.peek().kind != "eof":
        tok = cur.peek()
        if tok.kind == "eol":
            cur.next()
            continue
        if tok.kind == "directive":
            if tok.text != "@prefix":
                cur.fail(f"unknown directive {tok.text}")
            _prefix_decl(cur)
        else:
            axioms.append(_axiom(cur))
            cur.expect(".", "'.' at the end of the axiom")
        end = cur.next()
        if end.kind not in ("eol", "eof"):
            raise ParseError(end.line, end.col, f"unexpected {end.text!r} after end of axiom")
    return Ontology.from_axioms(axioms)


# --- SPARQL subset -------------------------------------------------------------

_QUERY_KEYWORD_NAMES = {
    "rdf:type": RDF_TYPE,
    "rdfs:subClassOf": RDFS_SUBCLASSOF,
    # seen with a capital S in the wild; accepted as the same keyword
    "rdfs:SubClassOf": RDFS_SUBCLASSOF,
    "rdfs:subPropertyOf": RDFS_SUBPROPERTYOF,
    "owl:disjointWith": OWL_DISJOINTWITH,
}
_UNSUPPORTED = {"OPTIONAL", "FILTER", "UNION", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE",
                "ORDER", "GROUP", "LIMIT", "OFFSET", "HAVING", "CONSTRUCT", "ASK", "DESCRIBE",
                "NOT", "EXISTS"}


def _query_term(cur: _Cursor, position: str):
    tok = cur.peek()
    if tok.kind == "var":
        cur.next()
        return Variable(tok.text[1:])
    if tok.kind == "pname" and tok.text.upper() in _UNSUPPORTED:
        cur.fail(f"unsupported SPARQL feature {tok.text.upper()}")
    if tok.kind == "pname" and tok.text in _QUERY_KEYWORD_NAMES and position == "pred":
        cur.next()
        return _QUERY_KEYWORD_NAMES[tok.text]
    if tok.kind == "punct" and tok.text == "{":
        cur.fail("nested groups are not supported")
    if tok.kind in ("pname", "iriref", "literal", "dtype"):
        value = cur.iri(allow_keywords=True)
        if value == RDFS + "SubClassOf":
            value = RDFS_SUBCLASSOF
        return value
    cur.fail(f"expected a variable or IRI, found {tok.text or tok.kind!r}")


def parse_query(text: str, prefixes: dict[str, str] | None = None) -> Query:
    toks = [t for t in tokenize(text) if t.kind != "eol"]
    cur = _Cursor(toks, dict(DEFAULT_PREFIXES, **(prefixes or {})))
    while True:
        tok = cur.peek()
        if tok.kind == "directive" and tok.text == "@prefix":
            _prefix_decl(cur)
        elif tok.kind == "pname" and tok.text.upper() == "PREFIX":
            _prefix_decl(cur, sparql_style=True)
        else:
            break
    tok = cur.next()
    if tok.kind != "pname" or tok.text.upper() != "SELECT":
        raise ParseError(tok.line, tok.col, "only SELECT queries are supported")
    select: list[str] = []
    while cur.peek().kind == "var":
        select.append(cur.next().text[1:])
    if not select:
        tok = cur.peek()
        if tok.text.upper() in _UNSUPPORTED | {"DISTINCT", "REDUCED"} or tok.text == "*":
            cur.fail(f"unsupported SPARQL feature {tok.text}")
        cur.fail("SELECT needs at least one variable")
    tok = cur.next()
    if tok.kind != "pname" or tok.text.upper() != "WHERE":
        raise ParseError(tok.line, tok.col, f"expected WHERE, found {tok.text or tok.kind!r}")
    cur.expect("{")
    patterns: list[TriplePattern] = []
    while not cur.at("}"):
        if cur.peek().kind == "eof":
            cur.fail("unterminated WHERE clause")
        s = _query_term(cur, "subj")
        p = _query_term(cur, "pred")
        o = _query_term(cur, "obj")
        patterns.append(TriplePattern(s, p, o))
        if cur.at("."):
            cur.next()
        elif not cur.at("}"):
            if cur.peek().text.upper() in _UNSUPPORTED:
                cur.fail(f"unsupported SPARQL feature {cur.peek().text.upper()}")
            cur.fail(f"expected '.' or '}}', found {cur.peek().text or cur.peek().kind!r}")
    close = cur.next()
    if not patterns:
        raise ParseError(close.line, close.col, "empty WHERE clause")
    if cur.peek().kind != "eof":
        cur.fail(f"unsupported trailing input {cur.peek().text!r}")
    body_vars = {t.name for p in patterns for t in p.terms() if isinstance(t, Variable)}
    for v in select:
        if v not in body_vars:
            raise ParseError(tok.line, tok.col, f"selected variable ?{v} does not occur in WHERE")
    if len(set(select)) != len(select):
        raise ParseError(tok.line, tok.col, "duplicate selected variable")
    return Query(tuple(select), tuple(patterns))


# --- printing ------------------------------------------------------------------

_BARE = re.compile(rf"^{_NAME}$")
_LOCAL = re.compile(r"^[A-Za-z0-9_]*$")


def format_iri(iri: str, prefixes: dict[str, str] | None = None) -> str:
    for p, ns in sorted((prefixes or {}).items(), key=lambda kv: -len(kv[1])):
        if iri.startswith(ns) and _LOCAL.match(iri[len(ns):]):
            return f"{p}:{iri[len(ns):]}"
    if _BARE.match(iri) and iri not in QLF_KEYWORDS and iri.upper() not in ("SELECT", "WHERE"):
        return iri
    return f"<{iri}>"


def format_role(r: RoleExpr, prefixes=None) -> str:
    return format_iri(r.name, prefixes) + ("-" if r.inverse else "")


def _format_concept(c, prefixes) -> str:
    if isinstance(c, NamedClass):
        return format_iri(c.iri, prefixes)
    if isinstance(c, ExistsRole):
        return "exists " + format_role(c.role, prefixes)
    if c.filler == OWL_THING:
        return "exists " + format_role(c.role, prefixes)
    return f"exists {format_role(c.role, prefixes)} . {format_iri(c.filler, prefixes)}"


def format_axiom(a, prefixes: dict[str, str] | None = None) -> str:
    f = lambda iri: format_iri(iri, prefixes)  # noqa: E731
    if isinstance(a, Incl):
        body = f"{_format_concept(a.lhs, prefixes)} isa {_format_concept(a.rhs, prefixes)}"
    elif isinstance(a, Disj):
        body = f"{_format_concept(a.lhs, prefixes)} disjoint {_format_concept(a.rhs, prefixes)}"
    elif isinstance(a, RoleIncl):
        body = f"{format_role(a.lhs, prefixes)} isarole {format_role(a.rhs, prefixes)}"
    elif isinstance(a, RoleDisj):
        body = f"{format_role(a.lhs, prefixes)} disjointrole {format_role(a.rhs, prefixes)}"
    elif isinstance(a, Refl):
        body = f"refl({f(a.role)})"
    elif isinstance(a, Irrefl):
        body = f"irrefl({f(a.role)})"
    elif isinstance(a, ClassAssert):
        body = f"{f(a.cls)}({f(a.ind)})"
    elif isinstance(a, RoleAssert):
        body = f"{f(a.role)}({f(a.subj)}, {f(a.obj)})"
    elif isinstance(a, Diff):
        body = f"{f(a.a)} != {f(a.b)}"
    else:
        raise TypeError(f"not an axiom: {a!r}")
    return body + " ."


def format_ontology(o: Ontology, prefixes: dict[str, str] | None = None) -> str:
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in (prefixes or {}).items()]
    lines.extend(format_axiom(a, prefixes) for a in o.axioms)
    return "\n".join(lines) + "\n"


def format_query(q: Query, prefixes: dict[str, str] | None = None) -> str:
    names = {RDF_TYPE: "rdf:type", RDFS_SUBCLASSOF: "rdfs:subClassOf",
             RDFS_SUBPROPERTYOF: "rdfs:subPropertyOf", OWL_DISJOINTWITH: "owl:disjointWith"}

    def term(t, pred=False):
        if isinstance(t, Variable):
            return str(t)
        if pred and t in names:
            return names[t]
        return format_iri(t, prefixes)

    head = "".join(f"PREFIX {p}: <{ns}>\n" for p, ns in (prefixes or {}).items())
    body = " .\n  ".join(f"{term(p.subj)} {term(p.pred, True)} {term(p.obj)}" for p in q.patterns)
    return f"{head}SELECT {' '.join('?' + v for v in q.select_vars)} WHERE {{\n  {body} .\n}}\n"
