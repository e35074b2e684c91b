"""Positive Datalog: indexed fact store, semi-naive fixpoint and magic-set rewriting.

Constants are plain strings, variables are :class:`Var` instances.  A ground
atom is stored in a :class:`FactStore` as a tuple of constants under its
predicate name.
"""
from __future__ import annotations

import contextlib
import functools
import gc
import operator
import re
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .model import AnswerTable


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


class Atom(NamedTuple):
    pred: str
    args: tuple

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def variables(self) -> list[Var]:
        return [a for a in self.args if isinstance(a, Var)]

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(_format_term(a) for a in self.args)})"


def atom(pred: str, *args) -> Atom:
    return Atom(pred, tuple(args))


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        body_vars = {v for b in self.body for v in b.variables()}
        unsafe = [v for v in self.head.variables() if v not in body_vars]
        if unsafe:
            raise ValueError(f"rule is not range-restricted, head variables {unsafe} missing from body: {self}")
        object.__setattr__(self, "_hash", hash((self.head, self.body)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    query_pred: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def idb(self) -> set[str]:
        return {r.head.pred for r in self.rules}

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules) + ("\n" if self.rules else "")


class FactStore:
    """Set of ground facts per predicate with lazily built hash indexes.

    An index is keyed by a tuple of argument positions; once created it is kept
    up to date by :meth:`add`.
    """

    def __init__(self, facts: Iterable = ()):
        self._rel: dict[str, set[tuple]] = defaultdict(set)
        self._idx: dict[str, dict[tuple[int, ...], dict[tuple, list[tuple]]]] = defaultdict(dict)
        # (key positions, kept positions) -> key -> distinct projections
        self._proj: dict[str, dict[tuple, dict[tuple, set[tuple]]]] = defaultdict(dict)
        for f in facts:
            if isinstance(f, Atom):
                self.add(f.pred, f.args)
            else:
                self.add(*f)

    def add(self, pred: str, args: tuple) -> bool:
        rel = self._rel[pred]
        if args in rel:
            return False
        rel.add(args)
        for positions, index in self._idx[pred].items():
            key = tuple(args[p] for p in positions)
            bucket = index.get(key)
            if bucket is None:
                index[key] = [args]
            else:
                bucket.append(args)
        for (positions, kept), index in self._proj[pred].items():
            key = tuple(args[p] for p in positions)
            proj = tuple(args[p] for p in kept)
            bucket = index.get(key)
            if bucket is None:
                index[key] = {proj}
            else:
                bucket.add(proj)
        return True

    def add_atom(self, a: Atom) -> bool:
        if not a.is_ground():
            raise ValueError(f"cannot store non-ground atom {a}")
        return self.add(a.pred, a.args)

    def __contains__(self, a) -> bool:
        pred, args = a
        rel = self._rel.get(pred)
        return rel is not None and tuple(args) in rel

    def relation(self, pred: str) -> set[tuple]:
        return self._rel.get(pred, set())

    def lookup(self, pred: str, positions: tuple[int, ...], key: tuple) -> list[tuple] | set[tuple]:
        if not positions:
            return self._rel.get(pred, set())
        preds = self._idx[pred]
        index = preds.get(positions)
        if index is None:
            index = {}
            for args in self._rel.get(pred, ()):
                index.setdefault(tuple(args[p] for p in positions), []).append(args)
            preds[positions] = index
        return index.get(key, ())

    def lookup_projected(self, pred: str, positions: tuple[int, ...], key: tuple,
                         kept: tuple[int, ...]) -> set[tuple]:
        """Distinct values at ``kept`` among the facts matching ``key`` at ``positions``."""
        preds = self._proj[pred]
        index = preds.get((positions, kept))
        if index is None:
            index = {}
            for args in self._rel.get(pred, ()):
                index.setdefault(tuple(args[p] for p in positions), set()).add(
                    tuple(args[p] for p in kept))
            preds[(positions, kept)] = index
        return index.get(key, ())

    def predicates(self) -> list[str]:
        return sorted(p for p, r in self._rel.items() if r)

    def count(self, pred: str | None = None) -> int:
        if pred is not None:
            return len(self._rel.get(pred, ()))
        return sum(len(r) for r in self._rel.values())

    def __len__(self) -> int:
        return self.count()

    def atoms(self) -> Iterator[Atom]:
        for pred in self.predicates():
            for args in sorted(self._rel[pred]):
                yield Atom(pred, args)

    def copy(self) -> "FactStore":
        new = FactStore()
        for pred, rel in self._rel.items():
            if rel:
                new._rel[pred] = set(rel)
        return new

    def snapshot(self) -> dict[str, frozenset]:
        return {p: frozenset(r) for p, r in self._rel.items() if r}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactStore):
            return NotImplemented
        return self.snapshot() == other.snapshot()


@dataclass
class EvalStats:
    iterations: int = 0
    derived_facts: int = 0
    rule_firings: int = 0
    wall_millis: float = 0.0


# --- rule compilation ----------------------------------------------------------

class _Step(NamedTuple):
    pred: str
    key_pos: tuple[int, ...]      # positions looked up in the index
    key_src: tuple                # per key position: ("c", const) or ("v", slot)
    key_fn: object                # env -> lookup key
    binds: tuple[tuple[int, int], ...]   # (arg position, slot) newly bound here
    checks: tuple[tuple[int, int], ...]  # (arg position, slot) repeated inside this atom
    body_index: int
    full_binds: tuple             # binds against whole facts, for a delta-first step
    kept: tuple | None            # positions still needed later, when some bound ones are not


def _builder(src: tuple):
    """Function building a tuple from an environment, per ("c", const)/("v", slot) spec."""
    if not src:
        return lambda env: ()
    if all(kind == "v" for kind, _ in src):
        slots = [c for _, c in src]
        if len(slots) == 1:
            s0 = slots[0]
            return lambda env: (env[s0],)
        return operator.itemgetter(*slots)
    return lambda env: tuple(c if kind == "c" else env[c] for kind, c in src)


def _compile_body(order: list[int], body: tuple[Atom, ...], slots: dict[Var, int],
                  head_vars: set[Var]) -> list[_Step]:
    bound: set[Var] = set()
    steps = []
    for k, bi in enumerate(order):
        a = body[bi]
        key_pos, key_src, binds, checks = [], [], [], []
        seen_here: dict[Var, int] = {}
        for pos, t in enumerate(a.args):
            if isinstance(t, Var):
                if t in bound:
                    key_pos.append(pos)
                    key_src.append(("v", slots[t]))
                elif t in seen_here:
                    checks.append((pos, slots[t]))
                else:
                    seen_here[t] = pos
                    binds.append((pos, slots[t]))
            else:
                key_pos.append(pos)
                key_src.append(("c", t))
        bound.update(seen_here)
        later = set(head_vars)
        for bj in order[k + 1:]:
            later.update(body[bj].variables())
        kept = None
        full_binds = tuple(binds)
        needed = [(pos, slot) for pos, slot in binds if body[bi].args[pos] in later]
        if not checks and len(needed) < len(binds):
            # iterate over distinct projections instead of every matching fact
            kept = tuple(pos for pos, _ in needed)
            binds = [(i, slot) for i, (_, slot) in enumerate(needed)]
        steps.append(_Step(a.pred, tuple(key_pos), tuple(key_src), _builder(tuple(key_src)),
                           tuple(binds), tuple(checks), bi, full_binds, kept))
    return steps


class _CompiledRule:
    def __init__(self, rule: Rule):
        self.rule = rule
        vars_: list[Var] = []
        for b in rule.body:
            for v in b.variables():
                if v not in vars_:
                    vars_.append(v)
        self.slots = {v: i for i, v in enumerate(vars_)}
        self.nslots = len(vars_)
        self.head_pred = rule.head.pred
        self.head_src = tuple(("v", self.slots[t]) if isinstance(t, Var) else ("c", t)
                              for t in rule.head.args)
        self.head_fn = _builder(self.head_src)
        self._head_vars = set(rule.head.variables())
        n = len(rule.body)
        self.full_plan = _compile_body(list(range(n)), rule.body, self.slots, self._head_vars)
        # one plan per body position, with that atom evaluated first over the delta
        self._delta_plans: list = [None] * n

    def delta_plan(self, i: int) -> list[_Step]:
        plan = self._delta_plans[i]
        if plan is None:
            order = [i] + [j for j in range(len(self.rule.body)) if j != i]
            plan = self._delta_plans[i] = _compile_body(order, self.rule.body, self.slots,
                                                        self._head_vars)
        return plan


@functools.lru_cache(maxsize=65536)
def _compiled(rule: Rule) -> _CompiledRule:
    # plans depend only on the rule, and the fixed rule base is reused constantly
    return _CompiledRule(rule)


def _run(plan: list[_Step], store: FactStore, delta: dict[str, set] | None,
         delta_pos: int, emit) -> None:
    """Enumerate body matches; ``emit(env)`` is called for each complete binding.

    With ``delta`` given, the first step ranges over the delta relation and
    atoms at original positions before ``delta_pos`` exclude delta tuples.
    """
    env: list = [None] * 64
    nsteps = len(plan)

    def rec(k: int):
        if k == nsteps:
            emit(env)
            return
        st = plan[k]
        if delta is not None and k == 0:
            candidates = delta.get(st.pred, ())
            filt = bool(st.key_pos)
            excl = None
            binds = st.full_binds
            if st.kept is not None:
                consts = tuple(zip(st.key_pos, st.key_src))
                candidates = {tuple(args[p] for p in st.kept) for args in candidates
                              if all(args[pos] == c for pos, (_, c) in consts)}
                filt = False
                binds = st.binds
        elif st.kept is not None:
            # projections may stand for several facts, so delta tuples are not excluded;
            # that only repeats derivations already made
            candidates = store.lookup_projected(st.pred, st.key_pos, st.key_fn(env), st.kept)
            filt = False
            excl = None
            binds = st.binds
        else:
            candidates = store.lookup(st.pred, st.key_pos, st.key_fn(env))
            filt = False
            excl = delta.get(st.pred) if (delta is not None and st.body_index < delta_pos) else None
            binds = st.binds
        checks = st.checks
        for args in candidates:
            if filt:
                # only constants can be keyed in the first step
                if any(args[pos] != c for pos, (_, c) in zip(st.key_pos, st.key_src)):
                    continue
            if excl and args in excl:
                continue
            for pos, slot in binds:
                env[slot] = args[pos]
            if checks and any(args[pos] != env[slot] for pos, slot in checks):
                continue
            rec(k + 1)

    rec(0)


def _head_args(cr: _CompiledRule, env) -> tuple:
    return cr.head_fn(env)


@contextlib.contextmanager
def _gc_paused():
    # evaluation allocates many short tuples but builds no cycles
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def evaluate(program: Program, base: FactStore | Iterable = ()) -> tuple[FactStore, EvalStats]:
    """Least fixpoint of ``program`` over ``base`` by semi-naive iteration.

    The input store is not modified.
    """
    with _gc_paused():
        return _evaluate(program, base)


def _evaluate(program: Program, base) -> tuple[FactStore, EvalStats]:
    t0 = time.perf_counter()
    store = base.copy() if isinstance(base, FactStore) else FactStore(base)
    stats = EvalStats()
    compiled = [_compiled(r) for r in program.rules]
    for cr in compiled:
        if cr.nslots > 64:
            raise ValueError("rule has too many variables")

    # the first round is naive: every rule sees the whole base
    new: dict[str, set] = defaultdict(set)

    def collect(cr):
        rel = store._rel[cr.head_pred]
        out = new[cr.head_pred]
        head = cr.head_fn

        def emit(env):
            stats.rule_firings += 1
            args = head(env)
            if args not in rel:
                out.add(args)
        return emit

    for cr in compiled:
        if any(not store.relation(b.pred) for b in cr.rule.body):
            continue
        _run(cr.full_plan, store, None, 0, collect(cr))
    stats.iterations = 1
    delta = _commit(store, new, stats)

    by_pred: dict[str, list[tuple[_CompiledRule, int]]] = defaultdict(list)
    for cr in compiled:
        for i, b in enumerate(cr.rule.body):
            by_pred[b.pred].append((cr, i))

    while delta:
        stats.iterations += 1
        new = defaultdict(set)
        for pred in sorted(delta):
            for cr, i in by_pred.get(pred, ()):
                _run(cr.delta_plan(i), store, delta, i, collect(cr))
        delta = _commit(store, new, stats)
    stats.wall_millis = (time.perf_counter() - t0) * 1000.0
    return store, stats


def _commit(store: FactStore, new: dict[str, set], stats: EvalStats) -> dict[str, set]:
    delta = {}
    for pred, tuples in new.items():
        added = {t for t in tuples if store.add(pred, t)}
        if added:
            delta[pred] = added
            stats.derived_facts += len(added)
    return delta


def naive_evaluate(program: Program, base: FactStore | Iterable = ()) -> tuple[FactStore, EvalStats]:
    """Reference fixpoint: re-run every rule over the whole store until nothing changes."""
    t0 = time.perf_counter()
    store = base.copy() if isinstance(base, FactStore) else FactStore(base)
    stats = EvalStats()
    compiled = [_compiled(r) for r in program.rules]
    changed = True
    while changed:
        stats.iterations += 1
        found: list[tuple[str, tuple]] = []
        for cr in compiled:
            def emit(env, cr=cr):
                stats.rule_firings += 1
                found.append((cr.head_pred, _head_args(cr, env)))
            _run(cr.full_plan, store, None, 0, emit)
        changed = False
        for pred, args in found:
            if store.add(pred, args):
                stats.derived_facts += 1
                changed = True
    stats.wall_millis = (time.perf_counter() - t0) * 1000.0
    return store, stats


# --- magic sets ----------------------------------------------------------------

def _adorn(a: Atom, bound: set[Var]) -> str:
    return "".join("f" if isinstance(t, Var) and t not in bound else "b" for t in a.args)


def adorned_name(pred: str, adornment: str) -> str:
    return f"{pred}__{adornment}"


def magic_name(pred: str, adornment: str) -> str:
    return f"magic__{pred}__{adornment}"


def _magic_atom(a: Atom, adornment: str) -> Atom:
    return Atom(magic_name(a.pred, adornment),
                tuple(t for t, m in zip(a.args, adornment) if m == "b"))


@dataclass(frozen=True)
class MagicProgram:
    program: Program
    seed: Atom
    goal_pred: str


def magic_transform(p: Program, goal: Atom) -> MagicProgram:
    return _magic_transform(p, goal)


@functools.lru_cache(maxsize=256)
def _magic_transform(p: Program, goal: Atom) -> MagicProgram:
    """Magic-set rewriting of ``p`` for ``goal`` with left-to-right sideways passing.

    Every derived predicate reachable from the goal gets one adorned copy per
    binding pattern.  Base facts for a derived predicate are pulled in by a copy
    rule guarded by the magic predicate, so predicates that are both stored and
    derived keep working.  The returned ``seed`` must be added to the base facts.
    """
    idb = frozenset(p.idb())
    if goal.pred not in idb:
        raise ValueError(f"goal predicate {goal.pred!r} is not defined by the program")
    by_head: dict[str, list[Rule]] = defaultdict(list)
    for r in p.rules:
        by_head[r.head.pred].append(r)

    goal_ad = _adorn(goal, set())
    todo = [(goal.pred, goal_ad)]
    done: set[tuple[str, str]] = set()
    out: list[Rule] = []
    while todo:
        pred, ad = todo.pop()
        if (pred, ad) in done:
            continue
        done.add((pred, ad))
        rules, needed = _adorn_definition(pred, ad, tuple(by_head[pred]), idb)
        out.extend(rules)
        todo.extend(needed)
    seed = Atom(magic_name(goal.pred, goal_ad), tuple(t for t in goal.args if not isinstance(t, Var)))
    # drop magic rules whose head equals their only guard (trivially redundant)
    out = [r for r in out if not (len(r.body) == 1 and r.body[0] == r.head)]
    return MagicProgram(Program(tuple(out), adorned_name(goal.pred, goal_ad)), seed,
                        adorned_name(goal.pred, goal_ad))


@functools.lru_cache(maxsize=8192)
def _adorn_definition(pred: str, ad: str, defining: tuple[Rule, ...], idb: frozenset):
    # the rewriting of one (predicate, adornment) depends only on its own rules
    arity = len(ad)
    xs = tuple(Var(f"A{i}") for i in range(arity))
    out = [Rule(Atom(adorned_name(pred, ad), xs), (_magic_atom(Atom(pred, xs), ad), Atom(pred, xs)),
                label=f"magic-copy:{pred}")]
    needed = []
    for r in defining:
        head_bound = {t for t, m in zip(r.head.args, ad) if m == "b" and isinstance(t, Var)}
        bound = set(head_bound)
        new_body = [_magic_atom(r.head, ad)]
        for b in r.body:
            if b.pred in idb:
                bad = _adorn(b, bound)
                out.append(Rule(_magic_atom(b, bad), tuple(new_body), label=f"magic-sip:{r.label}"))
                needed.append((b.pred, bad))
                new_body.append(Atom(adorned_name(b.pred, bad), b.args))
            else:
                new_body.append(b)
            bound.update(b.variables())
        out.append(Rule(Atom(adorned_name(pred, ad), r.head.args), tuple(new_body),
                        label=f"magic:{r.label}"))
    return tuple(out), tuple(needed)


def is_magic_pred(pred: str) -> bool:
    return pred.startswith("magic__")


def unadorned_pred(pred: str) -> str | None:
    """Original predicate of an adorned name; ``None`` for magic predicates."""
    if is_magic_pred(pred):
        return None
    return pred.rsplit("__", 1)[0] if "__" in pred else pred


def magic_derived_facts(store: FactStore, base: FactStore) -> int:
    """Distinct facts of the original program found by a magic run and absent from ``base``.

    Magic bookkeeping and the same fact under several adornments are not counted,
    which makes the figure comparable with ``derived_facts`` of a plain run.
    """
    found = set()
    for pred in store.predicates():
        orig = unadorned_pred(pred)
        if orig is None:
            continue
        for args in store.relation(pred):
            if (orig, args) not in base:
                found.add((orig, args))
    return len(found)


# --- answers -------------------------------------------------------------------

def answers(store: FactStore, query_pred: str, arity: int,
            header: Iterable[str] | None = None) -> AnswerTable:
    header = tuple(header) if header is not None else tuple(f"V{i}" for i in range(arity))
    rows = [t for t in store.relation(query_pred) if len(t) == arity]
    return AnswerTable(header, tuple(rows))


# --- text syntax ---------------------------------------------------------------

_PLAIN_CONST = re.compile(r"^[a-z][A-Za-z0-9_]*$")


def _format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if _PLAIN_CONST.match(t):
        return t
    return '"' + t.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_facts(store: FactStore) -> str:
    return "".join(f"{a}.\n" for a in store.atoms())


_DL_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<imp>:-)|(?P<p>[(),.])|(?P<comment>%.*))')


def parse_datalog(text: str) -> tuple[list[Rule], list[Atom]]:
    """Parse ``head :- body.`` rules and ``fact.`` lines; returns (rules, facts)."""
    toks: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _DL_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"unexpected Datalog input at offset {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind is None or kind == "comment":
            continue
        toks.append((kind, m.group(kind)))

    i = 0

    def term(tok):
        kind, val = tok
        if kind == "str":
            return re.sub(r"\\(.)", r"\1", val[1:-1])
        if val[0].isupper() or val[0] == "_":
            return Var(val)
        return val

    def parse_atom():
        nonlocal i
        kind, name = toks[i]
        if kind != "name":
            raise ValueError(f"expected predicate name, found {name!r}")
        i += 1
        args = []
        if i < len(toks) and toks[i] == ("p", "("):
            i += 1
            while True:
                args.append(term(toks[i]))
                i += 1
                if toks[i] == ("p", ","):
                    i += 1
                    continue
                if toks[i] == ("p", ")"):
                    i += 1
                    break
                raise ValueError(f"expected ',' or ')', found {toks[i][1]!r}")
        return Atom(name, tuple(args))

    rules, facts = [], []
    while i < len(toks):
        head = parse_atom()
        body = []
        if toks[i] == ("imp", ":-"):
            i += 1
            while True:
                body.append(parse_atom())
                if toks[i] == ("p", ","):
                    i += 1
                    continue
                break
        if toks[i] != ("p", "."):
            raise ValueError(f"expected '.', found {toks[i][1]!r}")
        i += 1
        if body:
            rules.append(Rule(head, tuple(body)))
        elif head.is_ground():
            facts.append(head)
        else:
            raise ValueError(f"non-ground fact {head}")
    return rules, facts
