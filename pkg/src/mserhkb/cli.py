"""Command-line driver: ``query``, ``check``, ``generate`` and ``bench``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import subprocess
import sys
import tempfile
import time
from collections import Counter
from dataclasses import dataclass, field

from .generate import GenConfig, generate_ontology, write_qlf
from .hybrid import ADMISSIBLE, QueryFn, answer_with_stats, assemble, consistency_check
from .model import AnswerTable
from .parser import ParseError, parse_ontology, parse_query
from .partition import Variant

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2
EXIT_MISMATCH = 3

STATS_FIELDS = ("variant", "queryFn", "magic", "parseMillis", "splitMillis", "lmeMillis",
                "tauMillis", "importMillis", "evalMillis", "factsIn", "factsDerived", "answerCount")


@dataclass(frozen=True)
class RunConfig:
    ontology_path: str
    query_path: str
    variant: Variant = Variant.E_AT
    query_fn: QueryFn = QueryFn.ALL
    magic: bool = False
    reflexivity: bool = True
    out_path: str | None = None
    stats_path: str | None = None
    exclude_rules: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.ontology_path or not self.query_path:
            raise ValueError("ontology and query paths must be non-empty")
        if self.variant is Variant.E_AT and self.query_fn is not QueryFn.ALL:
            raise ValueError("variant e-at only admits query function 'all'")


def table_to_csv(t: AnswerTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.header)
    w.writerows(t.rows)
    return buf.getvalue()


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def cmd_query(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    try:
        onto = parse_ontology(_read(cfg.ontology_path))
        query = parse_query(_read(cfg.query_path))
    except (OSError, ParseError, ValueError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    parse_ms = (time.perf_counter() - t0) * 1000.0
    if not consistency_check(onto):
        _err(f"{cfg.ontology_path}: ontology is inconsistent; refusing to answer")
        return EXIT_INCONSISTENT
    kb = assemble(onto, query, cfg.variant, cfg.query_fn, cfg.reflexivity, cfg.exclude_rules)
    table, info = answer_with_stats(kb, cfg.magic)
    _write(cfg.out_path, table_to_csv(table))
    if cfg.stats_path:
        stats = {"variant": cfg.variant.value, "queryFn": cfg.query_fn.value, "magic": cfg.magic,
                 "parseMillis": parse_ms}
        stats.update({k: info[k] for k in STATS_FIELDS if k in info})
        _write(cfg.stats_path, json.dumps(stats, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check(path: str) -> int:
    try:
        onto = parse_ontology(_read(path))
    except (OSError, ParseError, ValueError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    if consistency_check(onto):
        print("consistent")
        return EXIT_OK
    print("inconsistent")
    return EXIT_INCONSISTENT


def cmd_generate(g: GenConfig, out: str | None) -> int:
    o = generate_ontology(g)
    if out is None or out == "-":
        from .generate import GEN_PREFIXES
        from .parser import format_ontology
        sys.stdout.write(format_ontology(o, GEN_PREFIXES))
    else:
        write_qlf(o, out)
    return EXIT_OK


# --- bench ------------------------------------------------------------------------

BENCH_FIELDS = ("ontology", "query", "variant", "queryFn", "magic", "reflexivity", "timedOut",
                "exitStatus", "parseMillis", "splitMillis", "lmeMillis", "tauMillis",
                "importMillis", "evalMillis", "wallMillis", "factsIn", "factsDerived",
                "answerCount", "answerDigest", "mismatch")


def _query_argv(cfg: RunConfig, out: str, stats: str) -> list[str]:
    argv = [sys.executable, "-m", "mserhkb", "query", cfg.ontology_path, cfg.query_path,
            "--variant", cfg.variant.value, "--query-fn", cfg.query_fn.value,
            "--magic", "on" if cfg.magic else "off",
            "--subsumption-reflexivity", "on" if cfg.reflexivity else "off",
            "--out", out, "--stats", stats]
    for label in cfg.exclude_rules:
        argv += ["--exclude-rule", label]
    return argv


def run_one(cfg: RunConfig, timeout_secs: float, workdir: str, tag: str) -> dict:
    row = {"ontology": cfg.ontology_path, "query": cfg.query_path, "variant": cfg.variant.value,
           "queryFn": cfg.query_fn.value, "magic": cfg.magic, "reflexivity": cfg.reflexivity,
           "timedOut": False, "exitStatus": "", "answerDigest": "", "mismatch": False}
    if timeout_secs <= 0:
        row["timedOut"] = True
        return row
    out = os.path.join(workdir, f"{tag}.csv")
    stats = os.path.join(workdir, f"{tag}.json")
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(_query_argv(cfg, out, stats), capture_output=True, text=True,
                              timeout=timeout_secs)
    except subprocess.TimeoutExpired:
        row["timedOut"] = True
        row["wallMillis"] = (time.perf_counter() - t0) * 1000.0
        return row
    row["wallMillis"] = (time.perf_counter() - t0) * 1000.0
    row["exitStatus"] = proc.returncode
    if proc.returncode == EXIT_OK:
        with open(out, "rb") as fh:
            row["answerDigest"] = hashlib.sha256(fh.read()).hexdigest()[:16]
        with open(stats, encoding="utf-8") as fh:
            for k, v in json.load(fh).items():
                if k in BENCH_FIELDS and k not in ("variant", "queryFn", "magic"):
                    row[k] = v
    return row


def flag_mismatches(rows: list[dict]) -> int:
    """Mark completed runs whose answers differ from the reference run on the same input.

    The reference is the e-at run when there is one (plain evaluation of the
    whole ontology), otherwise the most common answer.  Returns the number of
    inputs with any disagreement.
    """
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["exitStatus"] == EXIT_OK and not r["timedOut"]:
            groups.setdefault((r["ontology"], r["query"], r["reflexivity"]), []).append(r)
    bad = 0
    for runs in groups.values():
        digests = [r["answerDigest"] for r in runs]
        if len(set(digests)) <= 1:
            continue
        bad += 1
        baseline = [r["answerDigest"] for r in runs if r["variant"] == Variant.E_AT.value]
        ref = baseline[0] if baseline else Counter(digests).most_common(1)[0][0]
        for r in runs:
            r["mismatch"] = r["answerDigest"] != ref
    return bad


def cmd_bench(cfgs: list[RunConfig], timeout_secs: float, out: str | None = None) -> tuple[list[dict], int]:
    with tempfile.TemporaryDirectory(prefix="mserhkb-bench-") as workdir:
        rows = [run_one(c, timeout_secs, workdir, f"run{i}") for i, c in enumerate(cfgs)]
    mismatched = flag_mismatches(rows)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    _write(out, buf.getvalue())
    return rows, mismatched


# --- argument parsing -------------------------------------------------------------

def _on_off(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected 'on' or 'off', got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _err(message)
        raise SystemExit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mserhkb", description="Meta-query answering over OWL 2 QL ontologies "
                                            "through hybrid knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="answer a SPARQL query over a QLF ontology")
    q.add_argument("ontology")
    q.add_argument("query")
    q.add_argument("--variant", default="e-at", help="e-at | a-t | nat-cat | nat-cact")
    q.add_argument("--query-fn", default="all", help="all | mod")
    q.add_argument("--magic", type=_on_off, default=False)
    q.add_argument("--subsumption-reflexivity", type=_on_off, default=True)
    q.add_argument("--out", help="CSV destination (default: standard output)")
    q.add_argument("--stats", help="write per-phase statistics as JSON")
    q.add_argument("--exclude-rule", action="append", default=[], metavar="LABEL",
                   help="drop a saturation rule from the rule side (fault injection)")

    c = sub.add_parser("check", help="consistency check only")
    c.add_argument("ontology")

    g = sub.add_parser("generate", help="write a seeded synthetic ontology")
    g.add_argument("--classes", type=int, default=5)
    g.add_argument("--properties", type=int, default=2)
    g.add_argument("--individuals", type=int, default=4)
    g.add_argument("--tbox", type=int, default=6)
    g.add_argument("--abox", type=int, default=6)
    g.add_argument("--meta-probability", type=float, default=0.0)
    g.add_argument("--negative-fraction", type=float, default=0.15)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    b = sub.add_parser("bench", help="run variant/query-function combinations with a timeout")
    b.add_argument("ontology", nargs="+", help="ontology files followed by the query file")
    b.add_argument("--variant", action="append", help="restrict to these variants (repeatable)")
    b.add_argument("--query-fn", action="append", help="restrict to these query functions")
    b.add_argument("--magic", default="off", help="on | off | both")
    b.add_argument("--subsumption-reflexivity", type=_on_off, default=True)
    b.add_argument("--timeout-secs", type=float, default=3600.0)
    b.add_argument("--exclude-rule", action="append", default=[], metavar="VARIANT:LABEL",
                   help="drop a saturation rule in runs of one variant (fault injection)")
    b.add_argument("--out", help="CSV report destination (default: standard output)")
    return p


def _bench_configs(args) -> list[RunConfig]:
    if len(args.ontology) < 2:
        raise ValueError("bench needs at least one ontology and a query file")
    *ontologies, query = args.ontology
    variants = {Variant.parse(v) for v in args.variant} if args.variant else set(Variant)
    fns = {QueryFn.parse(f) for f in args.query_fn} if args.query_fn else set(QueryFn)
    mode = args.magic.strip().lower()
    if mode == "both":
        magics = (False, True)
    else:
        magics = (_on_off(mode),)
    faults: dict[Variant, list[str]] = {}
    for spec in args.exclude_rule:
        v, sep, label = spec.partition(":")
        if not sep:
            raise ValueError(f"--exclude-rule expects VARIANT:LABEL, got {spec!r}")
        faults.setdefault(Variant.parse(v), []).append(label)
    cfgs = []
    for onto in ontologies:
        for v, f in ADMISSIBLE:
            if v in variants and f in fns:
                for m in magics:
                    cfgs.append(RunConfig(onto, query, v, f, m, args.subsumption_reflexivity,
                                          exclude_rules=tuple(faults.get(v, ()))))
    return cfgs


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help both end here; report their status instead of exiting
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        if args.command == "query":
            cfg = RunConfig(args.ontology, args.query, Variant.parse(args.variant),
                            QueryFn.parse(args.query_fn), args.magic, args.subsumption_reflexivity,
                            args.out, args.stats, tuple(args.exclude_rule))
            return cmd_query(cfg)
        if args.command == "check":
            return cmd_check(args.ontology)
        if args.command == "generate":
            g = GenConfig(args.classes, args.properties, args.individuals, args.tbox, args.abox,
                          args.meta_probability, args.seed, args.negative_fraction)
            return cmd_generate(g, args.out)
        cfgs = _bench_configs(args)
        rows, mismatched = cmd_bench(cfgs, args.timeout_secs, args.out)
        if mismatched:
            _err(f"{mismatched} input(s) produced differing answers across configurations")
            return EXIT_MISMATCH
        return EXIT_OK
    except ValueError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
