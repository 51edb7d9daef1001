"""Command-line front end.

Exit status: 0 on success, 1 when an input is invalid or a precondition
fails, 2 when a property check reports a failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Callable

from .dpo import Derivation, invert_derivation, pushout_violations, replay, run_script
from .errors import DPOError, FormatError, IsoSearchUndecided
from .graph import Graph, find_isomorphism
from .moving import check_rule_pair_independence, move_forward, random_cell_order
from .serialize import (
    derivation_from_dict,
    derivation_to_dict,
    dumps,
    graph_from_dict,
    grid_to_dict,
    handle_from_dict,
    handle_to_dict,
    infer_kind,
    load_derivation,
    load_rules,
    load_script,
    read_json,
    restriction_to_dict,
    spine_to_dict,
    validate_document,
    write_json,
)
from .spine import (
    DEFAULT_MAX_ISOS,
    accessed_part,
    check_spine_preservation,
    derivations_equal_up_to_iso,
    restrict,
)

OK, INVALID, PROPERTY_FAILED = 0, 1, 2


class Output:
    """Collects artifacts and a report; writes files under ``--out`` or prints."""

    def __init__(self, args: argparse.Namespace):
        self.out = Path(args.out) if args.out else None
        self.fmt = args.format
        self.written: list[str] = []

    def artifact(self, name: str, obj: Any, *, primary: bool = False) -> None:
        if self.out is not None:
            self.written.append(str(write_json(self.out / name, obj)))
        elif primary and self.fmt == "json":
            sys.stdout.write(dumps(obj))

    def summary(self, text: str, data: dict | None = None) -> None:
        """Human summary in text mode; JSON summary only when artifacts went to files."""
        if self.fmt == "text":
            print(text)
            for p in self.written:
                print(f"wrote {p}")
        elif self.out is not None:
            sys.stdout.write(dumps({**(data or {}), "written": self.written}))

    def report(self, rep: dict, text: str, name: str = "report.json") -> None:
        if self.out is not None:
            self.written.append(str(write_json(self.out / name, rep)))
        if self.fmt == "json":
            sys.stdout.write(dumps(rep))
        else:
            print(text)
            for p in self.written:
                print(f"wrote {p}")


def derivation_table(d: Derivation) -> str:
    rows = [f"{'#':>3}  {'rule':<18} {'match':>5}  {'|V(H)|':>6} {'|E(H)|':>6}"]
    for k, s in enumerate(d.steps):
        size = len(s.g.vmap) + len(s.g.emap)
        rows.append(f"{k:>3}  {s.rule.name:<18} {size:>5}  {len(s.H.vertices):>6} {len(s.H.edges):>6}")
    rows.append(f"start |V|={len(d.start.vertices)} |E|={len(d.start.edges)}; "
                f"end |V|={len(d.end.vertices)} |E|={len(d.end.edges)}; {len(d)} steps")
    return "\n".join(rows)


def _stem(path: str) -> str:
    name = Path(path).name
    for suffix in (".json", ".derivation"):
        name = name.removesuffix(suffix)
    return name


def _hosts(path: str) -> list[Graph]:
    """Graphs to search: a graph file, every graph of a dump, or of a derived script."""
    d = read_json(path)
    kind = infer_kind(d)
    if kind == "graph":
        return [graph_from_dict(d, path)]
    if kind == "script":
        start, entries, rules = load_script(path)
        return run_script(start, entries, rules).graphs
    return load_derivation(path).graphs


# -- verbs ---------------------------------------------------------------------

def _files(paths: list[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        out += sorted(p.rglob("*.json")) if p.is_dir() else [p]
    return out


def cmd_validate(args, io: Output) -> int:
    results = []
    for path in _files(args.paths):
        problems: list[str] = []
        kind = None
        try:
            doc = read_json(path)
            kind = validate_document(doc, str(path), path.parent)
            if kind == "script":
                start, entries, rules = load_script(path)
                run_script(start, entries, rules)
            elif kind == "derivation":
                d = derivation_from_dict(doc, str(path))
                if derivation_to_dict(replay(d)) != derivation_to_dict(d):
                    problems.append(f"{path}: replay does not reproduce the dump")
        except FormatError as exc:
            problems += [f"{exc.where}: {p}" for p in exc.problems]
        except DPOError as exc:
            problems.append(f"{path}: {exc}")
        results.append({"path": str(path), "kind": kind, "ok": not problems, "problems": problems})
    bad = [r for r in results if not r["ok"]]
    lines = []
    for r in results:
        lines.append(f"{'ok  ' if r['ok'] else 'FAIL'} {r['path']} ({r['kind'] or '?'})")
        lines += [f"     {p}" for p in r["problems"]]
    if not results:
        lines.append("no files found")
    io.report({"kind": "validation-report", "version": 1, "result": "FAIL" if bad or not results else "PASS",
               "files": results}, "\n".join(lines), "validation.json")
    return INVALID if bad or not results else OK


def cmd_derive(args, io: Output) -> int:
    start, entries, rules = load_script(args.script)
    d = run_script(start, entries, rules)
    io.artifact(f"{_stem(args.script)}.derivation.json", derivation_to_dict(d), primary=True)
    io.summary(derivation_table(d), {"steps": len(d)})
    return OK


def cmd_invert(args, io: Output) -> int:
    d = invert_derivation(load_derivation(args.dump))
    io.artifact(f"{_stem(args.dump)}.inverted.json", derivation_to_dict(d), primary=True)
    io.summary(derivation_table(d), {"steps": len(d)})
    return OK


def _order(args, n: int, m: int):
    if args.order == "random":
        return random_cell_order(n, m, random.Random(args.seed))
    return args.order


def cmd_move(args, io: Output) -> int:
    d, d_bar = load_derivation(args.dump), load_derivation(args.along)
    if args.backward:
        if d_bar.end != d.start:
            raise FormatError(args.along, "backward moving needs this derivation to end where the first starts")
        d_bar = invert_derivation(d_bar)
    elif d.start != d_bar.start:
        raise FormatError(args.along, "forward moving needs both derivations to share their start graph")
    pair = move_forward(d, d_bar, order=_order(args, len(d), len(d_bar)), workers=args.workers)
    io.artifact("moved.json", derivation_to_dict(pair.moved), primary=True)
    io.artifact("co_moved.json", derivation_to_dict(pair.co_moved))
    io.artifact("grid.json", grid_to_dict(pair))
    io.summary(derivation_table(pair.moved) + f"\ngrid {len(d)}x{len(d_bar)} cells, all independent",
               {"steps": len(pair.moved), "cells": len(pair.grid)})
    return OK


def cmd_acc(args, io: Output) -> int:
    d = load_derivation(args.dump)
    acc = accessed_part(d).handle
    io.artifact("acc.json", handle_to_dict(acc), primary=True)
    io.summary(f"accessed part: {len(acc.vset)} vertices {sorted(acc.vset)}, {len(acc.eset)} edges {sorted(acc.eset)}",
               handle_to_dict(acc))
    return OK


def cmd_restrict(args, io: Output) -> int:
    d = load_derivation(args.dump)
    m = handle_from_dict(read_json(args.handle), d.start, args.handle)
    cert = restrict(d, m)
    problems = cert.violations()
    if problems:
        raise DPOError("restriction certificate failed: " + "; ".join(problems))
    io.artifact("restriction.json", restriction_to_dict(cert.restricted, cert.mono_chain), primary=True)
    io.summary(derivation_table(cert.restricted), {"steps": len(cert.restricted)})
    return OK


def cmd_spine(args, io: Output) -> int:
    d = load_derivation(args.dump)
    acc = accessed_part(d)
    cert = restrict(d, acc.handle)
    io.artifact("spine.json", spine_to_dict(acc.handle, cert.restricted, cert.mono_chain), primary=True)
    io.summary(derivation_table(cert.restricted), {"steps": len(cert.restricted)})
    return OK


def cmd_iso(args, io: Output) -> int:
    a, b = read_json(args.first), read_json(args.second)
    if infer_kind(a) == "graph" and infer_kind(b) == "graph":
        iso = find_isomorphism(graph_from_dict(a, args.first), graph_from_dict(b, args.second))
        witness = None if iso is None else [iso.to_dict()]
    else:
        da, db = load_derivation(args.first), load_derivation(args.second)
        try:
            found = derivations_equal_up_to_iso(da, db, args.max_iso)
        except IsoSearchUndecided as exc:
            io.report({"kind": "iso-report", "version": 1, "result": "UNDECIDED", "reason": str(exc)},
                      f"UNDECIDED: {exc}", "iso.json")
            return INVALID
        witness = None if found is None else [i.to_dict() for i in found.graph_isos()]
    result = "EQUAL" if witness is not None else "DIFFERENT"
    io.report({"kind": "iso-report", "version": 1, "result": result, "witness": witness},
              f"{result} up to isomorphism", "iso.json")
    return OK if witness is not None else PROPERTY_FAILED


def _theorem_random(args, io: Output) -> int:
    from .randomized import random_instance

    base = args.seed if args.seed is not None else 0
    failures = []
    for seed in range(base, base + args.random):
        inst = random_instance(seed)
        rep = check_spine_preservation(inst.d, inst.d_bar, max_isos=args.max_iso)
        if not rep.holds:
            failures.append(seed)
    result = "FAIL" if failures else "PASS"
    io.report({"kind": "theorem-report", "version": 1, "result": result, "seeds": [base, base + args.random],
               "failing_seeds": failures},
              f"{result}: spine preservation on {args.random} random instances from seed {base}"
              + (f"; failing seeds {failures}" if failures else ""))
    return OK if not failures else PROPERTY_FAILED


def cmd_check(args, io: Output) -> int:
    if args.theorem:
        if args.random:
            return _theorem_random(args, io)
        if len(args.inputs) != 2:
            raise FormatError("check --theorem", "expects two derivation dumps")
        d, d_bar = map(load_derivation, args.inputs)
        rep = check_spine_preservation(d, d_bar, backward=args.backward, max_isos=args.max_iso)
        body = rep.to_dict()
        text = f"{body['result']}: spine of length {body['spine_length']} preserved ({rep.direction})"
        if rep.one_step_law is not None:
            text += f"; one-step restriction law {'holds' if rep.one_step_law else 'FAILS'}"
        io.report(body, text)
        return OK if rep.holds else PROPERTY_FAILED
    if args.indep:
        if len(args.inputs) != 2 or not args.hosts:
            raise FormatError("check --indep", "expects two rule files and at least one --hosts file")
        P, P_bar = map(load_rules, args.inputs)
        hosts = [g for h in args.hosts for g in _hosts(h)]
        rep = check_rule_pair_independence(P, P_bar, hosts, "sequential" if args.sequential else "parallel",
                                           injective=args.injective)
        body = rep.to_dict()
        lines = [f"{body['result']}: {rep.mode} independence, {rep.pairs_checked} pairs over {len(hosts)} hosts"]
        lines += [f"  {pair}: {n}" for pair, n in rep.by_rule_pair().items()]
        for c in rep.counterexamples[:20]:
            lines.append(f"  host {c.host}: {c.first_rule} {json.dumps(c.first_match, sort_keys=True)} "
                         f"then {c.second_rule} {json.dumps(c.second_match, sort_keys=True)}")
        io.report(body, "\n".join(lines))
        return OK if rep.independent else PROPERTY_FAILED
    if not args.inputs:
        raise FormatError("check --dpo", "expects at least one derivation dump")
    failures = []
    steps = 0
    for path in args.inputs:
        d = load_derivation(path, check=False)
        for k, s in enumerate(d.steps):
            steps += 1
            failures += [{"file": path, "step": k, "problem": p} for p in pushout_violations(s)]
    result = "FAIL" if failures else "PASS"
    io.report({"kind": "dpo-report", "version": 1, "result": result, "steps": steps, "failures": failures},
              f"{result}: {steps} steps checked" + "".join(f"\n  {f['file']} step {f['step']}: {f['problem']}"
                                                          for f in failures))
    return OK if not failures else PROPERTY_FAILED


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="write artifacts into DIR instead of printing")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized orders and suites")
    common.add_argument("--max-iso", type=int, default=DEFAULT_MAX_ISOS,
                        help="cap on candidate start isomorphisms (default %(default)s)")

    parser = argparse.ArgumentParser(prog="dpospine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    verb("validate", cmd_validate, "check graph, rule, script and dump files").add_argument("paths", nargs="+")
    verb("derive", cmd_derive, "run a script and dump the derivation").add_argument("script")
    verb("invert", cmd_invert, "invert a derivation dump").add_argument("dump")

    p = verb("move", cmd_move, "move a derivation along another")
    p.add_argument("dump")
    p.add_argument("along")
    p.add_argument("--backward", action="store_true", help="ALONG ends where DUMP starts")
    p.add_argument("--order", choices=("row", "column", "antidiagonal", "random"), default="row")
    p.add_argument("--workers", type=int, default=1)

    verb("acc", cmd_acc, "accessed part of a derivation").add_argument("dump")
    p = verb("restrict", cmd_restrict, "restrict a derivation to a subgraph of its start")
    p.add_argument("dump")
    p.add_argument("handle")
    verb("spine", cmd_spine, "restriction of a derivation to its accessed part").add_argument("dump")

    p = verb("iso", cmd_iso, "equality up to isomorphism of two graphs or two derivations")
    p.add_argument("first")
    p.add_argument("second")

    p = verb("check", cmd_check, "property checks with a pass/fail report")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--theorem", action="store_true", help="spine preservation for DUMP and ALONG")
    mode.add_argument("--indep", action="store_true", help="bounded independence search for two rule sets")
    mode.add_argument("--dpo", action="store_true", help="re-verify both pushouts of every step")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--hosts", nargs="+", default=[], help="graphs, scripts or dumps to search (with --indep)")
    p.add_argument("--sequential", action="store_true")
    p.add_argument("--injective", action="store_true", help="only injective matches (with --indep)")
    p.add_argument("--backward", action="store_true")
    p.add_argument("--random", type=int, default=0, metavar="N", help="N random instances (with --theorem)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    io = Output(args)
    try:
        return args.fn(args, io)
    except FormatError as exc:
        for p in exc.problems:
            print(f"error: {exc.where}: {p}", file=sys.stderr)
        return INVALID
    except DPOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
