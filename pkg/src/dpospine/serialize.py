"""JSON artifacts: graphs, rules, scripts, derivation dumps, grids, handles.

Every top-level artifact carries a ``"kind"`` discriminator and a format
``"version"``. Graphs nested inside a container omit both. Output is
deterministic (sorted keys and ids), so a dump that is loaded, replayed and
dumped again is byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .dpo import Derivation, DerivationStep, Rule, pushout_violations
from .errors import FormatError
from .graph import Graph, GraphMorphism, SubgraphHandle, validate_graph, validate_morphism
from .moving import MovedPair

FORMAT_VERSION = 1

KINDS = ("graph", "rule", "ruleset", "script", "derivation", "handle", "grid", "restriction", "spine")


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(str(path), f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise FormatError(str(path), exc.strerror or str(exc)) from exc


def _tag(kind: str, body: dict) -> dict:
    return {"kind": kind, "version": FORMAT_VERSION, **body}


def _expect(cond: bool, where: str, msg: str) -> None:
    if not cond:
        raise FormatError(where, msg)


def _field(d: Mapping, key: str, where: str, typ: type | tuple[type, ...]) -> Any:
    _expect(isinstance(d, Mapping), where, "expected an object")
    _expect(key in d, where, f"missing field {key!r}")
    val = d[key]
    _expect(isinstance(val, typ), f"{where}.{key}", f"expected {getattr(typ, '__name__', typ)}")
    return val


def infer_kind(d: Any) -> str | None:
    if not isinstance(d, Mapping):
        return None
    if isinstance(d.get("kind"), str):
        return d["kind"]
    if "L" in d and "R" in d:
        return "rule"
    if "vertices" in d and "edges" in d:
        return "graph"
    if isinstance(d.get("start"), str) and "steps" in d:
        return "script"
    if isinstance(d.get("rules"), list):
        return "ruleset"
    return None


def _check_version(d: Mapping, where: str) -> None:
    if "version" in d:
        _expect(d["version"] == FORMAT_VERSION, where, f"unsupported format version {d['version']!r}")


# -- graphs and morphisms ----------------------------------------------------

def graph_to_dict(g: Graph, tagged: bool = False) -> dict:
    body = {
        "vertices": sorted(g.vertices),
        "edges": [
            {"id": e, "src": g.edges[e].src, "tgt": g.edges[e].tgt, "label": g.edges[e].label}
            for e in sorted(g.edges)
        ],
    }
    return _tag("graph", body) if tagged else body


def graph_from_dict(d: Any, where: str = "graph", *, check: bool = True) -> Graph:
    vs = _field(d, "vertices", where, list)
    es = _field(d, "edges", where, list)
    for k, v in enumerate(vs):
        _expect(isinstance(v, str) and v != "", f"{where}.vertices[{k}]", "vertex ids must be non-empty strings")
    _expect(len(set(vs)) == len(vs), f"{where}.vertices", "duplicate vertex id")
    edges = {}
    for k, e in enumerate(es):
        w = f"{where}.edges[{k}]"
        eid = _field(e, "id", w, str)
        src = _field(e, "src", w, str)
        tgt = _field(e, "tgt", w, str)
        label = e.get("label", "*")
        _expect(isinstance(label, str) and label != "", w, "label must be a non-empty string")
        _expect(eid != "" and eid not in edges, w, f"duplicate or empty edge id {eid!r}")
        edges[eid] = (src, tgt, label)
    g = Graph(vs, edges)
    if check:
        problems = validate_graph(g)
        if problems:
            raise FormatError(where, problems)
    return g


def morphism_to_dict(m: GraphMorphism) -> dict:
    return m.to_dict()


def morphism_from_dict(d: Any, dom: Graph, cod: Graph, where: str = "morphism", *, check: bool = True) -> GraphMorphism:
    vmap = _field(d, "vmap", where, dict)
    emap = d.get("emap", {})
    _expect(isinstance(emap, dict), f"{where}.emap", "expected an object")
    for name, mp in (("vmap", vmap), ("emap", emap)):
        for k, v in mp.items():
            _expect(isinstance(v, str), f"{where}.{name}.{k}", "image must be a string id")
    m = GraphMorphism(dom, cod, vmap, emap)
    if check:
        problems = validate_morphism(m)
        if problems:
            raise FormatError(where, problems)
    return m


# -- rules ---------------------------------------------------------------------

def rule_to_dict(r: Rule, tagged: bool = False) -> dict:
    body = {"name": r.name, "L": graph_to_dict(r.L), "K": graph_to_dict(r.K), "R": graph_to_dict(r.R)}
    return _tag("rule", body) if tagged else body


def rule_from_dict(d: Any, where: str = "rule", *, check: bool = True) -> Rule:
    name = _field(d, "name", where, str)
    _expect(name != "", f"{where}.name", "rule name must not be empty")
    sides = {s: graph_from_dict(_field(d, s, where, dict), f"{where}.{s}", check=check) for s in "LKR"}
    r = Rule(name, sides["L"], sides["K"], sides["R"])
    if check:
        problems = r.violations()
        if problems:
            raise FormatError(where, problems)
    return r


def ruleset_to_dict(name: str, rules: list[Rule]) -> dict:
    return _tag("ruleset", {"name": name, "rules": [rule_to_dict(r) for r in rules]})


def ruleset_from_dict(d: Any, where: str = "ruleset", *, check: bool = True) -> tuple[str, list[Rule]]:
    _check_version(d, where)
    items = _field(d, "rules", where, list)
    rules = [rule_from_dict(r, f"{where}.rules[{k}]", check=check) for k, r in enumerate(items)]
    names = [r.name for r in rules]
    dup = sorted({n for n in names if names.count(n) > 1})
    _expect(not dup, where, f"duplicate rule names {dup}")
    return d.get("name", ""), rules


def load_rules(path: str | Path) -> list[Rule]:
    """A rule file or a rule-set file."""
    d = read_json(path)
    if infer_kind(d) == "rule":
        _check_version(d, str(path))
        return [rule_from_dict(d, str(path))]
    _expect(infer_kind(d) == "ruleset", str(path), "expected a rule or rule set")
    return ruleset_from_dict(d, str(path))[1]


def load_graph(path: str | Path) -> Graph:
    d = read_json(path)
    _expect(infer_kind(d) == "graph", str(path), "expected a graph")
    _check_version(d, str(path))
    return graph_from_dict(d, str(path))


# -- scripts -------------------------------------------------------------------

def script_from_dict(d: Any, base: Path, where: str = "script") -> tuple[Graph, list[tuple[str, Any]], dict[str, Rule]]:
    """Resolve a script: start graph, ``(rule, match spec)`` entries and the rule table.

    Paths in ``start`` and ``rules`` are relative to ``base``.
    """
    _check_version(d, where)
    start = load_graph(base / _field(d, "start", where, str))
    rules: dict[str, Rule] = {}
    for k, p in enumerate(d.get("rules", [])):
        _expect(isinstance(p, str), f"{where}.rules[{k}]", "expected a path")
        for r in load_rules(base / p):
            _expect(r.name not in rules, f"{where}.rules[{k}]", f"rule {r.name!r} defined twice")
            rules[r.name] = r
    entries = []
    for k, s in enumerate(_field(d, "steps", where, list)):
        w = f"{where}.steps[{k}]"
        name = _field(s, "rule", w, str)
        match = s.get("match", "auto")
        if isinstance(match, str):
            _expect(match == "auto", f"{w}.match", f"unknown match spec {match!r}")
        else:
            _expect(isinstance(match, dict) and isinstance(match.get("vmap", {}), dict)
                    and isinstance(match.get("emap", {}), dict), f"{w}.match", "expected \"auto\" or {vmap, emap}")
        entries.append((name, match))
    return start, entries, rules


def load_script(path: str | Path) -> tuple[Graph, list[tuple[str, Any]], dict[str, Rule]]:
    path = Path(path)
    d = read_json(path)
    _expect(infer_kind(d) == "script", str(path), "expected a script")
    return script_from_dict(d, path.parent, str(path))


# -- derivations ---------------------------------------------------------------

def _rule_table(steps) -> dict[str, dict]:
    table: dict[str, Rule] = {}
    for s in steps:
        known = table.setdefault(s.rule.name, s.rule)
        if known != s.rule:
            raise FormatError("derivation", f"two different rules share the name {s.rule.name!r}")
    return {name: rule_to_dict(r) for name, r in sorted(table.items())}


def step_to_dict(s: DerivationStep) -> dict:
    return {
        "rule": s.rule.name,
        "G": graph_to_dict(s.G),
        "g": morphism_to_dict(s.g),
        "Z": graph_to_dict(s.Z),
        "z": morphism_to_dict(s.z),
        "H": graph_to_dict(s.H),
        "h": morphism_to_dict(s.h),
    }


def step_from_dict(d: Any, rules: Mapping[str, Rule], where: str, *, check: bool = True) -> DerivationStep:
    name = _field(d, "rule", where, str)
    _expect(name in rules, f"{where}.rule", f"rule {name!r} missing from the rule table")
    rule = rules[name]
    G = graph_from_dict(_field(d, "G", where, dict), f"{where}.G")
    Z = graph_from_dict(_field(d, "Z", where, dict), f"{where}.Z")
    H = graph_from_dict(_field(d, "H", where, dict), f"{where}.H")
    g = morphism_from_dict(_field(d, "g", where, dict), rule.L, G, f"{where}.g")
    z = morphism_from_dict(_field(d, "z", where, dict), rule.K, Z, f"{where}.z")
    h = morphism_from_dict(_field(d, "h", where, dict), rule.R, H, f"{where}.h")
    for host, tag in ((G, "G"), (H, "H")):
        sub = SubgraphHandle(host, Z.vertices, Z.edge_ids)
        bad = sub.violations() + [
            f"edge {e} differs from {tag}" for e in sorted(Z.edges) if e in host.edges and host.edges[e] != Z.edges[e]
        ]
        _expect(not bad, f"{where}.Z", [f"not a subgraph of {tag}: {b}" for b in bad])
    step = DerivationStep(rule, G, g, Z, z, H, h, GraphMorphism.inclusion(Z, G), GraphMorphism.inclusion(Z, H))
    if check:
        problems = pushout_violations(step)
        if problems:
            raise FormatError(where, problems)
    return step


def derivation_to_dict(d: Derivation, tagged: bool = True) -> dict:
    body = {
        "rules": _rule_table(d.steps),
        "start": graph_to_dict(d.start),
        "steps": [step_to_dict(s) for s in d.steps],
    }
    return _tag("derivation", body) if tagged else body


def _rules_from_table(d: Mapping, where: str) -> dict[str, Rule]:
    table = d.get("rules", {})
    _expect(isinstance(table, dict), f"{where}.rules", "expected an object keyed by rule name")
    rules = {}
    for name, rd in table.items():
        r = rule_from_dict(rd, f"{where}.rules.{name}")
        _expect(r.name == name, f"{where}.rules.{name}", f"rule is named {r.name!r}")
        rules[name] = r
    return rules


def derivation_from_dict(d: Any, where: str = "derivation", *, check: bool = True) -> Derivation:
    _check_version(d, where)
    rules = _rules_from_table(d, where)
    start = graph_from_dict(_field(d, "start", where, dict), f"{where}.start")
    steps = []
    cur = start
    for k, sd in enumerate(_field(d, "steps", where, list)):
        s = step_from_dict(sd, rules, f"{where}.steps[{k}]", check=check)
        _expect(s.G == cur, f"{where}.steps[{k}].G", "does not equal the previous graph of the derivation")
        steps.append(s)
        cur = s.H
    return Derivation(start, tuple(steps))


def load_derivation(path: str | Path, *, check: bool = True) -> Derivation:
    """A derivation dump, or the derivation inside a restriction or spine file.

    With ``check=False`` the pushout squares are not verified on load.
    """
    d = read_json(path)
    kind = infer_kind(d)
    if kind in ("restriction", "spine"):
        d = _field(d, "derivation", str(path), dict)
        kind = "derivation"
    _expect(kind == "derivation", str(path), "expected a derivation dump")
    return derivation_from_dict(d, str(path), check=check)


# -- handles, restrictions, spines, grids --------------------------------------

def handle_to_dict(h: SubgraphHandle, tagged: bool = True) -> dict:
    body = h.to_dict()
    return _tag("handle", body) if tagged else body


def handle_from_dict(d: Any, host: Graph, where: str = "handle") -> SubgraphHandle:
    _check_version(d, where)
    vs = _field(d, "vertices", where, list)
    es = _field(d, "edges", where, list)
    h = SubgraphHandle(host, frozenset(vs), frozenset(es))
    problems = h.violations()
    if problems:
        raise FormatError(where, problems)
    return h


def restriction_to_dict(restricted: Derivation, chain, kind: str = "restriction", **extra) -> dict:
    body = {
        "derivation": derivation_to_dict(restricted, tagged=False),
        "mono_chain": [handle_to_dict(h, tagged=False) for h in chain],
        **extra,
    }
    return _tag(kind, body)


def spine_to_dict(acc: SubgraphHandle, restricted: Derivation, chain) -> dict:
    return restriction_to_dict(restricted, chain, "spine", acc=handle_to_dict(acc, tagged=False))


def _check_chain(d: Mapping, restricted: Derivation, where: str) -> None:
    chain = _field(d, "mono_chain", where, list)
    graphs = restricted.graphs
    _expect(len(chain) == len(graphs), f"{where}.mono_chain", "length differs from the number of graphs")
    for k, (h, g) in enumerate(zip(chain, graphs)):
        w = f"{where}.mono_chain[{k}]"
        ok = sorted(_field(h, "vertices", w, list)) == sorted(g.vertices) and sorted(
            _field(h, "edges", w, list)) == sorted(g.edges)
        _expect(ok, w, "does not list the items of the restricted graph")


def grid_to_dict(pair: MovedPair) -> dict:
    cells = sorted(pair.grid.items())
    steps = [sq.bottom for _, sq in cells] + [sq.right for _, sq in cells]
    n = len(pair.moved)
    m = len(pair.co_moved)
    return _tag("grid", {
        "n": n,
        "m": m,
        "rules": _rule_table(steps),
        "cells": [
            {"i": i, "j": j, "bottom": step_to_dict(sq.bottom), "right": step_to_dict(sq.right)}
            for (i, j), sq in cells
        ],
    })


def grid_from_dict(d: Any, where: str = "grid") -> dict[tuple[int, int], tuple[DerivationStep, DerivationStep]]:
    """Cell steps keyed by ``(i, j)``; each cell must close on one graph."""
    _check_version(d, where)
    rules = _rules_from_table(d, where)
    out = {}
    for k, c in enumerate(_field(d, "cells", where, list)):
        w = f"{where}.cells[{k}]"
        cell = (_field(c, "i", w, int), _field(c, "j", w, int))
        _expect(cell not in out, w, f"duplicate cell {cell}")
        bottom = step_from_dict(_field(c, "bottom", w, dict), rules, f"{w}.bottom")
        right = step_from_dict(_field(c, "right", w, dict), rules, f"{w}.right")
        _expect(bottom.H == right.H, w, "square does not close on one graph")
        out[cell] = (bottom, right)
    return out


def validate_document(d: Any, where: str, base: Path | None = None) -> str:
    """Fully parse and check one artifact; returns its kind or raises :class:`FormatError`."""
    kind = infer_kind(d)
    _expect(kind is not None, where, "cannot determine the artifact kind")
    _expect(kind in KINDS, where, f"unknown kind {kind!r}")
    _check_version(d, where)
    if kind == "graph":
        graph_from_dict(d, where)
    elif kind == "rule":
        rule_from_dict(d, where)
    elif kind == "ruleset":
        ruleset_from_dict(d, where)
    elif kind == "script":
        script_from_dict(d, base or Path("."), where)
    elif kind == "derivation":
        derivation_from_dict(d, where)
    elif kind in ("restriction", "spine"):
        sub = _field(d, "derivation", where, dict)
        restricted = derivation_from_dict(sub, f"{where}.derivation")
        _check_chain(d, restricted, where)
        if kind == "spine":
            acc = _field(d, "acc", where, dict)
            handle_from_dict(acc, restricted.start, f"{where}.acc")
            _expect(SubgraphHandle(restricted.start, frozenset(acc["vertices"]), frozenset(acc["edges"])).is_full(),
                    f"{where}.acc", "spine must start at the accessed part")
    elif kind == "handle":
        _field(d, "vertices", where, list)
        _field(d, "edges", where, list)
    elif kind == "grid":
        grid_from_dict(d, where)
    return kind


__all__ = [
    "FORMAT_VERSION",
    "derivation_from_dict",
    "derivation_to_dict",
    "dumps",
    "graph_from_dict",
    "graph_to_dict",
    "grid_from_dict",
    "grid_to_dict",
    "handle_from_dict",
    "handle_to_dict",
    "load_derivation",
    "load_graph",
    "load_rules",
    "load_script",
    "read_json",
    "restriction_to_dict",
    "rule_from_dict",
    "rule_to_dict",
    "ruleset_from_dict",
    "ruleset_to_dict",
    "spine_to_dict",
    "validate_document",
    "write_json",
]
