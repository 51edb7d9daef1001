"""The shipped example corpus: colouring and dual-graph rules, K3,3 and two scripts.

The JSON files under ``corpus/`` are generated by :func:`write_corpus` from
the builders below; a test keeps the two in sync. Scripts pin every match
explicitly so that the resulting derivations are fully determined.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .dpo import Derivation, Rule, default_fresh_id, run_script
from .graph import Edge, Graph, undirected
from .serialize import graph_to_dict, load_rules, load_script, ruleset_to_dict, write_json

CORPUS_DIR = Path(__file__).with_name("corpus")

K33_PAIRS = [("v1", "v2"), ("v1", "v4"), ("v1", "v6"),
             ("v3", "v2"), ("v3", "v4"), ("v3", "v6"),
             ("v5", "v2"), ("v5", "v4"), ("v5", "v6")]
TRIANGLE_PAIRS = [("v1", "v3"), ("v1", "v5"), ("v3", "v5"),
                  ("v2", "v4"), ("v2", "v6"), ("v4", "v6")]
COLOR_OF = {"v1": 1, "v3": 1, "v5": 1, "v2": 2, "v4": 2, "v6": 2}


def k33() -> Graph:
    return Graph([f"v{i}" for i in range(1, 7)], undirected(K33_PAIRS))


# -- rules -------------------------------------------------------------------

def add_loop() -> Rule:
    x = Graph(["x"])
    return Rule("add_loop", x, x, Graph(["x"], {"a": Edge("x", "x", "a")}))


def add_color(i: int) -> Rule:
    return Rule(f"add_color({i})", Graph(), Graph(), Graph(["c"], {"ic": Edge("c", "c", str(i))}))


def choose_color(i: int) -> Rule:
    loop = {"ic": Edge("c", "c", str(i))}
    L = Graph(["x", "c"], {"a": Edge("x", "x", "a"), **loop})
    K = Graph(["x", "c"], loop)
    R = Graph(["x", "c"], {**loop, **undirected([("x", "c")])})
    return Rule(f"choose_color({i})", L, K, R)


def color_rules(k: int = 2) -> list[Rule]:
    return [add_loop()] + [add_color(i) for i in range(1, k + 1)] + [choose_color(i) for i in range(1, k + 1)]


def double_edge() -> Rule:
    star = Graph(["x", "y"], undirected([("x", "y")]))
    both = Graph(["x", "y"], {**undirected([("x", "y")]), **undirected([("x", "y")], "b", "b")})
    return Rule("double_edge", star, star, both)


def add_edge() -> Rule:
    xy = Graph(["x", "y"])
    return Rule("add_edge", xy, xy, Graph(["x", "y"], undirected([("x", "y")])))


def remove_pair() -> Rule:
    both = Graph(["x", "y"], {**undirected([("x", "y")]), **undirected([("x", "y")], "b", "b")})
    xy = Graph(["x", "y"])
    return Rule("remove_pair", both, xy, xy)


def dual_rules() -> list[Rule]:
    return [double_edge(), add_edge(), remove_pair()]


# -- scripts -------------------------------------------------------------------

def _match(vmap: dict[str, str], emap: dict[str, str] | None = None) -> dict:
    return {"vmap": vmap, "emap": emap or {}}


def d_color_script() -> dict:
    """Loops on all six vertices, both colour vertices, then one colour per vertex."""
    steps = []
    loops = {}
    for v in sorted(COLOR_OF):
        loops[v] = default_fresh_id("add_loop", len(steps), "a")
        steps.append({"rule": "add_loop", "match": _match({"x": v})})
    color_vertex = {}
    for i in (1, 2):
        name = f"add_color({i})"
        color_vertex[i] = (default_fresh_id(name, len(steps), "c"), default_fresh_id(name, len(steps), "ic"))
        steps.append({"rule": name, "match": _match({})})
    for i in (1, 2):
        c, ic = color_vertex[i]
        for v in sorted(v for v, col in COLOR_OF.items() if col == i):
            steps.append({"rule": f"choose_color({i})",
                          "match": _match({"x": v, "c": c}, {"a": loops[v], "ic": ic})})
    return {"kind": "script", "version": 1, "start": "k33.json", "rules": ["p_color.json"], "steps": steps}


def d_dual_script() -> dict:
    """Double every edge, connect equally coloured vertices, then drop the doubled edges."""
    steps = []
    doubled = []
    for x, y in K33_PAIRS:
        doubled.append((x, y, len(steps)))
        steps.append({"rule": "double_edge", "match": _match({"x": x, "y": y}, {"xy": x + y, "yx": y + x})})
    for x, y in TRIANGLE_PAIRS:
        steps.append({"rule": "add_edge", "match": _match({"x": x, "y": y})})
    for x, y, k in doubled:
        emap = {"xy": x + y, "yx": y + x,
                "bxy": default_fresh_id("double_edge", k, "bxy"), "byx": default_fresh_id("double_edge", k, "byx")}
        steps.append({"rule": "remove_pair", "match": _match({"x": x, "y": y}, emap)})
    return {"kind": "script", "version": 1, "start": "k33.json", "rules": ["p_dual.json"], "steps": steps}


def write_corpus(directory: str | Path = CORPUS_DIR) -> list[Path]:
    directory = Path(directory)
    return [
        write_json(directory / "k33.json", graph_to_dict(k33(), tagged=True)),
        write_json(directory / "p_color.json", ruleset_to_dict("P_color", color_rules(2))),
        write_json(directory / "p_dual.json", ruleset_to_dict("P_dual", dual_rules())),
        write_json(directory / "d_color.json", d_color_script()),
        write_json(directory / "d_dual.json", d_dual_script()),
    ]


# -- loaders -------------------------------------------------------------------

def corpus_path(name: str) -> Path:
    return CORPUS_DIR / name


def load_corpus_rules(name: str) -> list[Rule]:
    return load_rules(corpus_path(name))


@lru_cache(maxsize=None)
def _derive(script: str) -> Derivation:
    start, entries, rules = load_script(corpus_path(script))
    return run_script(start, entries, rules)


def d_color() -> Derivation:
    return _derive("d_color.json")


def d_dual() -> Derivation:
    return _derive("d_dual.json")


if __name__ == "__main__":
    for p in write_corpus():
        print(p)
