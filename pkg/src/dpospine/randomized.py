"""Random independent instances for property checks.

Two rule families are built over disjoint label alphabets. Neither family
deletes vertices or touches the other's labels, and both only read the
shared base label ``"s"``, so any derivation of one family is parallel
independent of any derivation of the other from the same graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .dpo import Derivation, Rule, applicable_matches, apply
from .graph import Edge, Graph, SubgraphHandle

BASE_LABEL = "s"


def family_rules(tag: str) -> list[Rule]:
    """Rules creating, relabelling and deleting edges labelled ``tag+"1"``/``tag+"2"``."""
    one, two = f"{tag}1", f"{tag}2"
    x, xy = Graph(["x"]), Graph(["x", "y"])
    guard = Graph(["x", "y"], {"b": Edge("x", "y", BASE_LABEL)})
    return [
        Rule(f"{tag}_loop", x, x, Graph(["x"], {"l": Edge("x", "x", one)})),
        Rule(f"{tag}_link", xy, xy, Graph(["x", "y"], {"f": Edge("x", "y", two)})),
        Rule(f"{tag}_drop", Graph(["x", "y"], {"f": Edge("x", "y", two)}), xy, xy),
        Rule(f"{tag}_flip", Graph(["x", "y"], {"f": Edge("x", "y", two)}), xy,
             Graph(["x", "y"], {"r": Edge("y", "x", one)})),
        Rule(f"{tag}_unloop", Graph(["x"], {"l": Edge("x", "x", one)}), x, x),
        Rule(f"{tag}_sprout", x, x, Graph(["x", "n"], {"f": Edge("x", "n", one)})),
        Rule(f"{tag}_along", guard, guard, Graph(["x", "y"], {"b": guard.edges["b"], "f": Edge("x", "y", two)})),
        Rule(f"{tag}_seed", Graph(), Graph(), Graph(["n"], {"l": Edge("n", "n", one)})),
    ]


def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 8) -> Graph:
    n = rng.randint(1, max_vertices)
    vs = [f"u{i}" for i in range(n)]
    edges = {f"s{k}": Edge(rng.choice(vs), rng.choice(vs), BASE_LABEL) for k in range(rng.randint(0, max_edges))}
    return Graph(vs, edges)


def random_derivation(rng: random.Random, start: Graph, rules: list[Rule], max_steps: int = 6) -> Derivation:
    steps = []
    cur = start
    for k in range(rng.randint(0, max_steps)):
        options = [(r, g) for r in rules for g in applicable_matches(r, cur)]
        if not options:
            break
        rule, g = rng.choice(options)
        step = apply(rule, g, k)
        steps.append(step)
        cur = step.H
    return Derivation(start, tuple(steps))


def random_superset(rng: random.Random, inner: SubgraphHandle) -> SubgraphHandle:
    """A random subgraph of ``inner.host`` containing ``inner``."""
    host = inner.host
    vs = set(inner.vset) | {v for v in sorted(host.vertices) if rng.random() < 0.5}
    es = set(inner.eset) | {
        e for e in sorted(host.edges)
        if host.edges[e].src in vs and host.edges[e].tgt in vs and rng.random() < 0.5
    }
    return SubgraphHandle(host, frozenset(vs), frozenset(es))


@dataclass(frozen=True)
class Instance:
    seed: int
    start: Graph
    d: Derivation
    d_bar: Derivation


def random_instance(seed: int, max_vertices: int = 8, max_steps: int = 6) -> Instance:
    rng = random.Random(seed)
    start = random_graph(rng, max_vertices)
    d = random_derivation(rng, start, family_rules("p"), max_steps)
    d_bar = random_derivation(rng, start, family_rules("q"), max_steps)
    return Instance(seed, start, d, d_bar)
