"""Deliberately naive reference implementations used to cross-check the engine."""

from __future__ import annotations

import itertools

from dpospine.dpo import Derivation
from dpospine.graph import Graph


def all_morphisms(dom: Graph, cod: Graph, injective: bool = True) -> set[tuple]:
    """Every structure-preserving map, found by filtering all vertex and edge functions."""
    dv, de = sorted(dom.vertices), sorted(dom.edges)
    cv, ce = sorted(cod.vertices), sorted(cod.edges)
    found = set()
    for vimg in itertools.product(cv, repeat=len(dv)):
        if injective and len(set(vimg)) < len(vimg):
            continue
        vmap = dict(zip(dv, vimg))
        for eimg in itertools.product(ce, repeat=len(de)):
            if injective and len(set(eimg)) < len(eimg):
                continue
            ok = all(
                cod.edges[f] == (vmap[dom.edges[e].src], vmap[dom.edges[e].tgt], dom.edges[e].label)
                for e, f in zip(de, eimg)
            )
            if ok:
                found.add((tuple(sorted(vmap.items())), tuple(sorted(zip(de, eimg)))))
    return found


def as_key(m) -> tuple:
    return tuple(sorted(m.vmap.items())), tuple(sorted(m.emap.items()))


def brute_isomorphic(g: Graph, h: Graph) -> bool:
    """Try every vertex bijection; edges must then match as a multiset."""
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return False
    gv, hv = sorted(g.vertices), sorted(h.vertices)
    target = sorted(h.edges.values())
    for perm in itertools.permutations(hv):
        f = dict(zip(gv, perm))
        if sorted((f[s], f[t], lab) for s, t, lab in g.edges.values()) == target:
            return True
    return False


def accessed_by_survival(d: Derivation) -> tuple[frozenset, frozenset]:
    """Start items that survive until some step whose match touches them.

    Identifiers are stable along a derivation, so an item is accessed exactly
    when it is still present in step ``k``'s intermediate graphs up to ``k``
    and ``k``'s match hits it.
    """
    vs, es = set(), set()
    alive_v, alive_e = set(d.start.vertices), set(d.start.edges)
    for s in d.steps:
        vs |= alive_v & set(s.g.vmap.values())
        es |= alive_e & set(s.g.emap.values())
        alive_v &= s.Z.vertices
        alive_e &= set(s.Z.edges)
    return frozenset(vs), frozenset(es)


def undirected_pairs(g: Graph, label: str = "*") -> set[frozenset]:
    """Undirected edges encoded as opposite directed pairs; each pair once."""
    out = set()
    for s, t, lab in g.edges.values():
        if lab == label and s != t:
            assert (t, s, lab) in g.edges.values(), "edge without its opposite"
            out.add(frozenset((s, t)))
    return out
