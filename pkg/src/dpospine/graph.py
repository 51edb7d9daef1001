"""Directed edge-labeled graphs, morphisms between them and subgraph handles.

Vertex and edge identifiers are opaque string tokens. A graph never
changes after construction; every operation returns a new value.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import DomainMismatchError, HostMismatchError

UNLABELED = "*"


class Edge(NamedTuple):
    src: str
    tgt: str
    label: str = UNLABELED


class Graph:
    """A finite directed graph whose edges carry a label.

    ``edges`` maps an edge id to ``Edge(src, tgt, label)``; plain 2- or
    3-tuples are accepted and normalised. Construction does not check the
    endpoint invariant so that malformed input can be reported by
    :func:`validate_graph` instead of failing early.
    """

    __slots__ = ("_vertices", "_edges", "_hash")

    def __init__(self, vertices: Iterable[str] = (), edges: Mapping[str, Iterable[str]] | None = None):
        self._vertices = frozenset(vertices)
        norm = {}
        for eid, e in (edges or {}).items():
            norm[eid] = e if isinstance(e, Edge) else Edge(*e)
        self._edges = MappingProxyType(norm)
        self._hash = None

    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def edges(self) -> Mapping[str, Edge]:
        return self._edges

    @property
    def edge_ids(self) -> frozenset[str]:
        return frozenset(self._edges)

    def src(self, e: str) -> str:
        return self._edges[e].src

    def tgt(self, e: str) -> str:
        return self._edges[e].tgt

    def label(self, e: str) -> str:
        return self._edges[e].label

    def __len__(self) -> int:
        return len(self._vertices) + len(self._edges)

    def is_empty(self) -> bool:
        return not self._vertices and not self._edges

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and dict(self._edges) == dict(other._edges)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._vertices, frozenset(self._edges.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self._vertices)}, |E|={len(self._edges)})"

    def incident_edges(self, v: str) -> list[str]:
        return sorted(e for e, (s, t, _) in self._edges.items() if s == v or t == v)

    def describe(self) -> str:
        lines = [f"vertices: {' '.join(sorted(self._vertices))}"]
        for eid in sorted(self._edges):
            s, t, lab = self._edges[eid]
            lines.append(f"  {eid}: {s} -[{lab}]-> {t}")
        return "\n".join(lines)


EMPTY = Graph()


def undirected(pairs: Iterable[tuple[str, str]], label: str = UNLABELED, prefix: str = "") -> dict[str, Edge]:
    """Encode undirected edges as pairs of opposite directed edges.

    ``("u", "w")`` becomes ``{prefix+"uw": u->w, prefix+"wu": w->u}``.
    """
    out: dict[str, Edge] = {}
    for u, w in pairs:
        out[f"{prefix}{u}{w}"] = Edge(u, w, label)
        out[f"{prefix}{w}{u}"] = Edge(w, u, label)
    return out


def validate_graph(g: Graph) -> list[str]:
    """Return human-readable invariant violations; empty iff ``g`` is a graph."""
    problems = []
    for eid in sorted(g.edges):
        s, t, lab = g.edges[eid]
        if s not in g.vertices:
            problems.append(f"dangling-endpoint: edge {eid} source {s!r} is not a vertex")
        if t not in g.vertices:
            problems.append(f"dangling-endpoint: edge {eid} target {t!r} is not a vertex")
        if not isinstance(lab, str) or not lab:
            problems.append(f"label: edge {eid} has empty label")
    for v in sorted(g.vertices):
        if not isinstance(v, str) or not v:
            problems.append(f"identifier: vertex {v!r} is not a non-empty token")
    return problems


@dataclass(frozen=True, eq=True)
class GraphMorphism:
    dom: Graph
    cod: Graph
    vmap: Mapping[str, str]
    emap: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "vmap", MappingProxyType(dict(self.vmap)))
        object.__setattr__(self, "emap", MappingProxyType(dict(self.emap)))

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def identity(cls, g: Graph) -> GraphMorphism:
        return cls(g, g, {v: v for v in g.vertices}, {e: e for e in g.edges})

    @classmethod
    def inclusion(cls, sub: Graph, host: Graph) -> GraphMorphism:
        return cls(sub, host, {v: v for v in sub.vertices}, {e: e for e in sub.edges})

    def image(self) -> SubgraphHandle:
        return SubgraphHandle(self.cod, frozenset(self.vmap.values()), frozenset(self.emap.values()))

    def image_of(self, vs: Iterable[str] = (), es: Iterable[str] = ()) -> tuple[frozenset[str], frozenset[str]]:
        return frozenset(self.vmap[v] for v in vs), frozenset(self.emap[e] for e in es)

    def is_injective(self) -> bool:
        return len(set(self.vmap.values())) == len(self.vmap) and len(set(self.emap.values())) == len(self.emap)

    def is_surjective(self) -> bool:
        return set(self.vmap.values()) == set(self.cod.vertices) and set(self.emap.values()) == set(self.cod.edges)

    def is_inclusion(self) -> bool:
        return all(k == v for k, v in self.vmap.items()) and all(k == v for k, v in self.emap.items())

    def with_cod(self, cod: Graph) -> GraphMorphism:
        """Same maps, different codomain (corestriction or extension along an inclusion)."""
        return GraphMorphism(self.dom, cod, self.vmap, self.emap)

    def restrict(self, sub: Graph) -> GraphMorphism:
        """Restrict the domain to a subgraph ``sub`` of ``dom`` (id-subset)."""
        return GraphMorphism(sub, self.cod, {v: self.vmap[v] for v in sub.vertices},
                             {e: self.emap[e] for e in sub.edges})

    def inverse(self) -> GraphMorphism:
        return GraphMorphism(self.cod, self.dom, {w: v for v, w in self.vmap.items()},
                             {w: e for e, w in self.emap.items()})

    def to_dict(self) -> dict:
        return {"vmap": dict(sorted(self.vmap.items())), "emap": dict(sorted(self.emap.items()))}


def validate_morphism(m: GraphMorphism) -> list[str]:
    """Totality and structure preservation; returns violations."""
    problems = []
    dom, cod = m.dom, m.cod
    for v in sorted(dom.vertices):
        if v not in m.vmap:
            problems.append(f"totality: vertex {v} unmapped")
        elif m.vmap[v] not in cod.vertices:
            problems.append(f"codomain: vertex {v} mapped to unknown {m.vmap[v]!r}")
    for v in sorted(set(m.vmap) - dom.vertices):
        problems.append(f"domain: vmap mentions unknown vertex {v!r}")
    for e in sorted(set(m.emap) - set(dom.edges)):
        problems.append(f"domain: emap mentions unknown edge {e!r}")
    for e in sorted(dom.edges):
        if e not in m.emap:
            problems.append(f"totality: edge {e} unmapped")
            continue
        img = m.emap[e]
        if img not in cod.edges:
            problems.append(f"codomain: edge {e} mapped to unknown {img!r}")
            continue
        s, t, lab = dom.edges[e]
        cs, ct, clab = cod.edges[img]
        if m.vmap.get(s) != cs:
            problems.append(f"source: edge {e} -> {img} breaks source ({s} -> {m.vmap.get(s)} vs {cs})")
        if m.vmap.get(t) != ct:
            problems.append(f"target: edge {e} -> {img} breaks target ({t} -> {m.vmap.get(t)} vs {ct})")
        if lab != clab:
            problems.append(f"label: edge {e} labeled {lab!r} mapped to {img} labeled {clab!r}")
    return problems


def compose(f: GraphMorphism, g: GraphMorphism) -> GraphMorphism:
    """``g ∘ f``: apply ``f`` first, then ``g``."""
    if f.cod != g.dom:
        raise DomainMismatchError("compose: codomain of the first morphism is not the domain of the second")
    return GraphMorphism(f.dom, g.cod, {v: g.vmap[w] for v, w in f.vmap.items()},
                         {e: g.emap[x] for e, x in f.emap.items()})


class MorphismKind(NamedTuple):
    mono: bool
    epi: bool
    iso: bool


def classify(m: GraphMorphism) -> MorphismKind:
    mono, epi = m.is_injective(), m.is_surjective()
    return MorphismKind(mono, epi, mono and epi)


@dataclass(frozen=True)
class SubgraphHandle:
    """A subgraph of ``host`` given by id-subsets; the inclusion is implicit."""

    host: Graph
    vset: frozenset[str] = field(default_factory=frozenset)
    eset: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "vset", frozenset(self.vset))
        object.__setattr__(self, "eset", frozenset(self.eset))

    @classmethod
    def full(cls, host: Graph) -> SubgraphHandle:
        return cls(host, host.vertices, host.edge_ids)

    @classmethod
    def empty(cls, host: Graph) -> SubgraphHandle:
        return cls(host)

    def violations(self) -> list[str]:
        out = [f"vertex {v} not in host" for v in sorted(self.vset - self.host.vertices)]
        out += [f"edge {e} not in host" for e in sorted(self.eset - self.host.edge_ids)]
        for e in sorted(self.eset & self.host.edge_ids):
            s, t, _ = self.host.edges[e]
            if s not in self.vset or t not in self.vset:
                out.append(f"edge {e} has an endpoint outside the subgraph")
        return out

    def as_graph(self) -> Graph:
        return Graph(self.vset, {e: self.host.edges[e] for e in self.eset})

    def inclusion(self) -> GraphMorphism:
        return GraphMorphism.inclusion(self.as_graph(), self.host)

    def issubset(self, other: SubgraphHandle) -> bool:
        _same_host(self, other)
        return self.vset <= other.vset and self.eset <= other.eset

    def is_empty(self) -> bool:
        return not self.vset and not self.eset

    def is_full(self) -> bool:
        return self.vset == self.host.vertices and self.eset == self.host.edge_ids

    def rehost(self, host: Graph) -> SubgraphHandle:
        """The same id-sets viewed inside another graph that contains them."""
        return SubgraphHandle(host, self.vset, self.eset)

    def to_dict(self) -> dict:
        return {"vertices": sorted(self.vset), "edges": sorted(self.eset)}


def _same_host(a: SubgraphHandle, b: SubgraphHandle) -> None:
    if a.host is not b.host and a.host != b.host:
        raise HostMismatchError("subgraph handles live in different host graphs")


def intersect(a: SubgraphHandle, b: SubgraphHandle) -> SubgraphHandle:
    _same_host(a, b)
    return SubgraphHandle(a.host, a.vset & b.vset, a.eset & b.eset)


def union(a: SubgraphHandle, b: SubgraphHandle) -> SubgraphHandle:
    _same_host(a, b)
    return SubgraphHandle(a.host, a.vset | b.vset, a.eset | b.eset)


def compose_handles(outer: SubgraphHandle, inner: SubgraphHandle) -> SubgraphHandle:
    """Handle of ``inner`` (a subgraph of ``outer.as_graph()``) seen inside ``outer.host``."""
    if not (inner.vset <= outer.vset and inner.eset <= outer.eset):
        raise HostMismatchError("inner handle is not hosted by the outer subgraph")
    if inner.host != outer.as_graph():
        raise HostMismatchError("inner handle is not hosted by the outer subgraph")
    return SubgraphHandle(outer.host, inner.vset, inner.eset)


def epi_mono_factorize(m: GraphMorphism) -> tuple[GraphMorphism, SubgraphHandle, GraphMorphism]:
    """Split ``m`` into a surjection onto its image and the image inclusion."""
    img = m.image()
    img_graph = img.as_graph()
    return m.with_cod(img_graph), img, GraphMorphism.inclusion(img_graph, m.cod)


# -- morphism search ---------------------------------------------------------

def _signature(g: Graph) -> dict[str, Counter]:
    sig: dict[str, Counter] = {v: Counter() for v in g.vertices}
    for s, t, lab in g.edges.values():
        if s == t:
            if s in sig:
                sig[s]["loop", lab] += 1
        else:
            if s in sig:
                sig[s]["out", lab] += 1
            if t in sig:
                sig[t]["in", lab] += 1
    return sig


def iter_morphisms(
    dom: Graph,
    cod: Graph,
    *,
    injective: bool = True,
    bijective: bool = False,
    vseed: Mapping[str, str] | None = None,
    eseed: Mapping[str, str] | None = None,
) -> Iterator[GraphMorphism]:
    """Yield morphisms ``dom -> cod`` in deterministic order.

    Vertices of ``dom`` are assigned first, in sorted id order, trying
    codomain vertices in sorted order; edges follow the same discipline.
    ``bijective`` restricts the search to isomorphisms. Seeds pin parts of
    the maps in advance.
    """
    if bijective:
        injective = True
        if len(dom.vertices) != len(cod.vertices) or len(dom.edges) != len(cod.edges):
            return
    vseed = dict(vseed or {})
    eseed = dict(eseed or {})
    dom_v = sorted(dom.vertices)
    cod_v = sorted(cod.vertices)
    dom_e = sorted(dom.edges)

    cod_by_key: dict[tuple[str, str, str], list[str]] = defaultdict(list)
    for e in sorted(cod.edges):
        cod_by_key[cod.edges[e]].append(e)
    dom_count = Counter(dom.edges.values())
    # pair constraints to test when a vertex gets assigned
    touching: dict[str, list[Edge]] = defaultdict(list)
    for key in dom_count:
        touching[key.src].append(key)
        if key.tgt != key.src:
            touching[key.tgt].append(key)

    dsig, csig = _signature(dom), _signature(cod)

    def sig_ok(v: str, w: str) -> bool:
        a, b = dsig[v], csig[w]
        if bijective:
            return a == b
        if injective:
            return all(b[k] >= n for k, n in a.items())
        # folding may turn an ordinary edge into a loop
        return all(b[k] > 0 or (k[0] != "loop" and b["loop", k[1]] > 0) for k in a)

    vmap: dict[str, str] = {}
    used_v: set[str] = set()

    def pairs_ok(v: str) -> bool:
        for key in touching[v]:
            if key.src in vmap and key.tgt in vmap:
                have = len(cod_by_key.get((vmap[key.src], vmap[key.tgt], key.label), ()))
                need = dom_count[key]
                if bijective and have != need:
                    return False
                if injective and have < need:
                    return False
                if have == 0:
                    return False
        return True

    def assign_edges(i: int, emap: dict[str, str], used_e: set[str]) -> Iterator[GraphMorphism]:
        if i == len(dom_e):
            yield GraphMorphism(dom, cod, dict(vmap), dict(emap))
            return
        e = dom_e[i]
        s, t, lab = dom.edges[e]
        cands = cod_by_key.get((vmap[s], vmap[t], lab), ())
        if e in eseed:
            cands = [c for c in cands if c == eseed[e]]
        for c in cands:
            if injective and c in used_e:
                continue
            emap[e] = c
            used_e.add(c)
            yield from assign_edges(i + 1, emap, used_e)
            used_e.discard(c)
            del emap[e]

    def assign_vertices(i: int) -> Iterator[GraphMorphism]:
        if i == len(dom_v):
            yield from assign_edges(0, {}, set())
            return
        v = dom_v[i]
        cands = [vseed[v]] if v in vseed else cod_v
        for w in cands:
            if w not in csig or (injective and w in used_v) or not sig_ok(v, w):
                continue
            vmap[v] = w
            used_v.add(w)
            if pairs_ok(v):
                yield from assign_vertices(i + 1)
            used_v.discard(w)
            del vmap[v]

    yield from assign_vertices(0)


def enumerate_monomorphisms(dom: Graph, cod: Graph, *, injective: bool = True) -> list[GraphMorphism]:
    """All structure-preserving maps ``dom -> cod``; injective unless asked otherwise."""
    return list(iter_morphisms(dom, cod, injective=injective))


def find_isomorphism(g: Graph, h: Graph, *, vseed: Mapping[str, str] | None = None) -> GraphMorphism | None:
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    if Counter(e.label for e in g.edges.values()) != Counter(e.label for e in h.edges.values()):
        return None
    if sorted(map(_freeze, _signature(g).values())) != sorted(map(_freeze, _signature(h).values())):
        return None
    return next(iter_morphisms(g, h, bijective=True, vseed=vseed), None)


def _freeze(c: Counter) -> tuple:
    return tuple(sorted(c.items()))


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def to_dot(g: Graph, name: str = "G") -> str:
    """Graphviz rendering; unlabeled edges are drawn without a label."""
    lines = [f"digraph {name} {{"]
    for v in sorted(g.vertices):
        lines.append(f'  "{v}";')
    for e in sorted(g.edges):
        s, t, lab = g.edges[e]
        attr = "" if lab == UNLABELED else f' [label="{lab}"]'
        lines.append(f'  "{s}" -> "{t}"{attr};')
    lines.append("}")
    return "\n".join(lines)
