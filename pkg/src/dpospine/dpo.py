"""Rules, double-pushout rule application and derivations.

A rule ``L ⊇ K ⊆ R`` is given by three graphs sharing the identifiers of
``K``. Applying it at a match ``g: L -> G`` builds the intermediate graph
``Z = G - (g(L) - g(K))`` as an id-subset of ``G`` and glues fresh copies of
``R - K`` onto ``Z`` to obtain ``H``; ``Z`` is then an id-subset of ``H`` too.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    GluingError,
    IdentifierClashError,
    InvalidMatchError,
    NoMatchError,
    ScriptError,
    UnknownRuleError,
)
from .graph import Graph, GraphMorphism, SubgraphHandle, iter_morphisms, validate_graph, validate_morphism

INVERSE_SUFFIX = "^-1"


@dataclass(frozen=True)
class Rule:
    name: str
    L: Graph
    K: Graph
    R: Graph

    def violations(self) -> list[str]:
        out = []
        for side, g in (("L", self.L), ("K", self.K), ("R", self.R)):
            out += [f"{side}: {p}" for p in validate_graph(g)]
        for side, g in (("L", self.L), ("R", self.R)):
            for v in sorted(self.K.vertices - g.vertices):
                out.append(f"gluing vertex {v} missing from {side}")
            for e in sorted(self.K.edges):
                if e not in g.edges:
                    out.append(f"gluing edge {e} missing from {side}")
                elif g.edges[e] != self.K.edges[e]:
                    out.append(f"gluing edge {e} differs in {side}")
        return out

    @property
    def deleted(self) -> tuple[frozenset[str], frozenset[str]]:
        return self.L.vertices - self.K.vertices, self.L.edge_ids - self.K.edge_ids

    @property
    def created(self) -> tuple[frozenset[str], frozenset[str]]:
        return self.R.vertices - self.K.vertices, self.R.edge_ids - self.K.edge_ids

    def __repr__(self) -> str:
        return f"Rule({self.name!r})"


def invert_rule(rule: Rule) -> Rule:
    if rule.name.endswith(INVERSE_SUFFIX):
        name = rule.name[: -len(INVERSE_SUFFIX)]
    else:
        name = rule.name + INVERSE_SUFFIX
    return Rule(name, rule.R, rule.K, rule.L)


@dataclass(frozen=True)
class DerivationStep:
    """Full record of one double-pushout application ``G => H``."""

    rule: Rule
    G: Graph
    g: GraphMorphism
    Z: Graph
    z: GraphMorphism
    H: Graph
    h: GraphMorphism
    incl_ZG: GraphMorphism
    incl_ZH: GraphMorphism

    @property
    def z_in_G(self) -> SubgraphHandle:
        return SubgraphHandle(self.G, self.Z.vertices, self.Z.edge_ids)

    @property
    def z_in_H(self) -> SubgraphHandle:
        return SubgraphHandle(self.H, self.Z.vertices, self.Z.edge_ids)

    @property
    def deleted(self) -> SubgraphHandle:
        """Items of ``G`` outside ``Z`` (not a subgraph in general)."""
        return SubgraphHandle(self.G, self.G.vertices - self.Z.vertices, self.G.edge_ids - self.Z.edge_ids)

    @property
    def created(self) -> tuple[dict[str, str], dict[str, str]]:
        """Ids given in ``H`` to the items of ``R - K``."""
        cv, ce = self.rule.created
        return {x: self.h.vmap[x] for x in cv}, {x: self.h.emap[x] for x in ce}

    def __repr__(self) -> str:
        return f"DerivationStep({self.rule.name}, |G|={len(self.G)}, |H|={len(self.H)})"


def identification_violations(rule: Rule, g: GraphMorphism) -> list[str]:
    out = []
    for kind, mapping, keep in (("vertex", g.vmap, rule.K.vertices), ("edge", g.emap, rule.K.edge_ids)):
        fibres: dict[str, list[str]] = defaultdict(list)
        for x in sorted(mapping):
            fibres[mapping[x]].append(x)
        for img, xs in sorted(fibres.items()):
            if len(xs) > 1 and any(x not in keep for x in xs):
                out.append(f"{kind}s {'/'.join(xs)} -> {img}")
    return out


def check_identification(rule: Rule, g: GraphMorphism) -> bool:
    return not identification_violations(rule, g)


def _deleted_images(rule: Rule, g: GraphMorphism) -> tuple[frozenset[str], frozenset[str]]:
    dv = frozenset(g.vmap[v] for v in rule.L.vertices) - frozenset(g.vmap[v] for v in rule.K.vertices)
    de = frozenset(g.emap[e] for e in rule.L.edges) - frozenset(g.emap[e] for e in rule.K.edges)
    return dv, de


def dangling_violations(rule: Rule, g: GraphMorphism) -> list[str]:
    dv, de = _deleted_images(rule, g)
    if not dv:
        return []
    G = g.cod
    return [
        f"edge {e} touches deleted vertex"
        for e in sorted(G.edges)
        if e not in de and (G.edges[e].src in dv or G.edges[e].tgt in dv)
    ]


def check_dangling(rule: Rule, g: GraphMorphism) -> bool:
    return not dangling_violations(rule, g)


def default_fresh_id(rule_name: str, step_index: int, original: str) -> str:
    return f"{rule_name}.{step_index}.{original}"


def _pick_fresh(wanted: str, taken: set[str], strict: bool) -> str:
    if wanted not in taken:
        return wanted
    if strict:
        raise IdentifierClashError(f"identifier {wanted!r} already exists in the host graph")
    while wanted in taken:
        wanted += "'"
    return wanted


def apply(
    rule: Rule,
    g: GraphMorphism,
    step_index: int = 0,
    *,
    fresh_v: Mapping[str, str] | None = None,
    fresh_e: Mapping[str, str] | None = None,
) -> DerivationStep:
    """Apply ``rule`` at the match ``g: L -> G``.

    New items are named ``<rule>.<step_index>.<id in R>`` unless explicit
    names are supplied through ``fresh_v``/``fresh_e``; explicit names must
    not clash with the host, policy names are primed until unused.
    """
    if g.dom != rule.L:
        raise InvalidMatchError(f"match domain is not the left-hand side of {rule.name}")
    problems = validate_morphism(g)
    if problems:
        raise InvalidMatchError("; ".join(problems))
    bad = identification_violations(rule, g)
    if bad:
        raise GluingError("identification", bad)
    bad = dangling_violations(rule, g)
    if bad:
        raise GluingError("dangling", bad)

    G = g.cod
    dv, de = _deleted_images(rule, g)
    Z = Graph(G.vertices - dv, {e: G.edges[e] for e in G.edges if e not in de})

    new_v_ids, new_e_ids = rule.created
    fresh_v = fresh_v or {}
    fresh_e = fresh_e or {}
    taken_v = set(Z.vertices)
    taken_e = set(Z.edges)
    nv: dict[str, str] = {}
    for x in sorted(new_v_ids):
        nv[x] = _pick_fresh(fresh_v.get(x) or default_fresh_id(rule.name, step_index, x), taken_v, x in fresh_v)
        taken_v.add(nv[x])
    ne: dict[str, str] = {}
    for x in sorted(new_e_ids):
        ne[x] = _pick_fresh(fresh_e.get(x) or default_fresh_id(rule.name, step_index, x), taken_e, x in fresh_e)
        taken_e.add(ne[x])

    def attach(v: str) -> str:
        return nv[v] if v in nv else g.vmap[v]

    h_edges = dict(Z.edges)
    for x, eid in ne.items():
        s, t, lab = rule.R.edges[x]
        h_edges[eid] = (attach(s), attach(t), lab)
    H = Graph(Z.vertices | set(nv.values()), h_edges)

    kv = {v: g.vmap[v] for v in rule.K.vertices}
    ke = {e: g.emap[e] for e in rule.K.edges}
    z = GraphMorphism(rule.K, Z, kv, ke)
    h = GraphMorphism(rule.R, H, {**kv, **nv}, {**ke, **ne})
    return DerivationStep(rule, G, g, Z, z, H, h, GraphMorphism.inclusion(Z, G), GraphMorphism.inclusion(Z, H))


def _square_violations(tag: str, big: Graph, K: Graph, outer: GraphMorphism, z: GraphMorphism,
                       incl: GraphMorphism, host: Graph) -> list[str]:
    """Concrete pushout test for ``big ⊇ K -z-> Z -incl-> host`` with ``outer: big -> host``."""
    out = []
    for name, m in (("match", outer), ("z", z), ("inclusion", incl)):
        out += [f"{tag} {name}: {p}" for p in validate_morphism(m)]
    if out:
        return out
    if outer.dom != big or outer.cod != host or incl.cod != host or z.dom != K or z.cod != incl.dom:
        return [f"{tag}: morphism endpoints do not form the square"]
    if not incl.is_inclusion():
        out.append(f"{tag}: intermediate graph is not included by identity")
    for v in sorted(K.vertices):
        if outer.vmap[v] != incl.vmap[z.vmap[v]]:
            out.append(f"{tag}: square does not commute at vertex {v}")
    for e in sorted(K.edges):
        if outer.emap[e] != incl.emap[z.emap[e]]:
            out.append(f"{tag}: square does not commute at edge {e}")
    # the comparison map Z + (big - K) -> host must be bijective
    for kind, zmap, omap, rest, items in (
        ("vertex", incl.vmap, outer.vmap, big.vertices - K.vertices, host.vertices),
        ("edge", incl.emap, outer.emap, big.edge_ids - K.edge_ids, host.edge_ids),
    ):
        hits: dict[str, int] = defaultdict(int)
        for x in zmap.values():
            hits[x] += 1
        for x in rest:
            hits[omap[x]] += 1
        for y in sorted(items):
            if hits[y] == 0:
                out.append(f"{tag}: {kind} {y} outside both images")
            elif hits[y] > 1:
                out.append(f"{tag}: {kind} {y} identified {hits[y]} times")
    return out


def pushout_violations(step: DerivationStep) -> list[str]:
    r = step.rule
    return _square_violations("(1)", r.L, r.K, step.g, step.z, step.incl_ZG, step.G) + _square_violations(
        "(2)", r.R, r.K, step.h, step.z, step.incl_ZH, step.H
    )


def verify_double_pushout(step: DerivationStep) -> bool:
    """Check both squares of ``step`` are pushouts, independently of :func:`apply`."""
    try:
        return not pushout_violations(step)
    except KeyError:
        return False


def invert_step(step: DerivationStep) -> DerivationStep:
    return DerivationStep(invert_rule(step.rule), step.H, step.h, step.Z, step.z, step.G, step.g,
                          step.incl_ZH, step.incl_ZG)


@dataclass(frozen=True)
class Derivation:
    start: Graph
    steps: tuple[DerivationStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def end(self) -> Graph:
        return self.steps[-1].H if self.steps else self.start

    @property
    def graphs(self) -> list[Graph]:
        return [self.start] + [s.H for s in self.steps]

    @property
    def rule_names(self) -> list[str]:
        return [s.rule.name for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def head(self) -> Derivation:
        return Derivation(self.start, self.steps[:1])

    def tail(self) -> Derivation:
        return Derivation(self.steps[0].H, self.steps[1:]) if self.steps else self

    def then(self, other: Derivation) -> Derivation:
        if other.start != self.end:
            raise ValueError("derivations do not compose")
        return Derivation(self.start, self.steps + other.steps)

    def violations(self) -> list[str]:
        out = []
        cur = self.start
        for i, s in enumerate(self.steps):
            if s.G != cur:
                out.append(f"step {i}: does not start where the previous step ended")
            out += [f"step {i}: {p}" for p in pushout_violations(s)]
            cur = s.H
        return out

    def __repr__(self) -> str:
        return f"Derivation({len(self.steps)} steps: {' '.join(self.rule_names)})"


def invert_derivation(d: Derivation) -> Derivation:
    return Derivation(d.end, tuple(invert_step(s) for s in reversed(d.steps)))


def applicable_matches(rule: Rule, G: Graph, *, injective: bool = True) -> Iterator[GraphMorphism]:
    """Matches of ``rule`` in ``G`` satisfying both gluing conditions, in search order."""
    for g in iter_morphisms(rule.L, G, injective=injective):
        if check_identification(rule, g) and check_dangling(rule, g):
            yield g


MatchSpec = Union[str, GraphMorphism, Mapping[str, Mapping[str, str]]]


def run_script(
    start: Graph,
    script: Sequence[tuple[str, MatchSpec]],
    rules: Mapping[str, Rule] | Iterable[Rule],
) -> Derivation:
    """Apply ``(rule name, match)`` entries in order; ``"auto"`` picks the first applicable injective match."""
    if not isinstance(rules, Mapping):
        rules = {r.name: r for r in rules}
    steps: list[DerivationStep] = []
    cur = start
    for i, (name, spec) in enumerate(script):
        try:
            if name not in rules:
                raise UnknownRuleError(f"no rule named {name!r}")
            rule = rules[name]
            if isinstance(spec, str):
                if spec != "auto":
                    raise InvalidMatchError(f"unknown match spec {spec!r}")
                g = next(applicable_matches(rule, cur), None)
                if g is None:
                    raise NoMatchError(f"{name} has no applicable match")
            elif isinstance(spec, GraphMorphism):
                g = spec.with_cod(cur) if spec.cod != cur else spec
            else:
                g = GraphMorphism(rule.L, cur, spec.get("vmap", {}), spec.get("emap", {}))
            step = apply(rule, g, i)
        except Exception as exc:  # noqa: BLE001 - re-raised with the step index
            if isinstance(exc, GluingError):
                exc.step = i
            raise ScriptError(i, exc) from exc
        steps.append(step)
        cur = step.H
    return Derivation(start, tuple(steps))


def reapply(step: DerivationStep, host: Graph | None = None) -> DerivationStep:
    """Rebuild ``step`` from its rule, match and recorded fresh identifiers."""
    cv, ce = step.created
    g = step.g if host is None else step.g.with_cod(host)
    return apply(step.rule, g, fresh_v=cv, fresh_e=ce)


def replay(d: Derivation) -> Derivation:
    """Re-run every step of ``d`` from its start graph; equal to ``d`` for sound records."""
    cur = d.start
    steps = []
    for s in d.steps:
        s2 = reapply(s, cur)
        steps.append(s2)
        cur = s2.H
    return Derivation(d.start, tuple(steps))
