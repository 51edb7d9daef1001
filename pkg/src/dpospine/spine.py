"""Accessed parts, restrictions, spines and equality of derivations up to isomorphism.

Restricted graphs keep the identifiers of the graphs they are cut from, so
every mono in a restriction is an id-subset inclusion and the pullback
conditions of the restriction squares reduce to set identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dpo import Derivation, DerivationStep, apply, pushout_violations
from .errors import FactorizationError, HostMismatchError, InvalidMatchError, IsoSearchUndecided
from .graph import (
    GraphMorphism,
    SubgraphHandle,
    compose,
    intersect,
    iter_morphisms,
    union,
    validate_morphism,
)
from .moving import evom, move_forward

DEFAULT_MAX_ISOS = 10_000


@dataclass(frozen=True)
class AccessedPart:
    """``handle`` is ACC(d) inside ``derivation.start``.

    ``suffix_handles[k]`` is the accessed part of the derivation's suffix
    starting at graph ``k`` (the last entry is the empty handle of the end).
    """

    derivation: Derivation
    handle: SubgraphHandle
    suffix_handles: tuple[SubgraphHandle, ...] = ()


def _match_image(step: DerivationStep) -> SubgraphHandle:
    return step.g.image()


def accessed_part(d: Derivation) -> AccessedPart:
    acc = SubgraphHandle.empty(d.end)
    handles = [acc]
    for step in reversed(d.steps):
        kept = intersect(acc, step.z_in_H).rehost(step.G)
        acc = union(kept, _match_image(step))
        handles.append(acc)
    handles.reverse()
    return AccessedPart(d, acc, tuple(handles))


def factors_through(acc: AccessedPart, m: SubgraphHandle) -> SubgraphHandle | None:
    """ACC(d) as a handle of ``m.as_graph()`` if it lies inside ``m``."""
    if acc.handle.host != m.host:
        raise HostMismatchError("subgraph is not in the derivation's start graph")
    if acc.handle.issubset(m):
        return SubgraphHandle(m.as_graph(), acc.handle.vset, acc.handle.eset)
    return None


def restrict_step(
    step: DerivationStep, m: SubgraphHandle, g_restricted: GraphMorphism | None = None
) -> tuple[DerivationStep, SubgraphHandle]:
    """Single-step restriction of ``step`` to the subgraph ``m`` of its start graph.

    Returns the restricted step ``G' => H'`` and ``H'`` as a handle of ``H``.
    """
    if m.host != step.G:
        raise HostMismatchError("restriction handle is not a subgraph of the step's start graph")
    sub = m.as_graph()
    if g_restricted is None:
        if not (set(step.g.vmap.values()) <= m.vset and set(step.g.emap.values()) <= m.eset):
            raise InvalidMatchError("match does not factor through the restriction")
        g_restricted = step.g.with_cod(sub)
    elif g_restricted.cod != sub or compose(g_restricted, m.inclusion()) != step.g:
        raise InvalidMatchError("given restricted match does not factor the original match")
    cv, ce = step.created
    small = apply(step.rule, g_restricted, fresh_v=cv, fresh_e=ce)
    hh = SubgraphHandle(step.H, small.H.vertices, small.H.edge_ids)
    if hh.violations() or any(step.H.edges[e] != small.H.edges[e] for e in small.H.edges):
        raise AssertionError("restricted derived graph is not a subgraph of the original")
    return small, hh


@dataclass(frozen=True)
class RestrictionCertificate:
    original: Derivation
    mono_chain: tuple[SubgraphHandle, ...]
    restricted: Derivation

    def violations(self) -> list[str]:
        """Re-check every restricted step against its original step and the mono chain."""
        out = []
        graphs = self.original.graphs
        for k, h in enumerate(self.mono_chain):
            if h.host != graphs[k]:
                out.append(f"chain {k}: handle is not hosted by graph {k}")
        for k, (big, small) in enumerate(zip(self.original.steps, self.restricted.steps)):
            tag = f"step {k}"
            out += [f"{tag}: {p}" for p in pushout_violations(small)]
            gp, hp = self.mono_chain[k], self.mono_chain[k + 1]
            if small.G != gp.as_graph() or small.H != hp.as_graph():
                out.append(f"{tag}: restricted graphs differ from the mono chain")
            zp = small.Z
            # the small context is the big one cut down to either side, and H' is Z' glued to h'(R)
            if zp.vertices != big.Z.vertices & gp.vset or zp.edge_ids != big.Z.edge_ids & gp.eset:
                out.append(f"{tag}: left context square is not a pullback")
            if zp.vertices != big.Z.vertices & hp.vset or zp.edge_ids != big.Z.edge_ids & hp.eset:
                out.append(f"{tag}: right context square is not a pullback")
            img = small.h.image()
            if hp.vset != zp.vertices | img.vset or hp.eset != zp.edge_ids | img.eset:
                out.append(f"{tag}: H' is not the union of Z' and h'(R)")
            for name, a, b in (("g", small.g, big.g), ("z", small.z, big.z), ("h", small.h, big.h)):
                if dict(a.vmap) != dict(b.vmap) or dict(a.emap) != dict(b.emap):
                    out.append(f"{tag}: {name} does not factor through the restriction")
        return out


def restrict(d: Derivation, m: SubgraphHandle) -> RestrictionCertificate:
    acc = accessed_part(d)
    if m.host != d.start:
        raise HostMismatchError("restriction handle is not a subgraph of the start graph")
    if factors_through(acc, m) is None:
        raise FactorizationError(acc.handle.vset - m.vset, acc.handle.eset - m.eset)
    chain = [m]
    steps = []
    cur = m
    for step in d.steps:
        small, cur = restrict_step(step, cur)
        steps.append(small)
        chain.append(cur)
    return RestrictionCertificate(d, tuple(chain), Derivation(m.as_graph(), tuple(steps)))


def spine(d: Derivation) -> tuple[AccessedPart, Derivation]:
    acc = accessed_part(d)
    return acc, restrict(d, acc.handle).restricted


# -- equality up to isomorphism ----------------------------------------------

@dataclass(frozen=True)
class DerivationIso:
    """Isomorphisms from ``d`` to ``d_prime``: start graph, then ``(Z_k, H_k)`` per step."""

    d: Derivation
    d_prime: Derivation
    isos: tuple[GraphMorphism, ...] = field(default_factory=tuple)

    @property
    def start_iso(self) -> GraphMorphism:
        return self.isos[0]

    def graph_isos(self) -> list[GraphMorphism]:
        return [self.isos[0]] + list(self.isos[2::2])

    def inverse(self) -> DerivationIso:
        return DerivationIso(self.d_prime, self.d, tuple(i.inverse() for i in self.isos))

    def then(self, other: DerivationIso) -> DerivationIso:
        return DerivationIso(self.d, other.d_prime, tuple(compose(a, b) for a, b in zip(self.isos, other.isos)))

    def violations(self) -> list[str]:
        out = []
        if len(self.isos) != 1 + 2 * len(self.d.steps):
            return ["wrong number of isomorphisms"]
        for k, iso in enumerate(self.isos):
            out += [f"iso {k}: {p}" for p in validate_morphism(iso)]
            if not (iso.is_injective() and iso.is_surjective()):
                out.append(f"iso {k}: not bijective")
        if out:
            return out
        for k, (s, t) in enumerate(zip(self.d.steps, self.d_prime.steps)):
            if s.rule != t.rule:
                out.append(f"step {k}: different rules")
                continue
            before, zi, after = self.isos[2 * k], self.isos[2 * k + 1], self.isos[2 * k + 2]
            checks = (
                ("g", compose(s.g, before), t.g),
                ("h", compose(s.h, after), t.h),
                ("z", compose(s.z, zi), t.z),
                ("Z->G", compose(s.incl_ZG, before), compose(zi, t.incl_ZG)),
                ("Z->H", compose(s.incl_ZH, after), compose(zi, t.incl_ZH)),
            )
            for name, a, b in checks:
                if a != b:
                    out.append(f"step {k}: square with {name} does not commute")
        return out


def _start_seed(d: Derivation, d2: Derivation) -> tuple[dict[str, str], dict[str, str]] | None:
    """Start-graph correspondences forced by the matches, or ``None`` if contradictory.

    Each current item is traced back to the start item it descends from
    (``None`` if created). Matched items must then agree on their origin.
    """
    ov = {v: v for v in d.start.vertices}
    oe = {e: e for e in d.start.edges}
    ov2 = {v: v for v in d2.start.vertices}
    oe2 = {e: e for e in d2.start.edges}
    seed_v: dict[str, str] = {}
    seed_e: dict[str, str] = {}
    for s, t in zip(d.steps, d2.steps):
        for seed, mapping1, mapping2, o1, o2 in (
            (seed_v, s.g.vmap, t.g.vmap, ov, ov2),
            (seed_e, s.g.emap, t.g.emap, oe, oe2),
        ):
            for x in mapping1:
                if x not in mapping2:
                    return None
                a, b = o1.get(mapping1[x]), o2.get(mapping2[x])
                if (a is None) != (b is None):
                    return None
                if a is not None:
                    if seed.setdefault(a, b) != b:
                        return None
        ov = {v: ov.get(v) for v in s.H.vertices}
        oe = {e: oe.get(e) for e in s.H.edges}
        ov2 = {v: ov2.get(v) for v in t.H.vertices}
        oe2 = {e: oe2.get(e) for e in t.H.edges}
    if len(set(seed_v.values())) != len(seed_v) or len(set(seed_e.values())) != len(seed_e):
        return None
    return seed_v, seed_e


def _propagate(d: Derivation, d2: Derivation, start: GraphMorphism) -> tuple[GraphMorphism, ...] | None:
    isos = [start]
    phi_v, phi_e = dict(start.vmap), dict(start.emap)
    for s, t in zip(d.steps, d2.steps):
        if any(phi_v[s.g.vmap[x]] != t.g.vmap[x] for x in s.g.vmap):
            return None
        if any(phi_e[s.g.emap[x]] != t.g.emap[x] for x in s.g.emap):
            return None
        zv = {v: phi_v[v] for v in s.Z.vertices}
        ze = {e: phi_e[e] for e in s.Z.edges}
        if set(zv.values()) != t.Z.vertices or set(ze.values()) != set(t.Z.edges):
            return None
        zi = GraphMorphism(s.Z, t.Z, zv, ze)
        cv, ce = s.created
        cv2, ce2 = t.created
        hv = {**zv, **{cv[x]: cv2[x] for x in cv}}
        he = {**ze, **{ce[x]: ce2[x] for x in ce}}
        hi = GraphMorphism(s.H, t.H, hv, he)
        if validate_morphism(hi) or not (hi.is_injective() and hi.is_surjective()):
            return None
        isos += [zi, hi]
        phi_v, phi_e = hv, he
    return tuple(isos)


def derivations_equal_up_to_iso(
    d: Derivation, d2: Derivation, max_isos: int = DEFAULT_MAX_ISOS
) -> DerivationIso | None:
    """Find a compatible chain of isomorphisms from ``d`` to ``d2``.

    Raises :class:`IsoSearchUndecided` if more than ``max_isos`` start-graph
    isomorphisms had to be tried without a decision.
    """
    if len(d) != len(d2) or any(s.rule != t.rule for s, t in zip(d.steps, d2.steps)):
        return None
    seed = _start_seed(d, d2)
    if seed is None:
        return None
    tried = 0
    for start in iter_morphisms(d.start, d2.start, bijective=True, vseed=seed[0], eseed=seed[1]):
        tried += 1
        if tried > max_isos:
            raise IsoSearchUndecided(f"no decision after {max_isos} candidate start isomorphisms")
        chain = _propagate(d, d2, start)
        if chain is not None:
            return DerivationIso(d, d2, chain)
    return None


# -- spine preservation -------------------------------------------------------

@dataclass
class SpinePreservationReport:
    direction: str
    spine_before: Derivation
    spine_after: Derivation
    moved: Derivation
    witness: DerivationIso | None
    one_step_law: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.witness is not None and self.one_step_law is not False

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = [iso.to_dict() for iso in self.witness.graph_isos()]
        return {
            "kind": "spine-preservation-report",
            "direction": self.direction,
            "result": "PASS" if self.holds else "FAIL",
            "spine_length": len(self.spine_before),
            "spine_start_size": len(self.spine_before.start),
            "one_step_law": self.one_step_law,
            "iso_witness": w,
            "notes": self.notes,
        }


def check_spine_preservation(
    d: Derivation, d_bar: Derivation, *, backward: bool = False, max_isos: int = DEFAULT_MAX_ISOS
) -> SpinePreservationReport:
    """Compare ``spine(d)`` with the spine of its forward (or backward) moved variant."""
    if backward:
        moved = evom(d, d_bar)
    else:
        moved = move_forward(d, d_bar).moved
    _, sp = spine(d)
    _, sp_moved = spine(moved)
    witness = derivations_equal_up_to_iso(sp, sp_moved, max_isos)
    report = SpinePreservationReport("backward" if backward else "forward", sp, sp_moved, moved, witness)
    if not backward and len(d_bar) == 1:
        bar = d_bar.steps[0]
        left = restrict(d, bar.z_in_G).restricted
        right = restrict(moved, bar.z_in_H).restricted
        report.one_step_law = left == right
        if not report.one_step_law:
            report.notes.append("restrictions to the intermediate graph differ")
    return report
