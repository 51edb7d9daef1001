"""Parallel/sequential independence, conflux, interchange and moving.

Because intermediate graphs are id-subsets of their hosts, an independence
witness exists exactly when the relevant match image is contained in the
other step's intermediate graph; the witness is then the corestriction.

Moved steps reuse the identifiers their originals created, so both halves
of a conflux square end in the *same* graph value and the moving grid is
strict rather than merely commuting up to isomorphism.
"""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dpo import (
    Derivation,
    DerivationStep,
    Rule,
    applicable_matches,
    apply,
    invert_derivation,
    invert_step,
)
from .errors import DomainMismatchError, HostMismatchError, IdentifierClashError, IndependenceError
from .graph import Graph, GraphMorphism

Cell = tuple[int, int]


@dataclass(frozen=True)
class IndependenceWitness:
    """``f`` and ``f_bar`` of a parallel or sequential independence."""

    kind: str
    f: GraphMorphism
    f_bar: GraphMorphism


def _inside(m: GraphMorphism, sub: Graph) -> bool:
    return set(m.vmap.values()) <= sub.vertices and set(m.emap.values()) <= sub.edges.keys()


def parallel_independent(s1: DerivationStep, s2: DerivationStep) -> IndependenceWitness | None:
    if s1.G != s2.G:
        raise HostMismatchError("parallel independence needs two steps from the same graph")
    if _inside(s1.g, s2.Z) and _inside(s2.g, s1.Z):
        return IndependenceWitness("parallel", s1.g.with_cod(s2.Z), s2.g.with_cod(s1.Z))
    return None


def sequentially_independent(s1: DerivationStep, s2: DerivationStep) -> IndependenceWitness | None:
    """Witness for ``G =s1=> H =s2=> X``: ``h1(R1) ⊆ Z2`` and ``g2(L2) ⊆ Z1``."""
    if s1.H != s2.G:
        raise DomainMismatchError("steps are not composable")
    if _inside(s1.h, s2.Z) and _inside(s2.g, s1.Z):
        return IndependenceWitness("sequential", s1.h.with_cod(s2.Z), s2.g.with_cod(s1.Z))
    return None


def _check_witness(s1: DerivationStep, s2: DerivationStep, w: IndependenceWitness) -> None:
    ok = (
        w.f.cod == s2.Z and w.f_bar.cod == s1.Z
        and dict(w.f.vmap) == dict(s1.g.vmap) and dict(w.f.emap) == dict(s1.g.emap)
        and dict(w.f_bar.vmap) == dict(s2.g.vmap) and dict(w.f_bar.emap) == dict(s2.g.emap)
        and _inside(w.f, s2.Z) and _inside(w.f_bar, s1.Z)
    )
    if not ok:
        raise IndependenceError("witness does not factor the matches through the intermediate graphs")


def _move_step(step: DerivationStep, match: GraphMorphism) -> DerivationStep:
    cv, ce = step.created
    return apply(step.rule, match, fresh_v=cv, fresh_e=ce)


def conflux(
    s1: DerivationStep, s2: DerivationStep, w: IndependenceWitness | None = None
) -> tuple[DerivationStep, DerivationStep]:
    """Complete the peak ``H1 <= G => H2`` to a square.

    Returns ``(H1 => X, H2 => X)``: the second step moved along the first
    and the first moved along the second.
    """
    if w is None:
        w = parallel_independent(s1, s2)
        if w is None:
            raise IndependenceError(f"{s1.rule.name} and {s2.rule.name} are not parallel independent")
    else:
        _check_witness(s1, s2, w)
    s2_moved = _move_step(s2, w.f_bar.with_cod(s1.H))
    s1_moved = _move_step(s1, w.f.with_cod(s2.H))
    if s1_moved.H != s2_moved.H:
        raise IdentifierClashError("conflux square does not close on identical graphs; created ids overlap")
    return s2_moved, s1_moved


def interchange(
    s1: DerivationStep, s2: DerivationStep, w: IndependenceWitness | None = None
) -> tuple[DerivationStep, DerivationStep]:
    """Swap ``G =s1=> H =s2=> X`` into ``G =s2'=> H' =s1'=> X`` via conflux on the inverted first step."""
    if w is None:
        w = sequentially_independent(s1, s2)
        if w is None:
            raise IndependenceError(f"{s1.rule.name} then {s2.rule.name} are not sequentially independent")
    elif (w.f.cod != s2.Z or w.f_bar.cod != s1.Z or dict(w.f.vmap) != dict(s1.h.vmap)
          or dict(w.f_bar.vmap) != dict(s2.g.vmap)):
        raise IndependenceError("witness does not factor the matches through the intermediate graphs")
    back = invert_step(s1)
    s2_on_g, back_on_x = conflux(back, s2)
    return s2_on_g, invert_step(back_on_x)


@dataclass(frozen=True)
class ConfluxSquare:
    """One grid cell: ``left``/``top`` given, ``bottom``/``right`` constructed."""

    left: DerivationStep
    top: DerivationStep
    bottom: DerivationStep
    right: DerivationStep


@dataclass(frozen=True)
class MovedPair:
    moved: Derivation
    co_moved: Derivation
    grid: dict[Cell, ConfluxSquare] = field(default_factory=dict)


def _check_order(order: Sequence[Cell], n: int, m: int) -> None:
    seen: set[Cell] = set()
    for i, j in order:
        if not (0 <= i < n and 0 <= j < m) or (i, j) in seen:
            raise ValueError(f"bad grid cell {(i, j)} in evaluation order")
        if (i > 0 and (i - 1, j) not in seen) or (j > 0 and (i, j - 1) not in seen):
            raise ValueError(f"grid cell {(i, j)} evaluated before its inputs")
        seen.add((i, j))
    if len(seen) != n * m:
        raise ValueError("evaluation order does not cover the grid")


def cell_order(n: int, m: int, kind: str = "row") -> list[Cell]:
    if kind == "row":
        return [(i, j) for i in range(n) for j in range(m)]
    if kind == "column":
        return [(i, j) for j in range(m) for i in range(n)]
    if kind == "antidiagonal":
        return [(i, k - i) for k in range(n + m - 1) for i in range(n) if 0 <= k - i < m]
    raise ValueError(f"unknown order {kind!r}")


def random_cell_order(n: int, m: int, rng: random.Random) -> list[Cell]:
    """A uniformly chosen ready cell at every point: some valid evaluation order."""
    done: set[Cell] = set()
    ready = {(0, 0)} if n and m else set()
    out = []
    while ready:
        c = rng.choice(sorted(ready))
        ready.discard(c)
        done.add(c)
        out.append(c)
        i, j = c
        for a, b in ((i + 1, j), (i, j + 1)):
            if a < n and b < m and (a - 1 < 0 or (a - 1, b) in done) and (b - 1 < 0 or (a, b - 1) in done):
                ready.add((a, b))
    return out


def move_forward(
    d: Derivation,
    d_bar: Derivation,
    order: str | Sequence[Cell] = "row",
    workers: int = 1,
) -> MovedPair:
    """Move ``d`` along ``d_bar`` (and ``d_bar`` along ``d``) by a grid of conflux squares.

    Cell ``(i, j)`` squares step ``i`` of ``d`` (as moved ``j`` times) with
    step ``j`` of ``d_bar`` (as moved ``i`` times). With ``workers > 1`` the
    anti-diagonals are evaluated concurrently; the result is identical.
    """
    if d.start != d_bar.start:
        raise HostMismatchError("derivations to be moved must share their start graph")
    n, m = len(d), len(d_bar)
    vert: dict[Cell, DerivationStep] = {(i, 0): s for i, s in enumerate(d.steps)}
    horiz: dict[Cell, DerivationStep] = {(0, j): s for j, s in enumerate(d_bar.steps)}
    grid: dict[Cell, ConfluxSquare] = {}

    def square(cell: Cell) -> ConfluxSquare:
        left, top = vert[cell], horiz[cell]
        w = parallel_independent(left, top)
        if w is None:
            raise IndependenceError(
                f"{left.rule.name} (step {cell[0]} of the moved derivation) and "
                f"{top.rule.name} (step {cell[1]} of the other) are not parallel independent",
                cell,
            )
        try:
            bottom, right = conflux(left, top, w)
        except IdentifierClashError as exc:
            raise IndependenceError(str(exc), cell) from exc
        return ConfluxSquare(left, top, bottom, right)

    def record(cell: Cell, sq: ConfluxSquare) -> None:
        i, j = cell
        grid[cell] = sq
        horiz[(i + 1, j)] = sq.bottom
        vert[(i, j + 1)] = sq.right

    if workers > 1:
        cells = cell_order(n, m, "antidiagonal")
        with ThreadPoolExecutor(workers) as pool:
            for k in range(n + m - 1):
                diag = [c for c in cells if c[0] + c[1] == k]
                for c, sq in zip(diag, pool.map(square, diag)):
                    record(c, sq)
    else:
        seq = cell_order(n, m, order) if isinstance(order, str) else list(order)
        _check_order(seq, n, m)
        for c in seq:
            record(c, square(c))

    moved = Derivation(d_bar.end, tuple(vert[(i, m)] for i in range(n)))
    co_moved = Derivation(d.end, tuple(horiz[(n, j)] for j in range(m)))
    return MovedPair(moved, co_moved, grid)


def move(d: Derivation, d_bar: Derivation) -> Derivation:
    return move_forward(d, d_bar).moved


def evom(d_prime: Derivation, d_bar: Derivation, **kwargs) -> Derivation:
    """Move ``d_prime`` backward along ``d_bar`` (which ends where ``d_prime`` starts)."""
    if d_bar.end != d_prime.start:
        raise DomainMismatchError("backward moving needs d_bar to end where d_prime starts")
    return move_forward(d_prime, invert_derivation(d_bar), **kwargs).moved


# -- bounded rule-set certification -----------------------------------------

@dataclass(frozen=True)
class Counterexample:
    host: int
    first_rule: str
    first_match: dict
    second_rule: str
    second_match: dict

    def to_dict(self) -> dict:
        return {
            "host": self.host,
            "first_rule": self.first_rule,
            "first_match": self.first_match,
            "second_rule": self.second_rule,
            "second_match": self.second_match,
        }


@dataclass
class IndependenceReport:
    mode: str
    rules: tuple[list[str], list[str]]
    hosts: int
    pairs_checked: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def independent(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "kind": "independence-report",
            "mode": self.mode,
            "P": self.rules[0],
            "P_bar": self.rules[1],
            "hosts": self.hosts,
            "pairs_checked": self.pairs_checked,
            "bounded": True,
            "note": "finite search over the supplied hosts; not a proof for all graphs",
            "result": "PASS" if self.independent else "FAIL",
            "by_rule_pair": self.by_rule_pair(),
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }

    def by_rule_pair(self) -> dict[str, int]:
        """Counterexample counts keyed ``"first -> second"``."""
        counts = Counter(f"{c.first_rule} -> {c.second_rule}" for c in self.counterexamples)
        return dict(sorted(counts.items()))


def _steps(rules: Iterable[Rule], host: Graph, injective: bool) -> list[DerivationStep]:
    return [apply(r, g) for r in rules for g in applicable_matches(r, host, injective=injective)]


def check_rule_pair_independence(
    P: Sequence[Rule],
    P_bar: Sequence[Rule],
    hosts: Sequence[Graph],
    mode: str = "parallel",
    *,
    injective: bool = False,
    max_counterexamples: int | None = None,
) -> IndependenceReport:
    """Search the supplied hosts for independence counterexamples.

    ``parallel``: every P-step and P_bar-step from a common host.
    ``sequential``: every P_bar-step from a host followed by every P-step.
    """
    if mode not in ("parallel", "sequential"):
        raise ValueError(f"unknown mode {mode!r}")
    report = IndependenceReport(mode, ([r.name for r in P], [r.name for r in P_bar]), len(hosts))

    def found(k: int, a: DerivationStep, b: DerivationStep) -> bool:
        report.counterexamples.append(
            Counterexample(k, a.rule.name, a.g.to_dict(), b.rule.name, b.g.to_dict())
        )
        return max_counterexamples is not None and len(report.counterexamples) >= max_counterexamples

    for k, host in enumerate(hosts):
        if mode == "parallel":
            bar_steps = _steps(P_bar, host, injective)
            for a in _steps(P, host, injective):
                for b in bar_steps:
                    report.pairs_checked += 1
                    if parallel_independent(a, b) is None and found(k, a, b):
                        return report
        else:
            for first in _steps(P_bar, host, injective):
                for second in _steps(P, first.H, injective):
                    report.pairs_checked += 1
                    if sequentially_independent(first, second) is None and found(k, first, second):
                        return report
    return report
