"""The ten acceptance criteria, each timed and reported as one PASS/FAIL line."""

from __future__ import annotations

import random
import time
from collections import Counter

from dpospine.corpus import CORPUS_DIR, color_rules, dual_rules
from dpospine.dpo import invert_derivation, run_script, verify_double_pushout
from dpospine.graph import Graph, compose, compose_handles, enumerate_monomorphisms, find_isomorphism
from dpospine.moving import check_rule_pair_independence, evom, move, move_forward, random_cell_order
from dpospine.randomized import random_instance, random_superset
from dpospine.serialize import load_script
from dpospine.spine import accessed_part, check_spine_preservation, derivations_equal_up_to_iso, restrict, spine
from oracles import all_morphisms, as_key, brute_isomorphic

SIDE_A, SIDE_B = ("a1", "a2", "a3"), ("b1", "b2", "b3")


def record(log, n: int, ok: bool, detail: str, elapsed: float, limit: float | None = None) -> None:
    passed = ok and (limit is None or elapsed < limit)
    bound = f" < {limit:g}s" if limit is not None else ""
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'} {detail} [{elapsed:.2f}s{bound}]"
    log.append(line)
    print(line)
    assert passed, line


def _pairs(pairs, label="*"):
    edges = {}
    for u, w in pairs:
        edges[f"{u}-{w}"] = (u, w, label)
        edges[f"{w}-{u}"] = (w, u, label)
    return edges


def _colored(structure: dict) -> Graph:
    """Both bipartition sides, two colour vertices with loops, every vertex joined to its side's colour."""
    edges = {**structure, "l1": ("c1", "c1", "1"), "l2": ("c2", "c2", "2")}
    edges |= _pairs([(v, "c1") for v in SIDE_A] + [(v, "c2") for v in SIDE_B])
    return Graph([*SIDE_A, *SIDE_B, "c1", "c2"], edges)


def bipartite_colored() -> Graph:
    return _colored(_pairs([(a, b) for a in SIDE_A for b in SIDE_B]))


def triangles() -> dict:
    return _pairs([(s[i], s[j]) for s in (SIDE_A, SIDE_B) for i, j in ((0, 1), (1, 2), (0, 2))])


def _replay(name: str):
    start, entries, rules = load_script(CORPUS_DIR / f"{name}.json")
    return run_script(start, entries, rules)


def test_criterion_1_color_replay(acceptance_log):
    t0 = time.perf_counter()
    d = _replay("d_color")
    counts = Counter(s.rule.name.split("(")[0] for s in d.steps)
    ok = (len(d) == 14 and counts == {"add_loop": 6, "add_color": 2, "choose_color": 6}
          and find_isomorphism(d.end, bipartite_colored()) is not None)
    record(acceptance_log, 1, ok, f"d_color replays {len(d)} steps {dict(counts)}; end graph iso",
           time.perf_counter() - t0, 1.0)


def test_criterion_2_dual_replay(acceptance_log):
    t0 = time.perf_counter()
    d = _replay("d_dual")
    counts = Counter(s.rule.name for s in d.steps)
    tri = Graph([*SIDE_A, *SIDE_B], triangles())
    ok = (len(d) == 24 and counts == {"double_edge": 9, "add_edge": 6, "remove_pair": 9}
          and find_isomorphism(d.end, tri) is not None)
    record(acceptance_log, 2, ok, f"d_dual replays {len(d)} steps {dict(counts)}; two triangles",
           time.perf_counter() - t0, 1.0)


def test_criterion_3_accessed_part(acceptance_log, dcolor):
    t0 = time.perf_counter()
    acc = accessed_part(dcolor).handle
    ok = acc.vset == {f"v{i}" for i in range(1, 7)} and acc.eset == frozenset()
    record(acceptance_log, 3, ok, f"acc(d_color) = {len(acc.vset)} vertices, {len(acc.eset)} edges",
           time.perf_counter() - t0)


def test_criterion_4_spine_golden(acceptance_log, dcolor):
    t0 = time.perf_counter()
    acc, sp = spine(dcolor)
    # the same script replayed on six bare vertices
    start, entries, rules = load_script(CORPUS_DIR / "d_color.json")
    expected = run_script(Graph(start.vertices), entries, rules)
    stepwise = derivations_equal_up_to_iso(sp, expected)
    ok = (stepwise is not None and stepwise.violations() == []
          and len(sp.start.vertices) == 6 and not sp.start.edges
          and find_isomorphism(sp.end, _colored({})) is not None)
    record(acceptance_log, 4, ok, f"spine(d_color) has {len(sp)} steps, {len(sp.end.vertices)}-vertex end, step-wise iso",
           time.perf_counter() - t0, 1.0)


def test_criterion_5_moving_golden(acceptance_log, dcolor, ddual):
    t0 = time.perf_counter()
    pair = move_forward(dcolor, ddual)
    moved = pair.moved
    ok = (len(pair.grid) == 14 * 24 and len(moved) == 14 and moved.start == ddual.end
          and find_isomorphism(moved.end, _colored(triangles())) is not None)
    record(acceptance_log, 5, ok, f"move(d_color, d_dual): {len(pair.grid)} independent cells, {len(moved)} steps",
           time.perf_counter() - t0, 5.0)


def test_criterion_6_theorem_instance(acceptance_log, dcolor, ddual):
    t0 = time.perf_counter()
    w = derivations_equal_up_to_iso(spine(dcolor)[1], spine(move(dcolor, ddual))[1])
    ok = w is not None and w.violations() == []
    record(acceptance_log, 6, ok, "spine(d_color) == spine(move(d_color, d_dual)) up to iso",
           time.perf_counter() - t0, 5.0)


def test_criterion_7_corollary_instance(acceptance_log, dcolor, ddual):
    t0 = time.perf_counter()
    back = evom(move(dcolor, ddual), ddual)
    ok = derivations_equal_up_to_iso(back, dcolor) is not None
    record(acceptance_log, 7, ok, f"evom(move(d_color, d_dual), d_dual) == d_color up to iso (strict: {back == dcolor})",
           time.perf_counter() - t0, 5.0)


def test_criterion_8_negative_control(acceptance_log, dcolor):
    t0 = time.perf_counter()
    runs = [check_rule_pair_independence(dual_rules(), color_rules(2), dcolor.graphs, "sequential")
            for _ in range(2)]
    consumed = [c for c in runs[0].counterexamples
                if c.first_rule.startswith("choose_color") and c.second_rule == "double_edge"
                and any(e.startswith(c.first_rule + ".") for e in c.second_match["emap"].values())]
    ok = (not runs[0].independent and bool(consumed) and runs[0].to_dict() == runs[1].to_dict())
    first = consumed[0] if consumed else None
    detail = "no counterexample" if first is None else (
        f"{len(consumed)} cases of double_edge consuming a choose_color edge, e.g. host {first.host} "
        f"{first.first_rule} then double_edge at {sorted(first.second_match['emap'].values())}; deterministic")
    record(acceptance_log, 8, ok, detail, time.perf_counter() - t0)


def _all_steps(*ds):
    return [s for d in ds for s in d.steps]


def test_criterion_9_property_suite(acceptance_log):
    t0 = time.perf_counter()
    seeds = range(120)
    failures: dict[str, list[int]] = {k: [] for k in "abcdef"}
    sizes = Counter()
    for seed in seeds:
        inst = random_instance(seed)
        d, d_bar = inst.d, inst.d_bar
        rng = random.Random(seed)
        sizes["steps"] += len(d) + len(d_bar)
        sizes["nontrivial"] += bool(d.steps and d_bar.steps)
        # (a)
        if not check_spine_preservation(d, d_bar).holds:
            failures["a"].append(seed)
        # (b) and (c)
        acc = accessed_part(d).handle
        m = random_superset(rng, acc)
        dm = restrict(d, m).restricted
        inner = accessed_part(dm).handle
        m2 = random_superset(rng, inner)
        if restrict(dm, m2).restricted != restrict(d, compose_handles(m, m2)).restricted:
            failures["b"].append(seed)
        if compose_handles(m, inner) != acc or compose(inner.inclusion(), m.inclusion()) != acc.inclusion():
            failures["c"].append(seed)
        # (d)
        base = move_forward(d, d_bar)
        orders = ("column", "antidiagonal", random_cell_order(len(d), len(d_bar), rng))
        for order in orders:
            other = move_forward(d, d_bar, order=order)
            if (derivations_equal_up_to_iso(other.moved, base.moved) is None
                    or derivations_equal_up_to_iso(other.co_moved, base.co_moved) is None):
                failures["d"].append(seed)
                break
        # (e)
        built = _all_steps(d, d_bar, base.moved, base.co_moved)
        built += [s for sq in base.grid.values() for s in (sq.bottom, sq.right)]
        built += _all_steps(*(invert_derivation(x) for x in (d, d_bar, base.moved)))
        sizes["verified"] += len(built)
        if not all(verify_double_pushout(s) for s in built):
            failures["e"].append(seed)
        # (f)
        if invert_derivation(invert_derivation(d)) != d or invert_derivation(invert_derivation(d_bar)) != d_bar:
            failures["f"].append(seed)
    bad = {k: v for k, v in failures.items() if v}
    detail = (f"{len(seeds)} seeds ({sizes['nontrivial']} with both derivations non-empty, {sizes['steps']} steps, "
              f"{sizes['verified']} pushout checks); (a)-(f) " + ("hold" if not bad else f"fail at {bad}"))
    record(acceptance_log, 9, not bad and len(seeds) >= 100, detail, time.perf_counter() - t0, 60.0)


def _random_graph(rng: random.Random, max_vertices: int, max_edges: int, labels: str = "*ab") -> Graph:
    vs = [f"n{i}" for i in range(rng.randint(0, max_vertices))]
    edges = {}
    if vs:
        for k in range(rng.randint(0, max_edges)):
            edges[f"e{k}"] = (rng.choice(vs), rng.choice(vs), rng.choice(labels))
    return Graph(vs, edges)


def _shuffled_copy(rng: random.Random, g: Graph) -> Graph:
    vs = sorted(g.vertices)
    ren = dict(zip(vs, rng.sample([f"m{i}" for i in range(len(vs))], len(vs))))
    items = list(g.edges.values())
    rng.shuffle(items)
    return Graph(ren.values(), {f"f{k}": (ren[e.src], ren[e.tgt], e.label) for k, e in enumerate(items)})


def test_criterion_10_oracle_equivalence(acceptance_log):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    mono_cases = iso_cases = iso_positive = 0
    mismatches = []
    for k in range(400):
        dom = _random_graph(rng, 3, 3)
        cod = _random_graph(rng, 6, 6)
        for injective in (True, False):
            got = [as_key(m) for m in enumerate_monomorphisms(dom, cod, injective=injective)]
            mono_cases += 1
            if len(got) != len(set(got)) or set(got) != all_morphisms(dom, cod, injective):
                mismatches.append(("morphisms", k, injective))
    for k in range(400):
        g = _random_graph(rng, 6, 7, "*a")
        h = _shuffled_copy(rng, g) if rng.random() < 0.5 else _random_graph(rng, 6, 7, "*a")
        if h.edges and rng.random() < 0.3:
            e = rng.choice(sorted(h.edges))
            src, tgt, _ = h.edges[e]
            h = Graph(h.vertices, {**{x: tuple(v) for x, v in h.edges.items()}, e: (tgt, src, "a")})
        expected = brute_isomorphic(g, h)
        iso_cases += 1
        iso_positive += expected
        if (find_isomorphism(g, h) is not None) != expected:
            mismatches.append(("iso", k))
    detail = (f"{mono_cases} enumeration cases and {iso_cases} isomorphism cases ({iso_positive} isomorphic) "
              f"agree with naive search" if not mismatches else f"mismatches {mismatches[:5]}")
    record(acceptance_log, 10, not mismatches, detail, time.perf_counter() - t0, 30.0)
