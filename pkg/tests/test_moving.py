from __future__ import annotations

import random

import pytest

from dpospine.corpus import (
    add_loop,
    choose_color,
    color_rules,
    double_edge,
    dual_rules,
)
from dpospine.dpo import Derivation, Rule, apply, invert_derivation, verify_double_pushout
from dpospine.errors import DomainMismatchError, HostMismatchError, IndependenceError
from dpospine.graph import Edge, Graph, GraphMorphism, find_isomorphism
from dpospine.moving import (
    IndependenceWitness,
    cell_order,
    check_rule_pair_independence,
    conflux,
    evom,
    interchange,
    move,
    move_forward,
    parallel_independent,
    random_cell_order,
    sequentially_independent,
)
from dpospine.randomized import random_instance
from dpospine.spine import derivations_equal_up_to_iso


def _at(rule, G, **vmap):
    return apply(rule, GraphMorphism(rule.L, G, vmap, {}))


def test_non_deleting_step_independent_of_itself(k33_graph):
    s = _at(add_loop(), k33_graph, x="v1")
    w = parallel_independent(s, s)
    assert w is not None and w.f.cod == s.Z


def test_loop_added_vs_loop_consumed():
    G = Graph(["v", "c"], {"a": ("v", "v", "a"), "l": ("c", "c", "1")})
    adder = _at(add_loop(), G, x="v")
    r = choose_color(1)
    chooser = apply(r, GraphMorphism(r.L, G, {"x": "v", "c": "c"}, {"a": "a", "ic": "l"}))
    assert parallel_independent(adder, chooser) is not None  # add_loop reads only the vertex
    # a step that reads the a-loop the chooser deletes is not independent
    reader = Rule("keep_a", Graph(["x"], {"a": ("x", "x", "a")}), Graph(["x"], {"a": ("x", "x", "a")}),
                  Graph(["x"], {"a": ("x", "x", "a")}))
    keeps = apply(reader, GraphMorphism(reader.L, G, {"x": "v"}, {"a": "a"}))
    assert parallel_independent(keeps, chooser) is None


def test_parallel_needs_common_host(dcolor):
    with pytest.raises(HostMismatchError):
        parallel_independent(dcolor.steps[0], dcolor.steps[1])


def test_color_and_dual_first_steps_conflux(dcolor, ddual):
    s1, s2 = dcolor.steps[0], ddual.steps[0]
    bottom, right = conflux(s1, s2)
    assert bottom.G == s1.H and right.G == s2.H and bottom.H == right.H
    assert verify_double_pushout(bottom) and verify_double_pushout(right)
    # id-level commuting square: intermediate graphs agree on the overlap
    assert bottom.Z.vertices & s1.Z.vertices == right.Z.vertices & s2.Z.vertices


def test_loop_and_double_edge_both_orders(k33_graph):
    loop = _at(add_loop(), k33_graph, x="v1")
    r = double_edge()
    dbl = apply(r, GraphMorphism(r.L, k33_graph, {"x": "v3", "y": "v4"}, {"xy": "v3v4", "yx": "v4v3"}))
    bottom, right = conflux(loop, dbl)
    X = bottom.H
    labels = sorted(e.label for e in X.edges.values())
    assert labels.count("a") == 1 and labels.count("b") == 2
    assert find_isomorphism(bottom.H, right.H) is not None


def test_identity_rule_conflux(k33_graph):
    ident = Rule("noop", Graph(["x"]), Graph(["x"]), Graph(["x"]))
    s1 = _at(add_loop(), k33_graph, x="v2")
    s2 = _at(ident, k33_graph, x="v5")
    bottom, right = conflux(s1, s2)
    assert bottom.H == s1.H and right.rule == s1.rule and right.created == s1.created


def test_conflux_rejects_bad_witness(dcolor, ddual):
    s1, s2 = dcolor.steps[0], ddual.steps[0]
    wrong = GraphMorphism(s1.rule.L, s2.Z, {"x": "v2"}, {})
    w = IndependenceWitness("parallel", wrong, s2.g.with_cod(s1.Z))
    with pytest.raises(IndependenceError):
        conflux(s1, s2, w)


def test_choose_color_then_double_edge_not_sequential(dcolor):
    s = dcolor.steps[8]
    created = sorted(s.created[1].values())
    r = double_edge()
    xc = next(e for e in created if e.endswith(".xc"))
    cx = next(e for e in created if e.endswith(".cx"))
    x, c = s.H.edges[xc].src, s.H.edges[xc].tgt
    nxt = apply(r, GraphMorphism(r.L, s.H, {"x": x, "y": c}, {"xy": xc, "yx": cx}))
    assert sequentially_independent(s, nxt) is None
    with pytest.raises(IndependenceError):
        interchange(s, nxt)


def test_sequential_needs_composable(dcolor):
    with pytest.raises(DomainMismatchError):
        sequentially_independent(dcolor.steps[0], dcolor.steps[0])


def test_interchange_double_edge_then_loop(k33_graph):
    r = double_edge()
    dbl = apply(r, GraphMorphism(r.L, k33_graph, {"x": "v1", "y": "v2"}, {"xy": "v1v2", "yx": "v2v1"}))
    loop = _at(add_loop(), dbl.H, x="v1")
    first, second = interchange(dbl, loop)
    assert first.rule == loop.rule and second.rule == dbl.rule
    assert first.G == k33_graph and second.H == loop.H
    direct = _at(add_loop(), k33_graph, x="v1")
    assert find_isomorphism(direct.H, first.H) is not None
    assert verify_double_pushout(first) and verify_double_pushout(second)


def test_mixed_script_adjacent_pairs_interchange(dcolor, ddual):
    # dual steps followed by colour steps, built by moving d_color past d_dual
    mixed = ddual.then(move(dcolor, ddual))
    steps = mixed.steps
    for k in range(len(steps) - 1):
        a, b = steps[k], steps[k + 1]
        if a.rule in dual_rules() and b.rule in color_rules(2):
            assert sequentially_independent(a, b) is not None
            first, second = interchange(a, b)
            assert verify_double_pushout(first) and verify_double_pushout(second)


# -- grids -----------------------------------------------------------------------

def test_move_along_zero_derivation(dcolor):
    assert move(dcolor, Derivation(dcolor.start)) == dcolor


def test_move_zero_derivation(dcolor, ddual):
    moved = move(Derivation(ddual.start), ddual)
    assert moved == Derivation(ddual.end)


def test_move_color_along_dual(dcolor, ddual):
    pair = move_forward(dcolor, ddual)
    assert len(pair.grid) == 14 * 24
    assert pair.moved.start == ddual.end and pair.co_moved.start == dcolor.end
    assert pair.moved.end == pair.co_moved.end
    assert pair.moved.rule_names == dcolor.rule_names
    assert pair.moved.violations() == [] and pair.co_moved.violations() == []


def test_grid_cells_are_valid_squares(dcolor, ddual):
    pair = move_forward(dcolor, ddual)
    for (i, j), sq in pair.grid.items():
        assert sq.bottom.H == sq.right.H
        assert sq.left.G == sq.top.G
        assert verify_double_pushout(sq.bottom) and verify_double_pushout(sq.right)


def test_orders_agree(dcolor, ddual):
    base = move_forward(dcolor, ddual)
    n, m = len(dcolor), len(ddual)
    for order in ("column", "antidiagonal", random_cell_order(n, m, random.Random(3))):
        other = move_forward(dcolor, ddual, order=order)
        assert other.moved == base.moved and other.co_moved == base.co_moved
    threaded = move_forward(dcolor, ddual, workers=4)
    assert threaded.moved == base.moved and threaded.grid.keys() == base.grid.keys()


def test_bad_orders_rejected(dcolor, ddual):
    with pytest.raises(ValueError):
        move_forward(dcolor, ddual, order=[(1, 0)])
    with pytest.raises(ValueError):
        move_forward(dcolor, ddual, order="spiral")
    with pytest.raises(ValueError):
        move_forward(dcolor, ddual, order=cell_order(14, 24)[:-1])


def test_random_orders_are_valid():
    rng = random.Random(0)
    for _ in range(20):
        order = random_cell_order(4, 5, rng)
        assert sorted(order) == cell_order(4, 5)


def test_dependent_grid_names_cell(k33_graph):
    loop_a = Graph(["x"], {"a": ("x", "x", "a")})
    peek = Rule("peek_a", loop_a, loop_a, loop_a)
    eat = Rule("eat_a", loop_a, Graph(["x"]), Graph(["x"]))
    G = _at(add_loop(), k33_graph, x="v1").H
    at_v1 = {"vmap": {"x": "v1"}, "emap": {"a": "add_loop.0.a"}}
    first = _at(add_loop(), G, x="v2")
    second = apply(peek, GraphMorphism(peek.L, first.H, at_v1["vmap"], at_v1["emap"]))
    d = Derivation(G, (first, second))
    d_bar = Derivation(G, (apply(eat, GraphMorphism(eat.L, G, at_v1["vmap"], at_v1["emap"])),))
    with pytest.raises(IndependenceError) as err:
        move_forward(d, d_bar)
    assert err.value.cell == (1, 0) and "peek_a" in str(err.value)


def test_evom_base_case(dcolor):
    assert evom(dcolor, Derivation(dcolor.start)) == dcolor


def test_evom_needs_composable(dcolor, ddual):
    with pytest.raises(DomainMismatchError):
        evom(dcolor, ddual)


def test_evom_undoes_move(dcolor, ddual):
    moved = move(dcolor, ddual)
    back = evom(moved, ddual)
    assert back == dcolor
    assert derivations_equal_up_to_iso(back, dcolor) is not None


@pytest.mark.parametrize("seed", range(25))
def test_round_trips_on_random_instances(seed):
    inst = random_instance(seed)
    moved = move(inst.d, inst.d_bar)
    assert len(moved) == len(inst.d) and moved.rule_names == inst.d.rule_names
    assert derivations_equal_up_to_iso(evom(moved, inst.d_bar), inst.d) is not None
    d_prime = moved
    again = move(evom(d_prime, inst.d_bar), inst.d_bar)
    assert derivations_equal_up_to_iso(again, d_prime) is not None
    # moving along the inverse of the co-derivation goes back as well
    assert evom(moved, inst.d_bar) == move(moved, invert_derivation(inst.d_bar))


# -- bounded rule-set checks -----------------------------------------------------------

def test_color_dual_independent_on_corpus(dcolor, ddual):
    hosts = dcolor.graphs + ddual.graphs
    for mode in ("parallel", "sequential"):
        rep = check_rule_pair_independence(color_rules(2), dual_rules(), hosts, mode)
        assert rep.independent and rep.pairs_checked > 0
        assert rep.to_dict()["bounded"] is True


def test_dual_then_color_sequential_fails(dcolor):
    rep = check_rule_pair_independence(dual_rules(), color_rules(2), dcolor.graphs, "sequential")
    assert not rep.independent
    pairs = rep.by_rule_pair()
    assert pairs["choose_color(1) -> double_edge"] > 0 and pairs["choose_color(2) -> double_edge"] > 0
    rep_par = check_rule_pair_independence(dual_rules(), color_rules(2), dcolor.graphs[:9], "parallel")
    assert rep_par.independent


def test_disjoint_families_independent():
    from dpospine.randomized import family_rules, random_graph

    rng = random.Random(1)
    hosts = [random_graph(rng, 4, 5) for _ in range(4)]
    hosts.append(Graph(["u", "w"], {"x": Edge("u", "w", "p2"), "y": Edge("u", "w", "q2"), "s": Edge("u", "u", "s")}))
    rep = check_rule_pair_independence(family_rules("p"), family_rules("q"), hosts, "parallel")
    assert rep.independent
    # sequentially, one family may match a vertex the other just created
    rep = check_rule_pair_independence(family_rules("p"), family_rules("q"), hosts, "sequential")
    assert {c.first_rule for c in rep.counterexamples} <= {"q_seed", "q_sprout"}


def test_counterexample_cap(dcolor):
    rep = check_rule_pair_independence(dual_rules(), color_rules(2), dcolor.graphs, "sequential",
                                       max_counterexamples=3)
    assert len(rep.counterexamples) == 3 and rep.to_dict()["result"] == "FAIL"
    with pytest.raises(ValueError):
        check_rule_pair_independence(dual_rules(), color_rules(2), [], "diagonal")
