import json

import pytest

from minorkit import groups
from minorkit.graphs import Graph, complete_graph, cycle_graph, grid_graph, path_graph
from minorkit.minors import (BranchDecomposition, brute_force_minor_oracle,
                             construct_z2_s2_minor, construct_z2xc_minor,
                             find_clique_minor, has_cut_vertex, lift_through_collapse,
                             project_free_product_minor, verify_minor, z2_s2_spec)
from conftest import random_graph


def _coords(bd):
    """Branch sets as coordinate tuples (host must be a labeled ball)."""
    out = []
    for s in bd.branch_sets:
        out.append(frozenset(bd.ball.elements[v] for v in s))
    return out


# -- verification ---------------------------------------------------------------

def test_verify_explicit_k3_sets():
    spec = z2_s2_spec()
    ball = groups.cayley_ball(spec, 10)
    sets = [
        {(2, 1), (4, 1), (6, 1)},
        {(3, 1), (3, 2), (4, 2), (6, 2)},
        {(5, 1), (5, 2), (5, 3), (6, 3)},
    ]
    bd = BranchDecomposition(
        complete_graph(3),
        [frozenset(ball.vertex_of(p) for p in s) for s in sets],
        ball.graph)
    verdict = verify_minor(ball.graph, bd)
    assert verdict.passed


def test_verify_reports_overlap():
    g = path_graph(4)
    bd = BranchDecomposition(complete_graph(2), [{0, 1}, {1, 2}], g)
    v = verify_minor(g, bd)
    assert not v.disjoint and v.disjoint_witness == (0, 1, 1)
    assert not v.passed


def test_verify_reports_disconnected_and_missing_edge():
    g = Graph(5, [(0, 1), (1, 2), (3, 4)])
    bd = BranchDecomposition(complete_graph(2), [{0, 2}, {3}], g)
    v = verify_minor(g, bd)
    assert not v.connected and v.connected_witness == 0

    bd2 = BranchDecomposition(complete_graph(3), [{0}, {1}, {4}], g)
    v2 = verify_minor(g, bd2)
    assert v2.disjoint and v2.connected
    assert not v2.edges_realized and v2.edges_witness == (0, 2)

    bd3 = BranchDecomposition(complete_graph(2), [set(), {1}], g)
    assert not verify_minor(g, bd3).connected


def test_verify_rejects_foreign_vertices():
    g = path_graph(3)
    with pytest.raises(ValueError):
        BranchDecomposition(complete_graph(1), [{7}], g)


# -- explicit constructions -------------------------------------------------------

def test_z2s2_m1():
    bd = construct_z2_s2_minor(1)
    assert _coords(bd) == [frozenset({(2, 1)})]
    assert verify_minor(bd.host, bd).passed


def test_z2s2_m2_exact_sets():
    bd = construct_z2_s2_minor(2)
    assert _coords(bd) == [
        frozenset({(2, 1), (4, 1)}),
        frozenset({(3, 1), (3, 2), (4, 2)}),
    ]
    # the joining edge (2,1)-(3,1) is a single horizontal step
    u, v = bd.ball.vertex_of((2, 1)), bd.ball.vertex_of((3, 1))
    assert bd.host.has_edge(u, v)


def test_z2s2_m3_exact_sets():
    bd = construct_z2_s2_minor(3)
    assert _coords(bd) == [
        frozenset({(2, 1), (4, 1), (6, 1)}),
        frozenset({(3, 1), (3, 2), (4, 2), (6, 2)}),
        frozenset({(5, 1), (5, 2), (5, 3), (6, 3)}),
    ]


@pytest.mark.parametrize("m", range(1, 7))
def test_z2s2_verifies(m):
    bd = construct_z2_s2_minor(m)
    assert verify_minor(bd.host, bd).passed
    assert bd.ball.radius == 3 * m + 2


def test_z2s2_rejects_zero():
    with pytest.raises(ValueError):
        construct_z2_s2_minor(0)


def test_z2xc_m3_exact_sets():
    spec = groups.parse_group_spec("Z^2 x C2")
    t = spec.term
    s1, s2, s3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    parse = lambda c: groups.parse_element(t, str(c).replace(" ", ""))
    bd = construct_z2xc_minor(3, spec, parse(s1), parse(s2), parse(s3))
    got = _coords(bd)
    want = [
        {((1, 0), 0), ((2, 0), 0), ((3, 0), 0)},
        {((2, 0), 1), ((2, 1), 1), ((2, 1), 0), ((3, 1), 0)},
        {((3, 0), 1), ((3, 1), 1), ((3, 2), 1), ((3, 2), 0)},
    ]
    assert got == [frozenset(w) for w in want]
    assert verify_minor(bd.host, bd).passed


def test_z2xc_m2_cross_edge():
    spec = groups.parse_group_spec("Z^2 x C2")
    t = spec.term
    bd = construct_z2xc_minor(2, spec,
                              groups.parse_element(t, "(1,0,0)"),
                              groups.parse_element(t, "(0,1,0)"),
                              groups.parse_element(t, "(0,0,1)"))
    assert _coords(bd) == [
        frozenset({((1, 0), 0), ((2, 0), 0)}),
        frozenset({((2, 0), 1), ((2, 1), 1), ((2, 1), 0)}),
    ]
    u = bd.ball.vertex_of(((2, 0), 0))
    v = bd.ball.vertex_of(((2, 0), 1))
    assert bd.host.has_edge(u, v)


@pytest.mark.parametrize("cyclic", ["C2", "C3"])
def test_z2xc_small_family(cyclic):
    spec = groups.parse_group_spec(f"Z^2 x {cyclic}")
    t = spec.term
    for m in (1, 2, 3):
        bd = construct_z2xc_minor(m, spec,
                                  groups.parse_element(t, "(1,0,0)"),
                                  groups.parse_element(t, "(0,1,0)"),
                                  groups.parse_element(t, "(0,0,1)"))
        assert verify_minor(bd.host, bd).passed


def test_z2xc_precondition_failures():
    spec = groups.parse_group_spec("Z^2 x C2 | gens=(1,0,0),(0,1,0),(0,0,1),(1,1,0),(-1,0,0),(0,-1,0),(-1,-1,0),sym")
    t = spec.term
    s1 = groups.parse_element(t, "(1,0,0)")
    s2 = groups.parse_element(t, "(0,1,0)")
    inside = groups.parse_element(t, "(1,1,0)")   # lies in <s1,s2>
    with pytest.raises(ValueError):
        construct_z2xc_minor(2, spec, s1, s2, inside)
    neg = groups.parse_element(t, "(-1,0,0)")     # <s1,-s1> is rank 1
    with pytest.raises(ValueError):
        construct_z2xc_minor(2, spec, s1, neg,
                             groups.parse_element(t, "(0,0,1)"))


# -- oracle -----------------------------------------------------------------------

def test_oracle_examples():
    assert brute_force_minor_oracle(cycle_graph(4), complete_graph(3))
    assert not brute_force_minor_oracle(path_graph(7), complete_graph(3))
    assert brute_force_minor_oracle(complete_graph(4), complete_graph(4))
    assert brute_force_minor_oracle(grid_graph(3, 3), complete_graph(4))
    assert not brute_force_minor_oracle(grid_graph(3, 3), complete_graph(5))


def test_oracle_host_cap():
    with pytest.raises(ValueError):
        brute_force_minor_oracle(path_graph(13), complete_graph(2))


def test_oracle_pattern_larger_than_host():
    assert not brute_force_minor_oracle(path_graph(3), complete_graph(4))


def test_oracle_general_pattern():
    # C4 host contains the path P4 but not K4
    p4 = path_graph(4)
    assert brute_force_minor_oracle(cycle_graph(4), p4)
    assert not brute_force_minor_oracle(cycle_graph(4), complete_graph(4))


# -- search -----------------------------------------------------------------------

def test_find_m1_singleton():
    g = grid_graph(2, 2)
    out = find_clique_minor(g, 1)
    assert out.found and out.decomposition.branch_sets == [frozenset({0})]


def test_find_grid_k4():
    out = find_clique_minor(grid_graph(3, 3), 4, budget=10 ** 6)
    assert out.found
    assert verify_minor(out.decomposition.host, out.decomposition).passed


def test_find_tree_never():
    ball = groups.cayley_ball(groups.parse_group_spec("F2"), 4)
    for budget in (10, 10 ** 6):
        out = find_clique_minor(ball.graph, 3, budget=budget)
        assert not out.found and out.exhausted


def test_find_budget_exhaustion():
    ball = groups.cayley_ball(groups.parse_group_spec("Z^2"), 5)
    out = find_clique_minor(ball.graph, 6, budget=25)
    assert not out.found and not out.exhausted and out.expansions > 25


def test_find_agrees_with_oracle(rng):
    for _ in range(60):
        n = rng.randint(2, 8)
        g = random_graph(n, rng.uniform(0.15, 0.8), rng)
        for m in (3, 4):
            want = brute_force_minor_oracle(g, complete_graph(m))
            got = find_clique_minor(g, m, budget=10 ** 6)
            assert want == got.found, (sorted(g.edges()), m)


def test_find_monotone_restriction():
    out = find_clique_minor(grid_graph(3, 3), 4, budget=10 ** 6)
    bd = out.decomposition
    smaller = BranchDecomposition(complete_graph(3), bd.branch_sets[:3], bd.host)
    assert verify_minor(bd.host, smaller).passed


# -- cut vertices -------------------------------------------------------------------

def test_has_cut_vertex():
    assert has_cut_vertex(path_graph(3))
    assert not has_cut_vertex(complete_graph(4))
    bowtie = Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    assert has_cut_vertex(bowtie)
    assert not has_cut_vertex(cycle_graph(5))
    assert not has_cut_vertex(Graph(1))
    with pytest.raises(ValueError):
        has_cut_vertex(Graph(3, [(0, 1)]))


# -- free-product projection ---------------------------------------------------------

FP = "(Z^2|gens=(1,0),(2,0),(0,1),sym) * C2"


def _plant(ball, term, zsets, z2_ball, translate):
    sets = []
    for s in zsets:
        els = []
        for v in s:
            xy = z2_ball.elements[v]
            els.append(groups.multiply(term, ((0, xy),), translate))
        sets.append(frozenset(ball.vertex_of(e) for e in els))
    return sets


@pytest.fixture(scope="module")
def fp_ball():
    spec = groups.parse_group_spec(FP)
    return spec, groups.cayley_ball(spec, 7, labels=False)


def test_project_identity_coset(fp_ball):
    spec, ball = fp_ball
    bd0 = construct_z2_s2_minor(3)
    sets = _plant(ball, spec.term, bd0.branch_sets, bd0.ball, ())
    planted = BranchDecomposition(complete_graph(3), sets, ball.graph, ball)
    out = project_free_product_minor(spec, ball, planted)
    assert verify_minor(out.host, out).passed
    assert _coords(out) == _coords(bd0)


def test_project_translated_coset_round_trip(fp_ball):
    spec, ball = fp_ball
    t = ((1, 1),)
    bd0 = construct_z2_s2_minor(3)
    sets = _plant(ball, spec.term, bd0.branch_sets, bd0.ball, t)
    planted = BranchDecomposition(complete_graph(3), sets, ball.graph, ball)
    assert verify_minor(ball.graph, planted).passed
    out = project_free_product_minor(spec, ball, planted, debug=True)
    assert verify_minor(out.host, out).passed
    assert _coords(out) == _coords(bd0)


def test_project_rejects_cut_vertex_pattern(fp_ball):
    spec, ball = fp_ball
    pts = [((0, (2, 1)),), ((0, (3, 1)),), ((0, (3, 2)),)]
    sets = [frozenset([ball.vertex_of(p)]) for p in pts]
    bd = BranchDecomposition(path_graph(3), sets, ball.graph, ball)
    assert verify_minor(ball.graph, bd).passed
    with pytest.raises(ValueError):
        project_free_product_minor(spec, ball, bd)


def test_project_rejects_invalid_witness(fp_ball):
    spec, ball = fp_ball
    far = [((0, (2, 1)),), ((0, (6, 1)),)]  # distance > 1, no joining edge
    sets = [frozenset([ball.vertex_of(p)]) for p in far]
    bd = BranchDecomposition(complete_graph(2), sets, ball.graph, ball)
    with pytest.raises(ValueError):
        project_free_product_minor(spec, ball, bd)


# -- lifting through a collapse ------------------------------------------------------

def test_lift_through_collapse():
    spec = groups.parse_group_spec("Z")
    ball = groups.cayley_ball(spec, 5)
    class_of = {v: ball.elements[v][0] // 2 for v in range(ball.graph.n)}
    quotient, members = groups.babai_collapse(ball.graph, class_of)
    out = find_clique_minor(quotient, 2, budget=10 ** 4)
    assert out.found
    lifted = lift_through_collapse(out.decomposition, members, ball.graph)
    assert verify_minor(ball.graph, lifted).passed


# -- serialization --------------------------------------------------------------------

def test_decomposition_json_round_trip():
    bd = construct_z2_s2_minor(2)
    obj = json.loads(json.dumps(bd.to_json_obj()))
    assert obj["pattern"] == "K2"
    back = BranchDecomposition.from_json_obj(obj, bd.host)
    assert back.branch_sets == bd.branch_sets
    with pytest.raises(ValueError):
        BranchDecomposition.from_json_obj(obj, path_graph(4))
