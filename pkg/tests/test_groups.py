import random

import pytest

from minorkit import groups
from minorkit.errors import CapExceeded, SpecSyntaxError
from minorkit.graphs import bfs_distances, is_connected
from minorkit.groups import (Cyclic, DirectProduct, Free, FreeAbelian, FreeProduct,
                             GroupSpec, babai_collapse, cayley_ball, check_generates,
                             enlarged_generating_set, format_element, identity, inverse,
                             multiply, parse_element, parse_group_spec, power)

Z2 = parse_group_spec("Z^2")
S2 = parse_group_spec("Z^2 | gens=(1,0),(2,0),(0,1),sym")
F2 = parse_group_spec("F2")
C2C3 = parse_group_spec("C2 * C3")


def test_multiply_basics():
    assert multiply(Z2.term, (1, 0), (0, 1)) == (1, 1)
    t = parse_element(C2C3.term, "l:c")
    c = parse_element(C2C3.term, "r:c")
    assert multiply(C2C3.term, t, t) == ()
    tc = multiply(C2C3.term, t, c)
    # letters of the same factor merge: (t c) * c = t c^2
    assert multiply(C2C3.term, tc, c) == ((0, 1), (1, 2))


def test_inverse_examples():
    assert inverse(Z2.term, (2, -1)) == (-2, 1)
    assert inverse(F2.term, (1, 2)) == (-2, -1)
    tc = multiply(C2C3.term, parse_element(C2C3.term, "l:c"),
                  parse_element(C2C3.term, "r:c"))
    # (t c)^-1 = c^2 t
    assert inverse(C2C3.term, tc) == ((1, 2), (0, 1))


def _random_element(term, gens, rng, length=8):
    el = identity(term)
    for _ in range(rng.randint(0, length)):
        el = multiply(term, rng.choice(gens), el)
    return el


@pytest.mark.parametrize("spec", [
    Z2, S2, F2, C2C3,
    parse_group_spec("Z^2 x C3"),
    parse_group_spec("(Z^2|gens=(1,0),(2,0),(0,1),sym) * C2"),
])
def test_normal_form_group_laws(spec):
    rng = random.Random(11)
    term = spec.term
    e = identity(term)
    gens = list(spec.gens)
    for _ in range(200):
        a = _random_element(term, gens, rng)
        groups.validate_element(term, a)
        assert multiply(term, a, inverse(term, a)) == e
        assert multiply(term, a, e) == a and multiply(term, e, a) == a
    for _ in range(100):
        a, b, c = (_random_element(term, gens, rng) for _ in range(3))
        assert multiply(term, multiply(term, a, b), c) == \
            multiply(term, a, multiply(term, b, c))


def test_validate_rejects_malformed():
    with pytest.raises(ValueError):
        groups.validate_element(F2.term, (1, -1))
    with pytest.raises(ValueError):
        groups.validate_element(Cyclic(3), 5)
    with pytest.raises(ValueError):
        groups.validate_element(C2C3.term, ((0, 1), (0, 1)))


def test_power():
    assert power(Z2.term, (1, 2), 3) == (3, 6)
    assert power(Z2.term, (1, 0), -2) == (-2, 0)
    assert power(C2C3.term, parse_element(C2C3.term, "l:c"), 2) == ()


def test_ball_counts_plane():
    for r in range(5):
        assert cayley_ball(Z2, r).graph.n == 2 * r * r + 2 * r + 1
    b1 = cayley_ball(Z2, 1)
    assert b1.graph.num_edges == 4  # star around the origin


def test_ball_counts_free():
    for n, rank in ((2, 2), (3, 3)):
        spec = parse_group_spec(f"F{rank}")
        for r in range(1, 4):
            expect = 1 + 2 * rank * ((2 * rank - 1) ** r - 1) // (2 * rank - 2)
            ball = cayley_ball(spec, r)
            assert ball.graph.n == expect
            assert ball.graph.num_edges == ball.graph.n - 1  # tree
    b = cayley_ball(F2, 2)
    assert b.graph.n == 17 and b.graph.num_edges == 16


def test_ball_doubled_generator():
    b = cayley_ball(S2, 1)
    assert b.graph.n == 7
    assert b.graph.has_edge(b.vertex_of((1, 0)), b.vertex_of((2, 0)))
    assert not b.graph.has_edge(b.vertex_of((0, 1)), b.vertex_of((1, 0)))


def test_ball_bfs_parents_are_geodesics():
    ball = cayley_ball(S2, 4)
    assert ball.word_length[0] == 0
    for v in range(1, ball.graph.n):
        wl = ball.word_length[v]
        assert wl >= ball.word_length[v - 1] or wl == ball.word_length[v - 1]
        assert any(ball.word_length[w] == wl - 1 for w in ball.graph.neighbors(v))


def test_ball_labels_and_index():
    ball = cayley_ball(Z2, 2)
    assert ball.graph.labels[0] == "(0,0)"
    for v, el in enumerate(ball.elements):
        assert ball.graph.labels[v] == format_element(Z2.term, el)
        assert ball.index[el] == v
    with pytest.raises(KeyError):
        ball.vertex_of((5, 5))


def test_ball_cap():
    with pytest.raises(CapExceeded):
        cayley_ball(Z2, 3, cap=10)


def test_ball_radius_zero():
    b = cayley_ball(Z2, 0)
    assert b.graph.n == 1 and b.graph.num_edges == 0


def test_babai_collapse_pairs_give_path():
    spec = parse_group_spec("Z")
    ball = cayley_ball(spec, 5)
    class_of = {v: ball.elements[v][0] // 2 for v in range(ball.graph.n)}
    q, members = babai_collapse(ball.graph, class_of)
    assert q.n == 6
    degrees = sorted(q.degree(v) for v in range(q.n))
    assert degrees == [1, 1, 2, 2, 2, 2] and is_connected(q)
    assert q.num_edges == q.n - 1
    assert all(len(mem) in (1, 2) for mem in members)


def test_babai_identity_collapse():
    spec = parse_group_spec("Z")
    ball = cayley_ball(spec, 4)
    q, members = babai_collapse(ball.graph, {v: v for v in range(ball.graph.n)})
    assert q.n == ball.graph.n
    assert sorted(q.edges()) == sorted(ball.graph.edges())
    assert members == [[v] for v in range(ball.graph.n)]


def test_babai_disconnected_class_rejected():
    from minorkit.graphs import path_graph

    g = path_graph(4)
    with pytest.raises(ValueError):
        babai_collapse(g, {0: 0, 1: 1, 2: 0, 3: 1})
    with pytest.raises(ValueError):
        babai_collapse(g, {0: 0, 1: 0})


def test_babai_preserves_connectivity(rng):
    from conftest import random_graph
    from minorkit.graphs import connected_components

    for _ in range(10):
        g = random_graph(9, 0.45, rng)
        if len(connected_components(g)) != 1:
            continue
        # classes: BFS-pair vertices greedily along edges
        class_of, used, cid = {}, set(), 0
        for u, v in g.edges():
            if u not in used and v not in used:
                class_of[u] = class_of[v] = cid
                used |= {u, v}
                cid += 1
        for v in range(g.n):
            if v not in used:
                class_of[v] = cid
                cid += 1
        q, _ = babai_collapse(g, class_of)
        assert is_connected(q)


def test_enlarged_generating_set_plane():
    out = enlarged_generating_set(Z2)
    want = {(a, b) for a in range(-3, 4) for b in range(-3, 4)
            if 0 < abs(a) + abs(b) <= 3}
    assert set(out.gens) == want
    assert len(out.gens) == 24


def test_enlarged_generating_set_involution():
    spec = parse_group_spec("C2")
    out = enlarged_generating_set(spec)
    assert out.gens == (1,)


def test_enlarged_generating_set_free_rank_one():
    spec = parse_group_spec("F1")
    out = enlarged_generating_set(spec)
    want = {(1,), (-1,), (1, 1), (-1, -1), (1, 1, 1), (-1, -1, -1)}
    assert set(out.gens) == want


def test_enlarged_symmetric_and_identity_free():
    for spec in (S2, C2C3, F2):
        out = enlarged_generating_set(spec)
        term = out.term
        e = identity(term)
        assert e not in out.gens
        assert len(set(out.gens)) == len(out.gens)
        for g in out.gens:
            assert inverse(term, g) in out.gens


def test_parser_round_trips():
    assert parse_group_spec("Z").term == FreeAbelian(1)
    assert parse_group_spec("Z^3").term == FreeAbelian(3)
    assert parse_group_spec("C5").term == Cyclic(5)
    assert parse_group_spec("F2 | gens=basis").gens == ((1,), (-1,), (2,), (-2,))
    prod = parse_group_spec("Z^2 x C2")
    assert prod.term == DirectProduct(FreeAbelian(2), Cyclic(2))
    assert parse_element(prod.term, "(0,0,1)") == ((0, 0), 1)
    free_prod = parse_group_spec("C2 * C3")
    assert free_prod.term == FreeProduct(Cyclic(2), Cyclic(3))
    assert len(free_prod.gens) == 3  # t, c, c^2


def test_parser_nested_factor_gens():
    spec = parse_group_spec("(Z^2|gens=(1,0),(2,0),(0,1),sym) * C2")
    assert isinstance(spec.term, FreeProduct)
    assert len(spec.gens) == 7
    left_letters = {w[0][1] for w in spec.gens if w[0][0] == 0}
    assert (2, 0) in left_letters and (-2, 0) in left_letters


def test_parser_errors():
    with pytest.raises(SpecSyntaxError):
        parse_group_spec("Q8")
    with pytest.raises(SpecSyntaxError):
        parse_group_spec("Z^2 | gens=(1,0)")   # not symmetric, no sym flag
    with pytest.raises(SpecSyntaxError):
        parse_group_spec("Z^2 | gens=(0,0),sym")  # identity generator
    with pytest.raises(SpecSyntaxError):
        parse_element(Z2.term, "(1,2,3)")


def test_spec_rejects_asymmetric_gens():
    with pytest.raises(ValueError):
        GroupSpec(FreeAbelian(1), ((1,),))


def test_check_generates():
    assert check_generates(S2)
    sub = GroupSpec(FreeAbelian(2), ((2, 0), (-2, 0), (0, 1), (0, -1)))
    assert not check_generates(sub)  # generates an index-2 sublattice only


def test_format_parse_inverse_property(rng):
    for spec in (Z2, F2, C2C3, parse_group_spec("Z^2 x C3")):
        term = spec.term
        r = random.Random(5)
        for _ in range(50):
            el = _random_element(term, list(spec.gens), r)
            assert parse_element(term, format_element(term, el)) == el


def test_ball_distances_match_word_length():
    ball = cayley_ball(S2, 5)
    dist = bfs_distances(ball.graph, 0)
    assert all(dist[v] == ball.word_length[v] for v in range(ball.graph.n))
