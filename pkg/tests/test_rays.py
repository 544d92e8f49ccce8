import pytest

from minorkit import groups
from minorkit.errors import RadiusTooSmall
from minorkit.graphs import star_graph
from minorkit.minors import verify_minor
from minorkit.rays import (MengerObstruction, RayMinorBuilder, build_minor_from_rays,
                           menger_rays, rays_from_file, remove_intersection,
                           required_radius, standard_rays)

Z2 = groups.parse_group_spec("Z^2")


def _enlarged_ball(radius):
    return groups.cayley_ball(groups.enlarged_generating_set(Z2), radius)


def test_standard_rays_verticals():
    ball = _enlarged_ball(10)
    rays = standard_rays(Z2, 2, ball)
    assert [ball.elements[r[0]] for r in rays] == [(1, 1), (2, 1)]
    for i, ray in enumerate(rays, start=1):
        for k, v in enumerate(ray, start=1):
            assert ball.elements[v] == (i, k)
    assert not (set(rays[0]) & set(rays[1]))


def test_standard_rays_need_room():
    ball = _enlarged_ball(1)
    with pytest.raises(RadiusTooSmall):
        standard_rays(Z2, 3, ball)


def test_standard_rays_need_vertical_generator():
    spec = groups.GroupSpec(groups.FreeAbelian(2), ((1, 0), (-1, 0)))
    with pytest.raises(ValueError):
        standard_rays(spec, 1, _enlarged_ball(3))


def test_menger_rays_plane():
    ball = groups.cayley_ball(Z2, 20)
    rays = menger_rays(ball.graph, 4, 2)
    assert len(rays) == 4
    seen = set()
    for r in rays:
        assert ball.word_length[r[0]] == 2
        assert ball.word_length[r[-1]] == 20
        assert not (set(r) & seen)
        seen |= set(r)


def test_menger_rays_single():
    ball = groups.cayley_ball(Z2, 6)
    rays = menger_rays(ball.graph, 1, 0)
    assert len(rays) == 1 and len(rays[0]) == 7   # a geodesic to the boundary


def test_menger_rays_star_obstruction():
    with pytest.raises(MengerObstruction) as err:
        menger_rays(star_graph(5), 2, 0)
    assert err.value.separator == [0]


# -- crossing removal -----------------------------------------------------------

def _column(ball, x, height):
    return [ball.index[(x, y)] for y in range(1, height + 1)]


def test_remove_intersection_single():
    ball = _enlarged_ball(8)
    col = _column(ball, 3, 9)
    path = [ball.index[p] for p in [(1, 2), (3, 2), (5, 2)]]
    rep = remove_intersection(ball.graph, path, col, 0)
    assert rep.case.startswith("single")
    assert rep.path == path
    assert ball.index[(3, 2)] not in rep.seq
    assert len(rep.seq) == len(col) - 1


def test_remove_intersection_adjacent():
    ball = _enlarged_ball(8)
    col = _column(ball, 3, 9)
    path = [ball.index[p] for p in [(1, 2), (3, 2), (3, 3), (5, 3)]]
    rep = remove_intersection(ball.graph, path, col, 0)
    assert rep.case.startswith("adjacent")
    assert len(rep.seq) == len(col) - 2
    assert not set(rep.path) & set(rep.seq)


def test_remove_intersection_detour():
    ball = _enlarged_ball(8)
    col = _column(ball, 3, 9)
    path = [ball.index[p] for p in [(1, 2), (3, 2), (3, 5), (5, 5)]]
    rep = remove_intersection(ball.graph, path, col, 0)
    assert rep.case.startswith("detour")
    assert not set(rep.path) & set(rep.seq)
    # endpoints of the path survive
    assert rep.path[0] == path[0] and rep.path[-1] == path[-1]
    # the rebuilt set still reaches past the window
    elements = [ball.elements[v] for v in rep.seq]
    assert (3, 1) in elements and (3, 9) in elements


def test_remove_intersection_does_not_touch_other_sets():
    ball = _enlarged_ball(8)
    col3 = _column(ball, 3, 9)
    col5 = _column(ball, 5, 9)
    path = [ball.index[p] for p in [(1, 3), (3, 3), (3, 6), (5, 6), (7, 6)]]
    rep = remove_intersection(ball.graph, path, col3, 0)
    assert not set(rep.path) & set(rep.seq)
    # second crossing still present, then removed in a second round
    assert set(rep.path) & set(col5)
    rep2 = remove_intersection(ball.graph, rep.path, col5, 0)
    assert not set(rep2.path) & set(rep2.seq)
    assert not set(rep2.path) & set(rep.seq)


def test_remove_intersection_requires_hit():
    ball = _enlarged_ball(6)
    col = _column(ball, 3, 5)
    with pytest.raises(ValueError):
        remove_intersection(ball.graph, [ball.index[(1, 1)]], col, 0)


# -- the pairwise builder ----------------------------------------------------------

def test_connect_pair_direct():
    ball = _enlarged_ball(8)
    builder = RayMinorBuilder(ball, standard_rays(Z2, 2, ball))
    conn = builder.connect_pair(0, 1)
    assert conn.path[0] in set(builder.seqs[0]) or conn.path[0] in builder.extras[0]
    assert len(builder.connections) == 1
    assert builder.r_exclusion >= 1


def test_connect_pair_rejects_self_and_repeat():
    ball = _enlarged_ball(8)
    builder = RayMinorBuilder(ball, standard_rays(Z2, 2, ball))
    with pytest.raises(ValueError):
        builder.connect_pair(0, 0)
    builder.connect_pair(0, 1)
    with pytest.raises(ValueError):
        builder.connect_pair(0, 1)


def test_exclusion_radius_strictly_grows():
    ball = _enlarged_ball(14)
    builder = RayMinorBuilder(ball, standard_rays(Z2, 3, ball))
    radii = []
    for i in range(3):
        for j in range(i + 1, 3):
            builder.connect_pair(i, j)
            radii.append(builder.r_exclusion)
    assert radii == sorted(radii) and len(set(radii)) == len(radii)
    # every earlier connection lies inside the final exclusion ball
    for conn in builder.connections:
        assert all(ball.word_length[v] <= builder.r_exclusion for v in conn.path)


def test_state_invariants_after_each_connection():
    ball = _enlarged_ball(14)
    builder = RayMinorBuilder(ball, standard_rays(Z2, 3, ball))
    pairs = [(0, 1), (0, 2), (1, 2)]
    for i, j in pairs:
        builder.connect_pair(i, j)
        sets = [set(builder.seqs[k]) | set(builder.extras[k]) for k in range(3)]
        for a in range(3):
            for b in range(a + 1, 3):
                assert not sets[a] & sets[b]
        for conn in builder.connections:
            interior = set(conn.path[1:-1])
            for k in range(3):
                if k == conn.i:
                    continue
                assert not interior & set(builder.seqs[k])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_build_end_to_end(m):
    result = build_minor_from_rays(Z2, m, required_radius(m) + 2)
    assert len(result.connections) == m * (m - 1) // 2
    bd = result.decomposition
    assert verify_minor(bd.host, bd).passed
    assert bd.pattern.n == m


def test_build_exercises_repairs():
    result = build_minor_from_rays(Z2, 5, required_radius(5) + 2)
    assert any(c.repairs for c in result.connections)
    bd = result.decomposition
    assert verify_minor(bd.host, bd).passed


def test_build_radius_gate():
    with pytest.raises(RadiusTooSmall) as err:
        build_minor_from_rays(Z2, 2, 3)
    assert err.value.suggested == required_radius(2)


def test_build_unsupported_family():
    with pytest.raises(ValueError):
        build_minor_from_rays(groups.parse_group_spec("F2"), 2, 10)


def test_build_menger_source():
    result = build_minor_from_rays(Z2, 2, required_radius(2) + 2, ray_source="menger")
    assert verify_minor(result.decomposition.host, result.decomposition).passed


def test_rays_from_file():
    ball = _enlarged_ball(6)
    text = "(1,1),(1,2),(1,3)\n(2,1),(2,2)\n"
    rays = rays_from_file(Z2, text, ball)
    assert [[ball.elements[v] for v in r] for r in rays] == [
        [(1, 1), (1, 2), (1, 3)], [(2, 1), (2, 2)]]
    with pytest.raises(RadiusTooSmall):
        rays_from_file(Z2, "(40,40)\n", ball)


def test_build_from_ray_file():
    text = "\n".join(
        ",".join(f"({x},{y})" for y in range(1, 30)) for x in (1, 2))
    result = build_minor_from_rays(Z2, 2, required_radius(2) + 2, ray_text=text)
    assert verify_minor(result.decomposition.host, result.decomposition).passed
