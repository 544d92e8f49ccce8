"""Complete-minor witnesses from disjoint rays over an enlarged
generating set.

Starting from m disjoint rays in Cay(G, S0), the builder connects every
pair of rays by a path and repairs any crossing of a third ray, working
in Cay(G, S) for S = S0 u S0S0 u S0S0S0.  Because consecutive ray
vertices differ by one S0 generator, any hop of one, two, or three ray
positions is a single S-edge; that is what makes the three repair cases
work:

  single hit        drop the hit vertex, bridge the gap with a 2-hop
  two adjacent hits drop both, bridge with a 3-hop
  spread hits       reroute the path inside the ray (detour L1) and
                    rebuild the ray on positions disjoint from it (L2)

Each established connection is protected by growing an exclusion ball
around the identity; later paths are routed outside it, so earlier work
is never touched again.  Everything is deterministic: BFS with sorted
adjacency, pairs in lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import groups
from .errors import RadiusTooSmall
from .graphs import Graph, shortest_path, vertex_disjoint_paths
from .minors import BranchDecomposition, complete_graph, verify_minor

Ray = list  # vertex ids, origin first


@dataclass
class Connection:
    i: int
    j: int
    path: list
    repairs: list = field(default_factory=list)   # case labels, e.g. "single@k=2"


@dataclass
class RayBuildResult:
    decomposition: BranchDecomposition
    connections: list
    exclusion_radius: int
    log: dict


class MengerObstruction(ValueError):
    """Fewer disjoint paths than requested; carries the separator."""

    def __init__(self, message, separator):
        super().__init__(message)
        self.separator = separator


def required_radius(m: int) -> int:
    """Working-ball radius demanded before a build is attempted; the
    exclusion ball grows once per pair, so the need scales like m^2."""
    return m * m + 2


def standard_rays(spec: groups.GroupSpec, m: int, ball: groups.CayleyBall) -> list[Ray]:
    """Built-in ray family: vertical columns x = 1..m of the plane,
    starting at height 1, truncated to the working ball."""
    if not (isinstance(spec.term, groups.FreeAbelian) and spec.term.rank == 2):
        raise ValueError("built-in rays exist only for the rank-2 free abelian family")
    for step in ((0, 1), (0, -1)):
        if step not in spec.gens:
            raise ValueError("built-in vertical rays need (0,±1) among the generators")
    rays = []
    for i in range(1, m + 1):
        ray = []
        y = 1
        while ((i, y)) in ball.index:
            ray.append(ball.index[(i, y)])
            y += 1
        if len(ray) < 2:
            raise RadiusTooSmall(
                f"ball leaves no room for ray {i} of {m}",
                suggested=required_radius(m))
        rays.append(ray)
    return rays


def menger_rays(host: Graph, m: int, r_core: int, root: int = 0) -> list[Ray]:
    """Generic finite surrogate for m disjoint rays: vertex-disjoint paths
    from the radius-r_core sphere to the outermost sphere, recomputed at
    increasing target length until the boundary is reached.  The returned
    family is the last (longest) one; a path family that drops below m at
    some length raises with the separating set."""
    from .graphs import bfs_distances

    dist = bfs_distances(host, root)
    ecc = max(dist.values())
    sphere = [v for v, d in sorted(dist.items()) if d == r_core]
    if not sphere:
        raise ValueError("core sphere is empty")
    if ecc <= r_core:
        raise RadiusTooSmall("no vertices beyond the core sphere", suggested=r_core + m)
    best = None
    for L in range(r_core + 1, ecc + 1):
        targets = [v for v, d in sorted(dist.items()) if d == L]
        res = vertex_disjoint_paths(host, sphere, targets, m, endpoint_capacity=True)
        if res.count < m:
            raise MengerObstruction(
                f"only {res.count} disjoint paths reach length {L}", res.separator)
        best = res.paths
    return [list(p) for p in best]


def rays_from_file(spec: groups.GroupSpec, text: str, ball: groups.CayleyBall) -> list[Ray]:
    """One ray per line, comma-separated normal-form words; rays are
    truncated at the first vertex falling outside the working ball."""
    rays = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        els = [groups.parse_element(spec.term, tok)
               for tok in _split_ray_line(line)]
        ray = []
        for el in els:
            v = ball.index.get(el)
            if v is None:
                break
            ray.append(v)
        if len(ray) < 2:
            raise RadiusTooSmall("ray file leaves fewer than two vertices in the ball",
                                 suggested=ball.radius * 2)
        rays.append(ray)
    return rays


def _split_ray_line(line: str):
    toks, depth, cur = [], 0, []
    for ch in line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            toks.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    toks.append("".join(cur))
    return [t for t in (t.strip() for t in toks) if t]


# -- the crossing-removal procedure -------------------------------------------


@dataclass
class Repair:
    path: list
    seq: list
    case: str
    touched: list


def _l1_indices(a: int, b: int) -> list[int]:
    """Monotone index walk a -> b with steps of 2 and one final step of
    at most 3; stays within [min(a,b), max(a,b)]."""
    if a == b:
        return [a]
    step = 2 if b > a else -2
    out = [a]
    cur = a
    while abs(b - cur) > 3:
        cur += step
        out.append(cur)
    out.append(b)
    return out


def _l2_indices(s: int, t: int, blocked: set[int]) -> list[int]:
    """Greedy index walk from s-1 to t+1 with gaps of at most 3 avoiding
    `blocked`; exists because blocked never holds 3 consecutive indices."""
    out = []
    cur = s - 1
    while cur != t + 1:
        nxt = None
        for j in (cur + 1, cur + 2, cur + 3):
            if j == t + 1 or (j <= t and j not in blocked):
                nxt = j
                break
        if nxt is None:
            raise AssertionError("detour walk blocked; three consecutive indices in L1")
        out.append(nxt)
        cur = nxt
    return out[:-1]  # t+1 itself belongs to the surviving tail


def remove_intersection(graph: Graph, path: list, seq: list,
                        pristine_from: int = 0) -> Repair:
    """Remove the crossings of `path` through the ordered set `seq`.

    seq positions at index >= pristine_from must be consecutive ray
    vertices (one S0 step apart); all hits must lie there.  Returns the
    rerouted path and rebuilt set, mutually disjoint, with every new
    consecutive pair adjacent in `graph`.
    """
    pos = {v: idx for idx, v in enumerate(seq)}
    hit_positions = [p for p, v in enumerate(path) if v in pos]
    if not hit_positions:
        raise ValueError("path does not intersect the set")
    hit_idx = sorted(pos[path[p]] for p in hit_positions)
    s, t = hit_idx[0], hit_idx[-1]
    if s < pristine_from:
        raise AssertionError("crossing reaches into protected ray material")

    touched = [seq[i] for i in range(s, min(t + 2, len(seq)))]
    if s == t:
        new_seq = seq[:s] + seq[s + 1:]
        case = f"single@{s}"
        new_path = list(path)
    elif t == s + 1:
        new_seq = seq[:s] + seq[t + 1:]
        case = f"adjacent@{s}"
        new_path = list(path)
    else:
        p_first = min(hit_positions)
        p_last = max(hit_positions)
        a_idx, b_idx = pos[path[p_first]], pos[path[p_last]]
        l1 = _l1_indices(a_idx, b_idx)
        new_path = path[:p_first] + [seq[i] for i in l1] + path[p_last + 1:]
        if s == 0:
            keep = list(range(t + 1, len(seq)))
        elif t + 1 >= len(seq):
            keep = list(range(0, s))
        else:
            l2 = _l2_indices(s, t, set(l1))
            keep = list(range(0, s)) + l2 + list(range(t + 1, len(seq)))
        new_seq = [seq[i] for i in keep]
        touched += [seq[i] for i in l1]
        case = f"detour@{s}-{t}"

    if not new_seq:
        raise RadiusTooSmall("crossing removal emptied a ray",
                             suggested=None)
    _assert_chain(graph, new_seq)
    _assert_chain(graph, new_path)
    assert not set(new_path) & set(new_seq), "repair left the path on the set"
    return Repair(new_path, new_seq, case, touched)


def _assert_chain(graph: Graph, vertices: list):
    for u, v in zip(vertices, vertices[1:]):
        assert graph.has_edge(u, v), f"chain break between {u} and {v}"


# -- the pairwise connection builder -------------------------------------------


class RayMinorBuilder:
    """Connection state over one working ball: modified ray sets, absorbed
    path material, established connections, and the exclusion radius."""

    def __init__(self, ball: groups.CayleyBall, rays: list[Ray]):
        self.ball = ball
        self.g = ball.graph
        self.wl = ball.word_length
        self.m = len(rays)
        self.seqs = [list(r) for r in rays]
        self.extras: list[list] = [[] for _ in rays]
        self.pristine_from = [0] * self.m
        self.connections: list[Connection] = []
        self.r_exclusion = 0
        seen = set()
        for r in self.seqs:
            if not r:
                raise ValueError("empty ray")
            for v in r:
                if v in seen:
                    raise ValueError("rays are not disjoint")
                seen.add(v)
        _assert_chain(self.g, [v for r in self.seqs for v in r][:0])  # noop, keeps import honest

    def _region(self) -> set[int]:
        region = {v for v in range(self.g.n) if self.wl[v] > self.r_exclusion}
        if not region:
            raise RadiusTooSmall("exclusion ball swallowed the working ball",
                                 suggested=self.ball.radius + self.r_exclusion + 2)
        # use the component of the outermost vertex as the unbounded-side
        # surrogate and insist the whole region is that component
        anchor = max(region, key=lambda v: (self.wl[v], -v))
        comp = {anchor}
        stack = [anchor]
        while stack:
            u = stack.pop()
            for w in self.g.neighbors(u):
                if w in region and w not in comp:
                    comp.add(w)
                    stack.append(w)
        if comp != region:
            raise RadiusTooSmall("outside of the exclusion ball is disconnected",
                                 suggested=self.ball.radius * 2)
        return region

    def _tail(self, k: int, region: set[int]) -> list[int]:
        tail = [v for idx, v in enumerate(self.seqs[k])
                if idx >= self.pristine_from[k] and v in region]
        if not tail:
            raise RadiusTooSmall(
                f"ray {k} has no material beyond the exclusion ball "
                f"(radius {self.r_exclusion})",
                suggested=self.ball.radius + self.r_exclusion + 2)
        return tail

    def connect_pair(self, i: int, j: int) -> Connection:
        if i == j:
            raise ValueError("cannot connect a ray to itself")
        if any(c.i == i and c.j == j for c in self.connections):
            raise ValueError(f"pair {(i, j)} already connected")
        region = self._region()
        path = shortest_path(self.g, self._tail(i, region), self._tail(j, region),
                             allowed=region)
        if path is None:
            raise RadiusTooSmall(f"no route between rays {i} and {j} outside "
                                 f"radius {self.r_exclusion}",
                                 suggested=self.ball.radius * 2)
        conn = Connection(i, j, path)
        touched = list(path)
        while True:
            k = self._first_crossing(path, i, j)
            if k is None:
                break
            rep = remove_intersection(self.g, path, self.seqs[k],
                                      self.pristine_from[k])
            self.seqs[k] = rep.seq
            path = rep.path
            touched += rep.touched
            conn.repairs.append(f"{rep.case}:ray{k}")
        conn.path = path
        # absorb the path interior into ray i; the realizing edge is the
        # path's last step
        self.extras[i].extend(path[1:-1])
        self.connections.append(conn)
        new_r = max(self.wl[v] for v in touched)
        assert new_r > self.r_exclusion
        self.r_exclusion = new_r
        for k in range(self.m):
            cut = 0
            for idx, v in enumerate(self.seqs[k]):
                if self.wl[v] <= self.r_exclusion:
                    cut = idx + 1
            self.pristine_from[k] = max(self.pristine_from[k], cut)
        return conn

    def _first_crossing(self, path: list, i: int, j: int) -> int | None:
        pset = set(path)
        for k in range(self.m):
            if k in (i, j):
                continue
            if pset & set(self.seqs[k]):
                return k
        return None

    def run(self) -> RayBuildResult:
        for i in range(self.m):
            for j in range(i + 1, self.m):
                self.connect_pair(i, j)
        sets = [frozenset(self.seqs[k]) | frozenset(self.extras[k])
                for k in range(self.m)]
        bd = BranchDecomposition(complete_graph(self.m), sets, self.g, self.ball)
        verdict = verify_minor(self.g, bd)
        if not verdict.passed:
            raise AssertionError(f"assembled witness fails verification: "
                                 f"{verdict.to_json_obj()}")
        log = {
            "pairs": len(self.connections),
            "exclusion_radius": self.r_exclusion,
            "path_lengths": [len(c.path) - 1 for c in self.connections],
            "repairs": [c.repairs for c in self.connections],
        }
        return RayBuildResult(bd, self.connections, self.r_exclusion, log)


def build_minor_from_rays(spec: groups.GroupSpec, m: int, ball_radius: int,
                          ray_source: str = "auto",
                          ray_text: str | None = None) -> RayBuildResult:
    """End-to-end: enlarge the generating set, build the working ball,
    lay out m disjoint rays, connect all m(m-1)/2 pairs, and verify the
    resulting complete-minor witness.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if ball_radius < required_radius(m):
        raise RadiusTooSmall(
            f"radius {ball_radius} below the m={m} requirement",
            suggested=required_radius(m))
    enlarged = groups.enlarged_generating_set(spec)
    ball = groups.cayley_ball(enlarged, ball_radius)
    if ray_text is not None:
        rays = rays_from_file(spec, ray_text, ball)
        if len(rays) < m:
            raise ValueError(f"ray file provides {len(rays)} rays, need {m}")
        rays = rays[:m]
    elif ray_source == "auto" and isinstance(spec.term, groups.FreeAbelian) \
            and spec.term.rank == 2:
        rays = standard_rays(spec, m, ball)
    elif ray_source == "menger":
        base_ball = groups.cayley_ball(spec, ball_radius)
        element_rays = [[base_ball.elements[v] for v in r]
                        for r in menger_rays(base_ball.graph, m, min(2, ball_radius - 1))]
        rays = [[ball.vertex_of(el) for el in r] for r in element_rays]
    else:
        raise ValueError("no ray source for this family; supply a ray file")
    builder = RayMinorBuilder(ball, rays)
    return builder.run()
