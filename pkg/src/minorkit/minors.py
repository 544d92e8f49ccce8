"""Branch decompositions, minor verification, explicit constructions,
clique-minor search, and the free-product projection.

A finite pattern graph M is a minor of a host graph when there are
pairwise-disjoint nonempty connected branch sets, one per pattern vertex,
such that every pattern edge is realized by some host edge between the
corresponding branch sets.  Everything here manipulates that witness
object directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import groups
from .graphs import (Graph, bfs_distances, complete_graph, connected_components,
                     internally_disjoint_paths, is_connected, is_connected_subset,
                     multi_source_distances)


def is_complete(pattern: Graph) -> bool:
    return pattern.num_edges == pattern.n * (pattern.n - 1) // 2


def pattern_name(pattern: Graph) -> str | dict:
    if is_complete(pattern):
        return f"K{pattern.n}"
    return {"vertices": pattern.n, "edges": [list(e) for e in pattern.edges()]}


def pattern_from_name(name) -> Graph:
    if isinstance(name, str) and name.startswith("K"):
        return complete_graph(int(name[1:]))
    return Graph(name["vertices"], [tuple(e) for e in name["edges"]])


@dataclass
class BranchDecomposition:
    """A candidate minor witness: pattern + one branch set per pattern vertex."""

    pattern: Graph
    branch_sets: list[frozenset]
    host: Graph
    ball: "groups.CayleyBall | None" = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.branch_sets) != self.pattern.n:
            raise ValueError("need exactly one branch set per pattern vertex")
        self.branch_sets = [frozenset(s) for s in self.branch_sets]
        for s in self.branch_sets:
            for v in s:
                self.host.check_vertex(v)

    def to_json_obj(self) -> dict:
        return {
            "pattern": pattern_name(self.pattern),
            "sets": [sorted(s) for s in self.branch_sets],
            "host_hash": self.host.content_hash(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict, host: Graph) -> "BranchDecomposition":
        if obj.get("host_hash") and obj["host_hash"] != host.content_hash():
            raise ValueError("decomposition host_hash does not match the supplied host")
        return cls(pattern_from_name(obj["pattern"]),
                   [frozenset(s) for s in obj["sets"]], host)


@dataclass
class MinorVerdict:
    """Per-condition result of checking a branch decomposition.

    Witnesses carry the first failure found: an overlapping vertex with
    its two set indices, the index of a disconnected or empty set, or a
    missing pattern edge (i, j).
    """

    disjoint: bool
    disjoint_witness: tuple | None
    connected: bool
    connected_witness: int | None
    edges_realized: bool
    edges_witness: tuple | None

    @property
    def passed(self) -> bool:
        return self.disjoint and self.connected and self.edges_realized

    def to_json_obj(self) -> dict:
        return {
            "pass": self.passed,
            "disjoint": self.disjoint,
            "disjoint_witness": list(self.disjoint_witness) if self.disjoint_witness else None,
            "connected": self.connected,
            "connected_witness": self.connected_witness,
            "edges_realized": self.edges_realized,
            "edges_witness": list(self.edges_witness) if self.edges_witness else None,
        }


def verify_minor(host: Graph, bd: BranchDecomposition) -> MinorVerdict:
    """Check disjointness, connectivity, and pattern-edge realization."""
    owner = {}
    disjoint, d_wit = True, None
    for i, s in enumerate(bd.branch_sets):
        for v in s:
            if v in owner:
                disjoint, d_wit = False, (owner[v], i, v)
                break
            owner[v] = i
        if not disjoint:
            break

    connected, c_wit = True, None
    for i, s in enumerate(bd.branch_sets):
        if not is_connected_subset(host, s):
            connected, c_wit = False, i
            break

    edges_ok, e_wit = True, None
    if disjoint:
        for i, j in bd.pattern.edges():
            a, b = bd.branch_sets[i], bd.branch_sets[j]
            small, other = (a, b) if len(a) <= len(b) else (b, a)
            if not any(w in other for v in small for w in host.neighbors(v)):
                edges_ok, e_wit = False, (i, j)
                break
    else:
        # realized edges are ill-defined once sets overlap
        edges_ok, e_wit = False, None

    return MinorVerdict(disjoint, d_wit, connected, c_wit, edges_ok, e_wit)


# -- explicit constructions ---------------------------------------------------

Z2_S2 = "Z^2 | gens=(1,0),(2,0),(0,1),sym"


def z2_s2_spec() -> groups.GroupSpec:
    return groups.parse_group_spec(Z2_S2)


def construct_z2_s2_minor(m: int) -> BranchDecomposition:
    """The explicit complete-minor witness in the plane grid with the
    doubled horizontal generator.

    Branch set 1 is the even row {(2,1),(4,1),...,(2m,1)}; branch set k>=2
    is the odd column {(2k-1, 1..k)} joined to the even row
    {(2k,k),(2k+2,k),...,(2m,k)}.  Lives in the radius-(3m+2) ball.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    spec = z2_s2_spec()
    ball = groups.cayley_ball(spec, 3 * m + 2)
    sets = []
    for k in range(1, m + 1):
        if k == 1:
            pts = [(2 * l, 1) for l in range(1, m + 1)]
        else:
            pts = [(2 * k - 1, j) for j in range(1, k + 1)]
            pts += [(2 * l, k) for l in range(k, m + 1)]
        sets.append(frozenset(ball.vertex_of(p) for p in pts))
    return BranchDecomposition(complete_graph(m), sets, ball.graph, ball)


def construct_z2xc_minor(m: int, spec: groups.GroupSpec, s1, s2, s3,
                         probe: int | None = None) -> BranchDecomposition:
    """Complete-minor witness in an abelian group from three generators
    with <s1,s2> a rank-2 lattice and s3 outside it.

    Branch set 1 is {s1, 2*s1, ..., m*s1}; branch set k>=2 stacks the
    s3-shifted column {k*s1 + j*s2 + s3 : 0<=j<k} onto the row
    {l*s1 + (k-1)*s2 : k<=l<=m}.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    term = spec.term
    for s in (s1, s2, s3):
        if s not in spec.gens:
            raise ValueError(f"{s!r} is not a generator of the spec")
    p = probe if probe is not None else m + 2
    lattice = {}
    for i in range(-p, p + 1):
        for j in range(-p, p + 1):
            el = groups.multiply(term, groups.power(term, s1, i), groups.power(term, s2, j))
            if el in lattice and lattice[el] != (i, j):
                raise ValueError("<s1,s2> is not free abelian of rank 2 on the probe box")
            lattice[el] = (i, j)
    if s3 in lattice:
        raise ValueError("s3 lies in <s1,s2> on the probe box")

    ball = groups.cayley_ball(spec, 2 * m + 1)
    sets = []
    for k in range(1, m + 1):
        if k == 1:
            pts = [groups.power(term, s1, l) for l in range(1, m + 1)]
        else:
            base = groups.power(term, s1, k)
            pts = []
            for j in range(k):
                el = groups.multiply(term, base, groups.power(term, s2, j))
                pts.append(groups.multiply(term, el, s3))
            row = groups.power(term, s2, k - 1)
            for l in range(k, m + 1):
                pts.append(groups.multiply(term, groups.power(term, s1, l), row))
        sets.append(frozenset(ball.vertex_of(el) for el in pts))
    return BranchDecomposition(complete_graph(m), sets, ball.graph, ball)


# -- exact oracle for small hosts --------------------------------------------

ORACLE_MAX_VERTICES = 12


def brute_force_minor_oracle(host: Graph, pattern: Graph) -> bool:
    """Exact minor containment by exhausting assignments of disjoint
    connected vertex subsets to pattern vertices.  Host capped at
    ORACLE_MAX_VERTICES so the subset enumeration stays small.
    """
    n = host.n
    if n > ORACLE_MAX_VERTICES:
        raise ValueError(f"oracle host capped at {ORACLE_MAX_VERTICES} vertices")
    if pattern.n == 0:
        return True
    if pattern.n > n:
        return False

    nbr = [0] * n
    for v in range(n):
        for w in host.neighbors(v):
            nbr[v] |= 1 << w

    connected_masks = []
    reach_of = {}
    for mask in range(1, 1 << n):
        low = mask & -mask
        seen = low
        frontier = low
        while frontier:
            grow = 0
            m2 = frontier
            while m2:
                b = m2 & -m2
                grow |= nbr[b.bit_length() - 1]
                m2 ^= b
            new = grow & mask & ~seen
            seen |= new
            frontier = new
        if seen == mask:
            connected_masks.append(mask)
            nb = 0
            m2 = mask
            while m2:
                b = m2 & -m2
                nb |= nbr[b.bit_length() - 1]
                m2 ^= b
            reach_of[mask] = nb

    order = sorted(range(pattern.n), key=lambda v: -pattern.degree(v))
    pos = {v: i for i, v in enumerate(order)}
    earlier_nbrs = [[pos[w] for w in pattern.neighbors(order[i]) if pos[w] < i]
                    for i in range(pattern.n)]

    chosen = [0] * pattern.n

    def place(i: int, used: int) -> bool:
        if i == pattern.n:
            return True
        for mask in connected_masks:
            if mask & used:
                continue
            ok = True
            for j in earlier_nbrs[i]:
                if not (reach_of[mask] & chosen[j]):
                    ok = False
                    break
            if not ok:
                continue
            chosen[i] = mask
            if place(i + 1, used | mask):
                return True
        return False

    return place(0, 0)


# -- goal-directed complete search for K_m minors ------------------------------

@dataclass
class SearchOutcome:
    """Result of find_clique_minor.

    decomposition is None when no witness was found; `exhausted` is True
    when the search space was fully explored within budget (still not a
    certificate of exclusion for balls of infinite graphs), False when the
    expansion budget ran out first.
    """

    decomposition: BranchDecomposition | None
    expansions: int
    exhausted: bool

    @property
    def found(self) -> bool:
        return self.decomposition is not None


class _Budget(Exception):
    pass


def find_clique_minor(host: Graph, m: int, budget: int = 100_000,
                      seed: int = 0) -> SearchOutcome:
    """Search for a K_m branch decomposition in `host`.

    Backtracking over partial assignments: seed sets one at a time on
    well-separated vertices, then repeatedly grow a set adjacent to the
    first unlinked pair toward its partner.  Every consistent extension is
    enumerated (with a visited-state table), so on small hosts the search
    is exhaustive; `budget` caps recursion expansions.  Fully
    deterministic; `seed` is recorded by callers but does not perturb the
    order.
    """
    del seed
    if m < 1:
        raise ValueError("m must be at least 1")
    n = host.n
    if n == 0 or m > n:
        return SearchOutcome(None, 0, True)
    if m >= 3 and host.num_edges == n - len(connected_components(host)):
        # forests have only forest minors; no amount of budget helps
        return SearchOutcome(None, 0, True)

    state = {"expansions": 0}
    visited = set()
    sets: list[set] = [set() for _ in range(m)]
    assigned: dict[int, int] = {}
    linked = [[False] * m for _ in range(m)]

    def links_ok():
        return all(linked[i][j] for i in range(m) for j in range(i + 1, m))

    def refresh_links(v, i):
        for w in host.neighbors(v):
            j = assigned.get(w)
            if j is not None and j != i:
                linked[i][j] = linked[j][i] = True

    def snapshot():
        return frozenset(assigned.items())

    def search() -> bool:
        state["expansions"] += 1
        if state["expansions"] > budget:
            raise _Budget
        key = snapshot()
        if key in visited:
            return False
        visited.add(key)

        empty = next((i for i in range(m) if not sets[i]), None)
        if empty is not None:
            seeds = [v for v in range(n) if v not in assigned]
            if assigned:
                dist = multi_source_distances(host, assigned.keys())
                seeds.sort(key=lambda v: (-dist.get(v, n + 1), v))
            for v in seeds:
                old = [row[:] for row in linked]
                sets[empty].add(v)
                assigned[v] = empty
                refresh_links(v, empty)
                if search():
                    return True
                linked[:] = old
                del assigned[v]
                sets[empty].remove(v)
            return False

        pair = None
        for i in range(m):
            for j in range(i + 1, m):
                if not linked[i][j]:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            return True

        i, j = pair
        moves = []
        for side, target in ((i, j), (j, i)):
            dist = multi_source_distances(host, sets[target])
            for v in sets[side]:
                for w in host.neighbors(v):
                    if w not in assigned:
                        moves.append((dist.get(w, n + 1), w, side))
        moves = sorted(set(moves))
        for _, w, side in moves:
            old = [row[:] for row in linked]
            sets[side].add(w)
            assigned[w] = side
            refresh_links(w, side)
            if search():
                return True
            linked[:] = old
            del assigned[w]
            sets[side].remove(w)
        return False

    try:
        found = search()
    except _Budget:
        return SearchOutcome(None, state["expansions"], False)

    if not found:
        return SearchOutcome(None, state["expansions"], True)
    bd = BranchDecomposition(complete_graph(m), [frozenset(s) for s in sets], host)
    verdict = verify_minor(host, bd)
    assert verdict.passed, "search returned an unverified witness"
    return SearchOutcome(bd, state["expansions"], False)


# -- pattern cut vertices ------------------------------------------------------

def has_cut_vertex(pattern: Graph) -> bool:
    """True iff deleting some vertex disconnects the pattern."""
    if not is_connected(pattern):
        raise ValueError("pattern must be connected")
    if pattern.n <= 2:
        return False
    for v in range(pattern.n):
        rest = [w for w in range(pattern.n) if w != v]
        sub, _ = pattern.subgraph(rest)
        if not is_connected(sub):
            return True
    return False


# -- projection of a free-product minor into a factor --------------------------

def _coset_key(word, side):
    """Representative tail of the coset (side-factor) * tail containing
    `word`: strip the leading letter when it lies in that factor."""
    if word and word[0][0] == side:
        return word[1:]
    return word


def factor_subspec(spec: groups.GroupSpec, side: int) -> groups.GroupSpec:
    """Generating set of one free-product factor, recovered from the
    single-letter generators of the product spec."""
    term = spec.term
    if not isinstance(term, groups.FreeProduct):
        raise ValueError("spec is not a free product")
    sub = term.left if side == 0 else term.right
    gens = tuple(w[0][1] for w in spec.gens if len(w) == 1 and w[0][0] == side)
    if not gens:
        raise ValueError("product spec carries no generators for that factor")
    return groups.GroupSpec(sub, gens)


def project_free_product_minor(spec: groups.GroupSpec, host_ball: groups.CayleyBall,
                               bd: BranchDecomposition, debug: bool = False,
                               factor_radius: int | None = None) -> BranchDecomposition:
    """Project a verified minor witness of a free product into one factor.

    Identifies the factor coset shared by the branch sets via normal-form
    tails (every element of G*H lies in cosets G*w and H*w' where w, w'
    drop a leading letter of the respective factor), right-translates by
    the tail inverse, and intersects each branch set with the factor.  The
    result is re-verified on a factor ball; an empty intersection or a
    failed verdict raises, since for cut-vertex-free patterns the
    translated intersections must again witness the minor.
    """
    term = spec.term
    if not isinstance(term, groups.FreeProduct):
        raise ValueError("spec must be a free product")
    if bd.pattern.n >= 2 and has_cut_vertex(bd.pattern):
        raise ValueError("pattern has a cut-vertex; projection undefined")
    if not verify_minor(host_ball.graph, bd).passed:
        raise ValueError("decomposition must pass verification before projection")

    # score candidate cosets: a correct one is hit by every branch set
    hits: dict = {}
    for i, s in enumerate(bd.branch_sets):
        for v in s:
            w = host_ball.elements[v]
            for side in (0, 1):
                key = (side, _coset_key(w, side))
                entry = hits.setdefault(key, [0, set()])
                entry[0] += 1
                entry[1].add(i)
    m = len(bd.branch_sets)
    candidates = [key for key, (cnt, which) in hits.items() if len(which) == m]
    candidates.sort(key=lambda key: (-hits[key][0], key[0], repr(key[1])))
    if not candidates:
        raise ValueError("no factor coset meets every branch set "
                         "(boundary effect or invalid witness)")

    if debug:
        _menger_coset_check(host_ball, bd, candidates[0])

    last_err = None
    for side, tail in candidates:
        try:
            return _project_onto(spec, host_ball, bd, side, tail, factor_radius)
        except ValueError as exc:
            last_err = exc
    raise ValueError(f"projection failed for every candidate coset: {last_err}")


def _project_onto(spec, host_ball, bd, side, tail, factor_radius):
    term = spec.term
    sub_spec = factor_subspec(spec, side)
    sub_term = sub_spec.term
    shift = groups.inverse(term, tail)

    projected: list[set] = []
    for s in bd.branch_sets:
        keep = set()
        for v in s:
            w = groups.multiply(term, host_ball.elements[v], shift)
            if len(w) == 0:
                keep.add(groups.identity(sub_term))
            elif len(w) == 1 and w[0][0] == side:
                keep.add(w[0][1])
        if not keep:
            raise ValueError("factor intersection empties a branch set")
        projected.append(keep)

    targets = set().union(*projected)
    radius = factor_radius
    if radius is None:
        radius = _radius_containing(sub_spec, targets)
    fball = groups.cayley_ball(sub_spec, radius)
    sets = [frozenset(fball.vertex_of(el) for el in keep) for keep in projected]
    out = BranchDecomposition(bd.pattern, sets, fball.graph, fball)
    verdict = verify_minor(fball.graph, out)
    if not verdict.passed:
        raise ValueError(f"projected decomposition fails verification: {verdict.to_json_obj()}")
    return out


def _radius_containing(spec: groups.GroupSpec, targets, cap_radius: int = 200) -> int:
    """Smallest ball radius containing every target element."""
    term = spec.term
    remaining = set(targets)
    frontier = {groups.identity(term)}
    seen = set(frontier)
    remaining -= seen
    r = 0
    while remaining and r < cap_radius:
        r += 1
        frontier = {groups.multiply(term, s, v) for v in frontier for s in spec.gens} - seen
        seen |= frontier
        remaining -= frontier
    if remaining:
        raise ValueError("targets not reachable within the radius cap; "
                         "is the factor generating set right?")
    return r


def _menger_coset_check(host_ball, bd, coset_key):
    """Cross-check: two branch sets must contain vertices of the chosen
    coset joined by two internally disjoint paths."""
    side, tail = coset_key

    def in_coset(v):
        return _coset_key(host_ball.elements[v], side) == tail

    first = [v for v in bd.branch_sets[0] if in_coset(v)]
    second = [v for v in bd.branch_sets[min(1, len(bd.branch_sets) - 1)] if in_coset(v)]
    if len(bd.branch_sets) < 2:
        return
    for u in first:
        for w in second:
            if u == w:
                continue
            if internally_disjoint_paths(host_ball.graph, u, w, 2).count >= 2:
                return
    raise ValueError("Menger cross-check failed: no doubly-connected pair in the coset")


# -- lifting through a coset collapse ------------------------------------------

def lift_through_collapse(bd: BranchDecomposition, members: list[list[int]],
                          host: Graph) -> BranchDecomposition:
    """Expand a minor witness on a collapsed graph back to the original.

    Lifting rule: each quotient branch set becomes the full union of its
    classes.  Classes are connected and adjacent classes share a host
    edge, so the union is connected; quotient edges are realized by their
    witnessing host edges.
    """
    sets = []
    for s in bd.branch_sets:
        lifted = set()
        for q in s:
            lifted.update(members[q])
        sets.append(frozenset(lifted))
    return BranchDecomposition(bd.pattern, sets, host)
