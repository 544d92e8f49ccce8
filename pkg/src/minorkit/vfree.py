"""Bound computations for groups with a designated finite-index free
subgroup.

The data is an ambient group G with generators S, images of a free basis
x_1..x_n inside G, and left-coset representatives g_1 = 1, g_2, ..., g_k,
so that every element factors uniquely as g = g_i * f with f in the free
subgroup.  Two quantities are computed on finite probes:

  M        exact: the max over s in S and i of the free-group length of
           f(i, s), where s*g_i = g_j * f(i, s).  Adjacent vertices of
           Cay(G, S) then have free parts at distance at most M.
  D_emp    empirical: the largest number of Cay(G, S) edges crossing the
           bipartition induced by deleting one edge of the free tree,
           maximized over tree edges inside the probe ball.  Counts near
           the probe boundary are undercounts of the infinite quantity.

crossing_audit measures, for a branch decomposition and a tree edge, the
crossing sets R(e), the wholly-one-side counts kA/kB, and the number of
crossing edges; for a verified complete-minor witness the crossing count
is at least R(e) + kA(e)*kB(e).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import groups
from .graphs import Graph
from .minors import BranchDecomposition


@dataclass(frozen=True)
class VirtuallyFreeStructure:
    """Ambient group + designated finite-index free subgroup data."""

    spec: groups.GroupSpec
    free_rank: int
    basis: tuple          # images of the free generators in the ambient group
    reps: tuple           # left-coset representatives; reps[0] is the identity

    def __post_init__(self):
        term = self.spec.term
        if len(self.basis) != self.free_rank:
            raise ValueError("basis size must equal the free rank")
        if not self.reps or self.reps[0] != groups.identity(term):
            raise ValueError("reps[0] must be the identity")
        for el in self.basis + self.reps:
            groups.validate_element(term, el)

    @property
    def k(self) -> int:
        return len(self.reps)


def _letters(n: int) -> list[int]:
    out = []
    for i in range(1, n + 1):
        out.append(i)
        out.append(-i)
    return out


def _phi(vf: VirtuallyFreeStructure, word) -> object:
    term = vf.spec.term
    acc = groups.identity(term)
    for letter in word:
        img = vf.basis[abs(letter) - 1]
        if letter < 0:
            img = groups.inverse(term, img)
        acc = groups.multiply(term, acc, img)
    return acc


def subgroup_table(vf: VirtuallyFreeStructure, max_len: int) -> dict:
    """Map each subgroup element reachable by a reduced word of length at
    most max_len to its (shortest, first-found) word.  Raises if the basis
    images collide, i.e. the subgroup is not free on them at this depth."""
    term = vf.spec.term
    letters = _letters(vf.free_rank)
    images = {}
    for letter in letters:
        img = vf.basis[abs(letter) - 1]
        images[letter] = img if letter > 0 else groups.inverse(term, img)
    table = {groups.identity(term): ()}
    frontier = [(groups.identity(term), ())]
    for _ in range(max_len):
        nxt = []
        for el, word in frontier:
            for letter in letters:
                if word and word[-1] == -letter:
                    continue
                el2 = groups.multiply(term, el, images[letter])
                word2 = word + (letter,)
                if el2 in table:
                    # distinct reduced words never collide in a free subgroup
                    raise ValueError(
                        f"basis images are not free: {table[el2]!r} and {word2!r} collide")
                table[el2] = word2
                nxt.append((el2, word2))
        frontier = nxt
    return table


def factor_element(vf: VirtuallyFreeStructure, g, table) -> tuple[int, tuple] | None:
    """Factor g = reps[i] * f, returning (i, word for f); None when f is
    outside the table.  Raises if more than one representative matches
    (left cosets would not partition)."""
    term = vf.spec.term
    hits = []
    for i, rep in enumerate(vf.reps):
        f = groups.multiply(term, groups.inverse(term, rep), g)
        w = table.get(f)
        if w is not None:
            hits.append((i, w))
    if len(hits) > 1:
        raise ValueError(f"factorization not unique for {g!r}: reps {[h[0] for h in hits]}")
    return hits[0] if hits else None


def step_bound(vf: VirtuallyFreeStructure, max_len: int = 64) -> int:
    """The exact bound M = max over s in S, i of |f(i, s)| where
    s * g_i = g_j * f(i, s)."""
    term = vf.spec.term
    length = 2
    while True:
        table = subgroup_table(vf, length)
        best = 0
        ok = True
        for s in vf.spec.gens:
            for rep in vf.reps:
                res = factor_element(vf, groups.multiply(term, s, rep), table)
                if res is None:
                    ok = False
                    break
                best = max(best, len(res[1]))
            if not ok:
                break
        if ok:
            return best
        length *= 2
        if length > max_len:
            raise ValueError("could not factor generator translates; "
                             "are the reps really coset representatives?")


@dataclass
class CosetBall:
    """Cay(G, S) restricted to {g_i * phi(w) : |w| <= probe_radius},
    together with the free-tree combinatorics of the words."""

    vf: VirtuallyFreeStructure
    probe_radius: int
    graph: Graph
    vertex_info: list            # vertex id -> (rep index, word)
    words: list                  # all reduced words, BFS order
    tree_edges: list             # (shorter word, longer word) pairs

    def side_of(self, child, word) -> int:
        """1 when `word` lies in the subtree behind `child` (its suffix),
        else 0."""
        lc = len(child)
        return 1 if len(word) >= lc and word[len(word) - lc:] == child else 0


def coset_ball(vf: VirtuallyFreeStructure, probe_radius: int) -> CosetBall:
    term = vf.spec.term
    table = subgroup_table(vf, probe_radius)
    words = sorted(table.values(), key=lambda w: (len(w), w))
    word_set = set(words)
    tree_edges = []
    for w in words:
        for letter in _letters(vf.free_rank):
            if w and w[0] == -letter:
                continue  # prepending would cancel; that edge is listed from the short side
            w2 = (letter,) + w
            if w2 in word_set:
                tree_edges.append((w, w2))

    sub_elements = {w: _phi(vf, w) for w in words}
    vertex_info = []
    index = {}
    for w in words:
        f = sub_elements[w]
        for i, rep in enumerate(vf.reps):
            g = groups.multiply(term, rep, f)
            if g in index:
                other = vertex_info[index[g]]
                raise ValueError(
                    f"factorization not unique: ({i}, {w!r}) and {other!r} give {g!r}")
            index[g] = len(vertex_info)
            vertex_info.append((i, w))
    edges = set()
    elements = list(index.keys())
    for v, g in enumerate(elements):
        for s in vf.spec.gens:
            h = groups.multiply(term, s, g)
            j = index.get(h)
            if j is not None and v < j:
                edges.add((v, j))
    graph = Graph(len(vertex_info), sorted(edges))
    return CosetBall(vf, probe_radius, graph, vertex_info, words, tree_edges)


def crossing_edge_count(cball: CosetBall, e) -> int:
    child = _tree_edge_child(cball, e)
    side = [cball.side_of(child, w) for _, w in cball.vertex_info]
    return sum(1 for u, v in cball.graph.edges() if side[u] != side[v])


def _tree_edge_child(cball: CosetBall, e):
    wa, wb = e
    if (wa, wb) in cball.tree_edge_set:
        return wb
    if (wb, wa) in cball.tree_edge_set:
        return wa
    raise ValueError(f"{e!r} is not an edge of the probed free tree")


# attach a lazily built set for membership tests
def _tree_edge_set(self):
    if not hasattr(self, "_edge_set"):
        self._edge_set = set(self.tree_edges)
    return self._edge_set


CosetBall.tree_edge_set = property(_tree_edge_set)


@dataclass
class VfBoundReport:
    M: int
    D_emp: int
    m_threshold: int
    k: int
    free_rank: int
    probe_radius: int

    def to_json_obj(self):
        return {"M": self.M, "D_emp": self.D_emp, "m_threshold": self.m_threshold,
                "k": self.k, "free_rank": self.free_rank,
                "probe_radius": self.probe_radius}


def virtually_free_bound(vf: VirtuallyFreeStructure, probe_radius: int) -> VfBoundReport:
    """M exactly by the max formula, D empirically over the probe ball,
    and the witness threshold max{6nD, 3k} + 1."""
    M = step_bound(vf)
    cball = coset_ball(vf, probe_radius)
    D = 0
    for e in cball.tree_edges:
        D = max(D, crossing_edge_count(cball, e))
    thr = max(6 * vf.free_rank * D, 3 * vf.k) + 1
    return VfBoundReport(M, D, thr, vf.k, vf.free_rank, probe_radius)


@dataclass
class CrossingAudit:
    R_e: int
    k_A: int
    k_B: int
    crossing_edges: int

    def to_json_obj(self):
        return {"R_e": self.R_e, "k_A": self.k_A, "k_B": self.k_B,
                "crossing_edges": self.crossing_edges}


def crossing_audit(cball: CosetBall, e, bd: BranchDecomposition) -> CrossingAudit:
    """Classify branch sets against the bipartition of one tree edge and
    count the crossing edges of the ambient graph."""
    child = _tree_edge_child(cball, e)
    side = [cball.side_of(child, w) for _, w in cball.vertex_info]
    r = ka = kb = 0
    for s in bd.branch_sets:
        sides = {side[v] for v in s}
        if sides == {0, 1}:
            r += 1
        elif sides == {0}:
            ka += 1
        else:
            kb += 1
    crossing = sum(1 for u, v in cball.graph.edges() if side[u] != side[v])
    return CrossingAudit(r, ka, kb, crossing)


# -- built-in structures -------------------------------------------------------

def integers_structure() -> VirtuallyFreeStructure:
    """G = Z with gens {+-1}; the free subgroup is G itself (k = 1)."""
    spec = groups.parse_group_spec("Z")
    return VirtuallyFreeStructure(spec, 1, ((1,),), ((0,),))


def infinite_dihedral_structure(enlarged: bool = False) -> VirtuallyFreeStructure:
    """G = C2 * C2 with involutions a, b; free subgroup <ab> of index 2,
    representatives {1, a}.  With enlarged=True the generating set is
    closed under products of length <= 3 (needed to host K4 witnesses)."""
    spec = groups.parse_group_spec("C2 * C2")
    if enlarged:
        spec = groups.enlarged_generating_set(spec)
    term = spec.term
    a = ((0, 1),)
    b = ((1, 1),)
    ab = groups.multiply(term, a, b)
    return VirtuallyFreeStructure(spec, 1, (ab,), (groups.identity(term), a))
