"""Klein-Plotkin-Rao style annulus cuts, cluster partitions, and covers.

For a scale s, set R = s + 3.  One partition is built per offset tuple
(delta_1, ..., delta_m), each delta_i in {0, R, 2R, 3R}: level k deletes
every residual edge joining a vertex at distance 4Rj + delta_k from its
component root to one at distance 4Rj + delta_k + 1 (distances in the
graph left after levels 1..k-1; roots are the smallest-index vertices of
their components).  The connected pieces left after m levels are the
clusters; the 4^m partitions together yield a cover by the sets U_T of
cluster vertices at distance >= s+1 from the endpoints of each level's
cut, measured in that level's residual metric.

The cover's s-multiplicity is at most 4^m because a ball of radius s can
only meet U_T when its center lies in T; both facts are measured and
checked here rather than assumed.  Cluster diameters are reported
empirically; no theoretical diameter constant is asserted.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, multi_source_distances

OFFSET_SLOTS = (0, 1, 2, 3)   # delta = slot * R
MAX_LEVELS = 6                # 4^6 = 4096 partitions


@dataclass(frozen=True)
class CutParams:
    """Parameters of one cut sequence; delta entries must be multiples of
    R = s + 3 in {0, R, 2R, 3R}."""

    m: int
    s: int
    delta: tuple
    vertex_order: tuple | None = None
    j_from_one: bool = False

    @property
    def R(self) -> int:
        return self.s + 3

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.s < 0:
            raise ValueError("scale must be nonnegative")
        if len(self.delta) != self.m:
            raise ValueError("need one delta per level")
        allowed = {i * self.R for i in OFFSET_SLOTS}
        for d in self.delta:
            if d not in allowed:
                raise ValueError(f"delta {d} not in {sorted(allowed)}")


@dataclass
class CutSequence:
    """The m cut-edge sets of one offset tuple plus the per-level distance
    maps they were carved from (level k distances live in the residual
    graph before F_k is removed)."""

    params: CutParams
    cut_edges: list
    level_dist: list

    def all_cut_edges(self) -> set:
        out = set()
        for f in self.cut_edges:
            out.update(f)
        return out


@dataclass
class Partition:
    """Clusters of one offset tuple, encoded as a per-vertex cluster id
    (ids ordered by each cluster's smallest vertex)."""

    delta: tuple
    cid: np.ndarray
    num_clusters: int

    def clusters(self) -> list[frozenset]:
        out = [[] for _ in range(self.num_clusters)]
        for v, c in enumerate(self.cid):
            out[c].append(v)
        return [frozenset(c) for c in out]


@dataclass
class Cover:
    """All cover elements over all partitions of one scale.

    uflag[p, v] is True when v belongs to the eroded set U_T of its
    cluster T in partition p; an element is the pair (partition, cluster).
    Empty elements are retained and flagged so that element counts match
    the one-cluster-per-partition accounting.
    """

    host: Graph
    s: int
    partitions: list[Partition]
    uflag: np.ndarray
    cuts: list[CutSequence] | None = None

    @property
    def num_elements(self) -> int:
        return sum(p.num_clusters for p in self.partitions)

    def iter_elements(self):
        """Yield (partition idx, cluster id, U members, T members)."""
        for p_idx, part in enumerate(self.partitions):
            order = np.argsort(part.cid, kind="stable")
            cids = part.cid[order]
            starts = np.flatnonzero(np.r_[True, cids[1:] != cids[:-1]])
            bounds = np.r_[starts, len(order)]
            for a, b in zip(bounds[:-1], bounds[1:]):
                members = order[a:b]
                c = int(cids[a])
                u = members[self.uflag[p_idx, members]]
                yield p_idx, c, u, members

    def num_nonempty_elements(self) -> int:
        return sum(1 for _, _, u, _ in self.iter_elements() if len(u))


def _component_data(adj, order_pos):
    """Component ids, roots, and BFS distances from each component's
    smallest-index root, for a mutable adjacency list."""
    n = len(adj)
    comp = np.full(n, -1, dtype=np.int32)
    dist = np.full(n, -1, dtype=np.int32)
    by_pos = sorted(range(n), key=lambda v: order_pos[v])
    c = 0
    for seed in by_pos:
        if comp[seed] >= 0:
            continue
        comp[seed] = c
        dist[seed] = 0
        q = deque([seed])
        while q:
            u = q.popleft()
            du = dist[u]
            for w in adj[u]:
                if comp[w] < 0:
                    comp[w] = c
                    dist[w] = du + 1
                    q.append(w)
        c += 1
    return comp, dist, c


def _bucket_cut_edges(adj, dist, R, j_from_one):
    """Group annulus edges by offset slot: an edge with endpoint depths
    (r, r+1) lands in slot delta/R when r = 4Rj + delta."""
    R4 = 4 * R
    buckets = [[] for _ in OFFSET_SLOTS]
    for u in range(len(adj)):
        du = int(dist[u])
        for w in adj[u]:
            if u >= w:
                continue
            dw = int(dist[w])
            if dw == du + 1:
                r = du
            elif du == dw + 1:
                r = dw
            else:
                continue
            residue = r % R4
            if residue % R != 0:
                continue
            if j_from_one and r < R4:
                continue
            buckets[residue // R].append((u, w))
    return buckets


def _erosion_set(adj, edges, s):
    """Vertices within distance s of any endpoint of `edges`, in the
    (pre-removal) residual metric of `adj`."""
    if not edges:
        return []
    dist = {}
    q = deque()
    for u, w in edges:
        for v in (u, w):
            if v not in dist:
                dist[v] = 0
                q.append(v)
    out = list(dist)
    while q:
        u = q.popleft()
        du = dist[u]
        if du == s:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                out.append(w)
                q.append(w)
    return out


class PartitionForest:
    """All 4^m partitions of a host at one scale, computed with shared
    work across common offset prefixes.

    Level-k cuts depend only on (delta_1..delta_k), so the enumeration is
    a depth-m tree walk with edge removal/restore; distance maps of the
    internal nodes are retained for offset selection.
    """

    def __init__(self, host: Graph, m: int, s: int, order=None,
                 j_from_one: bool = False, max_levels: int = MAX_LEVELS):
        if m < 1:
            raise ValueError("m must be at least 1")
        if m > max_levels:
            raise ValueError(f"m={m} exceeds the partition cap (4^{max_levels})")
        if host.n == 0:
            raise ValueError("host graph is empty")
        self.host = host
        self.m = m
        self.s = s
        self.R = s + 3
        self.j_from_one = j_from_one
        n = host.n
        if order is None:
            order = range(n)
        order = list(order)
        if sorted(order) != list(range(n)):
            raise ValueError("vertex_order must be a permutation of the vertices")
        self.order_pos = [0] * n
        for pos, v in enumerate(order):
            self.order_pos[v] = pos

        self.node_dist: dict[tuple, np.ndarray] = {}
        self.partitions: list[Partition] = []
        self.uflags: list[np.ndarray] = []
        self.cut_lists: list[list] = []
        self.level_dist_paths: list[list] = []

        adj = [set(host.neighbors(v)) for v in range(n)]
        excl_count = np.zeros(n, dtype=np.int16)
        self._walk(adj, excl_count, (), [], [])
        self.uflag = np.vstack(self.uflags)
        self.uflags = None

    def _walk(self, adj, excl_count, prefix, cuts_path, dist_path):
        depth = len(prefix)
        comp, dist, num = _component_data(adj, self.order_pos)
        if depth == self.m:
            self.partitions.append(Partition(prefix, comp, num))
            self.uflags.append(excl_count == 0)
            self.cut_lists.append(list(cuts_path))
            self.level_dist_paths.append(list(dist_path))
            return
        self.node_dist[prefix] = dist
        buckets = _bucket_cut_edges(adj, dist, self.R, self.j_from_one)
        for slot in OFFSET_SLOTS:
            edges = buckets[slot]
            excl = _erosion_set(adj, edges, self.s)
            if excl:
                excl_count[excl] += 1
            for u, w in edges:
                adj[u].discard(w)
                adj[w].discard(u)
            cuts_path.append(edges)
            dist_path.append(dist)
            self._walk(adj, excl_count, prefix + (slot * self.R,), cuts_path, dist_path)
            dist_path.pop()
            cuts_path.pop()
            for u, w in edges:
                adj[u].add(w)
                adj[w].add(u)
            if excl:
                excl_count[excl] -= 1

    # -- lookups -----------------------------------------------------------

    def leaf_index(self, delta: tuple) -> int:
        idx = 0
        for d in delta:
            if d % self.R or d // self.R not in OFFSET_SLOTS:
                raise ValueError(f"bad delta tuple {delta}")
            idx = idx * 4 + d // self.R
        return idx

    def cut_sequence(self, delta: tuple) -> CutSequence:
        i = self.leaf_index(delta)
        params = CutParams(self.m, self.s, tuple(delta),
                           j_from_one=self.j_from_one)
        return CutSequence(params, self.cut_lists[i], self.level_dist_paths[i])

    def cover(self) -> Cover:
        cuts = [self.cut_sequence(p.delta) for p in self.partitions]
        return Cover(self.host, self.s, self.partitions, self.uflag, cuts)

    def select_delta(self, w: int) -> tuple:
        """Offset tuple placing w in the eroded set of its cluster: at each
        level pick the smallest delta whose residue (d(w, root) - delta)
        mod 4R lies in [R, 3R]."""
        self.host.check_vertex(w)
        R, R4 = self.R, 4 * self.R
        prefix = ()
        for _ in range(self.m):
            d = int(self.node_dist[prefix][w])
            choice = None
            for slot in OFFSET_SLOTS:
                if R <= (d - slot * R) % R4 <= 3 * R:
                    choice = slot * R
                    break
            assert choice is not None, "offset residue window cannot be empty"
            prefix = prefix + (choice,)
        return prefix


# -- single-sequence reference implementations --------------------------------

def build_cuts(host: Graph, params: CutParams) -> CutSequence:
    """The m annulus cut sets of one offset tuple (reference path, no
    prefix sharing)."""
    n = host.n
    order = params.vertex_order if params.vertex_order is not None else range(n)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("vertex_order must be a permutation of the vertices")
    order_pos = [0] * n
    for pos, v in enumerate(order):
        order_pos[v] = pos
    adj = [set(host.neighbors(v)) for v in range(n)]
    cut_edges, level_dist = [], []
    for k in range(params.m):
        comp, dist, _ = _component_data(adj, order_pos)
        buckets = _bucket_cut_edges(adj, dist, params.R, params.j_from_one)
        edges = buckets[params.delta[k] // params.R]
        cut_edges.append(edges)
        level_dist.append(dist)
        for u, w in edges:
            adj[u].discard(w)
            adj[w].discard(u)
    return CutSequence(params, cut_edges, level_dist)


def clusters_of(host: Graph, cuts: CutSequence) -> Partition:
    """Components of the host after deleting every cut level."""
    adj = [set(host.neighbors(v)) for v in range(host.n)]
    for edges in cuts.cut_edges:
        for u, w in edges:
            adj[u].discard(w)
            adj[w].discard(u)
    order = cuts.params.vertex_order
    order_pos = list(range(host.n))
    if order is not None:
        for pos, v in enumerate(order):
            order_pos[v] = pos
    comp, _, num = _component_data(adj, order_pos)
    return Partition(cuts.params.delta, comp, num)


def all_partitions(host: Graph, m: int, s: int, order=None,
                   j_from_one: bool = False) -> list[Partition]:
    """One partition per offset tuple, in lexicographic tuple order."""
    forest = PartitionForest(host, m, s, order, j_from_one)
    return forest.partitions


def build_cover(host: Graph, partitions: list[Partition],
                cut_sequences: list[CutSequence], s: int) -> Cover:
    """Erode each cluster by s+1 around every level's cut endpoints, in
    that level's residual metric (reference path over explicit cut
    sequences)."""
    if len(partitions) != len(cut_sequences):
        raise ValueError("need one cut sequence per partition")
    n = host.n
    rows = []
    for part, cuts in zip(partitions, cut_sequences):
        excl = np.zeros(n, dtype=bool)
        adj = [set(host.neighbors(v)) for v in range(n)]
        for edges in cuts.cut_edges:
            hit = _erosion_set(adj, edges, s)
            if hit:
                excl[hit] = True
            for u, w in edges:
                adj[u].discard(w)
                adj[w].discard(u)
        rows.append(~excl)
    return Cover(host, s, list(partitions), np.vstack(rows), list(cut_sequences))


def select_delta_for_vertex(host: Graph, w: int, m: int, s: int, order=None,
                            forest: PartitionForest | None = None,
                            j_from_one: bool = False) -> tuple:
    """Offset tuple guaranteeing w lands in the eroded set of its cluster."""
    if forest is None:
        forest = PartitionForest(host, m, s, order, j_from_one)
    return forest.select_delta(w)


# -- measurements ---------------------------------------------------------------

def _ball_lists(host: Graph, s: int, vertices=None) -> dict[int, np.ndarray]:
    verts = range(host.n) if vertices is None else vertices
    out = {}
    for x in verts:
        dist = {x: 0}
        q = deque([x])
        while q:
            u = q.popleft()
            du = dist[u]
            if du == s:
                continue
            for w in host.neighbors(u):
                if w not in dist:
                    dist[w] = du + 1
                    q.append(w)
        out[x] = np.fromiter(dist.keys(), dtype=np.int64)
    return out


def interior_vertices(host: Graph, boundary, s: int) -> list[int]:
    """Vertices whose radius-s ball cannot touch anything missing beyond
    `boundary` (the incomplete rim of a truncated host)."""
    bset = [v for v in boundary]
    if not bset:
        return list(range(host.n))
    dist = multi_source_distances(host, bset)
    return [v for v in range(host.n) if dist.get(v, host.n) >= s]


@dataclass
class MultiplicityReport:
    value: int
    witness: int | None
    checked: int
    distinct_elements: int = 0


def element_representative_ids(cover: Cover) -> tuple[np.ndarray, int]:
    """Tag every vertex with the id of its cover element, where identical
    U sets arising from different partitions share one id (a cover is a
    family of sets; duplicates are one element).  -1 marks vertices
    outside every U of that partition."""
    P, n = cover.uflag.shape
    rid = np.full((P, n), -1, dtype=np.int64)
    seen: dict[bytes, int] = {}
    for p_idx, part in enumerate(cover.partitions):
        order = np.argsort(part.cid, kind="stable")
        cids = part.cid[order]
        starts = np.flatnonzero(np.r_[True, cids[1:] != cids[:-1]])
        bounds = np.r_[starts, len(order)]
        uf = cover.uflag[p_idx]
        for a, b in zip(bounds[:-1], bounds[1:]):
            members = order[a:b]
            u = np.sort(members[uf[members]])
            if len(u) == 0:
                continue
            rep = seen.setdefault(u.tobytes(), len(seen))
            rid[p_idx, u] = rep
    return rid, len(seen)


def s_multiplicity(host: Graph, cover: Cover, s: int | None = None,
                   vertices=None) -> MultiplicityReport:
    """Largest number of distinct cover elements met by a closed radius-s
    ball, with the worst ball's center as witness."""
    if s is None:
        s = cover.s
    rid, distinct = element_representative_ids(cover)
    balls = _ball_lists(host, s, vertices)
    best, witness = 0, None
    for x, b in balls.items():
        vals = rid[:, b]
        count = len(np.unique(vals[vals >= 0]))
        if count > best:
            best, witness = count, x
    return MultiplicityReport(best, witness, len(balls), distinct)


@dataclass
class SeparationVerdict:
    ok: bool
    witness: tuple | None    # (vertex, partition idx, cluster id of the offended U_T)
    checked: int


def separation_check(host: Graph, cover: Cover, s: int | None = None,
                     vertices=None) -> SeparationVerdict:
    """Check that B(x, s) meets U_T only when x itself lies in T."""
    if s is None:
        s = cover.s
    cid = np.vstack([p.cid for p in cover.partitions])
    uf = cover.uflag
    balls = _ball_lists(host, s, vertices)
    for x, b in balls.items():
        viol = uf[:, b] & (cid[:, b] != cid[:, x][:, None])
        if viol.any():
            p, col = np.argwhere(viol)[0]
            return SeparationVerdict(False, (x, int(p), int(cid[p, b[col]])), len(balls))
    return SeparationVerdict(True, None, len(balls))


def distance_matrix(host: Graph) -> np.ndarray:
    """All-pairs shortest paths as int16 (-1 for unreachable)."""
    n = host.n
    mat = np.full((n, n), -1, dtype=np.int16)
    for src in range(n):
        row = mat[src]
        row[src] = 0
        q = deque([src])
        while q:
            u = q.popleft()
            du = row[u]
            for w in host.neighbors(u):
                if row[w] < 0:
                    row[w] = du + 1
                    q.append(w)
    return mat


@dataclass
class ElementStat:
    delta: tuple
    cluster: int
    cluster_size: int
    u_size: int
    diameter: int | None


@dataclass
class DiameterReport:
    max_diameter: int
    gamma_emp: float
    histogram: dict
    elements: list[ElementStat] = field(repr=False, default_factory=list)


def cover_diameter_report(host: Graph, cover: Cover, s: int | None = None,
                          dist: np.ndarray | None = None) -> DiameterReport:
    """Ambient-metric diameters of all cover elements; empty elements get
    no diameter but stay in the element list."""
    if s is None:
        s = cover.s
    if dist is None:
        dist = distance_matrix(host)
    max_diam = 0
    hist: dict[int, int] = {}
    stats = []
    for p_idx, c, u, members in cover.iter_elements():
        if len(u) == 0:
            stats.append(ElementStat(cover.partitions[p_idx].delta, c,
                                     len(members), 0, None))
            continue
        sub = dist[np.ix_(u, u)]
        d = int(sub.max())
        if d < 0 or (sub < 0).any():
            raise ValueError("cover element spans multiple host components")
        max_diam = max(max_diam, d)
        hist[d] = hist.get(d, 0) + 1
        stats.append(ElementStat(cover.partitions[p_idx].delta, c,
                                 len(members), len(u), d))
    return DiameterReport(max_diam, max_diam / max(s, 1), hist, stats)


def partition_property_check(host: Graph, cover: Cover) -> tuple[bool, tuple | None]:
    """Every partition must cover all vertices with disjoint clusters and
    no surviving residual edge may cross two clusters."""
    eu = np.fromiter((e[0] for e in host.edges()), dtype=np.int64)
    ev = np.fromiter((e[1] for e in host.edges()), dtype=np.int64)
    for p_idx, (part, cuts) in enumerate(zip(cover.partitions, cover.cuts)):
        if part.cid.min() < 0:
            return False, (p_idx, "uncovered vertex")
        removed = cuts.all_cut_edges()
        keep = np.fromiter(((int(u), int(v)) not in removed
                            for u, v in zip(eu, ev)), dtype=bool)
        crossing = part.cid[eu[keep]] != part.cid[ev[keep]]
        if crossing.any():
            i = int(np.flatnonzero(crossing)[0])
            bad = np.flatnonzero(keep)[i]
            return False, (p_idx, (int(eu[bad]), int(ev[bad])))
    return True, None


def cut_correctness_check(cover: Cover) -> tuple[bool, tuple | None]:
    """Re-check each recorded cut edge against its level's distance map:
    endpoint depths must be (4Rj + delta, 4Rj + delta + 1)."""
    for p_idx, cuts in enumerate(cover.cuts):
        R = cuts.params.R
        R4 = 4 * R
        for level, (edges, dist) in enumerate(zip(cuts.cut_edges, cuts.level_dist)):
            delta = cuts.params.delta[level]
            for u, w in edges:
                lo, hi = sorted((int(dist[u]), int(dist[w])))
                if hi != lo + 1 or lo % R4 != delta:
                    return False, (p_idx, level, (u, w))
                if cuts.params.j_from_one and lo < R4:
                    return False, (p_idx, level, (u, w))
    return True, None


# -- the full witness report -----------------------------------------------------

@dataclass
class ScaleReport:
    s: int
    R: int
    num_partitions: int
    multiplicity: int
    multiplicity_witness: int | None
    max_diameter: int
    gamma_emp: float
    coverage_pass: bool
    separation_pass: bool
    partition_pass: bool
    interior_fraction: float
    num_elements: int
    num_nonempty_elements: int

    @property
    def passed(self) -> bool:
        return self.coverage_pass and self.separation_pass and self.partition_pass

    def to_json_obj(self, m: int) -> dict:
        return {
            "m": m, "s": self.s, "R": self.R,
            "num_partitions": self.num_partitions,
            "multiplicity": self.multiplicity,
            "max_diameter": self.max_diameter,
            "gamma_emp": self.gamma_emp,
            "coverage_pass": self.coverage_pass,
            "separation_pass": self.separation_pass,
            "partition_pass": self.partition_pass,
            "interior_fraction": self.interior_fraction,
            "num_elements": self.num_elements,
            "num_nonempty_elements": self.num_nonempty_elements,
        }


@dataclass
class NagataReport:
    m: int
    scales: list[ScaleReport]

    @property
    def passed(self) -> bool:
        return all(sc.passed for sc in self.scales)

    def to_json_obj(self) -> dict:
        return {"m": self.m, "passed": self.passed,
                "scales": [sc.to_json_obj(self.m) for sc in self.scales]}


def nagata_witness(host: Graph, m: int, s_list, order=None, boundary=(),
                   j_from_one: bool = False, with_diameters: bool = True) -> NagataReport:
    """Run the whole construction at each scale and check, on the interior:
    coverage via offset selection, s-multiplicity at most 4^m, separation,
    and the partition property for every offset tuple.

    `boundary` marks the incomplete rim of a truncated host; checks are
    evaluated at vertices whose radius-s ball stays clear of it, and the
    report carries that interior fraction.  Diameters are measurements.
    """
    if not s_list:
        raise ValueError("need at least one scale")
    scales = []
    dist = distance_matrix(host) if with_diameters else None
    for s in s_list:
        forest = PartitionForest(host, m, s, order, j_from_one)
        cover = forest.cover()
        interior = interior_vertices(host, boundary, s)

        coverage = True
        for w in interior:
            delta = forest.select_delta(w)
            if not cover.uflag[forest.leaf_index(delta), w]:
                coverage = False
                break

        mult = s_multiplicity(host, cover, s, interior)
        sep = separation_check(host, cover, s, interior)
        part_ok, _ = partition_property_check(host, cover)
        cut_ok, cut_wit = cut_correctness_check(cover)
        if not cut_ok:
            raise AssertionError(f"recorded cut fails its annulus law: {cut_wit}")

        if with_diameters:
            diam = cover_diameter_report(host, cover, s, dist)
            max_d, gamma = diam.max_diameter, diam.gamma_emp
        else:
            max_d, gamma = 0, 0.0
        scales.append(ScaleReport(
            s=s, R=s + 3, num_partitions=len(cover.partitions),
            multiplicity=mult.value, multiplicity_witness=mult.witness,
            max_diameter=max_d, gamma_emp=gamma,
            coverage_pass=coverage, separation_pass=sep.ok,
            partition_pass=part_ok,
            interior_fraction=len(interior) / host.n,
            num_elements=cover.num_elements,
            num_nonempty_elements=cover.num_nonempty_elements(),
        ))
    return NagataReport(m, scales)
