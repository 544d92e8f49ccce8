"""Finite undirected graphs with the shortest-path metric.

Vertices are dense integers 0..n-1.  Labels are optional opaque strings
(Cayley balls store group-element normal forms there).  Graphs are
immutable after construction and all operations are pure, so they can be
shared freely between workers.
"""

from __future__ import annotations

import hashlib
import json
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass

VertexSet = frozenset  # members must be vertices of the associated graph
EdgeSet = frozenset    # members are (u, v) pairs with u < v


def normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph: no loops, no parallel edges."""

    __slots__ = ("n", "_adj", "labels")

    def __init__(self, n: int, edges=(), labels: dict[int, str] | None = None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) leaves vertex range 0..{n - 1}")
            e = normalize_edge(u, v)
            if e in seen:
                continue
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self._adj = tuple(tuple(sorted(nb)) for nb in adj)
        if labels is not None:
            bad = [v for v in labels if not (0 <= v < n)]
            if bad:
                raise ValueError(f"labels reference unknown vertices {bad[:3]}")
        self.labels = dict(labels) if labels else None

    # -- basic queries ---------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self._adj[u]
        i = bisect_left(nb, v)
        return i < len(nb) and nb[i] == v

    def edges(self):
        """Iterate edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self._adj) // 2

    def check_vertex(self, v: int):
        if not (0 <= v < self.n):
            raise ValueError(f"unknown vertex {v}")

    def subgraph(self, keep) -> tuple["Graph", list[int]]:
        """Induced subgraph on `keep`; returns (graph, old-id list).

        New vertex i corresponds to old vertex returned[i] (sorted order).
        """
        old = sorted(set(keep))
        pos = {v: i for i, v in enumerate(old)}
        for v in old:
            self.check_vertex(v)
        es = [(pos[u], pos[v]) for u, v in self.edges() if u in pos and v in pos]
        labels = None
        if self.labels:
            labels = {pos[v]: self.labels[v] for v in old if v in self.labels}
        return Graph(len(old), es, labels), old

    # -- serialization ---------------------------------------------------

    def to_json_obj(self) -> dict:
        verts = []
        for v in range(self.n):
            entry = {"id": v}
            if self.labels and v in self.labels:
                entry["label"] = self.labels[v]
            verts.append(entry)
        return {"vertices": verts, "edges": [list(e) for e in self.edges()]}

    def canonical_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Graph":
        verts = obj["vertices"]
        ids = [vd["id"] for vd in verts]
        if sorted(ids) != list(range(len(ids))):
            raise ValueError("vertex ids must be dense 0..n-1")
        labels = {vd["id"]: vd["label"] for vd in verts if "label" in vd}
        return cls(len(ids), [tuple(e) for e in obj["edges"]], labels or None)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


# -- convenience constructors ---------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows: int, cols: int) -> Graph:
    """rows x cols grid; vertex (r, c) gets id r*cols + c."""
    es = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                es.append((v, v + 1))
            if r + 1 < rows:
                es.append((v, v + cols))
    return Graph(rows * cols, es)


def complete_graph(m: int) -> Graph:
    return Graph(m, [(i, j) for i in range(m) for j in range(i + 1, m)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# -- metric operations -----------------------------------------------------

def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Distances from `source` within its component (absent = unreachable)."""
    g.check_vertex(source)
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du + 1
                q.append(w)
    return dist


def multi_source_distances(g: Graph, sources) -> dict[int, int]:
    dist = {}
    q = deque()
    for s in sources:
        g.check_vertex(s)
        if s not in dist:
            dist[s] = 0
            q.append(s)
    while q:
        u = q.popleft()
        du = dist[u]
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du + 1
                q.append(w)
    return dist


def connected_components(g: Graph) -> list[VertexSet]:
    """Partition of the vertices into components, ordered by smallest member."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    q.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    return len(bfs_distances(g, 0)) == g.n


def is_connected_subset(g: Graph, s) -> bool:
    """True iff the induced subgraph on `s` is connected (empty -> False)."""
    members = set(s)
    for v in members:
        g.check_vertex(v)
    if not members:
        return False
    start = next(iter(members))
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for w in g.neighbors(u):
            if w in members and w not in seen:
                seen.add(w)
                q.append(w)
    return len(seen) == len(members)


def set_diameter(g: Graph, s) -> int:
    """Max pairwise distance inside `s`, measured in the ambient metric of g.

    The ambient metric is the right notion for cover elements: a cover of a
    space is judged by distances in the space, not in the induced subgraph.
    """
    members = sorted(set(s))
    if not members:
        raise ValueError("set_diameter of empty set")
    best = 0
    mset = set(members)
    for v in members:
        dist = bfs_distances(g, v)
        reached = 0
        for w in members:
            d = dist.get(w)
            if d is None:
                raise ValueError("set spans multiple components of the host")
            reached += 1
            if d > best:
                best = d
        assert reached == len(members)
    return best


def set_diameter_induced(g: Graph, s) -> int:
    """Diameter of the subgraph induced on `s` (diagnostic companion)."""
    members = sorted(set(s))
    if not members:
        raise ValueError("set_diameter_induced of empty set")
    sub, old = g.subgraph(members)
    best = 0
    for v in range(sub.n):
        dist = bfs_distances(sub, v)
        if len(dist) != sub.n:
            raise ValueError("set is not connected in the induced subgraph")
        best = max(best, max(dist.values()))
    return best


# -- vertex-disjoint paths (max-flow form of Menger's theorem) -------------

@dataclass
class DisjointPaths:
    """Result of a disjoint-path computation.

    paths: pairwise vertex-disjoint A-B paths (lists of vertices).
    separator: present exactly when fewer than the requested number of
    paths exist; a vertex set of size len(paths) whose removal separates
    A from B.
    """

    paths: list[list[int]]
    separator: list[int] | None

    @property
    def count(self) -> int:
        return len(self.paths)


class _FlowNet:
    """Unit-vertex-capacity flow network over a split-vertex digraph."""

    def __init__(self, num_nodes: int):
        self.num = num_nodes
        self.head: list[list[int]] = [[] for _ in range(num_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def bfs_augment(self, s: int, t: int) -> bool:
        prev_arc = [-1] * self.num
        prev_arc[s] = -2
        q = deque([s])
        while q:
            u = q.popleft()
            if u == t:
                break
            for a in self.head[u]:
                v = self.to[a]
                if self.cap[a] > 0 and prev_arc[v] == -1:
                    prev_arc[v] = a
                    q.append(v)
        if prev_arc[t] == -1:
            return False
        v = t
        while v != s:
            a = prev_arc[v]
            self.cap[a] -= 1
            self.cap[a ^ 1] += 1
            v = self.to[a ^ 1]
        return True

    def reachable_from(self, s: int) -> list[bool]:
        seen = [False] * self.num
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            for a in self.head[u]:
                v = self.to[a]
                if self.cap[a] > 0 and not seen[v]:
                    seen[v] = True
                    q.append(v)
        return seen


def _run_disjoint_paths(g: Graph, sources, sinks, k, exempt_endpoints,
                        forbidden=frozenset()) -> DisjointPaths:
    # split v into 2v (in) and 2v+1 (out); capacity 1 through each vertex.
    # Terminal/edge arcs get fat capacity so every min cut is a vertex cut.
    # With exempt_endpoints, source/sink vertices carry no capacity at all
    # (they serve only as endpoints, never as through-traffic).
    big = g.n + 1
    net = _FlowNet(2 * g.n + 2)
    s, t = 2 * g.n, 2 * g.n + 1
    terminals = set(sources) | set(sinks) if exempt_endpoints else set()
    for v in range(g.n):
        if v not in terminals and v not in forbidden:
            net.add(2 * v, 2 * v + 1, 1)
    for u, v in g.edges():
        if u in forbidden or v in forbidden:
            continue
        net.add(2 * u + 1, 2 * v, big)
        net.add(2 * v + 1, 2 * u, big)
    for a in sources:
        net.add(s, 2 * a + 1 if exempt_endpoints else 2 * a, big)
    for b in sinks:
        net.add(2 * b if exempt_endpoints else 2 * b + 1, t, big)

    flow = 0
    while flow < k and net.bfs_augment(s, t):
        flow += 1

    separator = None
    if flow < k:
        # extract the min vertex cut before decomposition mutates the
        # residual network
        seen = net.reachable_from(s)
        separator = sorted(v for v in range(g.n) if seen[2 * v] and not seen[2 * v + 1])

    # decompose the integral flow into vertex paths (forward arcs are even;
    # cap[arc^1] counts units currently on the arc)
    paths = []
    for a in net.head[s]:
        while net.cap[a ^ 1] > 0:
            net.cap[a ^ 1] -= 1
            path = []
            node = net.to[a]
            if exempt_endpoints:
                path.append(node // 2)
            while node != t:
                if node % 2 == 0:
                    path.append(node // 2)
                nxt = None
                for b in net.head[node]:
                    if b % 2 == 0 and net.cap[b ^ 1] > 0:
                        nxt = b
                        break
                assert nxt is not None, "flow decomposition lost its way"
                net.cap[nxt ^ 1] -= 1
                node = net.to[nxt]
            paths.append(path)
    assert len(paths) == flow
    paths.sort(key=lambda p: (p[0], p[-1]))
    return DisjointPaths(paths, separator)


def vertex_disjoint_paths(g: Graph, a, b, k: int,
                          endpoint_capacity: bool = False) -> DisjointPaths:
    """Up to k pairwise vertex-disjoint a-b paths (unit-capacity max-flow).

    Default semantics exempt the endpoint sets: interiors are disjoint
    and avoid a and b entirely, so two paths may share endpoints (two
    paths between opposite grid corners, say).  Each vertex in both a and
    b yields one zero-length path and is then unavailable.  With
    `endpoint_capacity=True` every vertex, endpoints included, is used by
    at most one path, so the paths have distinct endpoints (the form
    needed when the paths themselves become disjoint branch material).

    When fewer than k paths exist, `separator` carries a separating
    vertex set of size equal to the number of paths found (Menger).
    """
    A = sorted(set(a))
    B = sorted(set(b))
    if not A or not B:
        raise ValueError("endpoint sets must be nonempty")
    for v in A + B:
        g.check_vertex(v)
    if k <= 0:
        return DisjointPaths([], None)
    if endpoint_capacity:
        return _run_disjoint_paths(g, A, B, k, exempt_endpoints=False)

    shared = sorted(set(A) & set(B))
    zero_paths = [[v] for v in shared[:k]]
    if len(zero_paths) == k:
        return DisjointPaths(zero_paths, None)
    A2 = [v for v in A if v not in shared]
    B2 = [v for v in B if v not in shared]
    if not A2 or not B2:
        return DisjointPaths(zero_paths, list(shared))
    res = _run_disjoint_paths(g, A2, B2, k - len(zero_paths),
                              exempt_endpoints=True, forbidden=frozenset(shared))
    paths = zero_paths + res.paths
    separator = None
    if res.separator is not None:
        separator = sorted(shared + res.separator)
    return DisjointPaths(paths, separator)


def internally_disjoint_paths(g: Graph, u: int, v: int, k: int) -> DisjointPaths:
    """Up to k u-v paths sharing no vertex except the endpoints."""
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        raise ValueError("endpoints must differ")
    if k <= 0:
        return DisjointPaths([], None)
    return _run_disjoint_paths(g, [u], [v], k, exempt_endpoints=True)


def shortest_path(g: Graph, sources, targets, allowed=None) -> list[int] | None:
    """Deterministic BFS path from `sources` to `targets`.

    Restricted to `allowed` vertices when given (sources/targets included
    implicitly only if allowed).  Ties break toward smaller vertex ids via
    the sorted adjacency order.
    """
    tset = set(targets)
    ok = None if allowed is None else set(allowed)
    parent = {}
    q = deque()
    for s in sorted(set(sources)):
        if ok is not None and s not in ok:
            continue
        if s not in parent:
            parent[s] = None
            q.append(s)
    while q:
        u = q.popleft()
        if u in tset:
            out = []
            while u is not None:
                out.append(u)
                u = parent[u]
            out.reverse()
            return out
        for w in g.neighbors(u):
            if w in parent:
                continue
            if ok is not None and w not in ok:
                continue
            parent[w] = u
            q.append(w)
    return None
