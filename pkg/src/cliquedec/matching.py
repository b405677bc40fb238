"""Exact minimum-weight perfect matching over the space-time defect graph.

Defects are (ancilla id, round) detection events.  The metric is |round
difference| plus hop count in the same-type clique-neighbor graph; the
boundary sits one hop beyond the nearest discharge-capable ancilla.  Every
defect is matched to another defect or to the boundary so that total weight
is minimal; matched spatial segments realize corrections as the shared
qubits along a shortest path, and vertical segments contribute none.

Small instances (the common case at the simulated error rates) are solved by
a dynamic program over defect subsets; larger ones fall back to a blossom
matching on an augmented graph with one virtual boundary node per defect.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DP_LIMIT = 18  # subsets DP up to this many defects, blossom beyond
BOUNDARY = "boundary"


@dataclass
class SpacetimeDefectSet:
    defects: list  # (ancilla id, round)
    window: int
    type: str

    def __post_init__(self):
        self.defects = sorted(set(self.defects))
        for _, r in self.defects:
            if not 0 <= r <= self.window:
                raise ValueError(f"round {r} outside window 0..{self.window}")


@dataclass
class MatchingResult:
    pairs: list  # (defect, defect) or (defect, BOUNDARY)
    corrections: set = field(default_factory=set)
    total_weight: int = 0


class _Graph:
    """Per-(lattice, type) all-pairs hop distances, shortest-path parents and
    boundary attachment, cached across decodes."""

    def __init__(self, lat, type):
        self.lat = lat
        self.type = type
        ids = lat.type_ancillas[type]
        self.ids = ids
        self.pos = {a: i for i, a in enumerate(ids)}
        n = len(ids)
        self.hops = np.full((n, n), -1, dtype=np.int32)
        self.parent = np.full((n, n), -1, dtype=np.int32)
        for i, a in enumerate(ids):
            self._bfs(i, a)
        disch = [self.pos[a] for a in ids if a in lat.boundary_discharge]
        # hop count to the nearest discharge-capable ancilla, plus the exit hop
        self.bdry = self.hops[:, disch].min(axis=1) + 1
        self.bdry_anchor = np.array(
            [disch[int(np.argmin(self.hops[i, disch]))] for i in range(n)], dtype=np.int32
        )

    def _bfs(self, i, a):
        lat = self.lat
        self.hops[i, i] = 0
        queue = [a]
        while queue:
            nxt = []
            for u in queue:
                for v in sorted(lat.same_type_neighbors[u]):
                    j = self.pos[v]
                    if self.hops[i, j] < 0:
                        self.hops[i, j] = self.hops[i, self.pos[u]] + 1
                        self.parent[i, j] = self.pos[u]
                        nxt.append(v)
            queue = nxt

    def path_qubits(self, i, j):
        """Shared qubits along the BFS shortest path between two ancillas."""
        lat = self.lat
        qubits = set()
        while j != i:
            k = int(self.parent[i, j])
            qubits ^= {lat.shared_qubit[frozenset((self.ids[j], self.ids[k]))]}
            j = k
        return qubits


_graphs = {}


def _graph(lat, type) -> _Graph:
    # distance in the key guards against id() reuse after garbage collection
    key = (id(lat), lat.distance, type)
    if key not in _graphs:
        _graphs[key] = _Graph(lat, type)
    return _graphs[key]


def distance(lat, u, v, type=None):
    """Metric between two defects, or a defect and the boundary."""
    if type is None:
        type = lat.ancillas[u[0]].type
    g = _graph(lat, type)
    if v == BOUNDARY:
        return int(g.bdry[g.pos[u[0]]])
    dt = abs(u[1] - v[1])
    return dt + int(g.hops[g.pos[u[0]], g.pos[v[0]]])


def _segment_correction(g, u, v):
    """Data-qubit flips realizing one matched segment (vertical part free)."""
    if v == BOUNDARY:
        i = g.pos[u[0]]
        anchor = int(g.bdry_anchor[i])
        qubits = g.path_qubits(i, anchor)
        qubits ^= {g.lat.boundary_discharge[g.ids[anchor]][0]}
        return qubits
    return g.path_qubits(g.pos[u[0]], g.pos[v[0]])


def decode(lat, defects: SpacetimeDefectSet) -> MatchingResult:
    """Minimum total weight assignment of defects to partners or boundary."""
    pts = defects.defects
    if not pts:
        return MatchingResult(pairs=[])
    g = _graph(lat, defects.type)
    n = len(pts)
    w = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            w[i, j] = w[j, i] = distance(lat, pts[i], pts[j], defects.type)
    wb = np.array([distance(lat, p, BOUNDARY, defects.type) for p in pts], dtype=np.int64)

    if n <= DP_LIMIT:
        pairs_idx, total = _dp_match(n, w, wb)
    else:
        pairs_idx, total = _blossom_match(n, w, wb)

    pairs = []
    corrections = set()
    for i, j in pairs_idx:
        u = pts[i]
        v = BOUNDARY if j is None else pts[j]
        pairs.append((u, v))
        corrections ^= _segment_correction(g, u, v)
    return MatchingResult(pairs=pairs, corrections=corrections, total_weight=int(total))


def _dp_match(n, w, wb):
    """Exact pairing over subsets: match the lowest live defect with another
    live defect or the boundary."""

    @lru_cache(maxsize=None)
    def best(mask):
        if mask == 0:
            return 0
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        score = wb[i] + best(rest)
        j = rest
        while j:
            k = (j & -j).bit_length() - 1
            j &= j - 1
            cand = w[i, k] + best(rest & ~(1 << k))
            if cand < score:
                score = cand
        return int(score)

    pairs = []
    mask = (1 << n) - 1
    while mask:
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        choice, score = None, wb[i] + best(rest)
        j = rest
        while j:
            k = (j & -j).bit_length() - 1
            j &= j - 1
            cand = w[i, k] + best(rest & ~(1 << k))
            if cand < score:
                choice, score = k, cand
        pairs.append((i, choice))
        mask = rest if choice is None else rest & ~(1 << choice)
    total = best((1 << n) - 1)
    best.cache_clear()
    return pairs, total


def _blossom_match(n, w, wb):
    """Reduction to min-weight perfect matching: a virtual boundary twin per
    defect, twins connected at zero weight."""
    import networkx as nx

    G = nx.Graph()
    for i in range(n):
        for j in range(i + 1, n):
            G.add_edge(i, j, weight=int(w[i, j]))
            G.add_edge(n + i, n + j, weight=0)
        G.add_edge(i, n + i, weight=int(wb[i]))
    mate = nx.min_weight_matching(G)
    pairs, total = [], 0
    for a, b in mate:
        a, b = min(a, b), max(a, b)
        if a < n and b < n:
            pairs.append((a, b))
            total += int(w[a, b])
        elif a < n and b == n + a:
            pairs.append((a, None))
            total += int(wb[a])
    return pairs, total
