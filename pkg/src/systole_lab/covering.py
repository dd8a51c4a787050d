"""Universal cover development, contractibility and systoles.

The cover is grown vertex by vertex in order of distance from a base lift.
Each cover vertex owns a slot table mirroring the cyclic link of the base
vertex below it.  Completing a vertex first pulls in neighbours already known
through adjacent completed stars (two cover triangles that share an edge and
project to the same base triangle are the same triangle), then creates fresh
vertices for the remaining slots.  Any conflicting slot assignment means two
names for one cover vertex and the names are merged with union-find.

On flat tori the developing map is injective, so positions give a second,
independent identification rule and cover distances are Euclidean.
"""

from __future__ import annotations

import heapq
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, dijkstra

from .errors import ResourceLimit, SimplyConnected, TrivialHomology
from .surface import Cycle, Surface, cycle_z2_class, resolve_metric, z2_cocycles

MAX_COVER_VERTICES = 1_500_000
MAX_Z2_RANK = 8
CACHE_ENV = "SYSTOLE_LAB_CACHE"


@dataclass(frozen=True)
class SystoleResult:
    length: float
    cycle: Cycle
    kind: str
    certified: bool
    search_radius: float
    notes: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {"systole": self.length, "kind": self.kind, "certified": self.certified,
                "search_radius": self.search_radius, "cycle": list(self.cycle.vertices),
                "notes": list(self.notes)}


class _Development:
    """Mutable cover complex; see the module docstring."""

    def __init__(self, surface: Surface, v: int, metric: str, cap: int):
        self.s = surface
        self.metric = metric
        self.cap = cap
        self.nbrs, _ = surface.links
        self.slot_of = surface.slot_of
        self.base: list[int] = []
        self.uf: list[int] = []
        self.slots: list[list[int]] = []
        self.dist: list[float] = []
        self.done: list[bool] = []
        self.heap: list[tuple[float, int]] = []
        self.completed: list[int] = []
        if metric == "flat":
            from .chart import flat_chart
            ch = flat_chart(surface)
            self.disp = {}
            for u, row in enumerate(self.nbrs):
                for w in row:
                    self.disp[(u, w)] = tuple(ch.disp(u, w))
            self.pos: list[tuple[float, float]] = []
            self.grid = 1e-7 * surface.max_edge
            self.by_pos: dict[tuple[int, int, int], int] = {}
        else:
            self.wlen = [[surface.edge_length_between(u, w) for w in row]
                         for u, row in enumerate(self.nbrs)]
        self.root = self._new(v, 0.0, (0.0, 0.0))
        heapq.heappush(self.heap, (0.0, self.root))

    # union-find ----------------------------------------------------------
    def find(self, x: int) -> int:
        uf = self.uf
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    def _new(self, b: int, d: float, p) -> int:
        x = len(self.base)
        if x >= self.cap:
            raise ResourceLimit(f"cover development exceeded {self.cap} vertices")
        self.base.append(b)
        self.uf.append(x)
        self.slots.append([-1] * len(self.nbrs[b]))
        self.dist.append(d)
        self.done.append(False)
        if self.metric == "flat":
            self.pos.append(p)
            self.by_pos[self._key(b, p)] = x
        return x

    def _key(self, b: int, p) -> tuple[int, int, int]:
        return (b, round(p[0] / self.grid), round(p[1] / self.grid))

    def merge(self, a: int, b: int) -> None:
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if self.base[ra] != self.base[rb]:
                raise RuntimeError("cover development: merging vertices over different base vertices")
            if self.done[ra] and self.done[rb]:
                raise RuntimeError("cover development: two completed copies of one cover vertex")
            if rb < ra:
                ra, rb = rb, ra
            self.uf[rb] = ra
            sa, sb = self.slots[ra], self.slots[rb]
            for i, y in enumerate(sb):
                if y < 0:
                    continue
                if sa[i] < 0:
                    sa[i] = y
                elif self.find(sa[i]) != self.find(y):
                    stack.append((sa[i], y))
            if self.dist[rb] < self.dist[ra]:
                self.dist[ra] = self.dist[rb]
                heapq.heappush(self.heap, (self.dist[ra], ra))
            self.done[ra] = self.done[ra] or self.done[rb]

    def _set(self, y: int, i: int, z: int) -> None:
        cur = self.slots[y][i]
        if cur < 0:
            self.slots[y][i] = z
        elif self.find(cur) != self.find(z):
            self.merge(cur, z)

    # growth --------------------------------------------------------------
    def _complete(self, x: int) -> None:
        u = self.base[x]
        W = self.nbrs[u]
        d = len(W)
        changed = True
        while changed:
            changed = False
            x = self.find(x)
            S = self.slots[x]
            for i in range(d):
                y = S[i]
                if y < 0:
                    continue
                y = self.find(y)
                S[i] = y
                Sy = self.slots[y]
                so = self.slot_of[W[i]]
                for nb in ((i - 1) % d, (i + 1) % d):
                    z = Sy[so[W[nb]]]
                    if z < 0:
                        continue
                    z = self.find(z)
                    cur = S[nb]
                    if cur < 0:
                        S[nb] = z
                        changed = True
                    elif self.find(cur) != z:
                        self.merge(cur, z)
                        changed = True
        x = self.find(x)
        S = self.slots[x]
        flat = self.metric == "flat"
        for i in range(d):
            if S[i] >= 0:
                continue
            p = (0.0, 0.0)
            if flat:
                dx, dy = self.disp[(u, W[i])]
                p = (self.pos[x][0] + dx, self.pos[x][1] + dy)
                hit = self.by_pos.get(self._key(W[i], p))
                if hit is not None:
                    S[i] = self.find(hit)
                    continue
            S[i] = self._new(W[i], math.inf, p)
        for i in range(d):
            x = self.find(x)
            S = self.slots[x]
            y = self.find(S[i])
            so = self.slot_of[W[i]]
            self._set(y, so[u], x)
            self._set(self.find(y), so[W[(i + 1) % d]], S[(i + 1) % d])
            self._set(self.find(y), so[W[(i - 1) % d]], S[(i - 1) % d])
        x = self.find(x)
        self.done[x] = True
        self.completed.append(x)
        S = self.slots[x]
        for i in range(d):
            y = self.find(S[i])
            S[i] = y
            if self.done[y]:
                continue
            if flat:
                nd = math.hypot(*self.pos[y])
            else:
                nd = self.dist[x] + self.wlen[u][i]
            if nd < self.dist[y]:
                self.dist[y] = nd
                heapq.heappush(self.heap, (nd, y))

    def grow(self, limit: float) -> None:
        """Complete every vertex whose key does not exceed ``limit``."""
        heap = self.heap
        while heap:
            dx, x = heap[0]
            if dx > limit:
                break
            heapq.heappop(heap)
            r = self.find(x)
            if r != x or self.done[r] or self.dist[r] < dx:
                continue
            self._complete(r)

    def step(self, x: int, w: int) -> int:
        """Neighbour of completed cover vertex x over base vertex w."""
        x = self.find(x)
        return self.find(self.slots[x][self.slot_of[self.base[x]][w]])


class CoverRegion:
    """Developed piece of the universal cover around a lift of ``base_vertex``."""

    def __init__(self, surface: Surface, base_vertex: int, radius: float, metric: str,
                 dev: _Development):
        self.surface = surface
        self.base_vertex = base_vertex
        self.radius = radius
        self.metric = metric
        self._dev = dev
        tol = 1e-9 * max(1.0, radius)
        roots = {dev.find(x) for x in range(len(dev.base))}
        self.vertex_ids = sorted(x for x in roots if dev.dist[x] <= radius + tol)
        self.lift_distances = np.array(sorted(dev.dist[x] for x in self.vertex_ids
                                              if dev.base[x] == base_vertex))

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_lifts(self) -> int:
        return len(self.lift_distances)

    def count_lifts(self, L: float) -> int:
        return int(np.searchsorted(self.lift_distances, L + 1e-9 * max(1.0, L), side="right"))

    def distances_by_base(self) -> dict[int, list[float]]:
        dev = self._dev
        out: dict[int, list[float]] = {}
        for x in self.vertex_ids:
            out.setdefault(dev.base[x], []).append(dev.dist[x])
        return {b: sorted(v) for b, v in out.items()}

    def check_local_isometry(self) -> bool:
        """Every completed vertex carries a full, injective copy of its base link."""
        dev = self._dev
        for x in set(dev.find(c) for c in dev.completed):
            row = [dev.find(y) for y in dev.slots[x]]
            if len(set(row)) != len(row) or any(y < 0 for y in row):
                return False
            if [dev.base[y] for y in row] != dev.nbrs[dev.base[x]]:
                return False
            for i, y in enumerate(row):
                if dev.done[y] and dev.step(y, dev.base[x]) != x:
                    return False
        return True


def develop(surface: Surface, v: int, L: float, metric: str = "graph",
            cap: int = MAX_COVER_VERTICES) -> CoverRegion:
    """Develop the universal cover out to distance L from a lift of v.

    Graph mode uses edge-graph distances; flat mode (flat tori) uses geodesic
    distances, growing an extra max-edge collar so that every cover vertex
    within L is reached through vertices that are themselves complete.
    """
    if L < 0:
        raise ValueError("L must be nonnegative")
    metric = resolve_metric(surface, metric)
    dev = _Development(surface, int(v), metric, cap)
    reach = L * (1 + 1e-12) + 1e-12
    if metric == "flat":
        reach += surface.max_edge
    dev.grow(reach)
    return CoverRegion(surface, int(v), float(L), metric, dev)


def _cyclic_reduce(walk: list[int]) -> list[int]:
    """Cancel backtracks x -> y -> x, cyclically; a free homotopy of the loop."""
    c = list(walk[:-1])
    out: list[int] = []
    for v in c:
        if len(out) >= 2 and out[-2] == v:
            out.pop()
        else:
            out.append(v)
    # the linear pass leaves backtracks only across the seam
    while len(out) >= 3:
        if out[-1] == out[1]:
            out = out[1:-1]
        elif out[-2] == out[0]:
            out = out[:-2]
        else:
            break
    if len(out) <= 2:
        out = out[:1]
    return out + out[:1]


def is_contractible(surface: Surface, cycle: Cycle | list[int]) -> bool:
    walk = [int(x) for x in (cycle.vertices if isinstance(cycle, Cycle) else cycle)]
    if not walk or walk[0] != walk[-1]:
        raise ValueError("cycle must be a closed walk")
    for a, b in zip(walk[:-1], walk[1:]):
        surface.edge_between(a, b)
    walk = _cyclic_reduce(walk)
    if len(walk) <= 3:
        # trivial, back-and-forth, or impossible (no loops in a simplicial complex)
        return True
    # a contractible lift is a closed path of length l, so it stays within l/2
    # of its start; leaving the completed ball proves the walk is essential
    length = sum(surface.edge_length_between(a, b) for a, b in zip(walk[:-1], walk[1:]))
    dev = _Development(surface, walk[0], "graph", MAX_COVER_VERTICES)
    dev.grow(0.5 * length * (1 + 1e-12) + 1e-12)
    x = dev.root
    for w in walk[1:]:
        if not dev.done[dev.find(x)]:
            return False
        x = dev.step(x, w)
    return dev.find(x) == dev.find(dev.root)


# lift counting --------------------------------------------------------------

def _cache_path(surface: Surface, v: int, metric: str) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"lifts-{surface.fingerprint()}-{v}-{metric}.json"


def lift_distances(surface: Surface, v: int, L: float, metric: str = "auto") -> np.ndarray:
    """Sorted cover distances of all lifts of v within L (memoized on disk if configured)."""
    metric = resolve_metric(surface, metric)
    path = _cache_path(surface, v, metric)
    if path is not None and path.exists():
        try:
            obj = json.loads(path.read_text())
            if obj["radius"] >= L:
                d = np.array(obj["distances"], dtype=float)
                return d[d <= L + 1e-9 * max(1.0, L)]
        except (OSError, ValueError, KeyError):
            pass
    region = develop(surface, v, L, metric)
    d = region.lift_distances
    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"radius": L, "distances": d.tolist()}))
            tmp.replace(path)
        except OSError:
            pass
    return d


def loop_class_count(surface: Surface, v: int, L: float, metric: str = "auto") -> int:
    """Number of lifts of v within cover distance L of the base lift."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    d = lift_distances(surface, v, L, metric)
    return int(np.count_nonzero(d <= L + 1e-9 * max(1.0, L)))


# systoles -------------------------------------------------------------------

def _check_not_simply_connected(surface: Surface) -> None:
    if surface.euler_characteristic == 2:
        raise SimplyConnected("surface is a sphere; every loop is contractible")


def _path(pred: np.ndarray, src: int, dst: int) -> list[int]:
    out = [dst]
    while out[-1] != src:
        out.append(int(pred[out[-1]]))
    return out[::-1]


class _EdgeIndex:
    def __init__(self, surface: Surface):
        V = surface.n_vertices
        e = surface.edges.astype(np.int64)
        keys = e[:, 0] * V + e[:, 1]
        self.order = np.argsort(keys)
        self.keys = keys[self.order]
        self.V = V

    def lookup(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        pos = np.searchsorted(self.keys, lo.astype(np.int64) * self.V + hi)
        return self.order[pos]


def _core_edges(surface: Surface, in_tree: np.ndarray, face_edge: dict) -> np.ndarray:
    """Edges whose tree loop is noncontractible, for a given primal spanning tree.

    The dual graph of the non-tree edges is a spanning tree plus 2 - chi extra
    edges.  A tree loop bounds a disk exactly when its dual edge is pruned away
    when leaves are stripped repeatedly; what survives is the extra edges plus
    the subtree connecting their endpoints.
    """
    F = surface.n_faces
    et = surface.edge_tris
    cot = np.flatnonzero(~in_tree)
    f, g = et[cot, 0], et[cot, 1]
    D = csr_matrix((np.ones(2 * len(cot)), (np.concatenate([f, g]), np.concatenate([g, f]))),
                   shape=(F, F))
    order, pred = breadth_first_order(D, 0, directed=False, return_predecessors=True)
    if len(order) != F:
        raise RuntimeError("dual graph of the cotree is disconnected")
    extra = cot[(pred[f] != g) & (pred[g] != f)]
    terminals = sorted({int(x) for e in extra for x in et[e]})
    count: dict[int, int] = {}
    for t in terminals:
        x = t
        while x != 0:
            count[x] = count.get(x, 0) + 1
            x = int(pred[x])
    T = len(terminals)
    core = [int(e) for e in extra]
    for node, c in count.items():
        if 0 < c < T:
            a, b = node, int(pred[node])
            core.append(face_edge[(a, b) if a < b else (b, a)])
    return np.array(sorted(core), dtype=np.int64)


def _face_edge_map(surface: Surface) -> dict:
    out = {}
    for e, (f, g) in enumerate(surface.edge_tris.tolist()):
        out[(f, g) if f < g else (g, f)] = e
    return out


def homotopy_systole_at(surface: Surface, v: int) -> tuple[float, list[int]]:
    """Shortest noncontractible closed walk through v (edge-graph metric)."""
    return _systole_batch(surface, [v], _EdgeIndex(surface), _face_edge_map(surface))[0]


def _systole_batch(surface: Surface, vs, index: _EdgeIndex, face_edge: dict):
    dist, pred = dijkstra(surface.graph, directed=False, indices=list(vs), return_predecessors=True)
    dist = np.atleast_2d(dist)
    pred = np.atleast_2d(pred)
    ea, eb = surface.edges[:, 0], surface.edges[:, 1]
    out = []
    for row, v in enumerate(vs):
        p = pred[row]
        child = np.flatnonzero(p >= 0)
        in_tree = np.zeros(surface.n_edges, dtype=bool)
        in_tree[index.lookup(child, p[child])] = True
        core = _core_edges(surface, in_tree, face_edge)
        d = dist[row]
        cost = d[ea[core]] + surface.edge_length[core] + d[eb[core]]
        j = int(np.argmin(cost))
        e = int(core[j])
        a, b = int(ea[e]), int(eb[e])
        walk = _path(p, v, a) + _path(p, v, b)[::-1]
        out.append((float(cost[j]), walk))
    return out


def homotopy_systole(surface: Surface, threads: int = 1) -> SystoleResult:
    """Exact edge-graph homotopy systole.

    For each vertex v the shortest noncontractible loop through v is a
    shortest-path-tree loop of v, so it is enough to scan the noncontractible
    tree loops of every shortest-path tree.
    """
    _check_not_simply_connected(surface)
    index = _EdgeIndex(surface)
    face_edge = _face_edge_map(surface)
    V = surface.n_vertices
    chunks = [list(range(i, min(V, i + 64))) for i in range(0, V, 64)]
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda c: _systole_batch(surface, c, index, face_edge), chunks))
    else:
        parts = [_systole_batch(surface, c, index, face_edge) for c in chunks]
    best_len, best_walk = math.inf, None
    for part in parts:
        for length, walk in part:
            if length < best_len * (1 - 1e-12):
                best_len, best_walk = length, walk
    cycle = Cycle.from_walk(surface, best_walk)
    notes = []
    try:
        bound = homology_systole_z2(surface).length
    except TrivialHomology:
        bound = math.inf
    within = best_len <= bound * (1 + 1e-9)
    if not within:
        notes.append("homotopy systole exceeds the Z2 homology systole")
    verified = not is_contractible(surface, cycle)
    if not verified:
        notes.append("representative failed the cover contractibility test")
    return SystoleResult(cycle.length, cycle, "homotopy", within and verified, bound, tuple(notes))


def systole_length(surface: Surface) -> float:
    """Edge-graph homotopy systole length, by the cheapest exact route.

    On the torus and the projective plane a shortest noncontractible loop is
    simple and therefore carries a nonzero Z2 class, so the Z2 systole is the
    homotopy systole there.  Other surfaces use the full search.
    """
    chi = surface.euler_characteristic
    if (chi == 0 and surface.orientable) or chi == 1:
        return homology_systole_z2(surface).length
    _check_not_simply_connected(surface)
    index = _EdgeIndex(surface)
    face_edge = _face_edge_map(surface)
    V = surface.n_vertices
    return min(length for i in range(0, V, 64)
               for length, _ in _systole_batch(surface, range(i, min(V, i + 64)), index, face_edge))


def homology_systole_z2(surface: Surface) -> SystoleResult:
    """Shortest closed walk with nonzero Z2 homology class."""
    b1 = 2 - surface.euler_characteristic
    if b1 == 0:
        raise TrivialHomology("first Z2 Betti number is zero")
    if b1 > MAX_Z2_RANK:
        raise ResourceLimit(f"Z2 state space needs b1 <= {MAX_Z2_RANK}, got {b1}")
    labels, _ = z2_cocycles(surface)
    C = 1 << b1
    V = surface.n_vertices
    ea, eb = surface.edges[:, 0].astype(np.int64), surface.edges[:, 1].astype(np.int64)
    w = surface.edge_length
    cls = np.arange(C, dtype=np.int64)
    src = (ea[:, None] * C + cls[None, :]).ravel()
    dst = (eb[:, None] * C + (cls[None, :] ^ labels[:, None])).ravel()
    ww = np.repeat(w, C)
    G = csr_matrix((np.concatenate([ww, ww]), (np.concatenate([src, dst]), np.concatenate([dst, src]))),
                   shape=(V * C, V * C))
    sources = np.unique(np.concatenate([ea[labels != 0], eb[labels != 0]]))
    best = (math.inf, -1, -1)
    pred_best = None
    for i in range(0, len(sources), 64):
        chunk = sources[i:i + 64]
        lim = best[0] * (1 + 1e-9) if math.isfinite(best[0]) else np.inf
        dist, pred = dijkstra(G, directed=False, indices=chunk * C, limit=lim, return_predecessors=True)
        dist = np.atleast_2d(dist)
        pred = np.atleast_2d(pred)
        for r, s in enumerate(chunk):
            ends = dist[r, s * C + 1: s * C + C]
            c = int(np.argmin(ends))
            if ends[c] < best[0] * (1 - 1e-12):
                best = (float(ends[c]), int(s), c + 1)
                pred_best = pred[r].copy()
    length, s, c = best
    states = _path(pred_best, s * C, s * C + c)
    walk = [int(x) // C for x in states]
    cycle = Cycle.from_walk(surface, walk)
    if cycle_z2_class(surface, cycle, labels) == 0:
        raise RuntimeError("Z2 systole representative has trivial class")
    return SystoleResult(cycle.length, cycle, "homology-z2", True, cycle.length)


__all__ = [
    "CoverRegion", "SystoleResult", "develop", "is_contractible", "homotopy_systole",
    "homology_systole_z2", "loop_class_count", "lift_distances", "homotopy_systole_at",
]
