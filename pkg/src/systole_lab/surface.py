"""Closed triangulated surfaces carrying piecewise-flat metrics.

A surface is a list of vertex triples plus, for every triangle, the lengths of
the edges opposite its three corners.  Validation canonicalizes the metric to
one length per edge; after that the object is treated as immutable and derived
structures (edge tables, vertex links, the weighted edge graph) are cached.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DegenerateTriangle, InputError, ResourceLimit, ValidationError

LENGTH_TOL = 1e-9
CONSERVATION_TOL = 1e-12
DEFAULT_MAX_FACES = 2_000_000


def heron_areas(lengths: np.ndarray) -> np.ndarray:
    """Triangle areas from side lengths, raising DegenerateTriangle on flat or
    impossible triangles."""
    lengths = np.atleast_2d(np.asarray(lengths, dtype=float))
    a, b, c = lengths[:, 0], lengths[:, 1], lengths[:, 2]
    # stable form of Heron's formula (sides sorted descending)
    s = -np.sort(-lengths, axis=1)
    x, y, z = s[:, 0], s[:, 1], s[:, 2]
    q = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    scale = np.maximum(a + b + c, 1e-300) ** 4
    bad = q <= 1e-14 * scale
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangle(f"triangle {i} with sides {tuple(float(x) for x in lengths[i])} has no positive area")
    return 0.25 * np.sqrt(q)


def corner_angles(lengths: np.ndarray) -> np.ndarray:
    """Interior angle at each corner (same layout as the opposite-edge lengths)."""
    lengths = np.asarray(lengths, dtype=float)
    out = np.empty_like(lengths)
    for i in range(3):
        a = lengths[:, i]
        b = lengths[:, (i + 1) % 3]
        c = lengths[:, (i + 2) % 3]
        cos = (b * b + c * c - a * a) / (2.0 * b * c)
        out[:, i] = np.arccos(np.clip(cos, -1.0, 1.0))
    return out


@dataclass(frozen=True)
class BallRegion:
    center: int
    radius: float
    vertices: np.ndarray
    lower: float
    upper: float
    metric: str = "graph"

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ValueError("ball area bounds out of order")


@dataclass
class Cycle:
    """Closed edge walk; ``vertices[0] == vertices[-1]``."""

    vertices: list[int]
    length: float = 0.0

    @classmethod
    def from_walk(cls, surface: "Surface", walk: Sequence[int]) -> "Cycle":
        walk = [int(x) for x in walk]
        if not walk:
            raise InputError("empty walk")
        if walk[0] != walk[-1]:
            raise InputError("walk is not closed")
        total = 0.0
        for a, b in zip(walk[:-1], walk[1:]):
            total += surface.edge_length_between(a, b)
        return cls(walk, total)


class Surface:
    """Validated closed surface; build through :func:`validate_surface`."""

    def __init__(self, triangles: np.ndarray, edge_lengths: np.ndarray, edges: np.ndarray,
                 tri_edges: np.ndarray, edge_tris: np.ndarray, n_vertices: int):
        self.triangles = triangles
        self.edges = edges
        self.edge_length = edge_lengths
        self.tri_edges = tri_edges
        self.edge_tris = edge_tris
        self.n_vertices = n_vertices
        self.lengths = edge_lengths[tri_edges]
        for arr in (self.triangles, self.edges, self.edge_length, self.tri_edges,
                    self.edge_tris, self.lengths):
            arr.setflags(write=False)

    # basic counts ------------------------------------------------------
    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Surface(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"

    # lookups -----------------------------------------------------------
    @cached_property
    def edge_id(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}

    def edge_between(self, a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        try:
            return self.edge_id[key]
        except KeyError:
            raise InputError(f"vertices {a} and {b} are not joined by an edge") from None

    def edge_length_between(self, a: int, b: int) -> float:
        return float(self.edge_length[self.edge_between(a, b)])

    @cached_property
    def links(self) -> tuple[list[list[int]], list[list[int]]]:
        """Cyclic vertex links.

        Returns ``(nbrs, faces)`` where ``nbrs[u]`` lists the neighbours of u in
        cyclic order and ``faces[u][i]`` is the triangle spanned by u,
        ``nbrs[u][i]`` and ``nbrs[u][i+1]``.
        """
        return _vertex_links(self.triangles, self.n_vertices)

    @cached_property
    def slot_of(self) -> list[dict[int, int]]:
        nbrs, _ = self.links
        return [{w: i for i, w in enumerate(row)} for row in nbrs]

    @cached_property
    def graph(self) -> csr_matrix:
        n = self.n_vertices
        a, b = self.edges[:, 0], self.edges[:, 1]
        w = self.edge_length
        return csr_matrix((np.concatenate([w, w]), (np.concatenate([a, b]), np.concatenate([b, a]))),
                          shape=(n, n))

    @cached_property
    def face_areas(self) -> np.ndarray:
        out = heron_areas(self.lengths)
        out.setflags(write=False)
        return out

    @cached_property
    def total_area(self) -> float:
        return float(math.fsum(self.face_areas))

    @cached_property
    def max_edge(self) -> float:
        return float(self.edge_length.max())

    @cached_property
    def angle_sums(self) -> np.ndarray:
        ang = corner_angles(self.lengths)
        out = np.zeros(self.n_vertices)
        np.add.at(out, self.triangles.ravel(), ang.ravel())
        return out

    def is_flat(self, tol: float = 1e-9) -> bool:
        """True when every vertex has total angle 2*pi (no cone points)."""
        return bool(np.all(np.abs(self.angle_sums - 2 * math.pi) <= tol))

    @cached_property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @cached_property
    def orientable(self) -> bool:
        return _orientation(self.triangles, self.edge_tris, self.tri_edges) is not None

    def with_edge_lengths(self, edge_lengths: np.ndarray) -> "Surface":
        """Same triangulation with new per-edge lengths (strict triangle inequality checked)."""
        L = np.array(edge_lengths, dtype=float)
        if L.shape != self.edge_length.shape or not np.all(np.isfinite(L)) or np.any(L <= 0):
            raise ValidationError([("TriangleInequality", "edge lengths must be positive and finite")])
        T = np.sort(L[self.tri_edges], axis=1)
        bad = np.flatnonzero(~(T[:, 2] < T[:, 0] + T[:, 1] - 1e-12 * T[:, 2]))
        if len(bad):
            raise ValidationError([("TriangleInequality", f"triangle {int(f)} violates strict inequality")
                                   for f in bad[:5]])
        out = Surface(self.triangles, L, self.edges, self.tri_edges, self.edge_tris, self.n_vertices)
        for name in ("edge_id", "links", "slot_of", "euler_characteristic", "orientable"):
            if name in self.__dict__:
                out.__dict__[name] = self.__dict__[name]
        return out

    def to_json_obj(self) -> dict:
        return {"triangles": self.triangles.tolist(), "lengths": self.lengths.tolist()}

    def fingerprint(self) -> str:
        import hashlib
        payload = json.dumps({"t": self.triangles.tolist(),
                              "l": [float(f"{x:.12g}") for x in self.edge_length]},
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:24]

    # distances ---------------------------------------------------------
    def graph_distances(self, v: int | Sequence[int], limit: float = np.inf) -> np.ndarray:
        """Edge-graph distances from one vertex (1-D result) or several (2-D)."""
        return dijkstra(self.graph, directed=False, indices=v, limit=limit)

    def shortest_path(self, a: int, b: int) -> list[int]:
        _, pred = dijkstra(self.graph, directed=False, indices=a, return_predecessors=True)
        if a != b and pred[b] < 0:
            raise InputError(f"no path from {a} to {b}")
        path = [b]
        while path[-1] != a:
            path.append(int(pred[path[-1]]))
        return path[::-1]


def _vertex_links(triangles: np.ndarray, n: int) -> tuple[list[list[int]], list[list[int]]]:
    incident: list[list[int]] = [[] for _ in range(n)]
    for f, tri in enumerate(triangles.tolist()):
        for u in tri:
            incident[u].append(f)
    nbrs: list[list[int]] = []
    faces: list[list[int]] = []
    for u in range(n):
        adj: dict[int, list[tuple[int, int]]] = {}
        for f in incident[u]:
            tri = triangles[f].tolist()
            i = tri.index(u)
            p, q = tri[(i + 1) % 3], tri[(i + 2) % 3]
            adj.setdefault(p, []).append((q, f))
            adj.setdefault(q, []).append((p, f))
        start = min(adj)
        order = [start]
        order_faces = []
        prev = None
        cur = start
        # walk the link cycle, leaving the start toward its smaller neighbour
        nxt_choices = sorted(adj[start])
        nxt, f = nxt_choices[0]
        while True:
            order_faces.append(f)
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
            options = [(w, g) for w, g in adj[cur] if g != f]
            nxt, f = options[0]
        nbrs.append(order)
        faces.append(order_faces)
    return nbrs, faces


def _orientation(triangles: np.ndarray, edge_tris: np.ndarray, tri_edges: np.ndarray):
    """Propagate a coherent orientation; returns per-face flips or None."""
    F = len(triangles)
    flip = np.full(F, -1, dtype=int)
    flip[0] = 0
    queue = deque([0])

    def directed(f: int, e_a: int, e_b: int, fl: int) -> bool:
        tri = triangles[f].tolist()
        if fl:
            tri = tri[::-1]
        i = tri.index(e_a)
        return tri[(i + 1) % 3] == e_b

    while queue:
        f = queue.popleft()
        tri = triangles[f].tolist()
        for k in range(3):
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            e = tri_edges[f, k]
            g = int(edge_tris[e, 0] if edge_tris[e, 1] == f else edge_tris[e, 1])
            same_dir_f = directed(f, a, b, flip[f])
            # g must traverse a->b in the opposite direction
            want = None
            for fl in (0, 1):
                if directed(g, a, b, fl) != same_dir_f:
                    want = fl
                    break
            if flip[g] < 0:
                flip[g] = want
                queue.append(g)
            elif flip[g] != want:
                return None
    return flip


def validate_surface(triangles: Iterable, lengths: Iterable) -> Surface:
    """Check a closed triangulated surface with per-triangle edge lengths.

    ``lengths[f][i]`` is the length of the edge of triangle ``f`` opposite its
    i-th corner.  All violations are collected and raised together in a
    :class:`ValidationError`; on success the canonical surface is returned with
    one averaged length per edge.
    """
    try:
        tri = np.asarray(triangles, dtype=float)
        lens = np.asarray(lengths, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"triangles/lengths are not numeric arrays: {exc}") from None
    if tri.ndim != 2 or tri.shape[1] != 3 or len(tri) == 0:
        raise InputError("triangles must be a nonempty list of vertex triples")
    if lens.shape != tri.shape:
        raise InputError("lengths must hold one triple per triangle")
    if not np.all(np.isfinite(tri)) or np.any(tri != np.round(tri)) or np.any(tri < 0):
        raise InputError("vertex ids must be nonnegative integers")
    if not np.all(np.isfinite(lens)):
        raise InputError("lengths must be finite")
    tri = tri.astype(np.int64)
    violations: list[tuple[str, str]] = []

    if np.any(lens <= 0):
        violations.append(("TriangleInequality", "nonpositive edge length"))

    n = int(tri.max()) + 1
    used = np.zeros(n, dtype=bool)
    used[tri.ravel()] = True
    for u in np.flatnonzero(~used)[:3]:
        violations.append(("Disconnected", f"vertex id {int(u)} is not used by any triangle"))

    for f, (a, b, c) in enumerate(tri.tolist()):
        if a == b or b == c or a == c:
            violations.append(("NotSimplicial", f"triangle {f} repeats a vertex"))
    keys = [tuple(sorted(t)) for t in tri.tolist()]
    if len(set(keys)) != len(keys):
        violations.append(("NotSimplicial", "a vertex triple appears twice"))
    if any(kind == "NotSimplicial" for kind, _ in violations):
        raise ValidationError(violations)

    # edges: edge opposite corner i joins corners i+1, i+2
    edge_map: dict[tuple[int, int], int] = {}
    tri_edges = np.empty_like(tri)
    occurrences: list[list[tuple[int, int]]] = []
    for f, t in enumerate(tri.tolist()):
        for i in range(3):
            a, b = t[(i + 1) % 3], t[(i + 2) % 3]
            key = (a, b) if a < b else (b, a)
            e = edge_map.get(key)
            if e is None:
                e = len(occurrences)
                edge_map[key] = e
                occurrences.append([])
            occurrences[e].append((f, i))
            tri_edges[f, i] = e
    edges = np.array(sorted(edge_map, key=edge_map.get), dtype=np.int64)
    closed = True
    for e, occ in enumerate(occurrences):
        if len(occ) != 2:
            closed = False
            violations.append(("NotClosed", f"edge {tuple(int(x) for x in edges[e])} lies in {len(occ)} triangle(s)"))
    edge_len = np.empty(len(edges))
    for e, occ in enumerate(occurrences):
        vals = [lens[f, i] for f, i in occ]
        edge_len[e] = float(np.mean(vals))
        if max(vals) - min(vals) > LENGTH_TOL * max(1.0, max(vals)):
            violations.append(("EdgeLengthMismatch",
                               f"edge {tuple(int(x) for x in edges[e])} has lengths {', '.join(f'{v:.12g}' for v in vals)}"))

    for f in range(len(tri)):
        a, b, c = sorted(lens[f])
        if a > 0 and not (c < a + b - 1e-12 * c):
            violations.append(("TriangleInequality", f"triangle {f} sides {tuple(float(x) for x in lens[f])} violate strict inequality"))

    # strong connectivity through shared edges
    if closed:
        adj = [[] for _ in range(len(tri))]
        for occ in occurrences:
            (f, _), (g, _) = occ
            adj[f].append(g)
            adj[g].append(f)
        seen = np.zeros(len(tri), dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            f = queue.popleft()
            for g in adj[f]:
                if not seen[g]:
                    seen[g] = True
                    queue.append(g)
        if not seen.all():
            violations.append(("Disconnected", f"{int((~seen).sum())} triangle(s) unreachable from triangle 0"))

        # every vertex link must be a single cycle
        link_adj: list[dict[int, int]] = [dict() for _ in range(n)]
        link_deg_bad = set()
        for t in tri.tolist():
            for i in range(3):
                u, p, q = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
                d = link_adj[u]
                d[p] = d.get(p, 0) + 1
                d[q] = d.get(q, 0) + 1
        for u in range(n):
            if not used[u]:
                continue
            d = link_adj[u]
            if any(cnt != 2 for cnt in d.values()):
                link_deg_bad.add(u)
        pairs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for t in tri.tolist():
            for i in range(3):
                pairs[t[i]].append((t[(i + 1) % 3], t[(i + 2) % 3]))
        for u in range(n):
            if not used[u]:
                continue
            if u in link_deg_bad:
                violations.append(("NonManifoldVertex", f"link of vertex {u} is not a cycle"))
                continue
            nb: dict[int, list[int]] = {}
            for p, q in pairs[u]:
                nb.setdefault(p, []).append(q)
                nb.setdefault(q, []).append(p)
            start = next(iter(nb))
            seen_l = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in nb[x]:
                    if y not in seen_l:
                        seen_l.add(y)
                        stack.append(y)
            if len(seen_l) != len(nb):
                violations.append(("NonManifoldVertex", f"link of vertex {u} has several components"))

    if violations:
        raise ValidationError(violations)

    edge_tris = np.array([[occ[0][0], occ[1][0]] for occ in occurrences], dtype=np.int64)
    surf = Surface(tri, edge_len, edges, tri_edges, edge_tris, n)
    heron_areas(surf.lengths)  # degenerate triangles are rejected here
    return surf


def surface_from_json(obj) -> Surface:
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "triangles" not in obj or "lengths" not in obj:
        raise InputError('surface JSON needs "triangles" and "lengths"')
    return validate_surface(obj["triangles"], obj["lengths"])


def euler_genus(surface: Surface) -> tuple[int, int, bool]:
    """(Euler characteristic, genus, orientable).

    Genus is the number of handles for orientable surfaces and the number of
    cross-caps otherwise.
    """
    chi = surface.euler_characteristic
    orientable = surface.orientable
    genus = (2 - chi) // 2 if orientable else 2 - chi
    return chi, genus, orientable


def betti_z2(surface: Surface) -> tuple[int, int, int]:
    chi = surface.euler_characteristic
    return 1, 2 - chi, 1


def area(surface: Surface) -> float:
    """Sum of Heron areas."""
    return surface.total_area


def subdivide(surface: Surface, k: int, max_faces: int = DEFAULT_MAX_FACES) -> Surface:
    """k rounds of midpoint 4-to-1 subdivision."""
    if k < 0:
        raise InputError("subdivision depth must be nonnegative")
    if surface.n_faces * 4 ** k > max_faces:
        raise ResourceLimit(f"{surface.n_faces * 4 ** k} faces would exceed the cap of {max_faces}")
    s = surface
    for _ in range(k):
        s = _subdivide_once(s)
    return s


def _subdivide_once(s: Surface) -> Surface:
    V = s.n_vertices
    tri = s.triangles
    L = s.lengths
    mid = V + s.tri_edges  # midpoint of the edge opposite each corner
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ma, mb, mc = mid[:, 0], mid[:, 1], mid[:, 2]
    la, lb, lc = L[:, 0] / 2, L[:, 1] / 2, L[:, 2] / 2
    new_tri = np.concatenate([
        np.stack([a, mc, mb], 1),
        np.stack([b, ma, mc], 1),
        np.stack([c, mb, ma], 1),
        np.stack([ma, mb, mc], 1),
    ])
    new_len = np.concatenate([
        np.stack([la, lb, lc], 1),
        np.stack([lb, lc, la], 1),
        np.stack([lc, la, lb], 1),
        np.stack([la, lb, lc], 1),
    ])
    # interleave so the four children of a face stay adjacent
    F = len(tri)
    order = np.arange(4 * F).reshape(4, F).T.ravel()
    return validate_surface(new_tri[order], new_len[order])


def ball(surface: Surface, v: int, R: float, metric: str = "auto") -> BallRegion:
    """Ball of radius R about vertex v with an area interval.

    ``metric='graph'`` uses edge-graph distances and the inner/outer triangle
    sums.  ``metric='flat'`` (surfaces without cone points) uses true geodesic
    distances from the flat chart and exact disk/triangle intersection areas.
    ``'auto'`` picks flat when the surface is an orientable flat surface.
    """
    if R < 0:
        raise InputError("radius must be nonnegative")
    if not 0 <= v < surface.n_vertices:
        raise InputError(f"vertex {v} out of range")
    metric = resolve_metric(surface, metric)
    if metric == "flat":
        from .chart import flat_chart
        return flat_chart(surface).ball(v, R)
    d = surface.graph_distances(v, limit=R * (1 + 1e-12) + 1e-12)
    return ball_from_distances(surface, v, R, d)


def ball_from_distances(surface: Surface, v: int, R: float, d: np.ndarray) -> BallRegion:
    tol = 1e-12 * max(1.0, R)
    inside = d <= R + tol
    verts = np.flatnonzero(inside)
    tri_in = inside[surface.triangles]
    areas = surface.face_areas
    lower = float(math.fsum(areas[tri_in.all(axis=1)]))
    upper = float(math.fsum(areas[tri_in.any(axis=1)]))
    return BallRegion(int(v), float(R), verts, lower, upper, "graph")


def resolve_metric(surface: Surface, metric: str) -> str:
    if metric not in ("auto", "graph", "flat"):
        raise InputError(f"unknown metric {metric!r}")
    if metric == "auto":
        return "flat" if (surface.orientable and surface.is_flat()) else "graph"
    if metric == "flat" and not (surface.orientable and surface.is_flat()):
        raise InputError("flat metric needs an orientable surface without cone points")
    return metric


def tree_cotree(surface: Surface, root: int = 0, tree_pred: np.ndarray | None = None):
    """Tree-cotree split of the edges.

    Returns ``(in_tree, in_cotree, leftover)``: boolean masks for a primal
    spanning tree and a dual spanning tree of the remaining edges, plus the
    ids of the 2 - chi leftover edges.  ``tree_pred`` may supply a predecessor
    array (e.g. a shortest-path tree) to use as the primal tree.
    """
    E = surface.n_edges
    in_tree = np.zeros(E, dtype=bool)
    if tree_pred is None:
        nbrs, _ = surface.links
        seen = np.zeros(surface.n_vertices, dtype=bool)
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if not seen[w]:
                    seen[w] = True
                    in_tree[surface.edge_between(u, w)] = True
                    queue.append(w)
    else:
        for w, p in enumerate(tree_pred):
            if p >= 0:
                in_tree[surface.edge_between(int(p), w)] = True
    in_cotree = np.zeros(E, dtype=bool)
    F = surface.n_faces
    seen_f = np.zeros(F, dtype=bool)
    seen_f[0] = True
    queue = deque([0])
    tri_edges = surface.tri_edges
    edge_tris = surface.edge_tris
    while queue:
        f = queue.popleft()
        for e in tri_edges[f]:
            if in_tree[e]:
                continue
            g0, g1 = edge_tris[e]
            g = g1 if g0 == f else g0
            if not seen_f[g]:
                seen_f[g] = True
                in_cotree[e] = True
                queue.append(g)
    leftover = np.flatnonzero(~in_tree & ~in_cotree)
    return in_tree, in_cotree, [int(e) for e in leftover]


def z2_cocycles(surface: Surface) -> tuple[np.ndarray, list[int]]:
    """Basis of Z2 edge cocycles dual to the tree-cotree leftover edges.

    Returns ``(labels, leftover)`` where ``labels[e]`` is a bitmask: bit i is
    set iff the dual of edge e lies on the dual cycle closed by leftover edge
    i.  Each bit is a cocycle (every face boundary meets it evenly), and bit i
    evaluates to 1 on the tree loop of leftover edge j exactly when i == j.
    """
    in_tree, in_cotree, leftover = tree_cotree(surface)
    F = surface.n_faces
    parent = np.full(F, -1)
    parent_edge = np.full(F, -1)
    depth = np.zeros(F, dtype=int)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(F)]
    for e in np.flatnonzero(in_cotree):
        f, g = surface.edge_tris[e]
        adj[f].append((g, e))
        adj[g].append((f, e))
    seen = np.zeros(F, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for g, e in adj[f]:
            if not seen[g]:
                seen[g] = True
                parent[g] = f
                parent_edge[g] = e
                depth[g] = depth[f] + 1
                queue.append(g)
    labels = np.zeros(surface.n_edges, dtype=np.int64)
    for i, x in enumerate(leftover):
        labels[x] |= 1 << i
        f, g = surface.edge_tris[x]
        while f != g:
            if depth[f] < depth[g]:
                f, g = g, f
            labels[parent_edge[f]] |= 1 << i
            f = parent[f]
    return labels, leftover


def cycle_z2_class(surface: Surface, cycle: Cycle, labels: np.ndarray | None = None) -> int:
    if labels is None:
        labels, _ = z2_cocycles(surface)
    cls = 0
    w = cycle.vertices
    for a, b in zip(w[:-1], w[1:]):
        cls ^= int(labels[surface.edge_between(a, b)])
    return cls
