"""Developing chart for orientable flat surfaces (flat tori).

With no cone points and trivial orientation character the developing map sends
the universal cover isometrically onto the plane, and the deck group acts by
translations.  Every directed edge then carries a well-defined displacement
vector, vertex positions come from integrating along a spanning tree, and the
translation lattice is spanned by the holonomies of the tree-cotree loops.
"""

from __future__ import annotations

import math
from collections import deque
from functools import lru_cache

import numpy as np

from .errors import InputError
from .surface import BallRegion, Surface, tree_cotree


def _circle_piece(px, py, qx, qy, r):
    """Signed area of the disk (origin, r) intersected with triangle (0, P, Q)."""
    dx, dy = qx - px, qy - py
    a = dx * dx + dy * dy
    b = 2.0 * (px * dx + py * dy)
    c = px * px + py * py - r * r
    disc = b * b - 4.0 * a * c
    safe_a = np.where(a > 0, a, 1.0)
    s = np.sqrt(np.maximum(disc, 0.0))
    t1 = np.clip((-b - s) / (2.0 * safe_a), 0.0, 1.0)
    t2 = np.clip((-b + s) / (2.0 * safe_a), 0.0, 1.0)
    hit = (disc > 0) & (a > 0)
    t1 = np.where(hit, t1, 1.0)
    t2 = np.where(hit, t2, 1.0)
    x1, y1 = px + t1 * dx, py + t1 * dy
    x2, y2 = px + t2 * dx, py + t2 * dy

    def sector(ax, ay, bx, by):
        return 0.5 * r * r * np.arctan2(ax * by - ay * bx, ax * bx + ay * by)

    inner = 0.5 * (x1 * y2 - y1 * x2)
    return sector(px, py, x1, y1) + inner + sector(x2, y2, qx, qy)


def disk_triangle_area(center, radius, tri) -> np.ndarray:
    """Exact area of disk ∩ triangle, vectorized.

    ``center`` has shape (..., 2), ``tri`` shape (..., 3, 2); broadcasting
    applies between them.
    """
    center = np.asarray(center, dtype=float)
    tri = np.asarray(tri, dtype=float)
    rel = tri - center[..., None, :]
    r = np.asarray(radius, dtype=float)
    if np.all(r <= 0):
        return np.zeros(np.broadcast_shapes(rel.shape[:-2]))
    total = 0.0
    for i in range(3):
        p = rel[..., i, :]
        q = rel[..., (i + 1) % 3, :]
        total = total + _circle_piece(p[..., 0], p[..., 1], q[..., 0], q[..., 1], r)
    return np.abs(total)


class FlatChart:
    def __init__(self, surface: Surface):
        if not surface.orientable or not surface.is_flat():
            raise InputError("flat chart needs an orientable surface without cone points")
        self.surface = surface
        tri = surface.triangles
        L = surface.lengths
        F = surface.n_faces
        # place faces along a dual spanning tree; record per-face corner positions
        place = np.full((F, 3, 2), np.nan)
        place[0] = _lay_triangle(L[0])
        seen = np.zeros(F, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            f = queue.popleft()
            for k in range(3):
                e = surface.tri_edges[f, k]
                g0, g1 = surface.edge_tris[e]
                g = int(g1 if g0 == f else g0)
                if seen[g]:
                    continue
                a, b = tri[f, (k + 1) % 3], tri[f, (k + 2) % 3]
                pa, pb = place[f, (k + 1) % 3], place[f, (k + 2) % 3]
                place[g] = _attach(tri[g], L[g], a, b, pa, pb, place[f, k])
                seen[g] = True
                queue.append(g)
        self.face_pos = place
        # displacement of each directed edge a->b with a < b (chart independent)
        E = surface.n_edges
        disp = np.full((E, 2), np.nan)
        for f in range(F):
            for k in range(3):
                e = surface.tri_edges[f, k]
                if not np.isnan(disp[e, 0]):
                    continue
                i, j = (k + 1) % 3, (k + 2) % 3
                a, b = tri[f, i], tri[f, j]
                d = place[f, j] - place[f, i]
                disp[e] = d if a < b else -d
        self.edge_disp = disp
        # vertex positions by integrating along a BFS tree
        in_tree, _, leftover = tree_cotree(surface)
        nbrs, _ = surface.links
        V = surface.n_vertices
        pos = np.full((V, 2), np.nan)
        pos[0] = 0.0
        seen_v = np.zeros(V, dtype=bool)
        seen_v[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                e = surface.edge_between(u, w)
                if not seen_v[w] and in_tree[e]:
                    seen_v[w] = True
                    pos[w] = pos[u] + self.disp(u, w)
                    queue.append(w)
        self.pos = pos
        hol = []
        for x in leftover:
            a, b = surface.edges[x]
            hol.append(pos[a] + self.disp(int(a), int(b)) - pos[b])
        if len(hol) != 2:
            raise InputError("flat chart expects a torus")
        basis = np.array(hol)
        area = abs(np.linalg.det(basis))
        if abs(area - surface.total_area) > 1e-7 * max(1.0, surface.total_area):
            raise InputError("holonomy lattice does not match the surface area; metric is not flat")
        from .lattice import FlatTorus, reduce_basis
        self.torus = reduce_basis(FlatTorus(basis))
        self.basis = self.torus.basis
        self._inv = np.linalg.inv(self.basis)
        self._area_memo: dict[float, tuple[float, float]] = {}

    def disp(self, a: int, b: int) -> np.ndarray:
        e = self.surface.edge_between(a, b)
        d = self.edge_disp[e]
        return d if a < b else -d

    @property
    def systole(self) -> float:
        from .lattice import shortest_vector
        return shortest_vector(self.torus).norm

    def lattice_points(self, radius: float) -> np.ndarray:
        from .lattice import lattice_vectors_within
        return lattice_vectors_within(self.torus, radius)

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        """Shortest representative of each vector modulo the lattice."""
        vec = np.atleast_2d(vec)
        coef = np.rint(vec @ self._inv)
        base = vec - coef @ self.basis
        offs = np.array([(i, j) for i in range(-2, 3) for j in range(-2, 3)], dtype=float) @ self.basis
        cand = base[:, None, :] + offs[None, :, :]
        k = np.argmin(np.einsum("ijk,ijk->ij", cand, cand), axis=1)
        return cand[np.arange(len(vec)), k]

    def distances(self, v: int) -> np.ndarray:
        d = self.reduce(self.pos - self.pos[v])
        return np.hypot(d[:, 0], d[:, 1])

    def _pieces(self, v: int, R: float):
        """Per-face disk pieces for every lattice translate within reach."""
        c = self.pos[v]
        fp = self.face_pos
        cent = fp.mean(axis=1)
        rad = np.max(np.linalg.norm(fp - cent[:, None, :], axis=2), axis=1)
        shift = self.reduce(cent - c) - (cent - c)  # moves each face near the center
        local = fp + shift[:, None, :] - c
        reach = float(np.linalg.norm(cent + shift - c, axis=1).max())
        lat = self.lattice_points(R + float(rad.max()) + reach + 1e-9)
        pieces = np.zeros((len(fp), len(lat)))
        for j, lv in enumerate(lat):
            tri = local + lv
            near = np.linalg.norm(cent + shift - c + lv, axis=1) <= R + rad + 1e-12
            if np.any(near):
                pieces[near, j] = disk_triangle_area(np.zeros(2), R, tri[near])
        return pieces

    def ball(self, v: int, R: float) -> BallRegion:
        d = self.distances(v)
        verts = np.flatnonzero(d <= R + 1e-12 * max(1.0, R))
        if R <= 0:
            return BallRegion(int(v), float(R), verts, 0.0, 0.0, "flat")
        lower, upper = self.area_bounds(float(R))
        return BallRegion(int(v), float(R), verts, lower, upper, "flat")

    def area_bounds(self, R: float) -> tuple[float, float]:
        """Area interval of a geodesic ball of radius R.

        Translations act transitively by isometries, so the area does not
        depend on the center; it is evaluated about vertex 0 and memoized.
        """
        hit = self._area_memo.get(R)
        if hit is None:
            hit = self._area_bounds_at(0, R)
            self._area_memo[R] = hit
        return hit

    def _area_bounds_at(self, v: int, R: float) -> tuple[float, float]:
        areas = self.surface.face_areas
        pieces = self._pieces(v, R)
        total = float(math.fsum(pieces.sum(axis=1)))
        if 2 * R <= self.systole * (1 + 1e-9):
            # translates of the disk are disjoint, so the pieces tile the ball
            val = min(total, self.surface.total_area)
            return val, val
        lower = float(math.fsum(np.minimum(pieces.max(axis=1), areas)))
        upper = float(math.fsum(np.minimum(pieces.sum(axis=1), areas)))
        return lower, upper

    def ball_areas(self, v: int, radii) -> np.ndarray:
        """Exact areas for radii not exceeding half the systole."""
        radii = np.asarray(radii, dtype=float)
        out = np.empty(len(radii))
        for i, R in enumerate(radii):
            b = self.ball(v, float(R))
            out[i] = b.lower if b.lower == b.upper else np.nan
        return out


def _lay_triangle(lens: np.ndarray) -> np.ndarray:
    """Corner positions for a triangle with opposite-edge lengths ``lens``."""
    la, lb, lc = lens
    p0 = np.array([0.0, 0.0])
    p1 = np.array([lc, 0.0])
    x = (lb * lb + lc * lc - la * la) / (2 * lc)
    y = math.sqrt(max(lb * lb - x * x, 0.0))
    return np.array([p0, p1, [x, y]])


def _attach(tri_g, lens_g, a, b, pa, pb, p_opp):
    """Place triangle g across edge (a, b), on the side away from ``p_opp``."""
    tri_g = list(tri_g)
    ia, ib = tri_g.index(a), tri_g.index(b)
    ic = 3 - ia - ib
    dab = np.linalg.norm(pb - pa)
    la = lens_g[ib]  # |a c| is opposite corner b
    lb = lens_g[ia]  # |b c| is opposite corner a
    x = (la * la + dab * dab - lb * lb) / (2 * dab)
    y = math.sqrt(max(la * la - x * x, 0.0))
    ux = (pb - pa) / dab
    uy = np.array([-ux[1], ux[0]])
    side = np.sign(np.dot(p_opp - pa, uy)) or 1.0
    pc = pa + x * ux - side * y * uy
    out = np.empty((3, 2))
    out[ia], out[ib], out[ic] = pa, pb, pc
    return out


@lru_cache(maxsize=32)
def _chart_cached(surface: Surface) -> FlatChart:
    return FlatChart(surface)


def flat_chart(surface: Surface) -> FlatChart:
    return _chart_cached(surface)
