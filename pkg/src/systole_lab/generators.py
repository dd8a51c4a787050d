"""Builtin surfaces.

torus-square / torus-hex / torus-rect
    3 x 3 grids on a lattice fundamental domain, refined k times.
genus2-octagon
    regular flat octagon, opposite sides glued by translation (one cone point
    of total angle 6*pi).  The center/side-midpoint fan is a Delta-complex with
    multi-edges; one geometric midpoint round makes it simplicial.
rp2-icosa
    icosahedron on the unit sphere, refined k times by normalized midpoints,
    modulo the antipodal map; edge lengths are great-circle arcs.
sphere-tetra
    regular tetrahedron with unit edges.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InputError, UnknownGenerator
from .lattice import FlatTorus
from .surface import Surface, subdivide, validate_surface

HEX = np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2]])


def torus_grid(basis, n: int = 3, diagonal: str = "main", k: int = 0) -> Surface:
    """n x n grid triangulation of R^2 / (Z b1 + Z b2)."""
    B = np.asarray(basis, dtype=float)
    if n < 3:
        raise InputError("torus grids need n >= 3 to be simplicial")

    def vid(i, j):
        return (i % n) + n * (j % n)

    def pt(i, j):
        return (i * B[0] + j * B[1]) / n

    tris, lens = [], []
    for j in range(n):
        for i in range(n):
            if diagonal == "main":
                cells = [((i, j), (i + 1, j), (i + 1, j + 1)), ((i, j), (i + 1, j + 1), (i, j + 1))]
            elif diagonal == "anti":
                cells = [((i, j), (i + 1, j), (i, j + 1)), ((i + 1, j), (i + 1, j + 1), (i, j + 1))]
            else:
                raise InputError("diagonal must be 'main' or 'anti'")
            for c in cells:
                tris.append([vid(*p) for p in c])
                lens.append(_opposite_lengths([pt(*p) for p in c]))
    return subdivide(validate_surface(tris, lens), k)


def _opposite_lengths(pts) -> list[float]:
    p = [np.asarray(x, dtype=float) for x in pts]
    return [float(np.linalg.norm(p[(i + 2) % 3] - p[(i + 1) % 3])) for i in range(3)]


def torus_square(k: int = 0) -> Surface:
    return torus_grid(np.eye(2), 3, "main", k)


def torus_hex(k: int = 0) -> Surface:
    return torus_grid(HEX, 3, "anti", k)


def torus_rect(k: int = 0, width: float = 1.0, height: float = 2.0) -> Surface:
    if width <= 0 or height <= 0:
        raise InputError("rectangle sides must be positive")
    return torus_grid(np.diag([width, height]), 3, "main", k)


def sphere_tetra(k: int = 0) -> Surface:
    tris = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return subdivide(validate_surface(tris, [[1.0, 1.0, 1.0]] * 4), k)


def octagon_corners(side: float = 1.0) -> np.ndarray:
    R = side / (2 * math.sin(math.pi / 8))
    ang = [math.pi / 8 + i * math.pi / 4 for i in range(8)]
    return np.array([[R * math.cos(a), R * math.sin(a)] for a in ang])


def genus2_octagon(k: int = 0, side: float = 1.0) -> Surface:
    P = octagon_corners(side)
    C = np.zeros(2)
    faces = []
    for i in range(8):
        a, b = P[i], P[(i + 1) % 8]
        m = (a + b) / 2
        faces.append((C, a, m))
        faces.append((C, m, b))
    for _ in range(1):
        nxt = []
        for a, b, c in faces:
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = nxt

    def key(p):
        if np.min(np.linalg.norm(P - p, axis=1)) < 1e-9 * side:
            return ("cone",)
        for i in range(8):
            a, b = P[i], P[(i + 1) % 8]
            d = b - a
            t = float(np.dot(p - a, d) / np.dot(d, d))
            if -1e-12 < t < 1 + 1e-12 and np.linalg.norm(a + t * d - p) < 1e-9 * side:
                if i >= 4:
                    i, t = i - 4, 1 - t
                return ("side", i, round(t, 9))
        return ("in", round(float(p[0]) / side, 9), round(float(p[1]) / side, 9))

    ids: dict = {("cone",): 0}
    tris, lens = [], []
    for f in faces:
        row = []
        for p in f:
            kk = key(np.asarray(p))
            if kk not in ids:
                ids[kk] = len(ids)
            row.append(ids[kk])
        tris.append(row)
        lens.append(_opposite_lengths(f))
    return subdivide(validate_surface(tris, lens), k)


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    phi = (1 + math.sqrt(5)) / 2
    pts = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            pts += [(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)]
    X = np.array(pts, dtype=float)
    X /= np.linalg.norm(X, axis=1)[:, None]
    hull = ConvexHull(X)
    F = hull.simplices.copy()
    # orient outward
    for f in range(len(F)):
        a, b, c = X[F[f]]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
            F[f] = F[f][[0, 2, 1]]
    return X, F


def _sphere_refine(X: np.ndarray, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = [tuple(x) for x in X]
    mid: dict[tuple[int, int], int] = {}

    def m(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in mid:
            p = X[a] + X[b]
            p /= np.linalg.norm(p)
            mid[key] = len(pts)
            pts.append(tuple(p))
        return mid[key]

    out = []
    for a, b, c in F.tolist():
        ab, bc, ca = m(a, b), m(b, c), m(c, a)
        out += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return np.array(pts), np.array(out)


def rp2_icosa(k: int = 0) -> Surface:
    X, F = _icosahedron()
    for _ in range(k):
        X, F = _sphere_refine(X, F)
    # antipodal classes: representative is the point whose first nonzero coordinate is positive
    def canon(p):
        for x in p:
            if abs(x) > 1e-9:
                return p if x > 0 else -p
        return p

    ids: dict[tuple, int] = {}
    cls = np.empty(len(X), dtype=int)
    for i, p in enumerate(X):
        key = tuple(np.round(canon(p), 9) + 0.0)
        if key not in ids:
            ids[key] = len(ids)
        cls[i] = ids[key]
    seen = set()
    tris, lens = [], []
    for f in F.tolist():
        q = tuple(sorted(cls[f]))
        if q in seen:
            continue
        seen.add(q)
        tris.append([int(cls[v]) for v in f])
        a, b, c = (X[v] for v in f)
        arc = lambda u, w: float(math.acos(max(-1.0, min(1.0, float(np.dot(u, w))))))
        lens.append([arc(b, c), arc(c, a), arc(a, b)])
    return validate_surface(tris, lens)


GENERATORS = {
    "torus-square": torus_square,
    "torus-hex": torus_hex,
    "torus-rect": torus_rect,
    "genus2-octagon": genus2_octagon,
    "rp2-icosa": rp2_icosa,
    "sphere-tetra": sphere_tetra,
}

MODEL_TORI = {
    "torus-square": lambda **kw: FlatTorus(np.eye(2)),
    "torus-hex": lambda **kw: FlatTorus(HEX),
    "torus-rect": lambda width=1.0, height=2.0, **kw: FlatTorus(np.diag([width, height])),
}


def generate(name: str, k: int = 0, **params) -> Surface:
    if name not in GENERATORS:
        raise UnknownGenerator(f"unknown generator {name!r}; choose from {', '.join(sorted(GENERATORS))}")
    if not isinstance(k, int) or k < 0:
        raise InputError("subdivision k must be a nonnegative integer")
    try:
        return GENERATORS[name](k, **params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {name}: {exc}") from None


def model_torus(name: str, **params) -> FlatTorus | None:
    f = MODEL_TORI.get(name)
    return None if f is None else f(**params)
