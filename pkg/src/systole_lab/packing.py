"""Ball packings, Čech nerves and admissible balls.

Distances and ball areas follow the surface metric model: flat tori use
geodesic distances and exact disk areas, everything else the edge graph with
inner/outer triangle sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidAlpha, InvalidRadii, NoAdmissibleBall, RadiusTooLarge
from .surface import Surface, resolve_metric

DIM = 2
DEFAULT_Q = 8
DEFAULT_MAX_DIM = 4


@dataclass(frozen=True)
class BallSystem:
    surface: Surface
    centers: tuple[int, ...]
    radii: tuple[float, ...]
    metric: str
    kind: str = "greedy"
    notes: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.centers)

    def to_json_obj(self) -> dict:
        return {"balls": [{"center": c, "radius": r} for c, r in zip(self.centers, self.radii)],
                "kind": self.kind, "metric": self.metric}


@dataclass(frozen=True)
class NerveComplex:
    simplices: dict[int, tuple[tuple[int, ...], ...]]
    factor: float
    n_balls: int
    max_dim: int = DEFAULT_MAX_DIM

    @property
    def counts(self) -> list[int]:
        return [len(self.simplices.get(k, ())) for k in range(self.max_dim + 1)]

    def to_json_obj(self, system: BallSystem | None = None) -> dict:
        out = {"simplices": {str(k): n for k, n in enumerate(self.counts)}, "factor": self.factor}
        if system is not None:
            out["balls"] = system.to_json_obj()["balls"]
        return out


@dataclass(frozen=True)
class AdmissibilityReport:
    center: int
    R: float
    alpha: float
    r: float
    R0: float
    A_n: float
    condition1: bool
    condition1_values: tuple[float, float]
    condition2: list[tuple[float, bool, float, float]] = field(default_factory=list)
    m0: float = math.nan
    C_n: float = math.nan

    @property
    def admissible(self) -> bool:
        return self.condition1 and all(ok for _, ok, _, _ in self.condition2)

    def to_json_obj(self) -> dict:
        return {
            "center": self.center, "R": self.R, "alpha": self.alpha, "r": self.r, "R0": self.R0,
            "A_n": self.A_n, "admissible": self.admissible,
            "condition1": {"verdict": self.condition1, "outer_5R": self.condition1_values[0],
                           "alpha_inner_R": self.condition1_values[1]},
            "condition2": [{"R_prime": Rp, "verdict": ok, "inner_5R": a, "alpha_outer_R": b}
                           for Rp, ok, a, b in self.condition2],
            "m0": self.m0, "C_n": self.C_n,
        }


# distances and areas --------------------------------------------------------

def distance_rows(surface: Surface, centers, metric: str = "auto", limit: float = np.inf) -> np.ndarray:
    """Distances from each center to every vertex, one row per center."""
    metric = resolve_metric(surface, metric)
    centers = [int(c) for c in centers]
    if not centers:
        return np.zeros((0, surface.n_vertices))
    if metric == "flat":
        from .chart import flat_chart
        ch = flat_chart(surface)
        return np.array([ch.distances(c) for c in centers])
    return np.atleast_2d(surface.graph_distances(centers, limit=limit))


def area_bounds(surface: Surface, v: int, radii, metric: str = "auto",
                dist: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Inner and outer ball areas about v for several radii."""
    metric = resolve_metric(surface, metric)
    radii = np.asarray(radii, dtype=float)
    if metric == "flat":
        from .chart import flat_chart
        ch = flat_chart(surface)
        pairs = [ch.area_bounds(float(R)) if R > 0 else (0.0, 0.0) for R in radii]
        return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    if dist is None:
        dist = surface.graph_distances(int(v), limit=float(radii.max()) * (1 + 1e-12) + 1e-12)
    far = np.max(dist[surface.triangles], axis=1)
    near = np.min(dist[surface.triangles], axis=1)
    areas = surface.face_areas
    lo_order = np.argsort(far)
    hi_order = np.argsort(near)
    lo_cum = np.concatenate([[0.0], np.cumsum(areas[lo_order])])
    hi_cum = np.concatenate([[0.0], np.cumsum(areas[hi_order])])
    tol = 1e-12 * np.maximum(1.0, radii)
    lower = lo_cum[np.searchsorted(far[lo_order], radii + tol, side="right")]
    upper = hi_cum[np.searchsorted(near[hi_order], radii + tol, side="right")]
    return lower, upper


# greedy systems -------------------------------------------------------------

def greedy_ball_system(surface: Surface, R: float, metric: str = "auto") -> BallSystem:
    """Scan vertices by id; keep a vertex when it is at least 2R from every kept one."""
    if not R > 0:
        raise InvalidRadii("radius must be positive")
    metric = resolve_metric(surface, metric)
    V = surface.n_vertices
    dmin = np.full(V, np.inf)
    tol = 1e-12 * max(1.0, R)
    centers = []
    for v in range(V):
        if dmin[v] >= 2 * R - tol:
            centers.append(v)
            dmin = np.minimum(dmin, distance_rows(surface, [v], metric, limit=2 * R)[0])
    return BallSystem(surface, tuple(centers), tuple([float(R)] * len(centers)), metric, "greedy")


def scale_system(system: BallSystem, factor: float) -> BallSystem:
    """Same centers with radii multiplied (e.g. the covering by doubled balls)."""
    return BallSystem(system.surface, system.centers, tuple(r * factor for r in system.radii),
                      system.metric, f"{system.kind}x{factor:g}", system.notes)


def is_packing(system: BallSystem) -> bool:
    rows = distance_rows(system.surface, system.centers, system.metric)
    R = np.array(system.radii)
    c = list(system.centers)
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if rows[i, c[j]] < R[i] + R[j] - 1e-12 * max(1.0, R[i] + R[j]):
                return False
    return True


def uncovered_vertices(system: BallSystem, factor: float = 2.0) -> np.ndarray:
    rows = distance_rows(system.surface, system.centers, system.metric)
    R = np.array(system.radii)[:, None] * factor
    inside = rows <= R * (1 + 1e-12) + 1e-12
    return np.flatnonzero(~inside.any(axis=0))


# nerves ---------------------------------------------------------------------

def build_nerve(system: BallSystem, factor: float = 1.0, max_dim: int = DEFAULT_MAX_DIM) -> NerveComplex:
    """Čech nerve of the balls of radius factor*R_i realized as vertex sets."""
    rows = distance_rows(system.surface, system.centers, system.metric)
    R = np.array(system.radii, dtype=float)[:, None] * factor
    inside = rows <= R * (1 + 1e-12) + 1e-12
    cells = {tuple(int(i) for i in np.flatnonzero(col)) for col in inside.T}
    simplices: dict[int, set] = {k: set() for k in range(max_dim + 1)}
    for cell in cells:
        for k in range(min(len(cell), max_dim + 1)):
            simplices[k].update(combinations(cell, k + 1))
    return NerveComplex({k: tuple(sorted(v)) for k, v in simplices.items()}, float(factor),
                        len(system.centers), max_dim)


def realize_nerve_edges(system: BallSystem, nerve: NerveComplex, systole: float):
    """Map each nerve edge to a shortest path between the two centers.

    Returns ``(edges, triangles)``: ``edges`` lists ``((i, j), length)`` and
    ``triangles`` lists ``((i, j, k), boundary length)`` for every 2-simplex.
    """
    R = np.array(system.radii, dtype=float)
    if np.any(R * nerve.factor >= systole / 6):
        raise RadiusTooLarge("realization needs every ball radius below sys/6")
    rows = distance_rows(system.surface, system.centers, system.metric)
    c = list(system.centers)
    length = {}
    for i, j in nerve.simplices.get(1, ()):
        length[(i, j)] = float(rows[i, c[j]])
    edges = sorted(length.items())
    tris = []
    for i, j, k in nerve.simplices.get(2, ()):
        tris.append(((i, j, k), length[(i, j)] + length[(j, k)] + length[(i, k)]))
    return edges, tris


def realized_path(system: BallSystem, i: int, j: int) -> list[int]:
    """Edge-graph shortest path between centers i and j."""
    return system.surface.shortest_path(system.centers[i], system.centers[j])


# admissible balls -----------------------------------------------------------

def admissibility_constants(volume: float, R0: float, alpha: float, A_n: float, n: int = DIM):
    """(m0, C_n) of the admissible-ball volume bound."""
    m0 = (math.log(volume) - n * math.log(R0) - math.log(A_n)) / (math.log(alpha) - n * math.log(5))
    return m0, 5 ** (-m0 * n) * A_n


def _check_alpha(alpha: float) -> None:
    if not alpha > 5 ** DIM:
        raise InvalidAlpha(f"alpha must exceed 5^{DIM} = {5 ** DIM}")


def default_R0(surface: Surface) -> float:
    from .covering import homotopy_systole
    return homotopy_systole(surface).length / 12


def _grid_above(R: float, R0: float, q: int) -> list[float]:
    """Radii R*5^(j/q), j >= 1, below R0, followed by R0 itself."""
    out = []
    j = 1
    while True:
        Rp = R * 5 ** (j / q)
        if Rp >= R0 * (1 - 1e-9):
            break
        out.append(Rp)
        j += 1
    out.append(R0)
    return out


def is_admissible(surface: Surface, v: int, R: float, alpha: float, r: float,
                  R0: float | None = None, A_n: float = 0.1, q: int = DEFAULT_Q,
                  metric: str = "auto", eps: float = 0.0) -> AdmissibilityReport:
    _check_alpha(alpha)
    if R0 is None:
        R0 = default_R0(surface)
    tol = 1e-9 * R0
    if not (0 < r and eps <= r + tol and r <= R + tol and R <= R0 + tol):
        raise InvalidRadii("need eps <= r <= R <= R0 with r > 0")
    if q < 1:
        raise InvalidRadii("grid ratio exponent q must be positive")
    at_top = abs(R - R0) <= tol
    grid = [] if at_top else _grid_above(R, R0, q)
    radii = np.array([R, 5 * R] + grid + [5 * x for x in grid])
    lo, hi = area_bounds(surface, v, radii, metric)
    c1 = (float(hi[1]), float(alpha * lo[0]))
    cond2 = []
    m = len(grid)
    for i, Rp in enumerate(grid):
        inner5 = float(lo[2 + m + i])
        outer = float(alpha * hi[2 + i])
        cond2.append((float(Rp), inner5 >= outer, inner5, outer))
    m0, C_n = admissibility_constants(surface.total_area, R0, alpha, A_n)
    return AdmissibilityReport(int(v), float(R), float(alpha), float(r), float(R0), float(A_n),
                               c1[0] <= c1[1], c1, cond2, m0, C_n)


def admissible_radius(surface: Surface, v: int, alpha: float, r: float, R0: float,
                      q: int = DEFAULT_Q, metric: str = "auto") -> list[float]:
    """Admissible radii at v on the grid R0*5^(-j/q) down to r, largest first."""
    metric = resolve_metric(surface, metric)
    grid = [R0]
    j = 1
    while R0 * 5 ** (-j / q) >= r * (1 - 1e-9):
        grid.append(R0 * 5 ** (-j / q))
        j += 1
    radii = np.array(grid + [5 * x for x in grid])
    dist = None
    if metric == "graph":
        dist = surface.graph_distances(int(v), limit=5 * R0 * (1 + 1e-12) + 1e-12)
    lo, hi = area_bounds(surface, v, radii, metric, dist)
    m = len(grid)
    c1 = hi[m:] <= alpha * lo[:m]
    c2 = lo[m:] >= alpha * hi[:m]
    out = []
    # condition 2 for grid[j] needs c2 at every grid[i] with i < j
    ok_above = True
    for jj in range(m):
        if c1[jj] and ok_above:
            out.append(float(grid[jj]))
        ok_above = ok_above and bool(c2[jj])
    return out


def maximal_admissible_system(surface: Surface, alpha: float, r: float, A_n: float = 0.1,
                              R0: float | None = None, q: int = DEFAULT_Q,
                              metric: str = "auto") -> BallSystem:
    """Greedy system of disjoint admissible balls, largest radius first (ties by id)."""
    _check_alpha(alpha)
    metric = resolve_metric(surface, metric)
    if R0 is None:
        R0 = default_R0(surface)
    if not 0 < r <= R0:
        raise InvalidRadii("need 0 < r <= R0")
    cands = []
    missing = []
    for v in range(surface.n_vertices):
        rad = admissible_radius(surface, v, alpha, r, R0, q, metric)
        if not rad:
            missing.append(v)
        cands.extend((-R, v) for R in rad)
    if missing:
        raise NoAdmissibleBall(f"{len(missing)} vertices (first {missing[0]}) have no "
                               f"({alpha:g}, {r:g})-admissible ball on the grid; try a larger alpha or smaller r")
    cands.sort()
    rows: dict[int, np.ndarray] = {}
    centers: list[int] = []
    radii: list[float] = []
    for negR, v in cands:
        R = -negR
        if v in rows:
            continue
        ok = True
        for c, Rc in zip(centers, radii):
            if rows[c][v] < R + Rc - 1e-12 * max(1.0, R + Rc):
                ok = False
                break
        if ok:
            centers.append(v)
            radii.append(R)
            rows[v] = distance_rows(surface, [v], metric)[0]
    system = BallSystem(surface, tuple(centers), tuple(radii), metric, "admissible")
    gaps = uncovered_vertices(system, 2.0)
    notes = () if len(gaps) == 0 else (f"{len(gaps)} vertices not covered by the doubled balls",)
    return BallSystem(surface, tuple(centers), tuple(radii), metric, "admissible", notes)


__all__ = [
    "BallSystem", "NerveComplex", "AdmissibilityReport", "greedy_ball_system", "scale_system",
    "build_nerve", "is_admissible", "maximal_admissible_system", "realize_nerve_edges",
    "uncovered_vertices", "is_packing", "admissibility_constants", "area_bounds", "distance_rows",
]
