"""Systolic-ratio minimization.

Moduli search runs a Nelder-Mead simplex on ratio(tau) = y / |shortest vector|^2
for the lattice spanned by (1, 0) and (x, y).  Edge-length search is a
multiplicative pattern search on a fixed triangulation, renormalized so the
systole stays 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric, InputError, InvalidStart, MaxIterations, SimplyConnected, ValidationError
from .lattice import reduce_tau
from .surface import Surface

DEFAULT_MODULI = {"max_iter": 5000, "tol": 1e-8, "restarts": 3, "seed": 0, "step": 0.1}
DEFAULT_EDGES = {"max_iter": 20000, "step": 0.1, "min_step": 1e-3, "seed": 0}


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fx: float
    iterations: int
    converged: bool
    trace: list[tuple[tuple[float, ...], float]] = field(default_factory=list)


def nelder_mead(f, x0, step: float = 0.1, tol: float = 1e-8, max_iter: int = 5000) -> NelderMeadResult:
    """Simplex search; stops when the simplex diameter drops below ``tol``."""
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    simplex = [x0.copy()]
    for i in range(n):
        p = x0.copy()
        p[i] += step
        simplex.append(p)
    vals = [f(p) for p in simplex]
    trace = []
    for it in range(1, max_iter + 1):
        order = np.argsort(vals, kind="stable")
        simplex = [simplex[i] for i in order]
        vals = [vals[i] for i in order]
        trace.append((tuple(float(c) for c in simplex[0]), float(vals[0])))
        diam = max(np.linalg.norm(p - q) for p in simplex for q in simplex)
        if diam < tol:
            return NelderMeadResult(simplex[0], vals[0], it, True, trace)
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < vals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            if fe < fr:
                simplex[-1], vals[-1] = xe, fe
            else:
                simplex[-1], vals[-1] = xr, fr
            continue
        if fr < vals[-2]:
            simplex[-1], vals[-1] = xr, fr
            continue
        if fr < vals[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], vals[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = f(xc)
            if fc < vals[-1]:
                simplex[-1], vals[-1] = xc, fc
                continue
        best = simplex[0]
        simplex = [best] + [best + 0.5 * (p - best) for p in simplex[1:]]
        vals = [vals[0]] + [f(p) for p in simplex[1:]]
    order = int(np.argmin(vals))
    return NelderMeadResult(simplex[order], vals[order], max_iter, False, trace)


# moduli ---------------------------------------------------------------------

def _shortest_sq(x: float, y: float) -> float:
    """Squared minimum of the lattice Z(1,0) + Z(x,y), by Gauss reduction."""
    a = (1.0, 0.0)
    b = (x, y)
    na, nb = 1.0, x * x + y * y
    for _ in range(10_000):
        if na > nb:
            a, b, na, nb = b, a, nb, na
        mu = round((a[0] * b[0] + a[1] * b[1]) / na)
        if mu == 0:
            break
        b = (b[0] - mu * a[0], b[1] - mu * a[1])
        nb = b[0] * b[0] + b[1] * b[1]
    return min(na, nb)


def moduli_ratio(x: float, y: float) -> float:
    """Area over squared systole of the torus with basis (1,0), (x,y)."""
    if not y > 0:
        return math.inf
    return y / _shortest_sq(x, y)


@dataclass(frozen=True)
class ModuliResult:
    tau: tuple[float, float]
    ratio: float
    trace: list
    converged: bool
    iterations: int

    def to_json_obj(self) -> dict:
        return {"tau": list(self.tau), "ratio": self.ratio, "converged": self.converged,
                "iterations": self.iterations, "trace_length": len(self.trace),
                "trace": [{"point": list(p), "value": v} for p, v in self.trace]}


def _options(defaults: dict, options: dict | None) -> dict:
    opts = dict(defaults)
    for k, v in (options or {}).items():
        if k not in defaults:
            raise InputError(f"unknown option {k!r}")
        opts[k] = v
    return opts


def optimize_moduli(tau0, options: dict | None = None) -> ModuliResult:
    """Minimize the torus systolic ratio over tau, reported in the fundamental domain."""
    opts = _options(DEFAULT_MODULI, options)
    x0, y0 = (float(c) for c in tau0)
    if not (math.isfinite(x0) and math.isfinite(y0)) or y0 <= 0:
        raise InvalidStart("start must satisfy y > 0")
    f = lambda p: moduli_ratio(p[0], p[1])
    step = min(float(opts["step"]), 0.5 * y0)
    total = 0
    trace = []
    x = np.array([x0, y0])
    fx = f(x)
    res = None
    for _ in range(int(opts["restarts"]) + 1):
        res = nelder_mead(f, x, step, float(opts["tol"]), int(opts["max_iter"]))
        total += res.iterations
        trace.extend(res.trace)
        if not res.converged:
            raise MaxIterations(f"simplex did not shrink below {opts['tol']:g} in {opts['max_iter']} iterations")
        improved = res.fx < fx - 1e-15
        x, fx = res.x, res.fx
        if not improved:
            break
        step = max(step / 2, 1e-3)
    bt = max(10 * float(opts["tol"]), 1e-12)
    xr, yr = reduce_tau(float(x[0]), float(x[1]), boundary_tol=bt)
    return ModuliResult((xr, yr), moduli_ratio(xr, yr), trace, True, total)


# edge lengths ---------------------------------------------------------------

@dataclass(frozen=True)
class EdgeLengthResult:
    surface: Surface
    ratio: float
    trace: list[float]
    accepted: int
    evaluations: int
    converged: bool
    initial_ratio: float

    def to_json_obj(self) -> dict:
        return {"ratio": self.ratio, "initial_ratio": self.initial_ratio, "trace": list(self.trace),
                "accepted": self.accepted, "evaluations": self.evaluations, "converged": self.converged,
                "surface": self.surface.to_json_obj()}


def optimize_edge_lengths(surface: Surface, options: dict | None = None) -> EdgeLengthResult:
    """Pattern search over per-edge multiplicative perturbations of the metric."""
    from .covering import systole_length
    opts = _options(DEFAULT_EDGES, options)
    if surface.euler_characteristic == 2:
        raise SimplyConnected("sphere has no systole")
    step = float(opts["step"])
    min_step = float(opts["min_step"])
    if not (0 < min_step <= step < 1):
        raise InputError("need 0 < min_step <= step < 1")
    rng = np.random.default_rng(int(opts["seed"]))

    def evaluate(L):
        try:
            s = surface.with_edge_lengths(L)
        except ValidationError:
            return None, math.inf
        sys_len = systole_length(s)
        return s, s.total_area / sys_len ** 2

    cur = surface.edge_length.copy()
    s0, r = evaluate(cur)
    if s0 is None:
        raise DegenerateMetric("starting metric is invalid")
    cur = cur / systole_length(s0)
    E = len(cur)
    feasible = False
    for e in range(E):
        for sgn in (1, -1):
            L = cur.copy()
            L[e] *= 1 + sgn * step
            try:
                surface.with_edge_lengths(L)
                feasible = True
                break
            except ValidationError:
                pass
        if feasible:
            break
    if not feasible:
        raise DegenerateMetric("no valid perturbation of the starting metric")
    trace = [r]
    initial = r
    evals = 0
    accepted = 0
    converged = False
    while evals < int(opts["max_iter"]):
        improved = False
        for e in rng.permutation(E):
            for sgn in (1, -1):
                L = cur.copy()
                L[e] *= 1 + sgn * step
                s, rr = evaluate(L)
                evals += 1
                if s is not None and rr < r * (1 - 1e-12):
                    cur = L / systole_length(s)
                    r = rr
                    trace.append(r)
                    accepted += 1
                    improved = True
                    break
                if evals >= int(opts["max_iter"]):
                    break
            if evals >= int(opts["max_iter"]):
                break
        if not improved and evals < int(opts["max_iter"]):
            step /= 2
            if step < min_step:
                converged = True
                break
    final = surface.with_edge_lengths(cur)
    return EdgeLengthResult(final, r, trace, accepted, evals, converged, initial)


__all__ = ["nelder_mead", "moduli_ratio", "optimize_moduli", "optimize_edge_lengths",
           "ModuliResult", "EdgeLengthResult", "NelderMeadResult"]
