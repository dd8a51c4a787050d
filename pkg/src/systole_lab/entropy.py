"""Growth of loop classes, entropy slopes and inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InvalidParams, MismatchedModel, NotApplicable, SimplyConnected, UnsortedLs,
                     WindowTooSmall)
from .lattice import FlatTorus, lattice_norms_within, systole as lattice_systole, systolic_ratio_torus
from .surface import Surface, ball, euler_genus, resolve_metric

GATE_NOTE = ("gate 4*alpha + beta < 1/2 comes from the loop-length bound 2*(beta + 4*alpha)*sys; "
             "the variant alpha + 2*beta < 1/2 is not enforced")
LOEWNER = math.sqrt(3) / 2
PU = 2 / math.pi


@dataclass(frozen=True)
class GrowthSeries:
    base_point: int
    Ls: tuple[float, ...]
    counts: tuple[int, ...]
    source: str

    def to_json_obj(self) -> dict:
        return {"base_point": self.base_point, "L": list(self.Ls), "counts": list(self.counts),
                "source": self.source}

    def to_rows(self) -> list[tuple[float, int]]:
        return list(zip(self.Ls, self.counts))


@dataclass(frozen=True)
class EntropyEstimate:
    slope: float
    intercept: float
    residual: float
    window: tuple[float, float]
    n_points: int

    def to_json_obj(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residual": self.residual,
                "window": list(self.window), "n_points": self.n_points}


@dataclass(frozen=True)
class CheckReport:
    check: str
    reference: str
    lhs: float
    rhs: float
    comparison: str
    verdict: bool
    inputs: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {"check": self.check, "reference": self.reference, "lhs": self.lhs, "rhs": self.rhs,
                "comparison": self.comparison, "verdict": self.verdict, "inputs": self.inputs,
                "notes": list(self.notes)}


def _compare(lhs: float, op: str, rhs: float, tol: float = 0.0) -> bool:
    if op == ">=":
        return lhs >= rhs - tol
    if op == "<=":
        return lhs <= rhs + tol
    if op == "==":
        return abs(lhs - rhs) <= tol
    raise ValueError(op)


def _report(check, ref, lhs, op, rhs, tol=0.0, inputs=None, notes=()) -> CheckReport:
    lhs, rhs = float(lhs), float(rhs)
    return CheckReport(check, ref, lhs, rhs, op if not tol else f"{op} (tol {tol:g})",
                       _compare(lhs, op, rhs, tol), inputs or {}, tuple(notes))


# growth ---------------------------------------------------------------------

def _check_Ls(L_list) -> list[float]:
    Ls = [float(x) for x in L_list]
    if any(not math.isfinite(x) or x < 0 for x in Ls):
        raise UnsortedLs("L values must be finite and nonnegative")
    if any(b < a for a, b in zip(Ls, Ls[1:])):
        raise UnsortedLs("L values must be sorted ascending")
    return Ls


def growth_series(obj: FlatTorus | Surface, v: int, L_list, metric: str = "auto") -> GrowthSeries:
    """P(L) at each L: lattice orbit counts for a torus, cover lifts for a surface."""
    Ls = _check_Ls(L_list)
    if not Ls:
        return GrowthSeries(int(v), (), (), "empty")
    top = Ls[-1]
    if isinstance(obj, FlatTorus):
        d = lattice_norms_within(obj, top)
        source = "lattice orbit"
    else:
        from .covering import lift_distances
        metric = resolve_metric(obj, metric)
        d = np.sort(lift_distances(obj, int(v), top, metric))
        source = f"cover lifts ({metric})"
    counts = [int(np.searchsorted(d, L * (1 + 1e-12) + 1e-12, side="right")) for L in Ls]
    return GrowthSeries(int(v), tuple(Ls), tuple(counts), source)


def fit_entropy(series: GrowthSeries, window: tuple[float, float] | None = None) -> EntropyEstimate:
    """Least-squares slope of log P(L) against L on the window."""
    L = np.asarray(series.Ls, dtype=float)
    P = np.asarray(series.counts, dtype=float)
    if window is None:
        window = (float(L.min()), float(L.max())) if len(L) else (0.0, 0.0)
    lo, hi = window
    sel = (L >= lo - 1e-12) & (L <= hi + 1e-12)
    if sel.sum() < 3:
        raise WindowTooSmall(f"window [{lo:g}, {hi:g}] holds {int(sel.sum())} points; need 3")
    x, y = L[sel], np.log(P[sel])
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx) if sxx > 0 else 0.0
    intercept = float(ym - slope * xm)
    res = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return EntropyEstimate(slope, intercept, res, (float(lo), float(hi)), int(sel.sum()))


# checks ---------------------------------------------------------------------

def _same_lattice(a: FlatTorus, b: FlatTorus) -> bool:
    if abs(a.volume - b.volume) > 1e-9 * max(1.0, a.volume):
        return False
    r = 3 * max(lattice_systole(a), lattice_systole(b))
    na, nb = lattice_norms_within(a, r), lattice_norms_within(b, r)
    return len(na) == len(nb) and bool(np.allclose(na, nb, atol=1e-9))


def check_lemma_orbit_equality(surface: Surface, torus: FlatTorus, L_list, v: int = 0,
                               metric: str = "auto") -> CheckReport:
    """Cover lift counts against lattice orbit counts at every L."""
    Ls = _check_Ls(L_list)
    if torus.dim != 2 or not (surface.orientable and surface.is_flat()):
        raise MismatchedModel("surface is not a flat torus")
    from .chart import flat_chart
    if not _same_lattice(flat_chart(surface).torus, torus):
        raise MismatchedModel("surface holonomy lattice differs from the given torus")
    cover = growth_series(surface, v, Ls, metric)
    lattice = growth_series(torus, v, Ls)
    bad = [(L, a, b) for L, a, b in zip(Ls, cover.counts, lattice.counts) if a != b]
    notes = [f"L={L:g}: cover {a} vs lattice {b}" for L, a, b in bad]
    return CheckReport("orbit_equality", "based loop classes equal deck orbit points",
                       float(len(bad)), 0.0, "==", not bad,
                       {"L": Ls, "cover": list(cover.counts), "lattice": list(lattice.counts),
                        "metric": resolve_metric(surface, metric)}, tuple(notes))


def check_sabourau_lemma(surface: Surface, alpha: float, beta: float,
                         window: tuple[float, float] | None = None, n_points: int = 13,
                         metric: str = "auto") -> CheckReport:
    """h * sys <= log(N_alpha) / beta with N_alpha a greedy count at radius alpha * sys."""
    if not (alpha > 0 and beta > 0):
        raise InvalidParams("alpha and beta must be positive")
    if not 4 * alpha + beta < 0.5:
        raise InvalidParams(f"4*alpha + beta = {4 * alpha + beta:g} must be below 1/2")
    if surface.euler_characteristic == 2:
        raise NotApplicable("sphere has no systole")
    from .covering import homotopy_systole
    from .packing import greedy_ball_system
    sys_len = homotopy_systole(surface).length
    R_alpha = alpha * sys_len
    N = len(greedy_ball_system(surface, R_alpha, metric))
    if window is None:
        window = (sys_len, 3 * sys_len)
    Ls = np.linspace(window[0], window[1], n_points)
    est = fit_entropy(growth_series(surface, 0, Ls, metric), window)
    h = est.slope
    notes = [GATE_NOTE, f"entropy is a finite-window slope (residual {est.residual:.3g})"]
    return _report("sabourau", "Sabourau entropy-systole lemma", h * sys_len, "<=", math.log(N) / beta,
                   0.0, {"alpha": alpha, "beta": beta, "sys": sys_len, "R_alpha": R_alpha, "N_alpha": N,
                         "entropy": h, "window": list(window)}, notes)


def check_burago_hebda(surface: Surface, metric: str = "auto") -> CheckReport:
    """Inner area of the ball of radius sys/2 at a systolic basepoint against sys^2/2."""
    if surface.euler_characteristic == 2:
        raise SimplyConnected("sphere has no systole")
    from .covering import homotopy_systole
    res = homotopy_systole(surface)
    ell = res.length
    m = res.cycle.vertices[0]
    b = ball(surface, m, ell / 2, metric)
    return _report("burago_hebda", "Burago-Hebda ball bound", b.lower, ">=", ell ** 2 / 2, 0.0,
                   {"sys": ell, "basepoint": int(m), "upper": b.upper, "metric": b.metric})


def sphere_volume(k: int) -> float:
    """Volume of the unit k-sphere in R^(k+1)."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def croke_constant(n: int) -> float:
    w1, w = sphere_volume(n - 1), sphere_volume(n)
    return 2 ** (n - 1) * w1 ** n / (w ** (n - 1) * n ** n)


def berger_constant(n: int) -> float:
    return sphere_volume(n) / math.pi ** n


def genus_bound(h: int) -> float:
    return (4 * math.sqrt(h) + 27) / 64


def _torus_checks(tor: FlatTorus, balls=None) -> list[CheckReport]:
    from .lattice import embolic_torus
    out = []
    ratio = systolic_ratio_torus(tor)
    notes = ["equality case"] if abs(ratio - LOEWNER) <= 1e-9 else []
    out.append(_report("loewner", "Loewner torus inequality", ratio, ">=", LOEWNER, 1e-9,
                       {"basis": tor.basis.tolist()}, notes))
    if tor.dim == 2:
        inj = lattice_systole(tor) / 2
        c2 = croke_constant(2)
        radii = np.linspace(inj / 20, inj / 2, 10)
        if balls is None:
            areas = math.pi * radii ** 2
            how = "flat disk area (radius below injectivity radius)"
        else:
            areas = np.array([balls(float(R)) for R in radii])
            how = "exact disk/triangle intersection areas on the triangulation"
        worst = float(np.min(areas / radii ** 2))
        out.append(_report("croke", "Croke ball-area constant", worst, ">=", c2, 0.0,
                           {"c2": c2, "radii": radii.tolist()}, [how]))
    emb = embolic_torus(tor)
    bc = berger_constant(tor.dim)
    out.append(_report("berger", "Berger embolic constant", emb, ">=", bc, 0.0, {"embolic": emb}))
    return out


def check_constants(obj: FlatTorus | Surface) -> list[CheckReport]:
    """Battery of constant checks applicable to a flat torus or a surface."""
    if isinstance(obj, FlatTorus):
        return _torus_checks(obj)
    s = obj
    chi, genus, orientable = euler_genus(s)
    if chi == 2:
        raise NotApplicable("no constant check applies to a sphere")
    from .covering import homotopy_systole
    sys_len = homotopy_systole(s).length
    ratio = s.total_area / sys_len ** 2
    out = []
    if orientable and genus == 1:
        out.append(_report("loewner", "Loewner torus inequality", ratio, ">=", LOEWNER, 1e-9,
                           {"area": s.total_area, "sys": sys_len}))
    if orientable and genus >= 1:
        out.append(_report("genus_bound", "systolic area lower bound in genus h", ratio, ">=",
                           genus_bound(genus), 0.0, {"genus": genus, "area": s.total_area, "sys": sys_len}))
    if not orientable and chi == 1:
        gap = abs(ratio - PU) / PU
        out.append(_report("pu_trend", "Pu projective plane constant", gap, "<=", 0.1, 0.0,
                           {"ratio": ratio, "pu": PU},
                           ["relative gap of the ratio to 2/pi; the round metric is only approached"]))
    if orientable and s.is_flat():
        from .chart import flat_chart
        ch = flat_chart(s)
        out.extend(r for r in _torus_checks(ch.torus, lambda R: ch.area_bounds(R)[0])
                   if r.check in ("croke", "berger"))
    if not out:
        raise NotApplicable("no constant check applies to this surface")
    return out


def pu_trend(ks=(0, 1, 2, 3)) -> CheckReport:
    """Ratios of the refined projective planes: monotone toward 2/pi, within 10% at the finest."""
    from .covering import homotopy_systole
    from .generators import rp2_icosa
    ratios = []
    for k in ks:
        s = rp2_icosa(k)
        ratios.append(s.total_area / homotopy_systole(s).length ** 2)
    gaps = [abs(r - PU) for r in ratios]
    mono = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    final = gaps[-1] / PU
    return CheckReport("pu_trend", "Pu projective plane constant", final, 0.1, "<=",
                       bool(mono and final <= 0.1), {"k": list(ks), "ratios": ratios},
                       ("monotone" if mono else "not monotone",))


__all__ = [
    "GrowthSeries", "EntropyEstimate", "CheckReport", "growth_series", "fit_entropy",
    "check_lemma_orbit_equality", "check_sabourau_lemma", "check_burago_hebda", "check_constants",
    "croke_constant", "berger_constant", "genus_bound", "pu_trend", "GATE_NOTE",
]
