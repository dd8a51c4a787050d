"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from systole_lab.cli import run
from systole_lab.covering import homotopy_systole
from systole_lab.entropy import (berger_constant, check_burago_hebda, check_constants, check_sabourau_lemma,
                                 croke_constant, fit_entropy, genus_bound, growth_series, pu_trend)
from systole_lab.errors import ResourceLimit
from systole_lab.generators import GENERATORS, generate
from systole_lab.lattice import (FlatTorus, embolic_torus, orbit_count, random_unimodular, shortest_vector,
                                 systolic_ratio_torus)
from systole_lab.optimize import optimize_moduli
from systole_lab.packing import (build_nerve, greedy_ball_system, is_admissible, maximal_admissible_system,
                                 realize_nerve_edges, scale_system, uncovered_vertices)
from systole_lab.surface import betti_z2, subdivide

LOEWNER = math.sqrt(3) / 2
SQ = FlatTorus(np.eye(2))
HEXT = FlatTorus([[1.0, 0.0], [0.5, LOEWNER]])
NON_SPHERES = [n for n in GENERATORS if n != "sphere-tetra"]
RESULTS: dict[int, str] = {}


def report(n, title, ok, detail, elapsed, limit=None):
    within = limit is None or elapsed < limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"criterion {n:2d} {verdict}: {title}; {detail}; {elapsed:.2f} s{budget}"
    RESULTS[n] = line
    print(line)
    return ok and within


@pytest.fixture(autouse=True)
def _show(capsys):
    yield
    with capsys.disabled():
        out = capsys.readouterr().out
        if out:
            print("\n" + out.rstrip())


def test_c01_loewner_optimum():
    t = time.perf_counter()
    rng = np.random.default_rng(0)
    worst_ratio = worst_tau = 0.0
    for _ in range(50):
        res = optimize_moduli((rng.uniform(-2, 2), rng.uniform(1e-3, 3)))
        worst_ratio = max(worst_ratio, abs(res.ratio - LOEWNER))
        worst_tau = max(worst_tau, float(np.max(np.abs(np.array(res.tau) - [0.5, LOEWNER]))))
    ok = worst_ratio <= 1e-4 and worst_tau <= 1e-3
    assert report(1, "moduli search reaches the hexagonal torus from 50 starts", ok,
                  f"max |ratio - sqrt3/2| = {worst_ratio:.2e} (tol 1e-4), max |tau - tau*| = {worst_tau:.2e} (tol 1e-3)",
                  time.perf_counter() - t, 10)


def test_c02_loewner_bound():
    t = time.perf_counter()
    rng = np.random.default_rng(1)
    lo = min(systolic_ratio_torus(FlatTorus(rng.normal(size=(2, 2)))) for _ in range(1000))
    assert report(2, "1000 random 2-tori satisfy ratio >= sqrt3/2 - 1e-9", lo >= LOEWNER - 1e-9,
                  f"min ratio {lo:.10f}", time.perf_counter() - t, 1)


def test_c03_orbit_equality():
    t = time.perf_counter()
    Ls = list(range(7))
    bad = []
    for name, tor in (("torus-square", SQ), ("torus-hex", HEXT)):
        lattice = [orbit_count(tor, L) for L in Ls]
        for k in (0, 1, 2):
            cover = list(growth_series(generate(name, k=k), 0, Ls).counts)
            if cover != lattice:
                bad.append((name, k, cover, lattice))
    l2 = (growth_series(generate("torus-square"), 0, [2]).counts[0], orbit_count(SQ, 2))
    ok = not bad and l2 == (13, 13)
    assert report(3, "loop classes equal lattice orbits, L = 0..6, square and hex, k = 0..2", ok,
                  f"mismatches {len(bad)}, Z^2 L=2 -> {l2[0]} / {l2[1]}", time.perf_counter() - t, 5)


def test_c04_entropy_windows():
    t = time.perf_counter()
    Ls = np.linspace(30, 60, 31)
    torus_slope = fit_entropy(growth_series(SQ, 0, Ls), (30, 60)).slope
    octagon = generate("genus2-octagon")
    side = 1.0
    try:
        series = growth_series(octagon, 0, np.linspace(3 * side, 9 * side, 13))
        a = fit_entropy(series, (3 * side, 6 * side)).slope
        b = fit_entropy(series, (6 * side, 9 * side)).slope
        genus2_ok = a > 0 and b > 0 and abs(a - b) <= 0.2 * max(a, b)
        g2 = f"genus-2 slopes [3,6] {a:.4f}, [6,9] {b:.4f}"
    except ResourceLimit as exc:
        genus2_ok = False
        g2 = f"genus-2 windows [3,6] and [6,9] not computed: {exc}"
    info = growth_series(octagon, 0, np.linspace(1.5, 4.5, 13))
    a, b = fit_entropy(info, (1.5, 3.0)).slope, fit_entropy(info, (3.0, 4.5)).slope
    ok = torus_slope < 0.1 and genus2_ok
    assert report(4, "torus slope < 0.1 on [30,60]; genus-2 slope > 0 and stable within 20%", ok,
                  f"torus slope {torus_slope:.4f}; {g2}; reachable windows [1.5,3] {a:.3f}, [3,4.5] {b:.3f}",
                  time.perf_counter() - t, 60)


def test_c05_sabourau():
    t = time.perf_counter()
    failures, worst = [], 0.0
    for name in NON_SPHERES:
        s = generate(name)
        for alpha, beta in itertools.product((0.02, 0.05), (0.05, 0.1)):
            rep = check_sabourau_lemma(s, alpha, beta)
            worst = max(worst, rep.lhs / rep.rhs)
            if not rep.verdict:
                failures.append((name, alpha, beta))
    assert report(5, "h*sys <= log(N_alpha)/beta on every bundled surface with a systole", not failures,
                  f"{len(NON_SPHERES) * 4} cases, failures {len(failures)}, max lhs/rhs {worst:.4f}; sphere excluded (no systole)",
                  time.perf_counter() - t, 60)


def test_c06_burago_hebda():
    t = time.perf_counter()
    failures = []
    for name in NON_SPHERES:
        rep = check_burago_hebda(generate(name, k=3))
        if not rep.verdict:
            failures.append(name)
    sq = check_burago_hebda(generate("torus-square", k=4))
    lo, hi = sq.lhs, sq.inputs["upper"]
    target = math.pi / 4
    bracket = lo <= target * (1 + 1e-12) and hi >= target * (1 - 1e-12) and (hi - lo) <= 0.01 * target
    close = abs(lo - target) <= 0.01 * target and abs(hi - target) <= 0.01 * target
    ok = not failures and sq.verdict and bracket and close
    assert report(6, "inner area of B(m, sys/2) >= sys^2/2 at k = 3; square k = 4 brackets pi/4 within 1%", ok,
                  f"failures {failures}; square bracket [{lo:.6f}, {hi:.6f}] vs {target:.6f}",
                  time.perf_counter() - t, 30)


def test_c07_admissibility_closed_form():
    t = time.perf_counter()
    R0, alpha = 1 / 12, 26
    rows = []
    for k in (4, 5):
        s = generate("torus-square", k=k)
        top = is_admissible(s, 0, R0, alpha, R0 / 10, R0=R0)
        fifth = is_admissible(s, 0, R0 / 5, alpha, R0 / 10, R0=R0)
        # closed form: pi(5R)^2 <= 26 pi R^2 always; condition 2 needs 25 >= 26
        exp_top = math.pi * (5 * R0) ** 2 <= alpha * math.pi * R0 ** 2
        exp_c1 = math.pi * (R0) ** 2 <= alpha * math.pi * (R0 / 5) ** 2
        exp_c2 = 25 >= alpha
        c2 = all(ok for _, ok, _, _ in fifth.condition2)
        rows.append(top.admissible == exp_top and fifth.condition1 == exp_c1 and c2 == exp_c2
                    and not fifth.admissible)
    assert report(7, "flat square torus, alpha = 26: R0-ball admissible, R0/5-ball fails condition 2", all(rows),
                  f"k = 4, 5 agree with closed form: {rows}", time.perf_counter() - t, 10)


def test_c08_nerve_shadow():
    t = time.perf_counter()
    notes, ok = [], True
    R0 = 1 / 12
    for name, alpha in (("torus-square", 26), ("genus2-octagon", 250)):
        s = generate(name, k=3)
        system = maximal_admissible_system(s, alpha, R0 / 25, R0=R0)
        N = build_nerve(system, 2).counts
        b = betti_z2(s)
        good = all(b[k] <= N[k] for k in range(3))
        ok &= good
        notes.append(f"{name} alpha {alpha}: b = {b}, N = {tuple(N[:3])}")
        sys_len = homotopy_systole(s).length
        cover = scale_system(greedy_ball_system(s, 0.075 * sys_len), 2.0)
        assert len(uncovered_vertices(cover, 1.0)) == 0
        nerve = build_nerve(cover, 1)
        _, tris = realize_nerve_edges(cover, nerve, sys_len)
        longest = max(bl for _, bl in tris)
        ok &= longest < sys_len
        notes.append(f"longest realized 2-simplex boundary {longest:.4f} < sys {sys_len:.4f} ({len(tris)} triangles)")
    assert report(8, "b_k <= N_k on admissible nerves; realized 2-simplex boundaries < sys", ok,
                  "; ".join(notes), time.perf_counter() - t, 30)


def test_c09_constants():
    t = time.perf_counter()
    c2, bc = croke_constant(2), berger_constant(2)
    checks = [abs(c2 - math.pi / 2) <= 1e-12, abs(bc - 4 / math.pi) <= 1e-12,
              abs(embolic_torus(SQ) - 4) <= 1e-12, abs(embolic_torus(HEXT) - 2 * math.sqrt(3)) <= 1e-12]
    for tor in (SQ, HEXT):
        checks.extend(r.verdict for r in check_constants(tor))
    for name in ("torus-square", "torus-hex"):
        checks.extend(r.verdict for r in check_constants(generate(name, k=2)) if r.check in ("croke", "berger"))
    g2 = {r.check: r for r in check_constants(generate("genus2-octagon"))}["genus_bound"]
    checks.append(g2.verdict and abs(g2.rhs - genus_bound(2)) <= 1e-15)
    assert report(9, "c2 = pi/2, Berger 4/pi, embolic 4 and 2 sqrt3, genus-2 ratio >= 0.5103", all(checks),
                  f"c2 {c2:.6f}, 4/pi {bc:.6f}, genus-2 ratio {g2.lhs:.4f} >= {g2.rhs:.4f}, {sum(checks)}/{len(checks)} checks",
                  time.perf_counter() - t, 5)


def test_c10_pu_trend():
    t = time.perf_counter()
    rep = pu_trend((0, 1, 2, 3))
    ratios = rep.inputs["ratios"]
    assert report(10, "projective plane ratio monotone toward 2/pi, within 10% at k = 3", rep.verdict,
                  "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + f"; gap at k = 3 {100 * rep.lhs:.2f}%",
                  time.perf_counter() - t)


def test_c11_properties():
    t = time.perf_counter()
    rng = np.random.default_rng(11)
    checks = {}
    inv = True
    for _ in range(100):
        n = int(rng.integers(2, 5))
        B = rng.normal(size=(n, n))
        if abs(np.linalg.det(B)) < 0.1:
            continue
        a, b = FlatTorus(B), FlatTorus(random_unimodular(n, rng) @ B)
        c = float(rng.uniform(0.2, 5))
        inv &= abs(systolic_ratio_torus(a) - systolic_ratio_torus(b)) <= 1e-9 * systolic_ratio_torus(a)
        inv &= abs(shortest_vector(FlatTorus(c * B)).norm - c * shortest_vector(a).norm) <= 1e-12 * c
        L = 1.5 * shortest_vector(a).norm
        inv &= orbit_count(a, L) == orbit_count(b, L)
    checks["unimodular and scaling invariance"] = inv
    mono = True
    for name in NON_SPHERES + ["sphere-tetra"]:
        s = generate(name)
        areas = [subdivide(s, k).total_area for k in range(4)]
        mono &= max(abs(a - areas[0]) for a in areas) <= 1e-12 * max(1.0, areas[0])
        if name != "sphere-tetra":
            sys_vals = [homotopy_systole(subdivide(s, k)).length for k in range(3)]
            mono &= all(y <= x + 1e-12 for x, y in zip(sys_vals, sys_vals[1:]))
    checks["subdivision area and systole monotonicity"] = mono
    dual = True
    for name in NON_SPHERES:
        s = generate(name, k=2)
        sys_len = homotopy_systole(s).length
        for frac in (12, 8, 6):
            dual &= len(uncovered_vertices(greedy_ball_system(s, sys_len / frac), 2.0)) == 0
    checks["packing/covering duality"] = dual
    argv = ["entropy", "--input", "genus2-octagon", "--window", "1:3", "--points", "5"]
    checks["byte-identical reports"] = run(argv) == run(argv) and run(argv)[0] == 0
    ok = all(checks.values())
    assert report(11, "property suites", ok, ", ".join(f"{k}: {'ok' if v else 'broken'}" for k, v in checks.items()),
                  time.perf_counter() - t)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                pass
            except Exception as exc:
                print(f"{name}: FAIL ({type(exc).__name__}: {exc})")
