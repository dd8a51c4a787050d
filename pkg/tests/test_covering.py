import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from systole_lab.covering import (develop, homology_systole_z2, homotopy_systole, is_contractible,
                                  loop_class_count, systole_length)
from systole_lab.errors import SimplyConnected, TrivialHomology
from systole_lab.generators import generate, torus_grid
from systole_lab.lattice import FlatTorus, orbit_count
from systole_lab.surface import Cycle, cycle_z2_class, subdivide, validate_surface

from conftest import rp2_unit

SQ = FlatTorus(np.eye(2))
HEXT = FlatTorus([[1.0, 0.0], [0.5, math.sqrt(3) / 2]])


# independent oracles ----------------------------------------------------------

def _face_space(surface):
    """Row-reduced GF(2) span of the face boundaries, as {pivot: row} bitmasks."""
    basis = {}
    for f in range(surface.n_faces):
        row = 0
        for e in surface.tri_edges[f]:
            row ^= 1 << int(e)
        while row:
            p = row.bit_length() - 1
            if p not in basis:
                basis[p] = row
                break
            row ^= basis[p]
    return basis


def _is_boundary(surface, walk, basis):
    row = 0
    for a, b in zip(walk[:-1], walk[1:]):
        row ^= 1 << surface.edge_between(a, b)
    while row:
        p = row.bit_length() - 1
        if p not in basis:
            return False
        row ^= basis[p]
    return True


def _brute_z2_systole(surface, bound):
    """Shortest simple cycle outside the span of face boundaries, by DFS."""
    basis = _face_space(surface)
    nbrs = [[] for _ in range(surface.n_vertices)]
    for e, (a, b) in enumerate(surface.edges):
        nbrs[a].append((int(b), surface.edge_length[e]))
        nbrs[b].append((int(a), surface.edge_length[e]))
    best = math.inf

    def dfs(start, path, length):
        nonlocal best
        u = path[-1]
        for w, l in nbrs[u]:
            nl = length + l
            if nl > min(best, bound) + 1e-12:
                continue
            if w == start and len(path) >= 3:
                if not _is_boundary(surface, path + [start], basis):
                    best = min(best, nl)
            elif w > start and w not in path:
                dfs(start, path + [w], nl)

    for s in range(surface.n_vertices):
        dfs(s, [s], 0.0)
    return best


def _grid_holonomy(n, walk):
    """Net translation of a closed walk on the n x n unit-square grid torus."""
    pos = lambda v: np.array([v % n, v // n], float) / n
    total = np.zeros(2)
    for a, b in zip(walk[:-1], walk[1:]):
        d = pos(b) - pos(a)
        total += d - np.round(d)
    return total


def _random_closed_walk(surface, rng, steps):
    nbrs = [[] for _ in range(surface.n_vertices)]
    for a, b in surface.edges:
        nbrs[a].append(int(b))
        nbrs[b].append(int(a))
    v0 = int(rng.integers(surface.n_vertices))
    walk = [v0]
    for _ in range(steps):
        walk.append(int(rng.choice(nbrs[walk[-1]])))
    back = surface.shortest_path(walk[-1], v0)
    return walk + back[1:]


def _relabel(surface, seed):
    perm = np.random.default_rng(seed).permutation(surface.n_vertices)
    return validate_surface(perm[surface.triangles], surface.lengths), perm


# develop ----------------------------------------------------------------------

def test_develop_sphere_single_lift(tetra):
    assert develop(tetra, 0, 0.5).n_vertices == 1
    for L in (3.0, 10.0):
        region = develop(tetra, 0, L)
        assert region.n_lifts == 1
        assert region.n_vertices == tetra.n_vertices
        assert region.check_local_isometry()


def test_develop_square_lifts(square):
    flat = develop(square, 0, 2.0, metric="flat")
    assert flat.count_lifts(1.0) == 5
    assert flat.count_lifts(1.5) == 9  # lattice points of norm <= 1.5
    assert flat.count_lifts(2.0) == 13
    assert np.allclose(flat.lift_distances[:5], [0, 1, 1, 1, 1])
    graph = develop(square, 0, 2.0, metric="graph")
    assert graph.count_lifts(2.0) == 13
    assert graph.check_local_isometry()


def test_develop_rp2_two_lifts():
    region = develop(rp2_unit(), 0, 10.0)
    assert region.n_lifts == 2
    assert region.n_vertices == 12


def test_develop_octagon_growth(octagon):
    region = develop(octagon, 0, 3.0)
    assert [region.count_lifts(L) for L in (1, 2, 3)] == [9, 65, 465]
    assert region.check_local_isometry()


def test_develop_relabeling_invariant(octagon):
    s, perm = _relabel(octagon, 5)
    for v in (0, 7, 29):
        a = develop(octagon, v, 2.5).lift_distances
        b = develop(s, int(perm[v]), 2.5).lift_distances
        assert np.allclose(a, b)


# contractibility ----------------------------------------------------------------

def test_trivial_walks(square):
    a, b, c = (int(x) for x in square.triangles[0])
    assert is_contractible(square, [a, b, c, a])
    assert is_contractible(square, [a, b, a])
    assert is_contractible(square, [a])


def test_meridian_not_contractible(square):
    meridian = [0, 1, 2, 0]
    assert cycle_z2_class(square, Cycle.from_walk(square, meridian)) != 0
    assert not is_contractible(square, meridian)


@pytest.mark.parametrize("n", [3, 5])
def test_contractible_iff_zero_holonomy(n):
    s = torus_grid(np.eye(2), n=n)
    rng = np.random.default_rng(n)
    for _ in range(60):
        walk = _random_closed_walk(s, rng, int(rng.integers(1, 14)))
        hol = _grid_holonomy(n, walk)
        assert is_contractible(s, walk) == bool(np.allclose(hol, 0, atol=1e-9))


@pytest.mark.parametrize("name", ["genus2-octagon", "rp2-icosa"])
def test_contractible_walks_are_z2_trivial(name):
    s = generate(name)
    basis = _face_space(s)
    rng = np.random.default_rng(3)
    for _ in range(40):
        walk = _random_closed_walk(s, rng, int(rng.integers(1, 10)))
        if not _is_boundary(s, walk, basis):
            assert not is_contractible(s, walk)
        # a loop followed by its reverse is null-homotopic
        assert is_contractible(s, walk + walk[::-1][1:])


def test_octagon_side_loop_is_essential(octagon):
    res = homotopy_systole(octagon)
    assert not is_contractible(octagon, res.cycle)
    doubled = res.cycle.vertices + res.cycle.vertices[1:]
    assert not is_contractible(octagon, doubled)


# systoles ---------------------------------------------------------------------

@pytest.mark.parametrize("name", ["torus-square", "torus-hex"])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_torus_systoles(name, k):
    s = generate(name, k=k)
    res = homotopy_systole(s)
    assert res.length == pytest.approx(1.0, abs=1e-12)
    assert res.certified and res.kind == "homotopy"
    assert res.cycle.length == pytest.approx(res.length, abs=1e-12)
    assert not is_contractible(s, res.cycle)
    z = homology_systole_z2(s)
    assert z.length == pytest.approx(1.0, abs=1e-12)


def test_square_systole_fine():
    assert homotopy_systole(generate("torus-square", k=4)).length == pytest.approx(1.0, abs=1e-12)


def test_sphere_errors(tetra):
    with pytest.raises(SimplyConnected):
        homotopy_systole(tetra)
    with pytest.raises(TrivialHomology):
        homology_systole_z2(tetra)


def test_rp2_six_z2_systole():
    s = rp2_unit()
    z = homology_systole_z2(s)
    assert z.length == pytest.approx(3.0, abs=1e-12)
    assert _brute_z2_systole(s, 6.0) == pytest.approx(3.0, abs=1e-12)
    assert cycle_z2_class(s, z.cycle) != 0
    assert homotopy_systole(s).length == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("name,k", [("torus-square", 0), ("torus-square", 1), ("rp2-icosa", 0),
                                    ("rp2-icosa", 1), ("genus2-octagon", 0)])
def test_z2_systole_against_brute_force(name, k):
    s = generate(name, k=k)
    z = homology_systole_z2(s)
    assert z.length == pytest.approx(_brute_z2_systole(s, z.length * 1.001), abs=1e-9)


@pytest.mark.parametrize("name", ["torus-square", "torus-hex", "genus2-octagon", "rp2-icosa"])
def test_homotopy_below_homology(name):
    s = generate(name, k=1)
    h = homotopy_systole(s)
    z = homology_systole_z2(s)
    assert h.length <= z.length + 1e-12
    assert cycle_z2_class(s, z.cycle) != 0
    assert not is_contractible(s, h.cycle)


@pytest.mark.parametrize("name", ["torus-square", "genus2-octagon", "rp2-icosa"])
def test_systole_subdivision_monotone(name):
    vals = [homotopy_systole(generate(name, k=k)).length for k in range(3)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_rp2_systole_values():
    assert homotopy_systole(generate("rp2-icosa", k=1)).length == pytest.approx(math.pi, abs=1e-9)


def test_systole_relabeling_invariant(octagon):
    s, _ = _relabel(octagon, 9)
    assert homotopy_systole(s).length == pytest.approx(homotopy_systole(octagon).length, abs=1e-12)


def test_threads_agree():
    s = generate("torus-hex", k=2)
    assert homotopy_systole(s, threads=4).length == homotopy_systole(s).length


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(["torus-square", "torus-hex", "rp2-icosa"]), st.integers(0, 10_000))
def test_fast_route_matches_full_search(name, seed):
    s = generate(name)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        L = s.edge_length * rng.uniform(0.8, 1.25, size=s.n_edges)
        try:
            t = s.with_edge_lengths(L)
        except Exception:
            continue
        assert systole_length(t) == pytest.approx(homotopy_systole(t).length, abs=1e-12)
        return


# loop classes -------------------------------------------------------------------

def test_loop_class_examples(square, tetra):
    assert loop_class_count(square, 0, 0.0) == 1
    assert loop_class_count(square, 0, 2.0) == 13
    assert loop_class_count(tetra, 0, 5.0) == 1
    assert loop_class_count(generate("genus2-octagon"), 0, 0.0) == 1


@pytest.mark.parametrize("name,torus", [("torus-square", SQ), ("torus-hex", HEXT)])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_loop_classes_equal_orbits(name, torus, k):
    s = generate(name, k=k)
    counts = [loop_class_count(s, 0, L) for L in range(7)]
    assert counts == [orbit_count(torus, L) for L in range(7)]


def test_loop_class_cache(tmp_path, monkeypatch, square):
    monkeypatch.setenv("SYSTOLE_LAB_CACHE", str(tmp_path))
    first = loop_class_count(square, 0, 4.0)
    assert list(tmp_path.iterdir())
    assert loop_class_count(square, 0, 3.0) == orbit_count(SQ, 3.0)
    assert loop_class_count(square, 0, 4.0) == first == orbit_count(SQ, 4.0)
