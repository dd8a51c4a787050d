"""Flat tori R^n / L for n = 2, 3, 4.

Shortest vectors and orbit counts come from exhaustive enumeration inside a
coefficient box that is certified by the dual basis: if ``v = c @ B`` and
``|v| <= r`` then ``|c_i| <= r * |column i of B^-1|``.  The box is taken in
a reduced basis so it stays small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimit, SingularBasis

DET_TOL = 1e-12
MAX_BOX = 20_000_000
MAX_COUNT = 50_000_000


@dataclass(frozen=True, eq=False)
class FlatTorus:
    """Torus R^n / L; rows of ``basis`` generate L."""

    basis: np.ndarray

    def __post_init__(self):
        try:
            B = np.array(self.basis, dtype=float)
        except (TypeError, ValueError):
            raise InputError("basis must be a numeric matrix") from None
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] not in (2, 3, 4):
            raise InputError("basis must be an n x n matrix with n in {2, 3, 4}")
        if not np.all(np.isfinite(B)):
            raise InputError("basis entries must be finite")
        if abs(np.linalg.det(B)) <= DET_TOL:
            raise SingularBasis("basis is singular")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    @classmethod
    def from_tau(cls, x: float, y: float) -> "FlatTorus":
        if not y > 0:
            raise InputError("tau must lie in the upper half plane")
        return cls(np.array([[1.0, 0.0], [float(x), float(y)]]))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FlatTorus":
        if "basis" in obj:
            return cls(obj["basis"])
        if "tau" in obj:
            tau = obj["tau"]
            if not isinstance(tau, (list, tuple)) or len(tau) != 2:
                raise InputError('"tau" must be a pair [x, y]')
            return cls.from_tau(float(tau[0]), float(tau[1]))
        raise InputError('torus JSON needs "basis" or "tau"')

    def to_json_obj(self) -> dict:
        return {"basis": self.basis.tolist()}


@dataclass(frozen=True)
class LatticeVector:
    coefficients: tuple[int, ...]
    vector: np.ndarray
    norm: float


def _gauss(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = B.copy()
    U = np.eye(2, dtype=np.int64)
    for _ in range(10_000):
        if b[0] @ b[0] > b[1] @ b[1] * (1 + 1e-12):
            b = b[::-1].copy()
            U = U[::-1].copy()
        mu = round(float(b[0] @ b[1]) / float(b[0] @ b[0]))
        if mu == 0:
            break
        cand = b[1] - mu * b[0]
        # ties (|<b0,b1>| = |b0|^2 / 2) leave an already reduced basis alone
        if not cand @ cand < b[1] @ b[1] * (1 - 1e-12):
            break
        b[1] = b[1] - mu * b[0]
        U[1] = U[1] - mu * U[0]
    return b, U


def _pairwise(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = B.copy()
    n = len(b)
    U = np.eye(n, dtype=np.int64)
    for _ in range(10_000):
        changed = False
        order = np.argsort(np.einsum("ij,ij->i", b, b), kind="stable")
        b, U = b[order].copy(), U[order].copy()
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                mu = round(float(b[i] @ b[j]) / float(b[i] @ b[i]))
                if mu != 0:
                    cand = b[j] - mu * b[i]
                    if cand @ cand < b[j] @ b[j] * (1 - 1e-12):
                        b[j] = cand
                        U[j] = U[j] - mu * U[i]
                        changed = True
        if not changed:
            break
    order = np.argsort(np.einsum("ij,ij->i", b, b), kind="stable")
    return b[order].copy(), U[order].copy()


def reduce_with_transform(torus: FlatTorus) -> tuple[np.ndarray, np.ndarray]:
    """Reduced basis and the unimodular matrix U with ``reduced = U @ basis``."""
    B = torus.basis
    if torus.dim == 2:
        return _gauss(B)
    return _pairwise(B)


def reduce_basis(torus: FlatTorus) -> FlatTorus:
    """Gauss reduction (n = 2) or greedy pairwise reduction (n <= 4)."""
    b, _ = reduce_with_transform(torus)
    return FlatTorus(b)


def _box_bounds(B: np.ndarray, radius: float) -> np.ndarray:
    inv = np.linalg.inv(B)
    col = np.linalg.norm(inv, axis=0)
    return np.floor(radius * col * (1 + 1e-12) + 1e-12).astype(np.int64)


def _enumerate_box(K: np.ndarray) -> np.ndarray:
    size = int(np.prod(2 * K + 1))
    if size > MAX_BOX:
        raise ResourceLimit(f"enumeration box of {size} points exceeds the cap")
    axes = [np.arange(-k, k + 1) for k in K]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def _short_coefficients(torus: FlatTorus, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Original-basis coefficients and norms of all vectors with norm <= radius."""
    red, U = reduce_with_transform(torus)
    K = _box_bounds(red, radius)
    C = _enumerate_box(K)
    vec = C @ red
    nrm = np.sqrt(np.einsum("ij,ij->i", vec, vec))
    keep = nrm <= radius * (1 + 1e-12) + 1e-15
    return C[keep] @ U, nrm[keep]


def shortest_vector(torus: FlatTorus) -> LatticeVector:
    """Nonzero lattice vector of least norm (lexicographically least coefficients on ties)."""
    vecs = minimal_vectors(torus)
    return vecs[0]


def minimal_vectors(torus: FlatTorus) -> list[LatticeVector]:
    """All minimal nonzero vectors, sorted by coefficients."""
    red, _ = reduce_with_transform(torus)
    r = float(np.min(np.linalg.norm(red, axis=1)))
    C, nrm = _short_coefficients(torus, r)
    nz = np.any(C != 0, axis=1)
    C, nrm = C[nz], nrm[nz]
    m = nrm.min()
    sel = nrm <= m * (1 + 1e-12)
    coeffs = sorted(tuple(int(x) for x in row) for row in C[sel])
    out = []
    for c in coeffs:
        v = np.array(c, dtype=float) @ torus.basis
        out.append(LatticeVector(c, v, float(np.linalg.norm(v))))
    return out


def systole(torus: FlatTorus) -> float:
    return shortest_vector(torus).norm


def systolic_ratio_torus(torus: FlatTorus) -> float:
    """Volume over systole^n."""
    return torus.volume / systole(torus) ** torus.dim


def embolic_torus(torus: FlatTorus) -> float:
    """Volume over inj^n with inj = sys / 2."""
    return torus.volume / (systole(torus) / 2.0) ** torus.dim


def lattice_vectors_within(torus: FlatTorus, radius: float) -> np.ndarray:
    """Embedded lattice vectors of norm <= radius (zero included)."""
    C, _ = _short_coefficients(torus, radius)
    return C.astype(float) @ torus.basis


def lattice_norms_within(torus: FlatTorus, radius: float) -> np.ndarray:
    """Sorted norms of all lattice vectors (zero included) up to ``radius``."""
    _, nrm = _short_coefficients(torus, radius)
    if len(nrm) > MAX_COUNT:
        raise ResourceLimit("orbit count exceeds the cap")
    return np.sort(nrm)


def orbit_count(torus: FlatTorus, L: float) -> int:
    """Number of lattice vectors of norm <= L, including zero."""
    if L < 0:
        raise InputError("L must be nonnegative")
    return int(len(lattice_norms_within(torus, float(L))))


def reduce_tau(x: float, y: float, boundary_tol: float = 1e-12) -> tuple[float, float]:
    """Representative of tau in the standard fundamental domain.

    Alternates translation and inversion.  Boundary points, up to
    ``boundary_tol``, are normalized to x >= 0: x = -1/2 goes to 1/2, and on
    the unit circle x goes to -x (the map tau -> -1/tau).
    """
    if not y > 0:
        raise InputError("tau must lie in the upper half plane")
    t = complex(x, y)
    for _ in range(100_000):
        t = complex(t.real - math.floor(t.real + 0.5), t.imag)
        if abs(t) < 1 - 1e-15:
            t = -1 / t
        else:
            break
    xr, yr = t.real, t.imag
    if abs(xr + 0.5) <= boundary_tol:
        xr += 1.0
    if abs(abs(t) - 1) <= boundary_tol and xr < 0:
        xr = -xr
    return xr, yr


def random_unimodular(n: int, rng: np.random.Generator, steps: int = 12) -> np.ndarray:
    """Random integer matrix of determinant +-1 built from elementary moves."""
    U = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        U[i] += int(rng.integers(-2, 3)) * U[j]
    if rng.random() < 0.5:
        perm = rng.permutation(n)
        U = U[perm]
    return U


__all__ = [
    "FlatTorus", "LatticeVector", "reduce_basis", "shortest_vector", "minimal_vectors",
    "systolic_ratio_torus", "embolic_torus", "orbit_count", "lattice_vectors_within",
    "lattice_norms_within", "reduce_tau", "random_unimodular", "systole",
]
