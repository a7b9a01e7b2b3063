"""Rank-2 planar lattices: canonical reduction, classification, duality, Voronoi geometry.

The canonical frame places a shortest lattice vector at (1, 0) and a shortest
independent vector at (-a, b) with 0 <= a <= 1/2, b > 0 and a^2 + b^2 >= 1.
Everything downstream (distances, kernels, scans) works in this frame; the
reduction records the similarity transform needed to map back to the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateBasis

_DEGENERACY_RTOL = 1e-12
# collapse a Voronoi hexagon to a rectangle when adjacent vertices coincide
_VERTEX_COLLAPSE = 1e-12


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(2)
    return v


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True)
class RawBasis:
    """A pair of linearly independent plane vectors spanning a lattice."""

    u: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self):
        u, v = _vec(self.u), _vec(self.v)
        object.__setattr__(self, "u", (float(u[0]), float(u[1])))
        object.__setattr__(self, "v", (float(v[0]), float(v[1])))
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            raise DegenerateBasis("basis vectors must be finite")
        nu, nv = float(np.hypot(*u)), float(np.hypot(*v))
        if abs(_cross(u, v)) <= _DEGENERACY_RTOL * nu * nv:
            raise DegenerateBasis(f"basis {tuple(u)}, {tuple(v)} is numerically dependent")


@dataclass(frozen=True)
class ReducedLattice:
    """Canonical lattice parameters plus the transform back to the input basis.

    The canonical basis is {(1, 0), (-a, b)}.  The input basis is recovered as

        input_rows = basis_change @ (scale * C @ Q^T)

    with C = [[1, 0], [-a, b]], Q = R(rotation) (composed with a reflection
    across the x-axis first when ``reflect`` is set), and ``basis_change`` an
    integer matrix of determinant +-1.  Reflected inputs occur because planar
    lattices generically come in chiral pairs that no rotation identifies.
    """

    a: float
    b: float
    scale: float
    rotation: float
    basis_change: tuple[tuple[int, int], tuple[int, int]]
    reflect: bool = False

    def __post_init__(self):
        if not (-1e-12 <= self.a <= 0.5 + 1e-9):
            raise ValueError(f"a out of range: {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be positive: {self.b}")
        if self.a * self.a + self.b * self.b < 1 - 1e-9:
            raise ValueError(f"(a, b) = ({self.a}, {self.b}) lies below the unit circle")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        m = np.asarray(self.basis_change, dtype=np.int64)
        if abs(int(round(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]))) != 1:
            raise ValueError("basis_change must be unimodular")

    @classmethod
    def from_parameters(cls, a: float, b: float) -> "ReducedLattice":
        """Canonical lattice at unit scale with no rotation or basis change."""
        return cls(a=float(a), b=float(b), scale=1.0, rotation=0.0,
                   basis_change=((1, 0), (0, 1)), reflect=False)

    @property
    def basis(self) -> np.ndarray:
        """Canonical basis vectors as rows: (1, 0) and (-a, b)."""
        return np.array([[1.0, 0.0], [-self.a, self.b]])

    @property
    def covolume(self) -> float:
        """Area of the fundamental domain in the canonical frame."""
        return self.b

    def reconstruct_basis(self) -> np.ndarray:
        """Rows of the original input basis, rebuilt from the stored transform."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        q = np.array([[c, -s], [s, c]])
        if self.reflect:
            q = q @ np.array([[1.0, 0.0], [0.0, -1.0]])
        rows = self.scale * (self.basis @ q.T)
        return np.asarray(self.basis_change, dtype=float) @ rows


class LatticeTag(str, Enum):
    SQUARE = "Square"
    RECTANGULAR = "Rectangular"
    ISOSCELES = "Isosceles"
    HONEYCOMB = "Honeycomb"
    GENERIC = "Generic"


@dataclass(frozen=True)
class LatticeClass:
    tag: LatticeTag
    tolerance_used: float


@dataclass(frozen=True)
class DualBasis:
    """Rows v1, v2 with v_i . b_j = delta_ij against the canonical basis."""

    v1: tuple[float, float]
    v2: tuple[float, float]

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.v1, self.v2])


@dataclass(frozen=True, eq=False)
class VoronoiCell:
    """Voronoi cell of the origin: active relevant vectors and ccw vertices."""

    relevant_vectors: np.ndarray  # (k, 2), k in {4, 6}
    vertices: np.ndarray          # (k, 2), counterclockwise

    @property
    def area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return float(0.5 * abs(np.sum(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0])))


def reduce(basis, v=None) -> ReducedLattice:
    """Lagrange-Gauss reduce a basis to the canonical (a, b) frame.

    Accepts either a RawBasis or two vectors.  Raises DegenerateBasis when the
    input is numerically dependent.
    """
    if v is not None:
        basis = RawBasis((float(basis[0]), float(basis[1])), (float(v[0]), float(v[1])))
    elif not isinstance(basis, RawBasis):
        raise TypeError("reduce expects a RawBasis or two vectors")

    u0, v0 = _vec(basis.u), _vec(basis.v)
    p, q = u0.copy(), v0.copy()
    m = np.eye(2, dtype=np.int64)  # rows express (p, q) in terms of (u0, v0)
    for _ in range(256):
        if p @ p > q @ q:
            p, q = q.copy(), p.copy()
            m = m[::-1].copy()
        k = round(float(p @ q) / float(p @ p))
        if k == 0:
            break
        q = q - k * p
        m[1] -= k * m[0]
    else:  # pragma: no cover - Gauss reduction terminates long before this
        raise DegenerateBasis("reduction failed to converge")

    s2 = float(p @ p)
    if _cross(p, q) < 0:
        q = -q
        m[1] = -m[1]
    w1 = float(p @ q) / s2
    if w1 > 0.5:  # fp boundary: q - p is the (weakly) shorter choice
        q = q - p
        m[1] -= m[0]
        w1 = float(p @ q) / s2
    reflect = w1 > 0
    a = abs(w1)
    b = _cross(p, q) / s2
    if reflect:
        q = -q
        m[1] = -m[1]

    det = int(round(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]))
    inv = (
        (int(m[1, 1]) * det, -int(m[0, 1]) * det),
        (-int(m[1, 0]) * det, int(m[0, 0]) * det),
    )
    return ReducedLattice(
        a=min(a, 0.5),
        b=b,
        scale=math.sqrt(s2),
        rotation=math.atan2(float(p[1]), float(p[0])),
        basis_change=inv,
        reflect=bool(reflect),
    )


def classify(lat: ReducedLattice, tol: float = 1e-9) -> LatticeClass:
    """Symmetry class of the canonical (a, b) pair; ties go to the more symmetric tag."""
    a, b = lat.a, lat.b
    if a <= tol:
        tag = LatticeTag.SQUARE if abs(b - 1.0) <= tol else LatticeTag.RECTANGULAR
    elif abs(a - 0.5) <= tol and abs(b - math.sqrt(3.0) / 2.0) <= tol:
        tag = LatticeTag.HONEYCOMB
    elif abs(math.hypot(a, b) - 1.0) <= tol:
        tag = LatticeTag.ISOSCELES
    else:
        tag = LatticeTag.GENERIC
    return LatticeClass(tag=tag, tolerance_used=tol)


def dual(lat: ReducedLattice) -> DualBasis:
    """Dual basis of the canonical lattice: v1 = (1, a/b), v2 = (0, 1/b)."""
    return DualBasis(v1=(1.0, lat.a / lat.b), v2=(0.0, 1.0 / lat.b))


def _bisector_intersection(n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    mat = np.array([n1, n2])
    rhs = 0.5 * np.array([n1 @ n1, n2 @ n2])
    return np.linalg.solve(mat, rhs)


def voronoi(lat: ReducedLattice) -> VoronoiCell:
    """Voronoi cell of the origin in the canonical frame.

    For a > 0 the relevant vectors are +-b1, +-b2, +-(b1+b2) and the cell is a
    hexagon; when adjacent hexagon vertices coincide (rectangular case) the
    inactive pair is dropped and the cell is a rectangle.
    """
    b1 = np.array([1.0, 0.0])
    b2 = np.array([-lat.a, lat.b])

    def build(rel: list[np.ndarray]) -> VoronoiCell:
        rel_arr = np.array(rel)
        order = np.argsort(np.arctan2(rel_arr[:, 1], rel_arr[:, 0]))
        rel_arr = rel_arr[order]
        verts = np.array([
            _bisector_intersection(rel_arr[i], rel_arr[(i + 1) % len(rel_arr)])
            for i in range(len(rel_arr))
        ])
        return VoronoiCell(relevant_vectors=rel_arr, vertices=verts)

    hexagon = build([b1, b2, b1 + b2, -b1, -b2, -(b1 + b2)])
    gaps = np.linalg.norm(hexagon.vertices - np.roll(hexagon.vertices, -1, axis=0), axis=1)
    if gaps.min() < _VERTEX_COLLAPSE:
        return build([b1, b2, -b1, -b2])
    return hexagon


def cut_distance(lat: ReducedLattice, direction) -> float:
    """Distance from the origin to the Voronoi boundary along a unit direction.

    Equals min over relevant vectors l with u.l > 0 of |l|^2 / (2 u.l).
    """
    u = _vec(direction)
    nu = float(np.hypot(*u))
    if nu == 0:
        raise ValueError("direction must be non-zero")
    u = u / nu
    rel = voronoi(lat).relevant_vectors
    dots = rel @ u
    mask = dots > 1e-14
    if not mask.any():  # pragma: no cover - impossible for full-rank lattices
        raise ValueError("no relevant vector on the positive side")
    return float(np.min(np.sum(rel[mask] ** 2, axis=1) / (2.0 * dots[mask])))


def _shift_table(lat: ReducedLattice) -> np.ndarray:
    b = lat.basis
    mn = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)
    return mn @ b


def torus_distance(lat: ReducedLattice, x, y) -> float:
    """Geodesic distance on the flat torus R^2 / lattice (canonical frame)."""
    x, y = _vec(x), _vec(y)
    b = lat.basis
    d = x - y
    coeff = np.linalg.solve(b.T, d)
    d0 = d - b.T @ np.round(coeff)
    cand = d0[None, :] - _shift_table(lat)
    return float(np.min(np.hypot(cand[:, 0], cand[:, 1])))


def covering_radius(lat: ReducedLattice) -> float:
    """Covering radius of the canonical lattice (max Voronoi vertex norm)."""
    v = voronoi(lat).vertices
    return float(np.max(np.hypot(v[:, 0], v[:, 1])))


def covering_radius_of_rows(rows: np.ndarray) -> float:
    """Covering radius of the lattice spanned by the given basis rows."""
    red = reduce(rows[0], rows[1])
    return covering_radius(red) * red.scale
