"""Flat surfaces (tori and Klein bottles), orbits, distances, minimal geodesics.

A torus is R^2 / Lambda with Lambda in the canonical reduced frame.  A Klein
bottle of height b is R^2 modulo (x1, x2) ~ (x1 + 1, x2) ~ (1 - x1, x2 + b);
its orientable double cover is the rectangular torus with lattice
{(1, 0), (0, 2b)} and the deck transformation is the glide map
g(y) = (1 - y1, y2 + b).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .lattice import ReducedLattice, cut_distance, torus_distance

_GEODESIC_TOL = 1e-12
# slack for deciding "the straight segment is still minimal" in bisection
_MINIMAL_SLACK = 1e-12


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(2)


@dataclass(frozen=True)
class Torus:
    lattice: ReducedLattice

    @property
    def area(self) -> float:
        return self.lattice.b


@dataclass(frozen=True)
class KleinBottle:
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise InvalidParameter(f"Klein bottle height must be positive, got {self.b}")

    @property
    def area(self) -> float:
        return self.b


FlatSurface = Torus | KleinBottle


def torus(a: float, b: float) -> Torus:
    return Torus(ReducedLattice.from_parameters(a, b))


def klein_bottle(b: float) -> KleinBottle:
    return KleinBottle(float(b))


def surface_descriptor(surface: FlatSurface) -> dict:
    """Plain-data description of a surface, used in reports."""
    if isinstance(surface, Torus):
        return {"kind": "torus", "a": surface.lattice.a, "b": surface.lattice.b}
    return {"kind": "klein", "b": surface.b}


@dataclass(frozen=True)
class Geodesic:
    """A unit-speed straight segment that is minimal exactly for s in [0, s_max]."""

    base: tuple[float, float]
    direction: tuple[float, float]
    s_max: float


def glide(surface: KleinBottle, y) -> np.ndarray:
    y = _vec(y)
    return np.array([1.0 - y[0], y[1] + surface.b])


def orbit_representatives(surface: FlatSurface, y, shell: int = 1) -> np.ndarray:
    """Plane points equivalent to y, out to the given coefficient shell.

    Torus: y + m1 b1 + m2 b2 for |m1|, |m2| <= shell.  Klein bottle: both
    (y1 + m, y2 + 2kb) and the glide images (1 - y1 + m, b + y2 + 2kb).
    """
    y = _vec(y)
    rng = np.arange(-shell, shell + 1)
    mm, kk = np.meshgrid(rng, rng, indexing="ij")
    mn = np.stack([mm.ravel(), kk.ravel()], axis=1).astype(float)
    if isinstance(surface, Torus):
        return y[None, :] + mn @ surface.lattice.basis
    cover = np.array([[1.0, 0.0], [0.0, 2.0 * surface.b]])
    direct = y[None, :] + mn @ cover
    flipped = glide(surface, y)[None, :] + mn @ cover
    return np.concatenate([direct, flipped], axis=0)


def _recenter(point: np.ndarray, target: np.ndarray, rows: np.ndarray) -> np.ndarray:
    coeff = np.linalg.solve(rows.T, point - target)
    return point - rows.T @ np.round(coeff)


def surface_distance(surface: FlatSurface, x, y) -> float:
    """Geodesic distance: min plane distance over orbit representatives.

    Representatives are recentred toward x, then shells grow until the ring
    lower bound shows no farther shell can improve the minimum.
    """
    x, y = _vec(x), _vec(y)
    if isinstance(surface, Torus):
        anchors = [_recenter(y, x, surface.lattice.basis)]
        rows = surface.lattice.basis
        hmin = surface.lattice.b / float(np.hypot(surface.lattice.a, surface.lattice.b))
    else:
        rows = np.array([[1.0, 0.0], [0.0, 2.0 * surface.b]])
        anchors = [_recenter(y, x, rows), _recenter(glide(surface, y), x, rows)]
        hmin = min(1.0, 2.0 * surface.b)
    anchors = np.array(anchors)
    offsets = np.hypot(*(anchors - x).T)
    best = float(offsets.min())
    for shell in range(1, 80):
        rng = np.arange(-shell, shell + 1)
        mm, kk = np.meshgrid(rng, rng, indexing="ij")
        mn = np.stack([mm.ravel(), kk.ravel()], axis=1).astype(float)
        pts = anchors[:, None, :] + (mn @ rows)[None, :, :]
        d = pts - x[None, None, :]
        best = min(best, float(np.min(np.hypot(d[..., 0], d[..., 1]))))
        if best <= (shell + 1) * hmin - float(offsets.max()):
            return best
    return best  # pragma: no cover - ring bound terminates far earlier


def minimal_geodesic(surface: FlatSurface, base, direction) -> Geodesic:
    """Largest s_max such that base + s * direction is minimal on [0, s_max].

    Tori: the cut distance of the direction (independent of base).  Klein
    bottles: bisection on "distance equals arc length", to 1e-12.
    """
    base = _vec(base)
    u = _vec(direction)
    nu = float(np.hypot(*u))
    if nu == 0:
        raise InvalidParameter("direction must be non-zero")
    u = u / nu
    if isinstance(surface, Torus):
        s_max = cut_distance(surface.lattice, u)
        return Geodesic(tuple(base), tuple(u), s_max)

    reps = orbit_representatives(surface, base, shell=2)
    gaps = np.hypot(*(reps - base).T)
    sys = float(np.min(gaps[gaps > 1e-12]))

    def minimal(s: float) -> bool:
        return s - surface_distance(surface, base, base + s * u) <= _MINIMAL_SLACK

    lo = 0.45 * sys
    hi = math.sqrt(1.0 + 4.0 * surface.b ** 2)
    if not minimal(lo):  # pragma: no cover - sys/2 is always minimal
        raise InvalidParameter("failed to bracket the cut point")
    while hi - lo > _GEODESIC_TOL:
        mid = 0.5 * (lo + hi)
        if minimal(mid):
            lo = mid
        else:
            hi = mid
    return Geodesic(tuple(base), tuple(u), 0.5 * (lo + hi))
