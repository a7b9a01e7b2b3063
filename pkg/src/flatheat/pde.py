"""Finite-difference heat-equation oracle on the fundamental parallelogram.

Solves du/dt = Lap u in lattice coordinates x = p b1 + q b2 with periodic
wraparound, using explicit Euler and the 9-point stencil whose mixed term is
the centered cross difference.  The stencil telescopes, so discrete mass is
conserved up to roundoff.  Serves as an independent check on the analytic
kernel evaluators: a narrow Gaussian evolved numerically must match the
Gaussian-smoothed kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, UnstableStep
from .lattice import ReducedLattice
from .kernels import heat_values
from .surfaces import Torus


def laplacian_coefficients(lat: ReducedLattice) -> dict:
    """Coefficients of Lap = g11 d_pp + 2 g12 d_pq + g22 d_qq in lattice coords.

    (g_ij) is the inverse Gram matrix of the basis rows.
    """
    a, b = lat.a, lat.b
    det = b * b
    return {"g11": (a * a + b * b) / det, "g12": a / det, "g22": 1.0 / det}


def stable_step(lat: ReducedLattice, n: int) -> float:
    """Largest explicit-Euler step allowed by the stability precondition."""
    g = laplacian_coefficients(lat)
    h = 1.0 / n
    return h * h / (2.0 * (g["g11"] + g["g22"] + 2.0 * abs(g["g12"])))


@dataclass(frozen=True, eq=False)
class GridSolution:
    lattice: ReducedLattice
    n: int
    dt: float
    field: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter("grid resolution must be at least 2")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidParameter(f"dt must be positive, got {self.dt}")
        if self.time < 0:
            raise InvalidParameter("time must be non-negative")
        f = np.asarray(self.field, dtype=float)
        if f.shape != (self.n, self.n):
            raise InvalidParameter(f"field must be {self.n}x{self.n}, got {f.shape}")
        if not np.all(np.isfinite(f)):
            raise InvalidParameter("field must be finite")
        object.__setattr__(self, "field", f)

    @property
    def mass(self) -> float:
        return float(self.field.sum()) * self.lattice.covolume / (self.n * self.n)

    @property
    def nodes_plane(self) -> np.ndarray:
        s = np.arange(self.n) / self.n
        p, q = np.meshgrid(s, s, indexing="ij")
        return np.stack([p, q], axis=-1) @ self.lattice.basis


def gaussian_state(lat: ReducedLattice, n: int, sigma: float | None = None,
                   dt: float | None = None) -> GridSolution:
    """Narrow periodized Gaussian bump at the origin (default sigma = 4h).

    The field samples the analytic kernel at time sigma^2/2, so an evolved
    solution at time t is comparable to the kernel at t + sigma^2/2.
    """
    h = 1.0 / n
    sigma = 4.0 * h if sigma is None else float(sigma)
    if sigma <= 0:
        raise InvalidParameter("sigma must be positive")
    if dt is None:
        dt = 0.5 * stable_step(lat, n)
    surf = Torus(lattice=lat)
    sol = GridSolution(lattice=lat, n=n, dt=float(dt), field=np.zeros((n, n)))
    vals, _, _, _ = heat_values(surf, 0.5 * sigma * sigma, np.zeros(2),
                                sol.nodes_plane, eps=1e-14)
    return GridSolution(lattice=lat, n=n, dt=float(dt), field=vals, time=0.0)


def _laplacian(field: np.ndarray, g: dict, h: float) -> np.ndarray:
    up = np.pad(field, 1, mode="wrap")
    c = up[1:-1, 1:-1]
    axis_p = up[2:, 1:-1] + up[:-2, 1:-1] - 2.0 * c
    axis_q = up[1:-1, 2:] + up[1:-1, :-2] - 2.0 * c
    cross = up[2:, 2:] + up[:-2, :-2] - up[2:, :-2] - up[:-2, 2:]
    return (g["g11"] * axis_p + g["g22"] * axis_q + 0.5 * g["g12"] * cross) / (h * h)


def evolve(initial: GridSolution, t_final: float) -> GridSolution:
    """Advance to t_final with explicit Euler; the last partial step shrinks."""
    if t_final < initial.time:
        raise InvalidParameter("t_final must not precede the current time")
    bound = stable_step(initial.lattice, initial.n)
    if initial.dt > bound * (1.0 + 1e-12):
        raise UnstableStep(
            f"dt = {initial.dt:g} exceeds the stability bound {bound:g}")
    g = laplacian_coefficients(initial.lattice)
    h = 1.0 / initial.n
    u = initial.field.copy()
    remaining = t_final - initial.time
    steps = int(remaining / initial.dt)
    for _ in range(steps):
        u += initial.dt * _laplacian(u, g, h)
    last = remaining - steps * initial.dt
    if last > 1e-15 * max(t_final, 1.0):
        u += last * _laplacian(u, g, h)
    return GridSolution(lattice=initial.lattice, n=initial.n, dt=initial.dt,
                        field=u, time=t_final)


def _voronoi_representatives(sol: GridSolution) -> np.ndarray:
    """Minimum-norm plane representative of every node; ties get +inf marker."""
    n = sol.n
    s = np.arange(n) / n
    p, q = np.meshgrid(s, s, indexing="ij")
    coords = np.stack([p, q], axis=-1)
    best = np.full((n, n), np.inf)
    second = np.full((n, n), np.inf)
    rep = np.zeros((n, n, 2))
    for dp in (-1.0, 0.0, 1.0):
        for dq in (-1.0, 0.0, 1.0):
            cand = (coords + np.array([dp, dq])) @ sol.lattice.basis
            r = np.hypot(cand[..., 0], cand[..., 1])
            closer = r < best
            second = np.where(closer, best, np.minimum(second, r))
            rep = np.where(closer[..., None], cand, rep)
            best = np.where(closer, r, best)
    return rep, best, second


def radial_derivative_field(sol: GridSolution):
    """x . grad u at every node, x the minimum-norm representative.

    Returns (values, boundary_mask); masked nodes sit on the cell boundary
    (their representative is not unique) and carry no sign information.
    """
    h = 1.0 / sol.n
    up = np.pad(sol.field, 1, mode="wrap")
    gp = (up[2:, 1:-1] - up[:-2, 1:-1]) / (2.0 * h)
    gq = (up[1:-1, 2:] - up[1:-1, :-2]) / (2.0 * h)
    binv = np.linalg.inv(sol.lattice.basis)
    gc = np.stack([gp, gq], axis=-1)
    gx = gc @ binv.T
    rep, best, second = _voronoi_representatives(sol)
    boundary = second - best < 1e-9
    return (rep * gx).sum(axis=-1), boundary
