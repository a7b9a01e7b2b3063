"""Radial monotonicity scans, explicit counterexamples, and critical-point
censuses for heat and projection kernels on flat surfaces.

A kernel F centered at x is geodesically decreasing when s -> F(x, gamma(s))
is non-increasing along every minimal geodesic gamma from x.  The scan samples
directions and arc lengths, evaluates the radial derivative u . grad F with a
certified error bound, and reports witnesses where the derivative certifiably
exceeds the tolerance.  Counterexample constructors rebuild the known failing
configurations in closed form and return revalidatable witnesses.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateCritical,
    InvalidParameter,
    NotSimple,
    ToleranceUnreachable,
    WrongLatticeClass,
)
from .kernels import (
    SpectralMode,
    enumerate_modes,
    eigenbasis_values,
    heat_gradient_values,
    heat_values,
    principal_eigenvalue,
    projection_gradient,
    projection_kernel,
)
from .lattice import LatticeTag, classify, cut_distance
from .surfaces import FlatSurface, KleinBottle, Torus, klein_bottle, minimal_geodesic, torus

_DEFAULT_T_GRID = tuple(2.0 ** k for k in range(-7, 8))
_SCAN_NOTES = (
    "finite direction, arc-length, and time grids: a Monotone verdict is "
    "sampled evidence, not a proof",
    "only fixed time grids are probed; bounded non-repeating time sequences "
    "are outside the reach of this scan",
)


def worker_count() -> int:
    """Thread cap for scan fan-out; FLAT_HEAT_THREADS overrides."""
    env = os.environ.get("FLAT_HEAT_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidParameter(f"FLAT_HEAT_THREADS must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# configuration and result types


@dataclass(frozen=True)
class ScanConfig:
    n_directions: int = 360
    n_arc_samples: int = 64
    t_values: tuple = _DEFAULT_T_GRID
    base_points: tuple | None = None
    derivative_tolerance: float = 1e-12
    kernel_epsilon: float = 1e-13

    def __post_init__(self):
        if self.n_directions < 4:
            raise InvalidParameter("n_directions must be at least 4")
        if self.n_arc_samples < 8:
            raise InvalidParameter("n_arc_samples must be at least 8")
        object.__setattr__(self, "t_values", tuple(float(t) for t in self.t_values))
        if not self.t_values or any(not (t > 0 and math.isfinite(t)) for t in self.t_values):
            raise InvalidParameter("t_values must be positive and finite")
        if not (self.derivative_tolerance > 0 and self.kernel_epsilon > 0):
            raise InvalidParameter("tolerances must be positive")
        if self.base_points is not None:
            object.__setattr__(
                self, "base_points",
                tuple((float(p[0]), float(p[1])) for p in self.base_points))


@dataclass(frozen=True)
class Heat:
    """Scan target: heat kernel; at a fixed time t, or the configured grid."""

    t: float | None = None


@dataclass(frozen=True)
class Projection:
    """Scan target: spectral projection kernel of one eigenvalue."""

    mode: SpectralMode


@dataclass(frozen=True)
class ViolationWitness:
    base: tuple[float, float]
    direction: tuple[float, float]
    s: float
    t: float                      # +inf for projection kernels (large-time limit)
    radial_derivative: float
    error_bound: float
    kernel: str                   # "heat" | "projection"
    eigenvalue: float | None = None


class Verdict(str, Enum):
    MONOTONE = "monotone"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MonotonicityReport:
    config: ScanConfig
    surface: FlatSurface
    witnesses: tuple
    points_checked: int
    inconclusive_count: int
    verdict: Verdict
    notes: tuple = _SCAN_NOTES


# ---------------------------------------------------------------------------
# geometry helpers


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = math.hypot(v[0], v[1])
    if n == 0:
        raise InvalidParameter("direction must be nonzero")
    return v / n


def _scan_directions(surface: FlatSurface, n: int) -> np.ndarray:
    ang = 2.0 * math.pi * np.arange(n) / n
    dirs = [np.stack([np.cos(ang), np.sin(ang)], axis=1)]
    if isinstance(surface, Torus):
        a, b = surface.lattice.a, surface.lattice.b
        forced = [(1.0, 0.0), (0.0, 1.0), (-a, b), (1.0 - a, b), (-1.0 - a, b)]
    else:
        forced = [(1.0, 0.0), (0.0, 1.0)]
    dirs.append(np.array([_unit(f) for f in forced]))
    return np.concatenate(dirs, axis=0)


def _klein_branch_distance(b: float, dx1: np.ndarray, dx2: np.ndarray) -> np.ndarray:
    w1 = dx1 - np.round(dx1)
    w2 = dx2 - 2.0 * b * np.round(dx2 / (2.0 * b))
    return np.hypot(w1, w2)


def _klein_distance(kb: KleinBottle, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact Klein-bottle distance, vectorized; cover lattice is rectangular."""
    b = kb.b
    direct = _klein_branch_distance(b, x[..., 0] - y[..., 0], x[..., 1] - y[..., 1])
    glided = _klein_branch_distance(b, x[..., 0] - 1.0 + y[..., 0],
                                    x[..., 1] - y[..., 1] - b)
    return np.minimum(direct, glided)


def _cut_distances(surface: FlatSurface, base: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Arc length up to which base + s*dir stays a minimal geodesic, per direction."""
    if isinstance(surface, Torus):
        return np.array([cut_distance(surface.lattice, d) for d in dirs])
    b = surface.b
    lo = np.zeros(len(dirs))
    hi = np.full(len(dirs), 0.5 * math.hypot(1.0, 2.0 * b) + 1e-6)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        pts = base[None, :] + mid[:, None] * dirs
        ok = _klein_distance(surface, np.broadcast_to(base, pts.shape), pts) >= mid - 1e-12
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return lo


def _default_bases(surface: FlatSurface, cfg: ScanConfig) -> np.ndarray:
    if cfg.base_points is not None:
        return np.array(cfg.base_points, dtype=float)
    if isinstance(surface, Torus):
        return np.zeros((1, 2))
    g = np.arange(16) / 16.0
    p, q = np.meshgrid(g, g * surface.b, indexing="ij")
    return np.stack([p.ravel(), q.ravel()], axis=1)


# ---------------------------------------------------------------------------
# the scan


def _eval_radial(surface, kernel, t, X, Y, dirs_b, eps):
    """Radial derivatives and error bound for sample blocks X, Y (..., 2)."""
    if isinstance(kernel, Heat):
        grads, err, _, _ = heat_gradient_values(surface, t, X, Y, eps=eps)
    else:
        grads, err = projection_gradient(surface, kernel.mode, X, Y)
    return (grads * dirs_b).sum(axis=-1), err


def _scan_task(surface, kernel, cfg, t, base, dirs, smax):
    ns = cfg.n_arc_samples
    tol = cfg.derivative_tolerance
    S = smax[:, None] * (np.arange(1, ns + 1) / ns)[None, :]
    Y = base[None, None, :] + S[:, :, None] * dirs[:, None, :]
    X = np.broadcast_to(base, Y.shape)
    dirs_b = np.broadcast_to(dirs[:, None, :], Y.shape)
    deriv, err0 = _eval_radial(surface, kernel, t, X, Y, dirs_b, cfg.kernel_epsilon)
    err = np.full(deriv.shape, err0)
    witness = deriv - err > tol
    ambiguous = ~witness & (deriv + err > tol)
    if ambiguous.any():
        d2, e2 = _eval_radial(surface, kernel, t, X[ambiguous], Y[ambiguous],
                              dirs_b[ambiguous], cfg.kernel_epsilon / 16.0)
        deriv[ambiguous] = np.atleast_1d(d2)
        err[ambiguous] = e2
        witness = deriv - err > tol
        ambiguous = ~witness & (deriv + err > tol)
    witnesses = []
    for i, j in np.argwhere(witness):
        witnesses.append(ViolationWitness(
            base=(float(base[0]), float(base[1])),
            direction=(float(dirs[i, 0]), float(dirs[i, 1])),
            s=float(S[i, j]),
            t=t,
            radial_derivative=float(deriv[i, j]),
            error_bound=float(err[i, j]),
            kernel="heat" if isinstance(kernel, Heat) else "projection",
            eigenvalue=None if isinstance(kernel, Heat) else kernel.mode.eigenvalue,
        ))
    return witnesses, int(ambiguous.sum()), deriv.size


def scan(surface: FlatSurface, kernel, cfg: ScanConfig = ScanConfig()) -> MonotonicityReport:
    """Scan radial derivatives of the kernel along minimal geodesics.

    Verdict: Violated when any sample's derivative certifiably exceeds the
    tolerance; Inconclusive when some sample's error bound straddles the
    tolerance even after one retry at epsilon/16; Monotone otherwise.
    """
    if not isinstance(kernel, (Heat, Projection)):
        raise InvalidParameter("kernel must be Heat(...) or Projection(...)")
    dirs = _scan_directions(surface, cfg.n_directions)
    bases = _default_bases(surface, cfg)
    if isinstance(kernel, Heat):
        t_list = [float(kernel.t)] if kernel.t is not None else list(cfg.t_values)
        if any(t <= 0 for t in t_list):
            raise InvalidParameter("heat kernel times must be positive")
    else:
        t_list = [math.inf]
    tasks = []
    for base in bases:
        smax = _cut_distances(surface, base, dirs)
        for t in t_list:
            tasks.append((t, base, smax))
    nw = worker_count()
    run = lambda task: _scan_task(surface, kernel, cfg, task[0], task[1], dirs, task[2])
    if nw > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]
    witnesses = [w for ws, _, _ in results for w in ws]
    inconclusive = sum(amb for _, amb, _ in results)
    points = sum(cnt for _, _, cnt in results)
    witnesses.sort(key=lambda w: (w.t, w.base, math.atan2(w.direction[1], w.direction[0]), w.s))
    if witnesses:
        verdict = Verdict.VIOLATED
    elif inconclusive:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.MONOTONE
    return MonotonicityReport(
        config=cfg, surface=surface, witnesses=tuple(witnesses),
        points_checked=points, inconclusive_count=inconclusive, verdict=verdict)


def mode_for_eigenvalue(surface: FlatSurface, eigenvalue: float) -> SpectralMode:
    for m in enumerate_modes(surface, eigenvalue * (1.0 + 1e-9) + 1e-9):
        if abs(m.eigenvalue - eigenvalue) <= 1e-9 * max(1.0, eigenvalue):
            return m
    raise InvalidParameter(f"no mode at eigenvalue {eigenvalue}")


def revalidate(surface: FlatSurface, witness: ViolationWitness,
               kernel_epsilon: float) -> tuple[float, float]:
    """Re-evaluate a witness's radial derivative at the given epsilon."""
    base = np.array(witness.base)
    u = np.array(witness.direction)
    y = base + witness.s * u
    if witness.kernel == "heat":
        grads, err, _, _ = heat_gradient_values(surface, witness.t, base, y,
                                                eps=kernel_epsilon)
    else:
        mode = mode_for_eigenvalue(surface, witness.eigenvalue)
        grads, err = projection_gradient(surface, mode, base, y)
    return float(grads @ u), float(err)


def radial_curve(surface: FlatSurface, kernel, base, direction, n: int = 101,
                 eps: float = 1e-12):
    """Sampled (s, value, derivative, error_bound) arrays along one geodesic."""
    base = np.asarray(base, dtype=float)
    u = _unit(direction)
    smax = float(_cut_distances(surface, base, u[None, :])[0])
    s = smax * np.arange(1, n + 1) / n
    Y = base[None, :] + s[:, None] * u
    X = np.broadcast_to(base, Y.shape)
    if isinstance(kernel, Heat):
        vals, ev, _, _ = heat_values(surface, kernel.t, X, Y, eps=eps)
        grads, eg, _, _ = heat_gradient_values(surface, kernel.t, X, Y, eps=eps)
    else:
        vals = projection_kernel(surface, kernel.mode, X, Y)
        grads, eg = projection_gradient(surface, kernel.mode, X, Y)
        ev = eg
    deriv = grads @ u
    err = np.full(n, max(float(ev), float(eg)))
    return s, np.asarray(vals), deriv, err


# ---------------------------------------------------------------------------
# closed-form counterexamples


@dataclass(frozen=True)
class CounterexampleRecord:
    kind: str
    surface: FlatSurface
    s_star: float | None
    s_values: tuple
    p_values: tuple
    dp_values: tuple
    formula_deviation: float
    increase: float
    witness: ViolationWitness
    extras: dict = field(default_factory=dict)


def _projection_witness(surface, mode, base, direction, s_lo, s_hi, n=100):
    """Common machinery: sample P along a geodesic, check increase past s_lo."""
    base = np.asarray(base, dtype=float)
    u = _unit(direction)
    # lead-in below s_lo for context, then guaranteed coverage of the
    # increasing window [s_lo, s_hi] regardless of how narrow it is
    lead = np.linspace(0.9 * s_lo, s_lo, max(2, n - 7 * n // 10), endpoint=False)
    rise = np.linspace(s_lo, s_hi, n - len(lead))
    s = np.concatenate([lead, rise])
    Y = base[None, :] + s[:, None] * u
    X = np.broadcast_to(base, Y.shape)
    p = projection_kernel(surface, mode, X, Y)
    grads, err = projection_gradient(surface, mode, X, Y)
    dp = grads @ u
    rising = s >= s_lo - 1e-12
    assert np.all(np.diff(np.asarray(p)[rising]) > 0), "expected strict increase"
    s_mid = 0.5 * (s_lo + s_hi)
    gm, em = projection_gradient(surface, mode, base, base + s_mid * u)
    deriv = float(np.asarray(gm) @ u)
    assert deriv - em > 0, "witness derivative not certifiably positive"
    witness = ViolationWitness(
        base=(float(base[0]), float(base[1])), direction=(float(u[0]), float(u[1])),
        s=float(s_mid), t=math.inf, radial_derivative=deriv, error_bound=float(em),
        kernel="projection", eigenvalue=mode.eigenvalue)
    increase = float(np.asarray(p)[-1] - np.asarray(p)[rising][0])
    return s, np.asarray(p), np.asarray(dp), witness, increase


def counterexample_generic(a: float, b: float) -> CounterexampleRecord:
    """Violation of projection monotonicity on a torus with no extra symmetry.

    The vertical geodesic from the origin leaves the cut locus at normalized
    arc s_star = (a^2+b^2)/(2 b^2) > 1/2, and P(0,(0,sb)) = (2/b) cos(2 pi s)
    rises strictly on [1/2, s_star].
    """
    surface = torus(a, b)
    lat = surface.lattice
    tag = classify(lat).tag
    if tag is not LatticeTag.GENERIC:
        raise WrongLatticeClass(f"construction needs a generic lattice, got {tag.value}")
    mode = principal_eigenvalue(surface)
    s_star = cut_distance(lat, (0.0, 1.0)) / lat.b
    closed_form = (lat.a ** 2 + lat.b ** 2) / (2.0 * lat.b ** 2)
    assert abs(s_star - closed_form) <= 1e-12
    s_arc, p, dp, witness, increase = _projection_witness(
        surface, mode, (0.0, 0.0), (0.0, 1.0), 0.5 * lat.b, s_star * lat.b)
    s_norm = s_arc / lat.b
    deviation = float(np.max(np.abs(p - (2.0 / lat.b) * np.cos(2.0 * math.pi * s_norm))))
    assert deviation <= 1e-12
    return CounterexampleRecord(
        kind="generic", surface=surface, s_star=float(s_star),
        s_values=tuple(s_norm), p_values=tuple(p), dp_values=tuple(dp),
        formula_deviation=deviation, increase=increase, witness=witness)


def counterexample_isosceles(a: float) -> CounterexampleRecord:
    """Positive radial derivative of P at the circumcenter of the unit rhombus.

    With b = sqrt(1-a^2) the lattice vectors have unit length; the diagonals
    xi = (-1-a, b) and eta = (1-a, b) are orthogonal, P along either diagonal
    is (4/b) cos(2 pi s), and z* . grad P(z*) > 0 at the circumcenter z* of
    the triangle with vertices 0, (-a, b), (1-a, b).
    """
    if not 0.0 < a < 0.5:
        raise WrongLatticeClass("construction needs 0 < a < 1/2 with b = sqrt(1-a^2)")
    b = math.sqrt(1.0 - a * a)
    surface = torus(a, b)
    lat = surface.lattice
    tag = classify(lat).tag
    if tag is not LatticeTag.ISOSCELES:
        raise WrongLatticeClass(f"construction needs an isosceles lattice, got {tag.value}")
    mode = principal_eigenvalue(surface)
    xi = np.array([-1.0 - a, b])
    eta = np.array([1.0 - a, b])
    xi_dot_eta = float(xi @ eta)
    assert abs(xi_dot_eta) <= 1e-14
    # circumcenter: equidistant from 0, (-a,b), (1-a,b)
    corners = np.array([[-a, b], [1.0 - a, b]])
    z_star = np.linalg.solve(corners, 0.5 * (corners ** 2).sum(axis=1))
    s = np.linspace(0.0, 0.99, 100)
    pts = s[:, None] * xi[None, :]
    p = projection_kernel(surface, mode, np.zeros(2), pts)
    deviation = float(np.max(np.abs(p - (4.0 / b) * np.cos(2.0 * math.pi * s))))
    assert deviation <= 1e-12
    grad, err = projection_gradient(surface, mode, np.zeros(2), z_star)
    deriv = float(np.asarray(grad) @ z_star)
    assert deriv - float(np.hypot(*z_star)) * err > 0
    u = z_star / np.hypot(*z_star)
    witness = ViolationWitness(
        base=(0.0, 0.0), direction=(float(u[0]), float(u[1])),
        s=float(np.hypot(*z_star)), t=math.inf,
        radial_derivative=deriv / float(np.hypot(*z_star)), error_bound=float(err),
        kernel="projection", eigenvalue=mode.eigenvalue)
    grads_curve, _ = projection_gradient(surface, mode, np.zeros(2), pts)
    dp = np.asarray(grads_curve) @ xi
    return CounterexampleRecord(
        kind="isosceles", surface=surface, s_star=None,
        s_values=tuple(s), p_values=tuple(np.asarray(p)), dp_values=tuple(dp),
        formula_deviation=deviation, increase=deriv,
        witness=witness,
        extras={"z_star": (float(z_star[0]), float(z_star[1])),
                "directional_derivative": deriv,
                "xi_dot_eta": xi_dot_eta})


def counterexample_klein(b: float, xi: float = 0.25) -> CounterexampleRecord:
    """Monotonicity failure on the Klein bottle, by regime of b.

    b > 1: P along the vertical geodesic from (xi, 0) equals (2/b) cos(2 pi s/b)
    and rises past s = b/2 before the cut at s = (g^2 + b^2) / (2b), where
    g = min(2 xi, 1 - 2 xi) is the horizontal gap to the nearest glide image.
    b = 1: the multiplicity-3 projection gives 2 cos^2(2 pi xi) + 2 cos(2 pi s).
    b < 1: the principal eigenvalue is simple; delegate to the asymptotic
    large-time violation.
    """
    if not (b > 0 and math.isfinite(b)):
        raise InvalidParameter(f"b must be positive, got {b}")
    if not 0.0 < xi < 0.5:
        raise InvalidParameter(f"xi must lie in (0, 1/2), got {xi}")
    surface = klein_bottle(b)
    mode = principal_eigenvalue(surface)
    if b < 1.0 - 1e-12:
        asy = asymptotic_violation(surface)
        u = _unit(np.array(asy.y) - np.array(asy.x))
        s_hi = float(np.hypot(asy.y[0] - asy.x[0], asy.y[1] - asy.x[1]))
        s = np.linspace(s_hi / 64.0, s_hi, 64)
        Y = np.array(asy.x)[None, :] + s[:, None] * u
        X = np.broadcast_to(np.array(asy.x), Y.shape)
        eps = max(math.exp(-mode.eigenvalue * asy.t_threshold) * 1e-8, 1e-280)
        vals, ev, _, _ = heat_values(surface, asy.t_threshold, X, Y, eps=eps)
        grads, eg, _, _ = heat_gradient_values(surface, asy.t_threshold, X, Y, eps=eps)
        dp = np.asarray(grads) @ u
        k = int(np.argmax(dp))
        assert dp[k] - eg > 0, "no certifiably positive radial derivative on segment"
        witness = ViolationWitness(
            base=asy.x, direction=(float(u[0]), float(u[1])), s=float(s[k]),
            t=asy.t_threshold, radial_derivative=float(dp[k]), error_bound=float(eg),
            kernel="heat")
        return CounterexampleRecord(
            kind="klein-asymptotic", surface=surface, s_star=None,
            s_values=tuple(s), p_values=tuple(np.asarray(vals)), dp_values=tuple(dp),
            formula_deviation=0.0, increase=float(asy.difference), witness=witness,
            extras={"x": asy.x, "y": asy.y, "t_threshold": asy.t_threshold,
                    "phi_x": asy.phi_x, "phi_y": asy.phi_y})
    base = np.array([xi, 0.0])
    gap = min(2.0 * xi, 1.0 - 2.0 * xi)
    s_cut = (gap ** 2 + b ** 2) / (2.0 * b)
    geo = minimal_geodesic(surface, base, (0.0, 1.0))
    assert abs(geo.s_max - s_cut) <= 1e-9
    s_arc, p, dp, witness, increase = _projection_witness(
        surface, mode, base, (0.0, 1.0), 0.5 * b, s_cut)
    if b > 1.0:
        formula = (2.0 / b) * np.cos(2.0 * math.pi * s_arc / b)
    else:
        formula = 2.0 * math.cos(2.0 * math.pi * xi) ** 2 + 2.0 * np.cos(2.0 * math.pi * s_arc)
    deviation = float(np.max(np.abs(p - formula)))
    assert deviation <= 1e-12
    return CounterexampleRecord(
        kind="klein-projection", surface=surface, s_star=float(s_cut / b),
        s_values=tuple(s_arc / b), p_values=tuple(p), dp_values=tuple(dp),
        formula_deviation=deviation, increase=increase, witness=witness,
        extras={"xi": xi, "cut_arc_length": float(s_cut)})


@dataclass(frozen=True)
class AsymptoticViolation:
    x: tuple[float, float]
    y: tuple[float, float]
    t_threshold: float
    difference: float
    error_sum: float
    phi_x: float
    phi_y: float


def asymptotic_violation(surface: FlatSurface) -> AsymptoticViolation:
    """Large-time violation K_t(x,y) > K_t(x,x) when phi_1 orders the points.

    Needs a simple principal eigenvalue; picks x, y with 0 < phi_1(x) < phi_1(y)
    and returns the smallest grid time with a certified positive difference.
    """
    mode = principal_eigenvalue(surface)
    if mode.multiplicity != 1:
        raise NotSimple(
            f"principal eigenvalue has multiplicity {mode.multiplicity}; "
            "the asymptotic argument needs a simple eigenvalue")
    x = np.array([0.2, 0.0])
    y = np.array([0.05, 0.0])
    phi = eigenbasis_values(surface, mode, np.stack([x, y]))[0]
    assert 0.0 < phi[0] < phi[1]
    lam = mode.eigenvalue
    for t in _DEFAULT_T_GRID:
        eps = max(math.exp(-lam * t) * 1e-8, 1e-280)
        vxy, e1, _, _ = heat_values(surface, t, x, y, eps=eps)
        vxx, e2, _, _ = heat_values(surface, t, x, x, eps=eps)
        diff = float(vxy - vxx)
        if diff > e1 + e2:
            return AsymptoticViolation(
                x=(float(x[0]), float(x[1])), y=(float(y[0]), float(y[1])),
                t_threshold=t, difference=diff, error_sum=float(e1 + e2),
                phi_x=float(phi[0]), phi_y=float(phi[1]))
    raise ToleranceUnreachable("no sampled time certifies K_t(x,y) > K_t(x,x)")


# ---------------------------------------------------------------------------
# critical-point census


@dataclass(frozen=True)
class CensusResult:
    maxima: tuple
    minima: tuple
    saddles: tuple
    index_sum: int

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.maxima), len(self.minima), len(self.saddles)


def _census_gradient(surface, t, pts, eps):
    g, err, _, _ = heat_gradient_values(surface, t, np.zeros(2), pts, eps=eps)
    return np.asarray(g), err


def critical_point_census(surface: Torus, t: float, grid: int = 256) -> CensusResult:
    """Locate and classify the critical points of y -> K_t(0, y) on a torus.

    Sign-change cells of the gradient on a lattice-coordinate grid seed Newton
    refinement; the Hessian (finite differences of the analytic gradient)
    classifies each zero.  Raises DegenerateCritical when |det H| falls below
    1e-10 relative to |H|_F^2.
    """
    if not isinstance(surface, Torus):
        raise InvalidParameter("census requires a torus")
    if grid < 64:
        raise InvalidParameter("grid must be at least 64")
    lat = surface.lattice
    B = lat.basis
    Binv = np.linalg.inv(B)
    lam1 = principal_eigenvalue(surface).eigenvalue
    eps = max(math.exp(-lam1 * t) * math.sqrt(lam1) / surface.area * 1e-9, 1e-280)
    coords = np.stack(np.meshgrid(np.arange(grid) / grid, np.arange(grid) / grid,
                                  indexing="ij"), axis=-1)
    G, _ = _census_gradient(surface, t, coords @ B, eps)
    cells = np.ones((grid, grid), dtype=bool)
    for k in range(2):
        gk = G[..., k]
        corners = np.stack([gk, np.roll(gk, -1, 0), np.roll(gk, -1, 1),
                            np.roll(np.roll(gk, -1, 0), -1, 1)])
        tau = 1e-3 * float(np.max(np.abs(gk)))
        cells &= (corners.min(axis=0) <= tau) & (corners.max(axis=0) >= -tau)
    gscale = float(np.max(np.hypot(G[..., 0], G[..., 1])))
    h = 1e-6
    found = []   # (lattice coords in [0,1)^2, hessian)
    offsets = np.array([[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    for i, j in np.argwhere(cells):
        y = (np.array([i + 0.5, j + 0.5]) / grid) @ B
        converged = False
        for _ in range(60):
            g5, _ = _census_gradient(surface, t, y[None, :] + offsets, eps)
            g0 = g5[0]
            H = np.stack([(g5[1] - g5[2]) / (2 * h), (g5[3] - g5[4]) / (2 * h)], axis=1)
            H = 0.5 * (H + H.T)
            try:
                step = np.linalg.solve(H, g0)
            except np.linalg.LinAlgError:
                break
            y = y - step
            if np.hypot(*step) < 1e-12:
                converged = True
                break
        if not converged or np.hypot(*g0) > 1e-5 * gscale:
            continue
        c = (y @ Binv) % 1.0
        c[c > 1.0 - 1e-9] = 0.0
        if any(_torus_coord_gap(c, c0) < 1e-6 for c0, _ in found):
            continue
        found.append((c, H))
    maxima, minima, saddles = [], [], []
    for c, H in found:
        det = float(np.linalg.det(H))
        if abs(det) < 1e-10 * float((H * H).sum()):
            raise DegenerateCritical(f"degenerate Hessian at lattice coords {tuple(c)}")
        if det < 0:
            saddles.append((float(c[0]), float(c[1])))
        elif float(np.trace(H)) < 0:
            maxima.append((float(c[0]), float(c[1])))
        else:
            minima.append((float(c[0]), float(c[1])))
    maxima.sort()
    minima.sort()
    saddles.sort()
    return CensusResult(
        maxima=tuple(maxima), minima=tuple(minima), saddles=tuple(saddles),
        index_sum=len(maxima) + len(minima) - len(saddles))


def _torus_coord_gap(c1: np.ndarray, c2) -> float:
    d = np.asarray(c1) - np.asarray(c2)
    d -= np.round(d)
    return float(np.hypot(d[0], d[1]))
