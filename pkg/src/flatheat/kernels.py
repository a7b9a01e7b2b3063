"""Laplace spectra and heat kernels on flat tori and Klein bottles.

Two dual evaluation routes are kept side by side and never merged:

* spectral sums over the dual lattice (eigenfunction expansions), and
* Gaussian image sums over the primal lattice (method of images).

Poisson summation says the two must agree; the test suite checks that they do
within the certified truncation bounds carried by every value.  Truncation is
certified by a Gaussian ring bound: once all points inside a radius are
summed, the discarded tail is dominated by an explicit erfc integral.

Summation order is fixed (terms sorted by point modulus, ties broken by
integer coordinates) so repeated evaluations are bitwise reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    InvalidParameter,
    ModeSurfaceMismatch,
    NonPositiveTime,
    ToleranceUnreachable,
)
from .lattice import ReducedLattice, covering_radius, covering_radius_of_rows, dual
from .surfaces import FlatSurface, KleinBottle, Torus, glide

TERM_BUDGET = 10_000_000
_TWO_PI = 2.0 * math.pi
_FOUR_PI_SQ = 4.0 * math.pi ** 2
_CHUNK = 2048
_EPS_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# certified Gaussian tails over lattices


def _ring_tail(alpha: float, radius: float, rho: float, covol: float,
               moment: int = 0) -> float:
    """Bound sum_{|p| > radius} |p|^moment exp(-alpha |p|^2) over any translate
    of a lattice with covering radius rho and cell area covol.

    Valid for radius >= 2 rho: each cell of an excluded point lies outside the
    disk of radius (radius - rho), and the integrand is bounded cellwise.
    """
    s = radius - 2.0 * rho
    if s <= 0:
        return math.inf
    sa = math.sqrt(alpha)
    e = math.exp(-alpha * s * s)
    ec = math.erfc(sa * s)
    j0 = math.sqrt(math.pi) / (2.0 * sa) * ec
    j1 = e / (2.0 * alpha)
    if moment == 0:
        integral = _TWO_PI * (j1 + rho * j0)
    else:
        j2 = s * e / (2.0 * alpha) + math.sqrt(math.pi) * ec / (4.0 * alpha ** 1.5)
        integral = _TWO_PI * (j2 + 3.0 * rho * j1 + 2.0 * rho * rho * j0)
    return integral / covol


def _radius_for(alpha: float, rho: float, covol: float, eps: float,
                prefactor: float, moment: int = 0) -> float:
    """Smallest enumeration radius (up to ~20%) with prefactor * tail <= eps."""
    eps = max(eps, _EPS_FLOOR)
    c0 = prefactor * _TWO_PI / covol * (1.0 / (2.0 * alpha) + 3.0 * rho + 2.0 * rho * rho + 1.0)
    u = 0.0
    if c0 > eps:
        u = math.sqrt(math.log(c0 / eps) / alpha)
    r = 2.0 * rho + u + 1e-9
    for _ in range(400):
        if math.pi * (r + rho) ** 2 / covol > TERM_BUDGET:
            raise ToleranceUnreachable(
                f"certified tolerance {eps:g} needs more than {TERM_BUDGET} terms")
        if prefactor * _ring_tail(alpha, r, rho, covol, moment) <= eps:
            return r
        r *= 1.2
    raise ToleranceUnreachable("tail bound failed to converge")  # pragma: no cover


def _points_in_disk(rows: np.ndarray, center: np.ndarray, radius: float):
    """Integer combinations m*u + n*v within radius of center.

    Returns (mn, pts, r2) sorted by (r2, m, n) for reproducible summation.
    """
    u, v = rows[0], rows[1]
    cr = float(u[0] * v[1] - u[1] * v[0])
    a_quad = float(v @ v)
    m_c = float(center[0] * v[1] - center[1] * v[0]) / cr
    m_r = radius * math.hypot(*v) / abs(cr)
    mn_list = []
    for m in range(math.ceil(m_c - m_r - 1e-9), math.floor(m_c + m_r + 1e-9) + 1):
        w = m * u - center
        b_quad = 2.0 * float(v @ w)
        c_quad = float(w @ w) - radius * radius
        disc = b_quad * b_quad - 4.0 * a_quad * c_quad
        if disc < 0:
            continue
        sq = math.sqrt(disc)
        n_lo = math.ceil((-b_quad - sq) / (2.0 * a_quad) - 1e-12)
        n_hi = math.floor((-b_quad + sq) / (2.0 * a_quad) + 1e-12)
        mn_list.extend((m, n) for n in range(n_lo, n_hi + 1))
    if not mn_list:
        mn = np.zeros((0, 2), dtype=np.int64)
        return mn, np.zeros((0, 2)), np.zeros(0)
    mn = np.array(mn_list, dtype=np.int64)
    pts = mn.astype(float) @ rows
    diff = pts - center
    r2 = diff[:, 0] ** 2 + diff[:, 1] ** 2
    order = np.lexsort((mn[:, 1], mn[:, 0], r2))
    return mn[order], pts[order], r2[order]


# ---------------------------------------------------------------------------
# cached lattice geometry


@lru_cache(maxsize=128)
def _torus_geometry(a: float, b: float):
    lat = ReducedLattice.from_parameters(a, b)
    dual_rows = dual(lat).matrix
    return {
        "rows": lat.basis,
        "rho": covering_radius(lat),
        "covol": lat.b,
        "dual_rows": dual_rows,
        "dual_rho": covering_radius_of_rows(dual_rows),
        "dual_covol": 1.0 / lat.b,
    }


def _klein_cover_geometry(b: float):
    return {
        "rows": np.array([[1.0, 0.0], [0.0, 2.0 * b]]),
        "rho": 0.5 * math.hypot(1.0, 2.0 * b),
        "covol": 2.0 * b,
        "dual_rho": 0.5 * math.hypot(1.0, 1.0 / (2.0 * b)),
        "dual_covol": 1.0 / (2.0 * b),
    }


# ---------------------------------------------------------------------------
# torus evaluators


def _torus_spectral(lat: ReducedLattice, t: float, disp: np.ndarray, eps: float,
                    want_grad: bool):
    area = lat.b
    alpha = _FOUR_PI_SQ * t
    geom = _torus_geometry(lat.a, lat.b)
    moment = 1 if want_grad else 0
    pref = (_TWO_PI if want_grad else 1.0) / area
    radius = _radius_for(alpha, geom["dual_rho"], geom["dual_covol"], eps, pref, moment)
    _, pts, r2 = _points_in_disk(geom["dual_rows"], np.zeros(2), radius)
    w = np.exp(-alpha * r2) / area
    flat = disp.reshape(-1, 2)
    if want_grad:
        out = np.empty((flat.shape[0], 2))
        for i in range(0, flat.shape[0], _CHUNK):
            ph = _TWO_PI * flat[i:i + _CHUNK] @ pts.T
            sw = np.sin(ph) * w
            out[i:i + _CHUNK, 0] = (sw * (_TWO_PI * pts[:, 0])).sum(axis=-1)
            out[i:i + _CHUNK, 1] = (sw * (_TWO_PI * pts[:, 1])).sum(axis=-1)
        out = out.reshape(disp.shape)
    else:
        out = np.empty(flat.shape[0])
        for i in range(0, flat.shape[0], _CHUNK):
            ph = _TWO_PI * flat[i:i + _CHUNK] @ pts.T
            out[i:i + _CHUNK] = (np.cos(ph) * w).sum(axis=-1)
        out = out.reshape(disp.shape[:-1])
    err = pref * _ring_tail(alpha, radius, geom["dual_rho"], geom["dual_covol"], moment)
    return out, err, len(r2)


def _torus_image(lat: ReducedLattice, t: float, disp: np.ndarray, eps: float,
                 want_grad: bool):
    alpha = 1.0 / (4.0 * t)
    pref0 = 1.0 / (4.0 * math.pi * t)
    geom = _torus_geometry(lat.a, lat.b)
    moment = 1 if want_grad else 0
    pref = pref0 * (2.0 * alpha if want_grad else 1.0)
    radius = _radius_for(alpha, geom["rho"], geom["covol"], eps, pref, moment)
    flat = disp.reshape(-1, 2)
    rows = geom["rows"]
    coeff = np.linalg.solve(rows.T, flat.T).T
    d0 = flat - np.round(coeff) @ rows
    spread = float(np.max(np.hypot(d0[:, 0], d0[:, 1]))) if len(d0) else 0.0
    _, pts, _ = _points_in_disk(rows, np.zeros(2), radius + spread)
    if want_grad:
        out = np.empty((flat.shape[0], 2))
        for i in range(0, flat.shape[0], _CHUNK):
            z = d0[i:i + _CHUNK, None, :] - pts[None, :, :]
            e = np.exp(-alpha * (z[..., 0] ** 2 + z[..., 1] ** 2))
            out[i:i + _CHUNK, 0] = pref0 * 2.0 * alpha * (e * z[..., 0]).sum(axis=-1)
            out[i:i + _CHUNK, 1] = pref0 * 2.0 * alpha * (e * z[..., 1]).sum(axis=-1)
        out = out.reshape(disp.shape)
    else:
        out = np.empty(flat.shape[0])
        for i in range(0, flat.shape[0], _CHUNK):
            z = d0[i:i + _CHUNK, None, :] - pts[None, :, :]
            e = np.exp(-alpha * (z[..., 0] ** 2 + z[..., 1] ** 2))
            out[i:i + _CHUNK] = pref0 * e.sum(axis=-1)
        out = out.reshape(disp.shape[:-1])
    err = pref * _ring_tail(alpha, radius, geom["rho"], geom["covol"], moment)
    return out, err, len(pts)


# ---------------------------------------------------------------------------
# Klein bottle evaluators

# Admissible spectral parameters (l1, l2): cosine modes in x1 need l2 even,
# sine modes need l2 odd and l1 > 0.  Each entry is summarised so that the
# kernel term reads amp * T(u x1) T(u y1) cos(c (x2 - y2)) with T = cos or sin.


def _klein_mode_entries(b: float, lam_max: float):
    entries = []
    l1 = 0
    while (_TWO_PI * l1) ** 2 <= lam_max * (1.0 + 1e-12):
        lam1 = (_TWO_PI * l1) ** 2
        rem = max(lam_max * (1.0 + 1e-12) - lam1, 0.0)
        l2_hi = int(b * math.sqrt(rem) / math.pi) + 1
        for l2 in range(0, l2_hi + 1):
            lam = lam1 + (math.pi * l2 / b) ** 2
            if lam > lam_max * (1.0 + 1e-12):
                continue
            if l1 == 0 and l2 == 0:
                amp, is_sin, count = 1.0 / b, False, 1
            elif l2 == 0:
                amp, is_sin, count = 2.0 / b, False, 1
            elif l1 == 0:
                if l2 % 2 == 1:
                    continue
                amp, is_sin, count = 2.0 / b, False, 2
            else:
                amp, is_sin, count = 4.0 / b, l2 % 2 == 1, 2
            entries.append((lam, l1, l2, amp, is_sin, count))
        l1 += 1
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    return entries


def _klein_term_arrays(b: float, generators):
    """Unified per-mode arrays (u, c, amp, is_sin) for a list of (l1, l2) pairs."""
    u, c, amp, is_sin = [], [], [], []
    for l1, l2 in generators:
        u.append(_TWO_PI * l1)
        c.append(math.pi * l2 / b)
        if l1 == 0 and l2 == 0:
            amp.append(1.0 / b)
            is_sin.append(False)
        elif l2 == 0 or l1 == 0:
            amp.append(2.0 / b)
            is_sin.append(False)
        else:
            amp.append(4.0 / b)
            is_sin.append(l2 % 2 == 1)
    return (np.array(u), np.array(c), np.array(amp), np.array(is_sin, dtype=bool))


def _klein_trig(vals: np.ndarray, is_sin: np.ndarray):
    c = np.cos(vals)
    s = np.sin(vals)
    return np.where(is_sin, s, c), np.where(is_sin, c, -s)  # (T, T')


def _klein_spectral(kb: KleinBottle, t: float, x: np.ndarray, y: np.ndarray,
                    eps: float, want_grad: bool):
    b = kb.b
    alpha = _FOUR_PI_SQ * t
    geom = _klein_cover_geometry(b)
    moment = 1 if want_grad else 0
    pref = (4.0 / b) * (_TWO_PI if want_grad else 1.0)
    radius = _radius_for(alpha, geom["dual_rho"], geom["dual_covol"], eps, pref, moment)
    entries = _klein_mode_entries(b, (_TWO_PI * radius) ** 2)
    lam = np.array([e[0] for e in entries])
    u, c, amp, is_sin = _klein_term_arrays(b, [(e[1], e[2]) for e in entries])
    w = amp * np.exp(-lam * t)
    xf = x.reshape(-1, 2)
    yf = y.reshape(-1, 2)
    n = xf.shape[0]
    out = np.empty((n, 2)) if want_grad else np.empty(n)
    for i in range(0, n, _CHUNK):
        x1 = xf[i:i + _CHUNK, 0:1]
        y1 = yf[i:i + _CHUNK, 0:1]
        d2 = xf[i:i + _CHUNK, 1:2] - yf[i:i + _CHUNK, 1:2]
        tx, _ = _klein_trig(x1 * u, is_sin)
        ty, dty = _klein_trig(y1 * u, is_sin)
        if want_grad:
            cos_d = np.cos(c * d2)
            out[i:i + _CHUNK, 0] = (w * tx * (dty * u) * cos_d).sum(axis=-1)
            out[i:i + _CHUNK, 1] = (w * tx * ty * (c * np.sin(c * d2))).sum(axis=-1)
        else:
            out[i:i + _CHUNK] = (w * tx * ty * np.cos(c * d2)).sum(axis=-1)
    out = out.reshape(x.shape if want_grad else x.shape[:-1])
    err = pref * _ring_tail(alpha, radius, geom["dual_rho"], geom["dual_covol"], moment)
    return out, err, len(entries)


def _rect_recenter(d: np.ndarray, spans: tuple[float, float]) -> np.ndarray:
    out = d.copy()
    for k, span in enumerate(spans):
        out[..., k] -= span * np.round(out[..., k] / span)
    return out


def _klein_image(kb: KleinBottle, t: float, x: np.ndarray, y: np.ndarray,
                 eps: float, want_grad: bool):
    b = kb.b
    alpha = 1.0 / (4.0 * t)
    pref0 = 1.0 / (4.0 * math.pi * t)
    geom = _klein_cover_geometry(b)
    moment = 1 if want_grad else 0
    pref = pref0 * (2.0 * alpha if want_grad else 1.0)
    radius = _radius_for(alpha, geom["rho"], geom["covol"], eps / 2.0, pref, moment)
    rows = geom["rows"]
    xf = x.reshape(-1, 2)
    yf = y.reshape(-1, 2)
    gyf = np.stack([1.0 - yf[:, 0], yf[:, 1] + b], axis=1)
    total = None
    for branch, other in enumerate((yf, gyf)):
        d0 = _rect_recenter(xf - other, (1.0, 2.0 * b))
        spread = float(np.max(np.hypot(d0[:, 0], d0[:, 1]))) if len(d0) else 0.0
        _, pts, _ = _points_in_disk(rows, np.zeros(2), radius + spread)
        n = d0.shape[0]
        part = np.empty((n, 2)) if want_grad else np.empty(n)
        for i in range(0, n, _CHUNK):
            z = d0[i:i + _CHUNK, None, :] - pts[None, :, :]
            e = np.exp(-alpha * (z[..., 0] ** 2 + z[..., 1] ** 2))
            if want_grad:
                g1 = pref0 * 2.0 * alpha * (e * z[..., 0]).sum(axis=-1)
                g2 = pref0 * 2.0 * alpha * (e * z[..., 1]).sum(axis=-1)
                if branch == 1:
                    g1 = -g1
                part[i:i + _CHUNK, 0] = g1
                part[i:i + _CHUNK, 1] = g2
            else:
                part[i:i + _CHUNK] = pref0 * e.sum(axis=-1)
        total = part if total is None else total + part
    out = total.reshape(x.shape if want_grad else x.shape[:-1])
    err = 2.0 * pref * _ring_tail(alpha, radius, geom["rho"], geom["covol"], moment)
    return out, err, 2 * len(pts)


# ---------------------------------------------------------------------------
# public heat-kernel interface


def _resolve_rep(surface: FlatSurface, t: float, representation: str) -> str:
    if representation == "auto":
        return "image" if 4.0 * math.pi * t < surface.area else "spectral"
    if representation not in ("spectral", "image"):
        raise InvalidParameter(f"unknown representation {representation!r}")
    return representation


def _validate_time_eps(t: float, eps: float) -> None:
    if not (math.isfinite(t) and t > 0):
        raise NonPositiveTime(f"heat kernel needs t > 0, got {t}")
    if not (math.isfinite(eps) and eps > 0):
        raise InvalidParameter(f"epsilon must be positive, got {eps}")


def _broadcast_pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != (2,) or y.shape[-1:] != (2,):
        raise InvalidParameter("points must have a trailing dimension of 2")
    return np.broadcast_arrays(x, y)


def heat_values(surface: FlatSurface, t: float, x, y, eps: float = 1e-10,
                representation: str = "auto"):
    """Heat kernel K_t(x, y) on arrays of points.

    Returns (values, error_bound, terms_used, representation_used); the error
    bound covers the truncated tail for every entry.
    """
    _validate_time_eps(t, eps)
    rep = _resolve_rep(surface, t, representation)
    x, y = _broadcast_pair(x, y)
    if isinstance(surface, Torus):
        fn = _torus_spectral if rep == "spectral" else _torus_image
        vals, err, terms = fn(surface.lattice, t, x - y, eps, want_grad=False)
    else:
        fn = _klein_spectral if rep == "spectral" else _klein_image
        vals, err, terms = fn(surface, t, x, y, eps, want_grad=False)
    return vals, err, terms, rep


def heat_gradient_values(surface: FlatSurface, t: float, x, y, eps: float = 1e-10,
                         representation: str = "auto"):
    """Gradient of K_t(x, .) in the second argument, on arrays of points."""
    _validate_time_eps(t, eps)
    rep = _resolve_rep(surface, t, representation)
    x, y = _broadcast_pair(x, y)
    if isinstance(surface, Torus):
        fn = _torus_spectral if rep == "spectral" else _torus_image
        grads, err, terms = fn(surface.lattice, t, x - y, eps, want_grad=True)
    else:
        fn = _klein_spectral if rep == "spectral" else _klein_image
        grads, err, terms = fn(surface, t, x, y, eps, want_grad=True)
    return grads, err, terms, rep


@dataclass(frozen=True)
class KernelQuery:
    surface: FlatSurface
    x: tuple[float, float]
    y: tuple[float, float]
    t: float
    epsilon: float = 1e-10
    representation: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "x", (float(self.x[0]), float(self.x[1])))
        object.__setattr__(self, "y", (float(self.y[0]), float(self.y[1])))
        _validate_time_eps(self.t, self.epsilon)
        if self.representation not in ("auto", "spectral", "image"):
            raise InvalidParameter(f"unknown representation {self.representation!r}")


@dataclass(frozen=True)
class KernelValue:
    value: float
    error_bound: float
    terms_used: int
    representation_used: str


@dataclass(frozen=True)
class KernelGradient:
    gradient: tuple[float, float]
    error_bound: float
    terms_used: int
    representation_used: str


def heat_kernel(query: KernelQuery) -> KernelValue:
    vals, err, terms, rep = heat_values(
        query.surface, query.t, np.array(query.x), np.array(query.y),
        eps=query.epsilon, representation=query.representation)
    return KernelValue(float(vals), err, terms, rep)


def heat_kernel_gradient(query: KernelQuery) -> KernelGradient:
    grads, err, terms, rep = heat_gradient_values(
        query.surface, query.t, np.array(query.x), np.array(query.y),
        eps=query.epsilon, representation=query.representation)
    return KernelGradient((float(grads[0]), float(grads[1])), err, terms, rep)


# ---------------------------------------------------------------------------
# spectral modes and projection kernels


@dataclass(frozen=True)
class SpectralMode:
    """One Laplace eigenvalue with its generating spectral parameters.

    Torus generators are integer dual-basis coordinates (m, n) covering every
    dual vector of the shared modulus; the multiplicity equals their count.
    Klein generators are triples (l1, l2, parity) with parity "cos"/"sin"
    following the admissibility rule (cosine modes need l2 even, sine modes
    need l2 odd and l1 > 0); multiplicity counts real eigenfunctions.
    """

    eigenvalue: float
    generators: tuple
    multiplicity: int
    surface: FlatSurface


def _group_eigenvalues(entries, tol):
    """entries: sorted list of (lam, payload, count). Groups by relative tol."""
    modes = []
    cur, cur_lam = [], None
    cur_count = 0
    for lam, payload, count in entries:
        if cur and lam - cur_lam > tol * max(1.0, cur_lam):
            modes.append((cur_lam, tuple(cur), cur_count))
            cur, cur_count = [], 0
        if not cur:
            cur_lam = lam
        cur.append(payload)
        cur_count += count
    if cur:
        modes.append((cur_lam, tuple(cur), cur_count))
    return modes


def enumerate_modes(surface: FlatSurface, lambda_max: float,
                    tol: float = 1e-9) -> list[SpectralMode]:
    """All eigenvalues <= lambda_max, grouped within relative tol, ascending."""
    if not (math.isfinite(lambda_max) and lambda_max >= 0):
        raise InvalidParameter(f"lambda_max must be non-negative, got {lambda_max}")
    if isinstance(surface, Torus):
        geom = _torus_geometry(surface.lattice.a, surface.lattice.b)
        radius = math.sqrt(lambda_max * (1.0 + 2.0 * tol)) / _TWO_PI
        mn, _, r2 = _points_in_disk(geom["dual_rows"], np.zeros(2), radius + 1e-12)
        lam = _FOUR_PI_SQ * r2
        entries = sorted(
            ((float(l), (int(m), int(n)), 1) for l, (m, n) in zip(lam, mn)
             if l <= lambda_max * (1.0 + tol) + 1e-12),
            key=lambda e: (e[0], e[1]))
    else:
        entries = [
            (lam, (l1, l2, "sin" if is_sin else "cos"), count)
            for lam, l1, l2, amp, is_sin, count in _klein_mode_entries(surface.b, lambda_max)
            if lam <= lambda_max * (1.0 + tol) + 1e-12
        ]
    return [
        SpectralMode(eigenvalue=lam, generators=gens, multiplicity=count, surface=surface)
        for lam, gens, count in _group_eigenvalues(entries, tol)
    ]


def principal_eigenvalue(surface: FlatSurface) -> SpectralMode:
    """The smallest non-zero eigenvalue with its full multiplicity."""
    if isinstance(surface, Torus):
        guess = (_TWO_PI / surface.lattice.b) ** 2
    else:
        guess = min(_TWO_PI ** 2, (_TWO_PI / surface.b) ** 2)
    for factor in (1.000001, 1.01, 1.5):
        modes = enumerate_modes(surface, guess * factor)
        nontrivial = [m for m in modes if m.eigenvalue > 1e-9 * guess]
        if nontrivial:
            return nontrivial[0]
    raise RuntimeError("principal eigenvalue not found")  # pragma: no cover


def _check_mode(surface: FlatSurface, mode: SpectralMode) -> None:
    if mode.surface != surface:
        raise ModeSurfaceMismatch(
            f"mode belongs to {mode.surface!r}, not {surface!r}")


def _torus_generator_vectors(surface: Torus, mode: SpectralMode) -> np.ndarray:
    geom = _torus_geometry(surface.lattice.a, surface.lattice.b)
    mn = np.array(mode.generators, dtype=float)
    return mn @ geom["dual_rows"]


def projection_kernel(surface: FlatSurface, mode: SpectralMode, x, y):
    """Spectral projection P_lambda(x, y) = sum_j phi_j(x) phi_j(y)."""
    _check_mode(surface, mode)
    x, y = _broadcast_pair(x, y)
    if isinstance(surface, Torus):
        vecs = _torus_generator_vectors(surface, mode)
        ph = _TWO_PI * (x - y) @ vecs.T
        out = np.cos(ph).sum(axis=-1) / surface.area
    else:
        pairs = [(l1, l2) for l1, l2, _ in mode.generators]
        u, c, amp, is_sin = _klein_term_arrays(surface.b, pairs)
        tx, _ = _klein_trig(x[..., 0:1] * u, is_sin)
        ty, _ = _klein_trig(y[..., 0:1] * u, is_sin)
        out = (amp * tx * ty * np.cos(c * (x[..., 1:2] - y[..., 1:2]))).sum(axis=-1)
    return out if out.shape else float(out)


def projection_gradient(surface: FlatSurface, mode: SpectralMode, x, y):
    """Gradient of P_lambda in the second argument, with an fp-level bound."""
    _check_mode(surface, mode)
    x, y = _broadcast_pair(x, y)
    if isinstance(surface, Torus):
        vecs = _torus_generator_vectors(surface, mode)
        ph = _TWO_PI * (x - y) @ vecs.T
        s = np.sin(ph) / surface.area
        g1 = (s * (_TWO_PI * vecs[:, 0])).sum(axis=-1)
        g2 = (s * (_TWO_PI * vecs[:, 1])).sum(axis=-1)
        out = np.stack([g1, g2], axis=-1)
        scale = len(vecs) * _TWO_PI * float(np.max(np.hypot(vecs[:, 0], vecs[:, 1]))) / surface.area
    else:
        pairs = [(l1, l2) for l1, l2, _ in mode.generators]
        u, c, amp, is_sin = _klein_term_arrays(surface.b, pairs)
        tx, _ = _klein_trig(x[..., 0:1] * u, is_sin)
        ty, dty = _klein_trig(y[..., 0:1] * u, is_sin)
        d2 = x[..., 1:2] - y[..., 1:2]
        g1 = (amp * tx * (dty * u) * np.cos(c * d2)).sum(axis=-1)
        g2 = (amp * tx * ty * (c * np.sin(c * d2))).sum(axis=-1)
        out = np.stack([g1, g2], axis=-1)
        scale = float(np.sum(amp * np.maximum(u, c)))
    err = 1e-15 * max(scale, 1.0)
    return out, err


def eigenbasis_values(surface: FlatSurface, mode: SpectralMode, pts) -> np.ndarray:
    """Values of an orthonormal real eigenbasis of the mode at given points.

    Returns an array of shape (multiplicity,) + pts.shape[:-1].
    """
    _check_mode(surface, mode)
    pts = np.asarray(pts, dtype=float)
    rows = []
    if isinstance(surface, Torus):
        area = surface.area
        vecs = _torus_generator_vectors(surface, mode)
        seen = set()
        for (m, n), v in zip(mode.generators, vecs):
            if (-m, -n) in seen:
                continue
            seen.add((m, n))
            if m == 0 and n == 0:
                rows.append(np.full(pts.shape[:-1], 1.0 / math.sqrt(area)))
                continue
            ph = _TWO_PI * pts @ v
            rows.append(math.sqrt(2.0 / area) * np.cos(ph))
            rows.append(math.sqrt(2.0 / area) * np.sin(ph))
    else:
        b = surface.b
        x1 = pts[..., 0]
        x2 = pts[..., 1]
        for l1, l2, parity in mode.generators:
            u = _TWO_PI * l1
            c = math.pi * l2 / b
            if l1 == 0 and l2 == 0:
                rows.append(np.full(pts.shape[:-1], 1.0 / math.sqrt(b)))
            elif l2 == 0:
                rows.append(math.sqrt(2.0 / b) * np.cos(u * x1))
            elif l1 == 0:
                rows.append(math.sqrt(2.0 / b) * np.cos(c * x2))
                rows.append(math.sqrt(2.0 / b) * np.sin(c * x2))
            else:
                f1 = np.sin(u * x1) if parity == "sin" else np.cos(u * x1)
                rows.append(2.0 / math.sqrt(b) * f1 * np.cos(c * x2))
                rows.append(2.0 / math.sqrt(b) * f1 * np.sin(c * x2))
    return np.stack(rows, axis=0)


def eigenbasis_gradients(surface: FlatSurface, mode: SpectralMode, pts) -> np.ndarray:
    """Gradients of the same orthonormal eigenbasis; shape (mult,) + pts.shape."""
    _check_mode(surface, mode)
    pts = np.asarray(pts, dtype=float)
    rows = []
    if isinstance(surface, Torus):
        area = surface.area
        vecs = _torus_generator_vectors(surface, mode)
        seen = set()
        for (m, n), v in zip(mode.generators, vecs):
            if (-m, -n) in seen:
                continue
            seen.add((m, n))
            if m == 0 and n == 0:
                rows.append(np.zeros(pts.shape))
                continue
            ph = _TWO_PI * pts @ v
            amp = math.sqrt(2.0 / area) * _TWO_PI
            rows.append(-amp * np.sin(ph)[..., None] * v)
            rows.append(amp * np.cos(ph)[..., None] * v)
    else:
        b = surface.b
        x1 = pts[..., 0]
        x2 = pts[..., 1]
        zero = np.zeros_like(x1)
        for l1, l2, parity in mode.generators:
            u = _TWO_PI * l1
            c = math.pi * l2 / b
            if l1 == 0 and l2 == 0:
                rows.append(np.zeros(pts.shape))
            elif l2 == 0:
                a0 = math.sqrt(2.0 / b)
                rows.append(np.stack([-a0 * u * np.sin(u * x1), zero], axis=-1))
            elif l1 == 0:
                a0 = math.sqrt(2.0 / b)
                rows.append(np.stack([zero, -a0 * c * np.sin(c * x2)], axis=-1))
                rows.append(np.stack([zero, a0 * c * np.cos(c * x2)], axis=-1))
            else:
                a0 = 2.0 / math.sqrt(b)
                if parity == "sin":
                    f1, df1 = np.sin(u * x1), u * np.cos(u * x1)
                else:
                    f1, df1 = np.cos(u * x1), -u * np.sin(u * x1)
                c2, s2 = np.cos(c * x2), np.sin(c * x2)
                rows.append(np.stack([a0 * df1 * c2, -a0 * f1 * c * s2], axis=-1))
                rows.append(np.stack([a0 * df1 * s2, a0 * f1 * c * c2], axis=-1))
    return np.stack(rows, axis=0)


def fundamental_domain_grid(surface: FlatSurface, n: int, midpoint: bool = False):
    """An n x n sample grid of the fundamental domain, plus the cell area."""
    off = 0.5 if midpoint else 0.0
    s = (np.arange(n) + off) / n
    p, q = np.meshgrid(s, s, indexing="ij")
    coords = np.stack([p, q], axis=-1)
    if isinstance(surface, Torus):
        pts = coords @ surface.lattice.basis
    else:
        pts = coords * np.array([1.0, surface.b])
    return pts, surface.area / (n * n)


@dataclass(frozen=True)
class DiagonalScan:
    minimum: float
    maximum: float
    expected: float


def projection_diagonal_scan(surface: FlatSurface, mode: SpectralMode,
                             grid: int = 64) -> DiagonalScan:
    """Min/max of P_lambda(x, x) over a fundamental-domain grid.

    Constant (= multiplicity / area) on tori; genuinely non-constant on Klein
    bottles whenever some eigenfunction has l1 > 0.
    """
    pts, _ = fundamental_domain_grid(surface, grid)
    vals = (eigenbasis_values(surface, mode, pts) ** 2).sum(axis=0)
    return DiagonalScan(minimum=float(vals.min()), maximum=float(vals.max()),
                        expected=mode.multiplicity / surface.area)


def gradient_sum_check(surface: FlatSurface, mode: SpectralMode,
                       grid: int = 64) -> DiagonalScan:
    """Min/max of sum_j |grad phi_j|^2 over a grid; tori give lambda * mult / area."""
    pts, _ = fundamental_domain_grid(surface, grid)
    grads = eigenbasis_gradients(surface, mode, pts)
    vals = (grads ** 2).sum(axis=(-1,)).sum(axis=0)
    return DiagonalScan(minimum=float(vals.min()), maximum=float(vals.max()),
                        expected=mode.eigenvalue * mode.multiplicity / surface.area)
