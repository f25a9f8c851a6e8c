"""Model families: biquadratic swallow, arch, product, tricorn, Henon, circle maps, Mandelbrot.

Membership tests take the escape radius from the family: 2 (or |c|) for a
single quadratic, 4 for two-step compositions, 100 in norm for Henon maps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._accel import HAVE_NUMBA, njit, prange

OMEGA = complex(-0.5, math.sqrt(3) / 2)  # e^{2 pi i / 3}


# family tags -----------------------------------------------------------------

@dataclass(frozen=True)
class Biquadratic:
    c1: float
    c2: float


@dataclass(frozen=True)
class Arch:
    c: float
    xhat: float
    sign: int = 1  # xi -> sign*xi**2 + xhat

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("arch branch sign must be +1 or -1")


@dataclass(frozen=True)
class Product:
    c1: float
    c2: float


@dataclass(frozen=True)
class Tricorn:
    c: complex


@dataclass(frozen=True)
class Henon:
    alpha: float
    beta: float


@dataclass(frozen=True)
class Circle:
    c: float
    k: float


@dataclass(frozen=True)
class Quadratic:
    c: complex


# escape helpers ----------------------------------------------------------------

@dataclass(frozen=True)
class OrbitVerdict:
    bounded: bool
    escaped_at: int | None = None


def quadratic_escape_time(z0, c, nmax, radius=None):
    """First n with |f_c^n(z0)| > radius for f_c(z) = z^2 + c, or -1 (vectorised)."""
    z, c = np.broadcast_arrays(np.asarray(z0, dtype=complex), np.asarray(c, dtype=complex))
    z = z.copy()
    if radius is None:
        radius = np.maximum(2.0, np.abs(c))
    out = np.full(z.shape, -1, dtype=np.int64)
    live = np.abs(z) <= radius
    out[~live] = 0
    for n in range(1, nmax + 1):
        if not live.any():
            break
        z[live] = z[live] ** 2 + c[live]
        esc = live & (np.abs(z) > radius)
        out[esc] = n
        live &= ~esc
    return out


def _composition_escape(starts, steps, nmax, radius):
    """Escape times for orbits through a cycle of maps z -> z**2 + steps[i].

    ``starts`` gives the index of the first map to apply.  The counter
    is in single steps.
    """
    z = np.zeros(np.broadcast(*steps).shape, dtype=complex)
    cs = [np.broadcast_to(np.asarray(s, dtype=complex), z.shape) for s in steps]
    idx = np.full(z.shape, starts, dtype=np.int64)
    out = np.full(z.shape, -1, dtype=np.int64)
    live = np.ones(z.shape, dtype=bool)
    m = len(cs)
    for n in range(1, nmax + 1):
        if not live.any():
            break
        cc = np.choose(idx, cs)
        z = np.where(live, z * z + cc, z)
        idx = np.where(live, (idx + 1) % m, idx)
        esc = live & (np.abs(z) > radius)
        out[esc] = n
        live &= ~esc
    return out


def _comp_radius(*cs):
    # |z| > R >= 1 + |c| forces |z^2 + c| > |z|
    return max(4.0, 1.0 + max(abs(c) for c in cs))


def biquadratic_status(c1, c2, Nmax=2000):
    """Verdicts for the orbits of the critical point 0 of each copy under the alternation."""
    R = _comp_radius(c1, c2)
    out = []
    for start in (0, 1):
        t = int(_composition_escape(start, [c1, c2], Nmax, R))
        out.append(OrbitVerdict(t < 0, None if t < 0 else t))
    return tuple(out)


def biquadratic_connected(c1, c2, Nmax=2000):
    return all(v.bounded for v in biquadratic_status(c1, c2, Nmax))


def arch_closed_form(c, xhat):
    return -2 <= c <= 0.25 and 2 * abs(xhat) <= 1 + math.sqrt(1 - 4 * c)


def arch_membership(c, xhat, Nmax=2000, sign=1):
    """(closed form, dynamic) membership in the real connectedness locus of the arch model.

    The first copy sends its critical point 0 to xhat whichever branch sign
    is used, so membership does not depend on ``sign``.
    """
    Arch(c, xhat, sign)
    closed = arch_closed_form(c, xhat)
    dyn = bool(quadratic_escape_time(0.0, c, Nmax) < 0 and quadratic_escape_time(xhat, c, Nmax) < 0)
    return closed, dyn


def product_closed_form(c1, c2):
    return -2 <= c1 <= 0.25 and -2 <= c2 <= 0.25


def product_membership(c1, c2, Nmax=2000):
    closed = product_closed_form(c1, c2)
    dyn = bool(quadratic_escape_time(0.0, c1, Nmax) < 0 and quadratic_escape_time(0.0, c2, Nmax) < 0)
    return closed, dyn


def arch_grid(cs, xhats, Nmax=2000):
    """Dynamic and closed-form membership on the grid ``cs x xhats`` (rows follow xhats)."""
    C, X = np.meshgrid(np.asarray(cs, float), np.asarray(xhats, float))
    dyn = (quadratic_escape_time(0.0, C, Nmax) < 0) & (quadratic_escape_time(X, C, Nmax) < 0)
    closed = (C >= -2) & (C <= 0.25) & (2 * np.abs(X) <= 1 + np.sqrt(np.maximum(1 - 4 * C, 0.0)))
    return dyn, closed


def product_grid(c1s, c2s, Nmax=2000):
    C1, C2 = np.meshgrid(np.asarray(c1s, float), np.asarray(c2s, float))
    dyn = (quadratic_escape_time(0.0, C1, Nmax) < 0) & (quadratic_escape_time(0.0, C2, Nmax) < 0)
    closed = (C1 >= -2) & (C1 <= 0.25) & (C2 >= -2) & (C2 <= 0.25)
    return dyn, closed


def tricorn_bounded(c, Nmax=1000):
    """Vectorised tricorn membership: both critical orbits of z -> w = z^2+c, w -> z = w^2+conj(c)."""
    c = np.asarray(c, dtype=complex)
    R = np.maximum(4.0, 1.0 + np.abs(c))
    a = _composition_escape(0, [c, np.conj(c)], Nmax, R)
    b = _composition_escape(1, [c, np.conj(c)], Nmax, R)
    return (a < 0) & (b < 0)


def tricorn_membership(c, Nmax=1000):
    return bool(tricorn_bounded(c, Nmax))


def mandelbrot_membership(c, Nmax=1000):
    """Orbit of 0 under z^2 + c stays in the disk of radius 2 for Nmax steps."""
    return bool(quadratic_escape_time(0.0, c, Nmax, 2.0) < 0)


# Henon -----------------------------------------------------------------------

HENON_ESCAPE = 100.0


@dataclass
class HenonResult:
    alpha: float
    beta: float
    period: int | None
    orbit: list = field(default_factory=list)
    eigenvalues: list = field(default_factory=list)
    seed: int = 0

    def to_json(self):
        return {"alpha": self.alpha, "beta": self.beta, "period": self.period,
                "orbit": [list(p) for p in self.orbit],
                "eigenvalues": [[complex(e).real, complex(e).imag] for e in self.eigenvalues],
                "seed": self.seed}


@njit
def _henon_cycle(x, y, alpha, beta, nwarm, pmax, tol):
    """Warm up, detect a period <= pmax, refine by Newton on H^p - id.

    Returns (status, period, x, y, tr, det) with status -1 escaped,
    0 bounded without confirmed attracting cycle, 1 confirmed.
    """
    for _ in range(nwarm):
        x, y = y, y * y - alpha - beta * x
        if x * x + y * y > HENON_ESCAPE * HENON_ESCAPE:
            return -1, 0, x, y, 0.0, 0.0
    u, v = x, y
    p = 0
    for q in range(1, pmax + 1):
        u, v = v, v * v - alpha - beta * u
        if abs(u - x) < tol and abs(v - y) < tol:
            p = q
            break
    if p == 0:
        return 0, 0, x, y, 0.0, 0.0
    for _ in range(30):
        # H^p and its Jacobian [[a, b], [c, d]]
        u, v = x, y
        a, b, c, d = 1.0, 0.0, 0.0, 1.0
        for _ in range(p):
            # DH = [[0, 1], [-beta, 2v]]
            a, b, c, d = c, d, -beta * a + 2 * v * c, -beta * b + 2 * v * d
            u, v = v, v * v - alpha - beta * u
        g1, g2 = u - x, v - y
        j11, j12, j21, j22 = a - 1.0, b, c, d - 1.0
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            return 0, 0, x, y, 0.0, 0.0
        dx = (j22 * g1 - j12 * g2) / det
        dy = (-j21 * g1 + j11 * g2) / det
        x -= dx
        y -= dy
        if abs(dx) + abs(dy) < 1e-14 * (1.0 + abs(x) + abs(y)):
            break
    u, v = x, y
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    for _ in range(p):
        a, b, c, d = c, d, -beta * a + 2 * v * c, -beta * b + 2 * v * d
        u, v = v, v * v - alpha - beta * u
    if abs(u - x) > 1e-9 or abs(v - y) > 1e-9:
        return 0, 0, x, y, 0.0, 0.0
    return 1, p, x, y, a + d, a * d - b * c


def _eig_moduli(tr, det):
    disc = tr * tr - 4 * det
    if disc >= 0:
        r = math.sqrt(disc)
        return ((tr + r) / 2, (tr - r) / 2)
    r = math.sqrt(-disc)
    return (complex(tr / 2, r / 2), complex(tr / 2, -r / 2))


def _attracting(tr, det):
    return all(abs(e) < 1 for e in _eig_moduli(tr, det))


@njit
def _henon_pixel(starts, alpha, beta, nwarm, pmax, tol):
    """Smallest confirmed attracting period over the trial starts; 0 bounded only, -1 none bounded."""
    best = -1
    for t in range(starts.shape[0]):
        st, p, x, y, tr, det = _henon_cycle(starts[t, 0], starts[t, 1], alpha, beta, nwarm, pmax, tol)
        if st < 0:
            continue
        if best < 0:
            best = 0
        if st == 1:
            disc = tr * tr - 4 * det
            if disc >= 0:
                r = math.sqrt(disc)
                ok = abs(tr + r) < 2 and abs(tr - r) < 2
            else:
                ok = det < 1  # |lambda|^2 = det for a complex pair
            if ok and (best == 0 or p < best):
                best = p
    return best


@njit(parallel=True)
def _henon_grid_nb(alphas, betas, starts, nwarm, pmax, tol, out):
    ny, nx = out.shape
    for idx in prange(ny * nx):
        j = idx // nx
        i = idx - j * nx
        out[j, i] = _henon_pixel(starts[j, i], alphas[i], betas[j], nwarm, pmax, tol)


def _henon_grid_np(alphas, betas, starts, nwarm, pmax, tol, out):
    # orbit warm-up vectorised over pixels and trials; cycle refinement per survivor
    ny, nx = out.shape
    A = np.broadcast_to(np.asarray(alphas)[None, :, None], starts.shape[:3])
    Bt = np.broadcast_to(np.asarray(betas)[:, None, None], starts.shape[:3])
    x = starts[..., 0].copy()
    y = starts[..., 1].copy()
    alive = np.ones(x.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(nwarm):
            x, y = y, y * y - A - Bt * x
            alive &= x * x + y * y <= HENON_ESCAPE ** 2
            x = np.where(alive, x, 0.0)
            y = np.where(alive, y, 0.0)
    out[...] = np.where(alive.any(axis=2), 0, -1)
    f = getattr(_henon_cycle, "py_func", _henon_cycle)
    for j, i, t in zip(*np.nonzero(alive)):
        st, p, _, _, tr, det = f(x[j, i, t], y[j, i, t], A[j, i, t], Bt[j, i, t], 0, pmax, tol)
        if st == 1 and _attracting(tr, det) and (out[j, i] == 0 or p < out[j, i]):
            out[j, i] = p


def henon_starts(seed, ny, nx, trials, lo=-3.0, hi=3.0):
    """Initial points, one generator per row seeded by (seed, row)."""
    out = np.empty((ny, nx, trials, 2))
    for j in range(ny):
        out[j] = np.random.default_rng([seed, j]).uniform(lo, hi, size=(nx, trials, 2))
    return out


def henon_grid(alphas, betas, trials=16, nwarm=1000, pmax=16, tol=1e-6, seed=0, use_numba=None):
    """Smallest attracting period found per (alpha, beta); 0 bounded only, -1 nothing bounded.

    Rows follow ``betas``, columns ``alphas``.  Deterministic for a given seed.
    """
    alphas = np.ascontiguousarray(alphas, dtype=float)
    betas = np.ascontiguousarray(betas, dtype=float)
    starts = henon_starts(seed, len(betas), len(alphas), trials)
    out = np.empty((len(betas), len(alphas)), dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        _henon_grid_nb(alphas, betas, starts, nwarm, pmax, tol, out)
    else:
        _henon_grid_np(alphas, betas, starts, nwarm, pmax, tol, out)
    return out


def henon_search(alpha, beta, trials=64, Nmax=1000, pmax=16, seed=0, tol=1e-6) -> HenonResult:
    """Random search for an attracting periodic orbit of (x, y) -> (y, y^2 - alpha - beta x).

    Starts are uniform in [-3, 3]^2 from ``numpy.random.default_rng(seed)``.
    Returns the smallest period whose Newton-refined cycle has both
    eigenvalues inside the unit circle (``period=None`` if none).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    starts = np.random.default_rng(seed).uniform(-3.0, 3.0, size=(trials, 2))
    f = _henon_cycle if HAVE_NUMBA else getattr(_henon_cycle, "py_func", _henon_cycle)
    best = None
    for x0, y0 in starts:
        st, p, x, y, tr, det = f(float(x0), float(y0), float(alpha), float(beta), Nmax, pmax, tol)
        if st == 1 and _attracting(tr, det) and (best is None or p < best[0]):
            best = (p, x, y, tr, det)
    if best is None:
        return HenonResult(alpha, beta, None, seed=seed)
    p, x, y, tr, det = best
    orbit = []
    for _ in range(p):
        orbit.append((x, y))
        x, y = y, y * y - alpha - beta * x
    return HenonResult(alpha, beta, p, orbit, list(_eig_moduli(tr, det)), seed)


# circle maps -------------------------------------------------------------------

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RotationEstimate:
    rho: float
    locked: Fraction | None
    injective: bool
    multiplier: float | None = None


def _circle_lift(t, c, k):
    return t + c + k * np.sin(TWO_PI * t)


def _circle_cycle(t, c, k, q):
    u, d = t, 1.0
    for _ in range(q):
        d *= 1 + TWO_PI * k * math.cos(TWO_PI * u)
        u = u + c + k * math.sin(TWO_PI * u)
    return u, d


def _locked_orbit(c, k, qmax, warm, tol):
    """Newton-confirmed attracting p/q orbit reached from one of 8 starts, or None."""
    ts = (np.arange(8) + 0.5) / 8
    for _ in range(warm):
        ts = _circle_lift(ts, c, k)
    for t in ts - np.floor(ts):
        t = float(t)
        for q in range(1, qmax + 1):
            u, _ = _circle_cycle(t, c, k, q)
            p = round(u - t)
            if abs(u - t - p) >= tol:
                continue
            for _ in range(30):
                u, d = _circle_cycle(t, c, k, q)
                if d == 1.0:
                    break
                step = (u - t - p) / (d - 1.0)
                t -= step
                if abs(step) < 1e-15:
                    break
            u, d = _circle_cycle(t, c, k, q)
            if abs(u - t - p) < 1e-12 and abs(d) < 1:
                return Fraction(p, q), d
            break
    return None


def circle_rotation_number(c, k, N=100_000, qmax=64, warm=2000, tol=1e-8) -> RotationEstimate:
    """Rotation number of t -> t + c + k sin(2 pi t).

    k = 0 is the rigid rotation (rho = c).  Otherwise a Newton-confirmed
    attracting periodic orbit of type p/q gives rho = p/q exactly; failing
    that, rho is the mean of (F^N(t0) - t0)/N over 8 starts t0 = j/8.
    """
    injective = abs(TWO_PI * k) < 1
    if k == 0:
        return RotationEstimate(float(c), None, True)
    lock = _locked_orbit(c, k, qmax, warm, tol)
    if lock is not None:
        return RotationEstimate(float(lock[0]), lock[0], injective, float(lock[1]))
    t0 = np.arange(8) / 8.0
    t = t0.copy()
    for _ in range(N):
        t = _circle_lift(t, c, k)
    return RotationEstimate(float(np.mean((t - t0) / N)), None, injective)


def tongue_grid(cs, ks, N=2000, qmax=32):
    """Rotation numbers over (c, k); rows follow ks.  Locked cells get exact p/q."""
    out = np.empty((len(ks), len(cs)))
    locked = np.zeros(out.shape, dtype=bool)
    for j, k in enumerate(ks):
        for i, c in enumerate(cs):
            est = circle_rotation_number(c, k, N=N, qmax=qmax, warm=min(N, 2000))
            out[j, i] = est.rho
            locked[j, i] = est.locked is not None
    return out, locked
