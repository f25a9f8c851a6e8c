"""Topological entropy of real cubic (and quadratic) maps from lap numbers.

``lap_sequence`` tracks the turning points of f^k level by level; every
turning point of f^(k+1) is either a turning point of f^k or a root of
f^k(x) = c for a critical point c inside a monotone branch whose values
straddle c.  All turning points lie inside the escape radius, so the domain
is [-R, R] with the two outer branches running off to infinity.

Counting only needs the ordered values of f^k at the turning points, so the
default engine propagates values; ``piecewise_monotone`` also locates the
turning points by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import HAVE_NUMBA
from ._accel import set_threads
from ._lapkernels import lap_counts, lap_grid, propagate, refine_level
from .core import MonicForm, escape_radius
from .errors import CapExceeded

DEFAULT_CAP = 2_000_000
DEFAULT_KMAX = 200
VALUE_TOL = 1e-12


@dataclass(frozen=True)
class IntervalMap:
    """Real polynomial given by ``coeffs`` (highest first) with its real critical points."""

    coeffs: tuple
    crit: tuple
    radius: float

    @classmethod
    def from_monic(cls, m: MonicForm):
        if not m.is_real:
            raise ValueError("lap counting needs a real map")
        sA = m.sigma * m.A
        crit = () if sA <= 0 else (-math.sqrt(sA), math.sqrt(sA))
        return cls((float(m.sigma), 0.0, -3.0 * m.A, float(m.b)), crit, escape_radius(m))

    @classmethod
    def quadratic(cls, c):
        """``x -> x**2 + c``; beyond max(2, |c|) orbits grow monotonically."""
        return cls((1.0, 0.0, float(c)), (0.0,), max(2.0, abs(c)) * (1 + 1e-12))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polyval(self.coeffs, x)


@dataclass
class PiecewiseMonotone:
    """Turning points of f^k and the values of f^k there."""

    turning: np.ndarray
    values: np.ndarray
    k: int
    limits: tuple  # f^k(-inf), f^k(+inf) as signed infinities

    @property
    def lap(self):
        return len(self.turning) + 1


@dataclass(frozen=True)
class EntropyEstimate:
    k: int
    lap: int
    h_upper: float
    s: float
    converged: bool
    laps: tuple = field(default=(), repr=False)
    capped: bool = False

    @property
    def h(self):
        return math.log(self.s)


def _as_map(m):
    if isinstance(m, IntervalMap):
        return m
    return IntervalMap.from_monic(m)


class LapEngine:
    """Level-by-level refinement for one map.

    ``values`` holds f^k at its turning points, bracketed by the limits
    f^k(-inf) and f^k(+inf).  With ``locate=True`` the turning points are
    also found (by bisection) and kept in ``points``, bracketed by -R, R.
    """

    def __init__(self, m, use_numba=None, locate=False):
        self.map = _as_map(m)
        self.use_numba = HAVE_NUMBA if use_numba is None else use_numba
        f = self.map
        self.lead = math.copysign(1.0, f.coeffs[0])
        self.odd = f.degree % 2 == 1
        self.crit = np.array(sorted(f.crit), dtype=float)
        self.coeffs = np.array(f.coeffs, dtype=float)
        self.vtol = VALUE_TOL * max(1.0, f.radius)
        self.locate = locate
        self.values = np.array([-np.inf, np.inf])
        self.points = np.array([-f.radius, f.radius]) if locate else None
        self.k = 0

    @property
    def lap(self):
        return len(self.values) - 1

    def state(self) -> PiecewiseMonotone:
        if not self.locate:
            raise ValueError("engine was created without locate=True")
        return PiecewiseMonotone(self.points[1:-1].copy(), self.values[1:-1].copy(), self.k,
                                 (float(self.values[0]), float(self.values[-1])))

    def step(self):
        f = self.map
        if self.locate:
            self.points, self.values = refine_level(
                self.points, self.values, self.crit, self.coeffs, self.k, f.radius,
                self.lead, self.odd, self.vtol, self.use_numba)
        else:
            self.values = propagate(self.values, self.crit, self.coeffs, f.radius,
                                    self.lead, self.odd, self.vtol, self.use_numba)
        self.k += 1
        return self.lap


def piecewise_monotone(m, k, use_numba=None) -> PiecewiseMonotone:
    """Turning points of f^k (located by bisection) and the values there."""
    eng = LapEngine(m, use_numba, locate=True)
    for _ in range(k):
        eng.step()
    return eng.state()


def lap_sequence(m, kmax=DEFAULT_KMAX, cap=DEFAULT_CAP, use_numba=None, locate=False):
    """``[l_1, ..., l_kmax]``; raises CapExceeded (with the prefix) past ``cap`` turning points."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    f = _as_map(m)
    if not f.crit:
        return [1] * kmax
    if not locate:
        eng = LapEngine(f, use_numba)
        laps = lap_counts(eng.crit, eng.coeffs, f.radius, eng.lead, eng.odd, eng.vtol,
                          kmax, cap, eng.use_numba).tolist()
        if len(laps) < kmax:
            raise CapExceeded(len(laps) + 1, laps)
        return laps
    eng = LapEngine(f, use_numba, locate=True)
    laps = []
    for k in range(1, kmax + 1):
        eng.step()
        if eng.lap - 1 > cap:
            raise CapExceeded(k, laps)
        laps.append(eng.lap)
    return laps


def estimate_from_laps(laps, capped=False, window=6, agree=1e-3) -> EntropyEstimate:
    """Growth-number estimate from a lap sequence.

    Uses ratios of successive increments ``d_k = l_k - l_{k-1}`` (with l_0 = 1),
    averaged in log over the last ``window`` levels.  For exponential growth
    this has the same limit as the plain ratio l_k / l_{k-1}, and it does not
    mistake linear growth (zero entropy) for s = k/(k-1).  The window of 6
    averages out increments that oscillate with period 2 or 3.
    """
    laps = list(laps)
    k = len(laps)
    if k == 0:
        return EntropyEstimate(0, 1, 0.0, 1.0, False, (), capped)
    lap = laps[-1]
    h_upper = math.log(lap) / k
    full = [1] + laps
    inc = [full[i] - full[i - 1] for i in range(1, len(full))]
    logs = []
    for i in range(1, len(inc)):
        if inc[i - 1] > 0 and inc[i] > 0:
            logs.append(math.log(inc[i] / inc[i - 1]))
        elif inc[i] == 0 and inc[i - 1] == 0:
            logs.append(0.0)
    if not logs:
        # at most one non-zero increment: bounded lap numbers
        return EntropyEstimate(k, lap, h_upper, 1.0, k >= 3, tuple(laps), capped)
    tail = logs[-window:]
    h = max(0.0, sum(tail) / len(tail))
    sm = [sum(logs[max(0, i - window + 1):i + 1]) / len(logs[max(0, i - window + 1):i + 1])
          for i in range(len(logs))]
    last = sm[-3:]
    converged = len(last) == 3 and max(last) - min(last) <= agree
    s = min(3.0, max(1.0, math.exp(h)))
    return EntropyEstimate(k, lap, h_upper, s, converged, tuple(laps), capped)


def entropy_estimate(m, kmax=DEFAULT_KMAX, cap=DEFAULT_CAP, use_numba=None) -> EntropyEstimate:
    f = _as_map(m)
    if not f.crit:
        return EntropyEstimate(kmax, 1, 0.0, 1.0, True, (1,) * kmax, False)
    try:
        laps = lap_sequence(f, kmax, cap, use_numba)
        capped = False
    except CapExceeded as e:
        laps, capped = e.laps, True
    return estimate_from_laps(laps, capped)


@dataclass
class EntropyGrid:
    window: tuple
    nx: int
    ny: int
    sigma: int
    s: np.ndarray  # (ny, nx), row 0 at the top (largest b)
    converged: np.ndarray
    A: np.ndarray
    b: np.ndarray


def grid_axes(window, nx, ny):
    """Pixel-centre coordinates, rows from top (ymax) to bottom."""
    xmin, xmax, ymin, ymax = window
    xs = xmin + (np.arange(nx) + 0.5) * (xmax - xmin) / nx
    ys = ymax - (np.arange(ny) + 0.5) * (ymax - ymin) / ny
    return xs, ys


def entropy_grid(window, nx, ny, sigma=1, kmax=DEFAULT_KMAX, cap=200_000, threads=None,
                 use_numba=None, plane=None) -> EntropyGrid:
    """Growth numbers over a window of a parameter plane.

    ``plane`` is "Ab" (x -> x^3 - 3Ax + b), "Ab'" (x -> -x^3 - 3Ax + b') or
    "AB" (sigma = sgn B, b = sqrt|B|); by default it follows ``sigma``.
    Row-major, top row at the largest y.  Cells are independent, so the
    result does not depend on ``threads``.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid needs nx, ny >= 1")
    if plane is None:
        if sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        plane = "Ab" if sigma == 1 else "Ab'"
    if plane not in ("Ab", "Ab'", "AB"):
        raise ValueError(f"unknown plane {plane!r}")
    xs, ys = grid_axes(window, nx, ny)
    if plane == "AB":
        groups = [(1, ys >= 0), (-1, ys < 0)]
        sigma = 0
    else:
        sigma = 1 if plane == "Ab" else -1
        groups = [(sigma, np.ones(ny, dtype=bool))]
    s = np.ones((ny, nx))
    conv = np.ones((ny, nx), dtype=bool)
    prev = set_threads(threads) if threads else None
    try:
        for sg, rows in groups:
            if not rows.any():
                continue
            bs = np.sqrt(np.abs(ys[rows])) if plane == "AB" else ys[rows]
            laps, depth = lap_grid(xs, bs, sg, kmax, cap, VALUE_TOL, use_numba)
            sub_s = np.empty(laps.shape[0])
            sub_c = np.empty(laps.shape[0], dtype=bool)
            for idx in range(laps.shape[0]):
                d = int(depth[idx])
                est = estimate_from_laps(laps[idx, :d].tolist(), capped=d < kmax)
                sub_s[idx] = est.s
                sub_c[idx] = est.converged
            s[rows] = sub_s.reshape(-1, nx)
            conv[rows] = sub_c.reshape(-1, nx)
    finally:
        if prev is not None:
            set_threads(prev)
    return EntropyGrid(tuple(window), nx, ny, sigma, s, conv, xs, ys)
