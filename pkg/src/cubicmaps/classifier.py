"""Classes R0..R3 of real cubic maps.

``region_class`` works from the dynamics: it builds the hull interval
I = [alpha, beta] of the bounded real orbits and counts critical values that
leave I.  ``curve_region_class`` only looks at which side of the separating
curves (A, B) lies on.  The two are cross-checked in the tests.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import MonicForm, critical_points, real_roots, solve_cubic
from .errors import AmbiguousNearBoundary
from .loci import PER2, PREPER11, Per1, Preper12, curve_B

TIE_TOL = 1e-12
IMAG_TOL = 1e-9
BOUNDARY_TOL = 1e-9


class RegionClass(enum.IntEnum):
    R0 = 0
    R1 = 1
    R2 = 2
    R3 = 3

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class HullInterval:
    alpha: float
    beta: float

    @property
    def degenerate(self):
        return self.alpha == self.beta

    def contains(self, x, tol=TIE_TOL):
        scale = max(1.0, abs(self.alpha), abs(self.beta))
        return self.alpha - tol * scale <= x <= self.beta + tol * scale


def _real_fixed_points(m: MonicForm):
    return real_roots(solve_cubic(m.sigma, 0, -(3 * m.A + 1), m.b), IMAG_TOL)


def _real_preimages(m: MonicForm, y):
    return real_roots(solve_cubic(m.sigma, 0, -3 * m.A, m.b - y), IMAG_TOL)


def _real_two_cycles(m: MonicForm):
    """Points of real period-2 orbits (s = u + v, p = u v)."""
    s_roots = real_roots(solve_cubic(m.sigma, 0, -(3 * m.A - 2), -m.b), IMAG_TOL)
    pts = []
    for s in s_roots:
        p = s * s - m.sigma * (3 * m.A - 1)
        disc = s * s - 4 * p
        if disc < -IMAG_TOL * max(1.0, s * s):
            continue
        r = math.sqrt(max(disc, 0.0))
        pts.extend(((s + r) / 2, (s - r) / 2))
    return pts


def hull_interval(m: MonicForm) -> HullInterval:
    """Smallest closed interval containing every bounded real orbit.

    sigma=+1: right of the largest fixed point beta we have f(x) > x, so orbits
    there increase to infinity; the left end is the smallest point that is
    fixed or maps onto beta.  sigma=-1: f reverses orientation, so the
    endpoints form a fixed point or a 2-cycle; we take the extreme real
    points of period <= 2.
    """
    if not m.is_real:
        raise ValueError("hull_interval needs a real map")
    fixed = _real_fixed_points(m)
    if m.sigma == 1:
        beta = max(fixed)
        if len(fixed) == 1:
            return HullInterval(beta, beta)
        alpha = min(fixed + _real_preimages(m, beta))
        return HullInterval(alpha, beta)
    pts = fixed + _real_two_cycles(m)
    return HullInterval(min(pts), max(pts))


def hull_endpoint_error(m: MonicForm, I: HullInterval):
    """Distance of f(alpha), f(beta) from the endpoint set {alpha, beta}."""
    ends = (I.alpha, I.beta)
    return max(min(abs(m(x) - e) for e in ends) for x in ends)


def real_turning_points(m: MonicForm):
    """Distinct real critical points (none when sigma*A <= 0)."""
    if m.sigma * m.A <= 0:
        return []
    a = critical_points(m)[0]
    return [-a, a]


def region_class(m: MonicForm, I: HullInterval | None = None) -> RegionClass:
    """1 + number of critical points inside I whose value leaves I (R0 if I is a point)."""
    if I is None:
        I = hull_interval(m)
    if I.degenerate:
        return RegionClass.R0
    n = 1
    for c in real_turning_points(m):
        if I.alpha < c < I.beta and not I.contains(m(c)):
            n += 1
    return RegionClass(n)


def region_class_quadratic(c) -> RegionClass:
    """Class of ``x -> x**2 + c`` from its hull [-beta, beta]."""
    disc = 1 - 4 * c
    if disc < 0:
        dyn = RegionClass.R0
    else:
        beta = (1 + math.sqrt(disc)) / 2
        dyn = RegionClass.R2 if c < -beta else RegionClass.R1
    closed = RegionClass.R2 if c < -2 else (RegionClass.R1 if c <= 0.25 else RegionClass.R0)
    if dyn != closed:
        raise AssertionError(f"quadratic partition mismatch at c={c}: {dyn} vs {closed}")
    return dyn


def _above(B, curve, A):
    """True if B lies above the curve (single-branch curves)."""
    Bc = curve_B(curve, A)[0]
    d = B - Bc
    if abs(d) < BOUNDARY_TOL:
        raise AmbiguousNearBoundary(f"(A,B)=({A},{B}) within {BOUNDARY_TOL:g} of {curve.label}",
                                    curve.label, abs(d))
    return d > 0


def curve_region_class(A, B, sigma=None) -> RegionClass:
    """Class read off from the separating curves of the real moduli plane.

    sigma=+1 (B >= 0): Per1(1) bounds R0 from above, Preper11 separates R1
    from R2 for A >= 1/9 and R2 from R3 for A > 1.  sigma=-1 (B < 0):
    Per1(-1) (for 2/9 <= A <= 1/3) and Per2(1) (for A < 2/9) border R0;
    for A < -1/36 the '+' branch of Preper12 separates R2 (below) from R1
    (A > -1) or R3 (A < -1).  The '-' branch never separates classes.
    """
    if sigma is None:
        sigma = -1 if B < 0 else 1
    if sigma == 1:
        if _above(B, Per1(1), A):
            return RegionClass.R0
        if A <= 1 / 9:
            return RegionClass.R1
        if A <= 1:
            return RegionClass.R2 if _above(B, PREPER11, A) else RegionClass.R1
        return RegionClass.R2 if _above(B, PREPER11, A) else RegionClass.R3
    if A > 1 / 3:
        return RegionClass.R0
    if A >= 2 / 9:
        return RegionClass.R1 if _above(B, Per1(-1), A) else RegionClass.R0
    if A >= -1 / 36:
        return RegionClass.R1 if _above(B, PER2, A) else RegionClass.R0
    if not _above(B, PER2, A):
        return RegionClass.R0
    if not _above(B, Preper12("+"), A):
        return RegionClass.R2
    return RegionClass.R1 if A > -1 else RegionClass.R3


def classify_report(A, B, sigma=None):
    """JSON-ready report comparing the dynamical and curve classifications."""
    if sigma is None:
        sigma = -1 if B < 0 else 1
    m = MonicForm.from_moduli(A, B, sigma)
    I = hull_interval(m)
    dyn = region_class(m, I)
    try:
        agree = curve_region_class(A, B, sigma) == dyn
    except AmbiguousNearBoundary:
        agree = None
    return {"A": A, "B": B, "sigma": sigma, "class": str(dyn),
            "interval": [I.alpha, I.beta], "agreement": agree}
