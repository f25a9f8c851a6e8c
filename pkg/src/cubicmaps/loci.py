"""Closed-form curves in the (A, B) moduli plane and multiplier identities.

Curves:

* ``Per1(mu)``: a fixed point of multiplier ``mu``,
  ``B = (A + mu/3) (2A + 1 - mu/3)**2``.
* ``Per2Saddle``: a period-2 orbit of multiplier 1, ``B = 4 (A - 2/3)**3``.
* ``Preper11``: a critical point maps onto a fixed point, ``B = 4A (A - 1)**2``.
* ``Preper12``: a critical point maps onto a period-2 orbit,
  ``-B = (1 +/- (2A + 1) sqrt(-A))**2`` for ``A <= 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import MonicForm, critical_points, solve_cubic
from .errors import DegenerateOrbit, DomainError


@dataclass(frozen=True)
class CurveId:
    kind: str  # "Per1", "Per2Saddle", "Preper11", "Preper12"
    mu: float | None = None
    branch: str | None = None  # "+" / "-" for Preper12, None means both

    def __post_init__(self):
        if self.kind not in ("Per1", "Per2Saddle", "Preper11", "Preper12"):
            raise ValueError(f"unknown curve {self.kind!r}")
        if self.kind == "Per1" and self.mu is None:
            raise ValueError("Per1 needs a multiplier")
        if self.branch not in (None, "+", "-"):
            raise ValueError("branch must be '+' or '-'")

    @property
    def label(self):
        if self.kind == "Per1":
            mu = self.mu
            if isinstance(mu, float) and mu.is_integer():
                mu = int(mu)
            return f"Per1({mu})"
        if self.kind == "Preper12" and self.branch:
            return f"Preper12{self.branch}"
        return self.kind

    @classmethod
    def parse(cls, text):
        """Parse labels such as ``Per1(-1)``, ``Per2Saddle``, ``Preper12+``."""
        t = text.strip()
        if t.startswith("Per1(") and t.endswith(")"):
            return cls("Per1", mu=float(t[5:-1]))
        if t in ("Per2Saddle", "Per2(1)", "Per2"):
            return cls("Per2Saddle")
        if t in ("Preper11", "Preper(1)1"):
            return cls("Preper11")
        if t in ("Preper12", "Preper12+", "Preper12-"):
            return cls("Preper12", branch=t[8:] or None)
        raise ValueError(f"unknown curve {text!r}")


def Per1(mu):
    return CurveId("Per1", mu=mu)


PER2 = CurveId("Per2Saddle")
PREPER11 = CurveId("Preper11")


def Preper12(branch=None):
    return CurveId("Preper12", branch=branch)


@dataclass(frozen=True)
class CurveSample:
    A: float
    B: float
    curve: CurveId
    aux: complex | None = None


def _real_if_close(x, tol=1e-12):
    x = complex(x)
    if abs(x.imag) <= tol * max(1.0, abs(x.real)):
        return x.real
    return x


def per1_parametric(mu, kappa) -> CurveSample:
    """Point of Per1(mu) whose fixed point of multiplier mu sits at kappa.

    An imaginary ``kappa`` gives the B < 0 half of the curve.
    """
    A = kappa * kappa - mu / 3
    b = kappa * (2 * kappa * kappa + 1 - mu)
    return CurveSample(_real_if_close(A), _real_if_close(b * b), Per1(mu), kappa)


def _per1(mu, A):
    t = Fraction(mu) / 3 if isinstance(A, Fraction) else mu / 3
    return (A + t) * (2 * A + 1 - t) ** 2


def _preper12(A, sign):
    r = math.sqrt(-A)
    return -(1 + sign * (2 * A + 1) * r) ** 2


def curve_B(curve: CurveId, A):
    """All B on ``curve`` over the abscissa A (exact for Fraction input where possible)."""
    if curve.kind == "Per1":
        return [_per1(curve.mu, A)]
    if curve.kind == "Per2Saddle":
        two_thirds = Fraction(2, 3) if isinstance(A, Fraction) else 2 / 3
        return [4 * (A - two_thirds) ** 3]
    if curve.kind == "Preper11":
        return [4 * A * (A - 1) ** 2]
    if A > 0:
        raise DomainError(f"Preper12 is defined only for A <= 0 (got {A})")
    if curve.branch == "+":
        return [_preper12(A, 1)]
    if curve.branch == "-":
        return [_preper12(A, -1)]
    return [_preper12(A, 1), _preper12(A, -1)]


def curve_dB_dA(curve: CurveId, A):
    """Slopes dB/dA matching the entries of :func:`curve_B`."""
    if curve.kind == "Per1":
        mu = curve.mu
        u = 2 * A + 1 - mu / 3
        return [u * u + 4 * (A + mu / 3) * u]
    if curve.kind == "Per2Saddle":
        return [12 * (A - 2 / 3) ** 2]
    if curve.kind == "Preper11":
        return [4 * (A - 1) ** 2 + 8 * A * (A - 1)]
    if A >= 0:
        raise DomainError("Preper12 slope needs A < 0")
    r = math.sqrt(-A)
    dq = 2 * r - (2 * A + 1) / (2 * r)
    out = []
    for sign in {"+": (1,), "-": (-1,)}.get(curve.branch, (1, -1)):
        out.append(-2 * (1 + sign * (2 * A + 1) * r) * sign * dq)
    return out


def curve_residual(curve: CurveId, A, B):
    """Distance in B from (A, B) to the nearest branch of ``curve``."""
    return min(abs(B - v) for v in curve_B(curve, A))


def sample_curve(curve: CurveId, A) -> list[CurveSample]:
    return [CurveSample(A, B, CurveId(curve.kind, curve.mu, curve.branch)) for B in curve_B(curve, A)]


def _cform(A, B):
    return MonicForm.from_moduli(A, B).complex_form()


def dynamical_residual(sample: CurveSample) -> float:
    """How far the map at ``sample`` is from the curve's defining dynamics.

    Per1(mu): a fixed point with multiplier mu (the candidate points with
    f' = mu are tested for being fixed).  Per2Saddle: the period-2 orbit at the
    double root of the symmetric-variable cubic has multiplier 1.  Preper11 /
    Preper12: a critical value lands on a fixed point / period-2 orbit that
    does not contain the critical point, with the documented multiplier or
    orbit shape.  Returns ``inf`` when the structure is degenerate.
    """
    A, B, curve = sample.A, sample.B, sample.curve
    m = _cform(A, B)
    f = m
    if curve.kind == "Per1":
        z = cmath.sqrt(A + curve.mu / 3)
        return min(max(abs(f(w) - w), abs(f.deriv(w) - curve.mu)) for w in (z, -z))
    if curve.kind == "Per2Saddle":
        if abs(3 * A - 2) < 1e-9:
            return math.inf
        s0 = -3 * m.b / (2 * (3 * A - 2))
        p = s0 * s0 - (3 * A - 1)
        if abs(s0 * s0 - 4 * p) < 1e-9:
            return math.inf
        res = abs(s0 ** 3 - (3 * A - 2) * s0 - m.b)
        mult = 9 * (p * p - A * (s0 * s0 - 2 * p) + A * A)
        u = (s0 + cmath.sqrt(s0 * s0 - 4 * p)) / 2
        orbit = abs(f(f(u)) - u)
        return max(res, abs(mult - 1), orbit)
    best = math.inf
    for a in critical_points(m):
        v = f(a)
        if curve.kind == "Preper11":
            if abs(v - a) < 1e-6:
                continue
            r = max(abs(f(v) - v), abs(f.deriv(v) - 9 * A), abs(v + 2 * a))
        else:
            w = f(v)
            if abs(w - v) < 1e-6 or abs(v - a) < 1e-6:
                continue
            r_cyc = abs(f(w) - v)
            # orbit {-2a, a +/- i}: the critical value is a +/- i, its image is -2a
            r_shape = max(abs(w + 2 * a), min(abs(v - (a + 1j)), abs(v - (a - 1j))))
            r = max(r_cyc, r_shape)
        best = min(best, r)
    return best


def _sort_key(z):
    return (round(z.real, 12), z.imag)


def fixed_points(m: MonicForm):
    """The three complex fixed points, ascending by real part then imaginary part."""
    roots = solve_cubic(m.sigma, 0, -(3 * m.A + 1), m.b)
    return sorted(roots, key=_sort_key)


def fixed_point_multipliers(m: MonicForm):
    """Multipliers ``f'(z_i)`` at the fixed points, ordered as :func:`fixed_points`.

    Multipliers are conjugacy invariants, so identities in (A, B) hold for
    either sign of the real normal form.
    """
    mults = [complex(m.deriv(z)) for z in fixed_points(m)]
    return tuple(sorted(mults, key=_sort_key))


def multiplier_identities(A, B):
    """Right-hand sides of the fixed-point identities in the mu_i - 1.

    Returns ``(e1/9, e2, e3/27)`` targets: ``(A + 1/3, 0, B - 4(A + 1/3)**3)``.
    """
    return A + 1 / 3, 0.0, B - 4 * (A + 1 / 3) ** 3


def multiplier_symmetric_functions(mults):
    """``(e1/9, e2, e3/27)`` of ``mu_i - 1``; compare with :func:`multiplier_identities`."""
    n = [complex(mu) - 1 for mu in mults]
    e1 = n[0] + n[1] + n[2]
    e2 = n[0] * n[1] + n[0] * n[2] + n[1] * n[2]
    e3 = n[0] * n[1] * n[2]
    return e1 / 9, e2, e3 / 27


def third_multiplier(mu1, mu2):
    """The remaining fixed-point multiplier, from ``e2 = 0``; needs mu1 + mu2 != 2."""
    s = mu1 + mu2 - 2
    if s == 0:
        raise ZeroDivisionError("mu1 + mu2 = 2 leaves the third multiplier free")
    return 2 + (1 - mu1 * mu2) / s


@dataclass(frozen=True)
class Period2Report:
    closed: tuple  # (sigma1, sigma2, sigma3) from the (A, B) polynomials
    computed: tuple  # same from the three period-2 orbits
    orbits: tuple  # ((u, v), ...) in the complex form
    multipliers: tuple

    @property
    def max_error(self):
        return max(abs(c - d) for c, d in zip(self.closed, self.computed))

    @property
    def max_rel_error(self):
        return max(abs(c - d) / max(1.0, abs(c)) for c, d in zip(self.closed, self.computed))


def period2_closed_forms(A, B, printed=False):
    """Elementary symmetric functions of the period-2 multipliers as polynomials in (A, B).

    ``printed=True`` uses the variant without the factor 4 in the last term,
    which does not match the orbits (kept for comparison only).
    """
    s1 = 9 * (3 - 4 * A)
    s2 = 81 * (3 - 8 * A + 16 * A ** 3 - 12 * A ** 4 + 2 * B + 3 * A * B)
    k = 1 if printed else 4
    s3 = s2 - s1 + 1 + 729 * (B - 4 * (A - 2 / 3) ** 3) * (B - k * (A - 1 / 3) * (A + 2 / 3) ** 2)
    return s1, s2, s3


def _snap_double(roots, tol=1e-7):
    """Replace a nearly coincident pair by its mean.

    A double root is only found to about sqrt(eps), but the mean of the two
    computed roots is accurate to O(eps).
    """
    r = list(roots)
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(r[i] - r[j]) < tol * max(1.0, abs(r[i])):
                r[i] = r[j] = (r[i] + r[j]) / 2
                return r
    return r


def period2_orbits(m: MonicForm, degenerate_tol=1e-7):
    """The three period-2 orbits ``(u, v)`` of the complex form with their multipliers.

    With ``s = u + v`` and ``p = u v`` a 2-cycle satisfies
    ``s**3 - (3A - 2) s - b = 0`` and ``p = s**2 - (3A - 1)``.
    Raises DegenerateOrbit if an orbit collapses onto a fixed point.
    """
    c = m.complex_form()
    A, b = c.A, c.b
    out = []
    for s in _snap_double(solve_cubic(1, 0, -(3 * A - 2), -b)):
        p = s * s - (3 * A - 1)
        disc = s * s - 4 * p
        if abs(disc) < degenerate_tol * max(1.0, abs(s * s)):
            raise DegenerateOrbit(f"period-2 orbit with s={s:.6g} collapses onto a fixed point")
        r = cmath.sqrt(disc)
        mult = 9 * (p * p - A * (s * s - 2 * p) + A * A)
        out.append(((s + r) / 2, (s - r) / 2, mult))
    return out


def period2_multiplier_symmetrics(m: MonicForm, printed=False) -> Period2Report:
    A, B = m.A, m.B
    orbits = period2_orbits(m)
    mu = [o[2] for o in orbits]
    computed = (mu[0] + mu[1] + mu[2],
                mu[0] * mu[1] + mu[0] * mu[2] + mu[1] * mu[2],
                mu[0] * mu[1] * mu[2])
    closed = period2_closed_forms(A, B, printed=printed)
    return Period2Report(closed, computed, tuple((u, v) for u, v, _ in orbits), tuple(mu))


def indifferent_segment(theta) -> CurveSample:
    """Point of Per1(2) whose complex conjugate fixed points have multipliers ``e^{+-i theta}``."""
    if not 0 < theta < math.pi:
        raise DomainError("theta must lie in (0, pi)")
    A = (2 / 9) * (math.cos(theta) - 2)
    return CurveSample(A, curve_B(Per1(2), A)[0], Per1(2), None)


@dataclass(frozen=True)
class SpecialPoint:
    name: str
    A: object  # Fraction when rational
    B: object
    curves: tuple
    tangency: bool
    exact: str

    @property
    def Af(self):
        return float(self.A)

    @property
    def Bf(self):
        return float(self.B)


def special_points():
    """Named intersection, tangency and extreme points of the curves."""
    F = Fraction
    r = math.sqrt(2 / 27)
    return (
        SpecialPoint("Per1(-1)/Per2 tangency", F(2, 9), F(-256, 729),
                     (Per1(-1), PER2), True, "(2/9, -256/729)"),
        SpecialPoint("Per1(1)/Preper11 tangency", F(1, 9), F(256, 729),
                     (Per1(1), PREPER11), True, "(1/9, 256/729)"),
        SpecialPoint("Per2/Preper12 tangency", F(-1, 36), F(-15625, 11664),
                     (PER2, Preper12("+")), True, "(-1/36, -15625/11664)"),
        SpecialPoint("B maximum on Preper11", F(1, 3), F(16, 27),
                     (PREPER11,), False, "(1/3, 16/27)"),
        SpecialPoint("B minimum on Preper12", F(-1, 6), -(1 + r) ** 2,
                     (Preper12("+"),), False, "(-1/6, -(1+sqrt(2/27))^2)"),
        SpecialPoint("A extremes (+1)", F(1), F(0), (PREPER11,), False, "(1, 0)"),
        SpecialPoint("A extremes (-1)", F(-1), F(0), (Preper12("+"),), False, "(-1, 0)"),
    )


def special_point_residuals(p: SpecialPoint):
    """Curve residuals (exact zero for rational points on polynomial curves)."""
    out = []
    for c in p.curves:
        A = p.A if c.kind != "Preper12" else float(p.A)
        B = p.B if c.kind != "Preper12" else float(p.B)
        out.append(abs(min(curve_B(c, A), key=lambda v: abs(v - B)) - B))
    return out


def special_point_slopes(p: SpecialPoint):
    """dB/dA of each listed curve at ``p`` (nearest branch)."""
    A = float(p.A)
    out = []
    for c in p.curves:
        Bs = curve_B(c, A)
        ds = curve_dB_dA(c, A)
        i = int(np.argmin([abs(b - float(p.B)) for b in Bs]))
        out.append(ds[i])
    return out
