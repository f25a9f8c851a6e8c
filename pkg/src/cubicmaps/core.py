"""Normal forms, conjugacy invariants and iteration of cubic maps.

Every cubic is reduced to ``x -> sigma*x**3 - 3*A*x + b``.  Over the complex
numbers ``sigma`` is always +1 and ``B = b**2``; for real maps ``sigma`` is the
sign of the leading coefficient and ``B = sigma*b**2``, so that ``(A, B)`` are
the same invariants in both settings.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DerivativeBlowup

BLOWUP_THRESHOLD = 1e14
IMAG_TOL = 1e-9


def _is_real(x):
    return not isinstance(x, complex) or x.imag == 0


def _as_real_if_possible(x, tol=IMAG_TOL):
    x = complex(x)
    if abs(x.imag) <= tol * max(1.0, abs(x.real)):
        return x.real
    return x


def _sgn(x):
    return -1 if x < 0 else 1


@dataclass(frozen=True)
class GeneralCubic:
    """``c3*x**3 + c2*x**2 + c1*x + c0`` with ``c3 != 0``."""

    c3: complex
    c2: complex
    c1: complex
    c0: complex

    def __post_init__(self):
        if self.c3 == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def barycenter(self):
        return -self.c2 / (3 * self.c3)

    @property
    def is_real(self):
        return all(_is_real(c) for c in (self.c3, self.c2, self.c1, self.c0))

    def __call__(self, x):
        return ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0

    def deriv(self, x):
        return (3 * self.c3 * x + 2 * self.c2) * x + self.c1


@dataclass(frozen=True)
class ModuliPoint:
    A: complex
    B: complex
    sigma: int = 1

    @classmethod
    def real(cls, A, B, sigma=None):
        """Real moduli point; sigma defaults to sgn(B), and +1 on the A-axis."""
        if sigma is None:
            sigma = _sgn(B)
        return cls(float(A), float(B), int(sigma))


@dataclass(frozen=True)
class MonicForm:
    """The map ``z -> sigma*z**3 - 3*A*z + b``."""

    sigma: int
    A: complex
    b: complex

    @classmethod
    def from_moduli(cls, A, B, sigma=None):
        """Real normal form with ``b = sqrt(|B|) >= 0``.

        Complex ``(A, B)`` give the complex form ``z**3 - 3Az + sqrt(B)``.
        """
        if _is_real(A) and _is_real(B):
            A, B = float(np.real(A)), float(np.real(B))
            if sigma is None:
                sigma = _sgn(B)
            return cls(int(sigma), A, math.sqrt(abs(B)))
        return cls(1, complex(A), cmath.sqrt(complex(B)))

    @classmethod
    def from_point(cls, p: ModuliPoint):
        return cls.from_moduli(p.A, p.B, p.sigma)

    @property
    def B(self):
        return self.sigma * self.b * self.b

    @property
    def is_real(self):
        return _is_real(self.A) and _is_real(self.b)

    def __call__(self, z):
        return self.sigma * z * z * z - 3 * self.A * z + self.b

    def deriv(self, z):
        return 3 * self.sigma * z * z - 3 * self.A

    def complex_form(self) -> "MonicForm":
        """Equivalent form with sigma=+1 (conjugating by ``z = i*u`` when sigma=-1)."""
        if self.sigma == 1:
            return self
        return MonicForm(1, self.A, -1j * self.b)

    def moduli(self) -> ModuliPoint:
        return ModuliPoint(self.A, self.B, self.sigma)


def solve_cubic(a3, a2, a1, a0):
    """All three complex roots of ``a3 x^3 + a2 x^2 + a1 x + a0``.

    Cardano on the depressed cubic followed by guarded Newton polishing.
    """
    a3, a2, a1, a0 = complex(a3), complex(a2), complex(a1), complex(a0)
    if a3 == 0:
        raise ValueError("not a cubic")
    c2, c1, c0 = a2 / a3, a1 / a3, a0 / a3
    shift = -c2 / 3
    p = c1 - c2 * c2 / 3
    q = 2 * c2 ** 3 / 27 - c2 * c1 / 3 + c0
    if p == 0 and q == 0:
        roots = [shift] * 3
    else:
        sd = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
        u3 = -q / 2 + sd
        alt = -q / 2 - sd
        if abs(alt) > abs(u3):
            u3 = alt
        u = u3 ** (1.0 / 3.0)
        if u == 0:
            # q vanished (or underflowed): t^3 + p t = 0
            r = cmath.sqrt(-p)
            roots = [shift, shift + r, shift - r]
        else:
            w = complex(-0.5, math.sqrt(3) / 2)
            roots = []
            for k in range(3):
                uk = u * w ** k
                roots.append(uk - p / (3 * uk) + shift)

    def P(x):
        return ((x + c2) * x + c1) * x + c0

    def dP(x):
        return (3 * x + 2 * c2) * x + c1

    polished = []
    for r in roots:
        fr = P(r)
        for _ in range(4):
            d = dP(r)
            if d == 0 or fr == 0:
                break
            cand = r - fr / d
            fc = P(cand)
            if abs(fc) >= abs(fr):
                break
            r, fr = cand, fc
        polished.append(r)
    return np.array(polished, dtype=complex)


def real_roots(roots, tol=IMAG_TOL):
    """Real parts of the (numerically) real entries of ``roots``, sorted."""
    out = [r.real for r in np.asarray(roots, dtype=complex)
           if abs(r.imag) <= tol * max(1.0, abs(r.real))]
    return sorted(out)


def normalize(g: GeneralCubic):
    """Affine invariants of ``g`` and its monic centred normal form.

    Returns ``(ModuliPoint, MonicForm)``.  For real ``g`` the monic form is
    the real normal form with ``b >= 0`` (the sign of ``b`` is fixed by the
    involution ``x -> -x``); for complex ``g`` it is ``z^3 - 3Az + b``.
    """
    c3, c2, c1, c0 = g.c3, g.c2, g.c1, g.c0
    zhat = g.barycenter
    A = (c2 * c2 - 3 * c1 * c3) / (9 * c3)
    q = g(zhat) - zhat
    B = q * q * c3
    if g.is_real:
        c3r = float(np.real(c3))
        sigma = _sgn(c3r)
        A = float(np.real(A))
        B = float(np.real(B))
        b = abs(float(np.real(q))) * math.sqrt(abs(c3r))
        return ModuliPoint(A, B, sigma), MonicForm(sigma, A, b)
    b = q * cmath.sqrt(complex(c3))
    if b.real < 0 or (b.real == 0 and b.imag < 0):
        b = -b
    return ModuliPoint(complex(A), complex(B), 1), MonicForm(1, complex(A), b)


def critical_points(m: MonicForm):
    """``(+a, -a)`` with ``a = sqrt(sigma*A)`` (principal branch).

    When ``sigma*A < 0`` the pair is purely imaginary and ``+a`` has positive
    imaginary part.
    """
    s = m.sigma * m.A
    if _is_real(s):
        s = float(np.real(s))
        if s >= 0:
            a = math.sqrt(s)
            return a, -a
        a = complex(0.0, math.sqrt(-s))
        return a, -a
    a = cmath.sqrt(s)
    return a, -a


def critical_point_dA(m: MonicForm, a):
    """d(a)/dA for the critical point ``a``; 0 at the double critical point."""
    if a == 0:
        return 0.0
    return m.sigma / (2 * a)


def iterate(m: MonicForm, x0, n: int):
    """Orbit ``[x0, f(x0), ..., f^n(x0)]``.

    Entries past a floating overflow are reported as ``inf``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cplx = not (_is_real(x0) and m.is_real)
    out = np.empty(n + 1, dtype=complex if cplx else float)
    x = complex(x0) if cplx else float(np.real(x0))
    out[0] = x
    overflowed = False
    for i in range(1, n + 1):
        if not overflowed:
            with np.errstate(all="ignore"):
                x = m(x)
            if not cmath.isfinite(complex(x)):
                overflowed = True
        out[i] = np.inf if overflowed else x
    return out


@dataclass(frozen=True)
class JetState:
    z: complex
    dz_dA: complex
    dz_db: complex
    n: int


def iterate_with_jet(m: MonicForm, which_critical: int, n: int,
                     blowup: float = BLOWUP_THRESHOLD) -> JetState:
    """n-th iterate of the critical point ``which_critical * a`` with its (A, b) jet.

    Raises DerivativeBlowup once either partial derivative exceeds ``blowup``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    a = critical_points(m)[0]
    sign = 1 if which_critical >= 0 else -1
    z = sign * a
    za = sign * critical_point_dA(m, a)
    zb = 0.0
    sigma, A, b = m.sigma, m.A, m.b
    for i in range(n):
        fp = 3 * sigma * z * z - 3 * A
        za = fp * za - 3 * z
        zb = fp * zb + 1
        z = sigma * z * z * z - 3 * A * z + b
        if abs(za) > blowup or abs(zb) > blowup:
            raise DerivativeBlowup(JetState(z, za, zb, i + 1), blowup)
    return JetState(z, za, zb, n)


def escape_radius(m: MonicForm) -> float:
    """Radius beyond which ``|f(x)| > 2|x|``, so orbits leaving it escape."""
    return max(2.0, math.sqrt(3 * abs(m.A) + abs(m.b) + 2))


@dataclass(frozen=True)
class EscapeVerdict:
    """Outcome of :func:`bounded`; ``escaped_at`` is None if bounded for ``nmax`` steps."""

    escaped_at: int | None
    nmax: int

    @property
    def bounded(self):
        return self.escaped_at is None


def bounded(m: MonicForm, x0, nmax: int) -> EscapeVerdict:
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    R = escape_radius(m)
    x = x0
    if abs(x) > R:
        return EscapeVerdict(0, nmax)
    for n in range(1, nmax + 1):
        x = m(x)
        if abs(x) > R:
            return EscapeVerdict(n, nmax)
    return EscapeVerdict(None, nmax)
