"""Attracting cycles, critical-orbit behaviour and centers of hyperbolic components.

Critical point naming: ``c = +a`` with ``a = sqrt(sigma*A)`` (principal
root, so ``c = +i*sqrt(-sigma*A)`` when the critical points are complex),
``c' = -a`` and ``cbar`` the complex conjugate of ``c``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .core import MonicForm, critical_point_dA, critical_points, escape_radius
from .errors import MalformedSpec, NewtonDivergence, OverdeterminedSpec

SYMBOLS = ("c", "c'", "cbar")


@dataclass(frozen=True)
class CycleInfo:
    points: tuple
    period: int
    multiplier: complex
    refined: bool = True

    @property
    def attracting(self):
        return abs(self.multiplier) < 1


def _orbit_deriv(m: MonicForm, z, p):
    """``(f^p(z), (f^p)'(z))``."""
    d = 1.0
    for _ in range(p):
        d *= m.deriv(z)
        z = m(z)
    return z, d


def cycle_from_point(m: MonicForm, z, p, refined=True) -> CycleInfo:
    pts = []
    mult = 1.0
    for _ in range(p):
        pts.append(z)
        mult *= m.deriv(z)
        z = m(z)
    return CycleInfo(tuple(pts), p, mult, refined)


def _newton_periodic(m: MonicForm, z, p, maxit=50, tol=1e-14):
    seed = z
    for _ in range(maxit):
        w, d = _orbit_deriv(m, z, p)
        g = w - z
        dg = d - 1
        if dg == 0:
            raise NewtonDivergence("zero derivative in periodic-point Newton")
        step = g / dg
        z = z - step
        if not cmath.isfinite(complex(z)) or abs(z - seed) > 1e-2:
            raise NewtonDivergence("periodic-point Newton left the neighbourhood of the seed")
        if abs(step) <= tol * max(1.0, abs(z)):
            break
    return z


def detect_cycle(m: MonicForm, x0, Nwarm=400, pmax=64, tol=1e-6, refine=True):
    """Smallest-period cycle approached by the orbit of ``x0`` (None if none up to pmax).

    The orbit is run for ``Nwarm`` steps, then the first p <= pmax with
    ``|x_{N+p} - x_N| < tol`` is refined by Newton on ``f^p(z) - z``.
    If Newton fails, the unrefined cycle is returned with ``refined=False``.
    """
    R = escape_radius(m)
    z = x0
    for _ in range(Nwarm):
        z = m(z)
        if abs(z) > R:
            return None
    w = z
    for p in range(1, pmax + 1):
        w = m(w)
        if abs(w - z) < tol:
            if not refine:
                return cycle_from_point(m, z, p, refined=False)
            try:
                zr = _newton_periodic(m, z, p)
            except NewtonDivergence:
                return cycle_from_point(m, z, p, refined=False)
            return cycle_from_point(m, zr, p)
    return None


@dataclass(frozen=True)
class Escaped:
    n: int


@dataclass(frozen=True)
class Converged:
    cycle: CycleInfo


@dataclass(frozen=True)
class Chaotic:
    """Bounded for ``nmax`` steps without approaching an attracting cycle.

    ``landed`` records a non-attracting cycle the orbit sits on, if any
    (e.g. the critical orbits of x**3 - 3x land on the repelling points +-2).
    """

    nmax: int
    landed: CycleInfo | None = None


@dataclass(frozen=True)
class BehaviorSummary:
    verdicts: tuple  # for c = +a and c' = -a
    same_cycle: bool | None
    phase: int | None  # f^phase(point reached by c) = point reached by c'

    @property
    def periods(self):
        return tuple(v.cycle.period for v in self.verdicts if isinstance(v, Converged))


def _match_phase(c1: CycleInfo, z2, tol=1e-7):
    for k, z in enumerate(c1.points):
        if abs(z - z2) < tol:
            return k
    return None


def classify_behavior(m: MonicForm, Nmax=400, pmax=64, tol=1e-6) -> BehaviorSummary:
    R = escape_radius(m)
    verdicts = []
    ends = []
    for c in critical_points(m):
        z = c
        esc = None
        for n in range(1, Nmax + 1):
            z = m(z)
            if abs(z) > R:
                esc = n
                break
        if esc is not None:
            verdicts.append(Escaped(esc))
            ends.append(None)
            continue
        cyc = detect_cycle(m, z, Nwarm=0, pmax=pmax, tol=tol)
        if cyc is None or not cyc.attracting:
            verdicts.append(Chaotic(Nmax, cyc))
            ends.append(None)
        else:
            verdicts.append(Converged(cyc))
            ends.append(z)
    same = phase = None
    if all(isinstance(v, Converged) for v in verdicts):
        c1, c2 = verdicts[0].cycle, verdicts[1].cycle
        same = False
        if c1.period == c2.period:
            k = _match_phase(c1, c2.points[0])
            if k is not None:
                same = True
                # c1.points[0] and c2.points[0] are the refined images of the two orbits at time Nmax
                phase = k
    return BehaviorSummary(tuple(verdicts), same, phase)


@dataclass(frozen=True)
class Relation:
    src: str
    n: int
    tgt: str

    def __post_init__(self):
        if self.src not in SYMBOLS or self.tgt not in SYMBOLS:
            raise MalformedSpec(f"unknown critical symbol in {self}")
        if self.n < 1:
            raise MalformedSpec("iterate count must be >= 1")

    def conjugate(self):
        swap = {"c": "cbar", "cbar": "c", "c'": "c'"}
        return Relation(swap[self.src], self.n, swap[self.tgt])

    def __str__(self):
        arrow = "->" if self.n == 1 else f"->{self.n}"
        return f"{self.src} {arrow} {self.tgt}"


_REL = re.compile(r"^\s*(c'|cbar|c)\s*->\s*(\d*)\s*(c'|cbar|c)\s*$")


@dataclass(frozen=True)
class ItinerarySpec:
    """Relations ``src ->n tgt``; ``double`` marks the coincident-critical-point case (A = 0)."""

    relations: tuple
    double: bool = False

    @classmethod
    def parse(cls, text):
        """Parse e.g. ``"c ->2 c', c' ->2 c"`` or ``"c=c' ->2 c"``."""
        text = text.strip()
        double = False
        if text.startswith("c=c'"):
            double = True
            text = "c" + text[4:]
        rels = []
        for chunk in text.split(","):
            # chains such as "c -> c' ->2 c"
            parts = re.split(r"(->\s*\d*)", chunk)
            if len(parts) < 3:
                raise MalformedSpec(f"cannot parse relation {chunk!r}")
            syms = [p.strip() for p in parts[0::2]]
            arrows = [p for p in parts[1::2]]
            for s1, arr, s2 in zip(syms, arrows, syms[1:]):
                mm = _REL.match(f"{s1} {arr} {s2}")
                if not mm:
                    raise MalformedSpec(f"cannot parse relation {chunk!r}")
                rels.append(Relation(mm.group(1), int(mm.group(2) or 1), mm.group(3)))
        if not rels:
            raise MalformedSpec("empty spec")
        return cls(tuple(rels), double)

    def __str__(self):
        body = ", ".join(str(r) for r in self.relations)
        return ("c=c' : " + body) if self.double else body

    def uses_conjugate(self):
        return any("cbar" in (r.src, r.tgt) for r in self.relations)


@dataclass(frozen=True)
class CenterRecord:
    tag: str
    A: float
    B: float
    spec: ItinerarySpec
    entropy: float | None = None
    exact: str | None = None

    @property
    def sigma(self):
        return -1 if self.B < 0 else 1

    @property
    def sign(self):
        p = self.A * self.B
        return "+" if p > 0 else ("-" if p < 0 else "")


def _rec(tag, A, B, spec, entropy=None, exact=None):
    return CenterRecord(tag, A, B, ItinerarySpec.parse(spec), entropy, exact)


GOLDEN = (1 + math.sqrt(5)) / 2


def builtin_center_table():
    """Centers of twenty hyperbolic components of the real cubic family.

    Upper half-plane by increasing A, then B = 0, then the lower half-plane.
    """
    r2 = math.sqrt(2) / 2
    return [
        _rec("D-3,3", -0.55881, 0.08656, "c ->3 c, cbar ->3 cbar"),
        _rec("C+(2)2", 0.47567, 0.33217, "c ->2 c' ->2 c'", 0.0),
        _rec("C+(3)2", 0.49408, 0.45878, "c ->3 c' ->2 c'", 0.0),
        _rec("B+1+3", 0.62827, 0.04135, "c -> c' ->3 c", 0.0),
        _rec("B+1+2", 0.71327, 0.12977, "c -> c' ->2 c", math.log(GOLDEN)),
        _rec("D2,2", -r2, 0.0, "c ->2 c, c' ->2 c'", 0.0, "(-sqrt(2)/2, 0)"),
        _rec("D1,1", -0.5, 0.0, "c -> c, c' -> c'", 0.0, "(-1/2, 0)"),
        _rec("A1", 0.0, 0.0, "c=c' -> c", 0.0, "(0, 0)"),
        _rec("B1+1", 0.5, 0.0, "c -> c' -> c", 0.0, "(1/2, 0)"),
        _rec("D2,2", r2, 0.0, "c ->2 c, c' ->2 c'", 0.0, "(sqrt(2)/2, 0)"),
        _rec("C+(2)1", -0.75, -0.1875, "c ->2 c' -> c'", math.log(2), "(-3/4, -3/16)"),
        _rec("D+1,2", -0.61688, -0.03371, "c -> c, c' ->2 c'", 0.0),
        _rec("B+2+2", -0.55310, -0.62882, "c ->2 c' ->2 c", math.log(1.83929)),
        _rec("C+(2)2", -0.39736, -0.31371, "c ->2 c' ->2 c'", 0.0),
        _rec("B+1+2", -0.36464, -1.09040, "c -> c' ->2 c", math.log(GOLDEN)),
        _rec("C+(1)2", -0.25, -0.5625, "c -> c' ->2 c'", 0.0, "(-1/4, -9/16)"),
        _rec("B+2+2", -0.13414, -1.37344, "c ->2 c' ->2 c", 0.0),
        _rec("A2", 0.0, -1.0, "c=c' ->2 c", 0.0, "(0, -1)"),
        _rec("D-2,2", 0.25, -0.4375, "c ->2 c, cbar ->2 cbar", None, "(1/4, -7/16)"),
        _rec("B-3+3", 0.27286, -0.93044, "c ->3 cbar ->3 c"),
    ]


def _crit_values(m: MonicForm, swap=False):
    a = critical_points(m)[0]
    da = critical_point_dA(m, a)
    if swap:
        a, da = -a, -da
    return {"c": (a, da), "c'": (-a, -da),
            "cbar": (complex(a).conjugate(), complex(da).conjugate())}


def _jet_orbit(m: MonicForm, z, dzA, n):
    """f^n(z) and its derivatives in A and b, for a start point z(A)."""
    dzb = 0.0
    sigma, A, b = m.sigma, m.A, m.b
    for _ in range(n):
        fp = 3 * sigma * z * z - 3 * A
        dzA = fp * dzA - 3 * z
        dzb = fp * dzb + 1
        z = sigma * z * z * z - 3 * A * z + b
    return z, dzA, dzb


def _complex_crit(m: MonicForm):
    return m.sigma * m.A < 0


def relation_residuals(m: MonicForm, spec: ItinerarySpec, swap=False):
    """Complex residuals ``f^n(src) - tgt`` for each relation (plus A for double specs)."""
    cv = _crit_values(m, swap)
    out = []
    if spec.double:
        out.append(complex(m.A))
    for r in spec.relations:
        z, _, _ = _jet_orbit(m, cv[r.src][0], 0.0, r.n)
        out.append(complex(z - cv[r.tgt][0]))
    return out


def _equations(spec: ItinerarySpec, complex_crit: bool):
    """Independent relations, conjugate duplicates removed when c' = cbar."""
    rels = []
    seen = set()
    for r in spec.relations:
        if complex_crit:
            # with complex critical points c' is cbar
            r = Relation(r.src.replace("c'", "cbar"), r.n, r.tgt.replace("c'", "cbar"))
            key = min((r.src, r.n, r.tgt), (r.conjugate().src, r.n, r.conjugate().tgt))
        else:
            key = (r.src, r.n, r.tgt)
        if key in seen:
            continue
        seen.add(key)
        rels.append(r)
    return rels


def _system(A, b, sigma, spec, swap, complex_crit):
    """Real residual vector and Jacobian in (A, b)."""
    m = MonicForm(sigma, A, b)
    F, J = [], []
    if spec.double:
        F.append(A)
        J.append((1.0, 0.0))
    cv = _crit_values(m, swap)
    for r in _equations(spec, complex_crit):
        z0, d0 = cv[r.src]
        z, zA, zb = _jet_orbit(m, z0, d0, r.n)
        t, tA = cv[r.tgt]
        res = complex(z - t)
        gA = complex(zA - tA)
        gb = complex(zb)
        if complex_crit:
            F.extend((res.real, res.imag))
            J.extend(((gA.real, gb.real), (gA.imag, gb.imag)))
        else:
            F.append(res.real)
            J.append((gA.real, gb.real))
    return np.array(F, dtype=float), np.array(J, dtype=float)


@dataclass(frozen=True)
class RefinedCenter:
    A: float
    B: float
    b: float
    sigma: int
    residual: float
    iterations: int
    swapped: bool


def refine_center(spec: ItinerarySpec, seed, sigma=None, tol=1e-12, maxit=100) -> RefinedCenter:
    """Newton in (A, b) on the relations of ``spec`` from ``seed = (A, B)``.

    Complex relations contribute real and imaginary parts; with complex
    critical points conjugate relations are merged.  Step damping halves the
    step up to 40 times.  Converges when the residual is below ``tol`` or
    the step below 1e-14.
    """
    A0, B0 = seed
    if sigma is None:
        sigma = -1 if B0 < 0 else 1
    if spec.double:
        A0 = 0.0  # the constraint A = 0 is linear; start on it
    b0 = math.sqrt(abs(B0))
    complex_crit = sigma * A0 < 0
    n_eq = len(_system(A0, b0, sigma, spec, False, complex_crit)[0])
    if n_eq > 2:
        raise OverdeterminedSpec(f"{n_eq} real equations for 2 unknowns in {spec}")
    if n_eq < 2:
        raise MalformedSpec(f"only {n_eq} real equation(s) for 2 unknowns in {spec}")

    # c = +a by convention, but the spec may name the critical points the other way round
    starts = []
    for swap in (False, True):
        F, _ = _system(A0, b0, sigma, spec, swap, complex_crit)
        starts.append((float(np.linalg.norm(F)), swap))
    _, swap = min(starts)

    x = np.array([A0, b0], dtype=float)
    F, J = _system(x[0], x[1], sigma, spec, swap, complex_crit)
    norm = float(np.linalg.norm(F))
    it = 0
    for it in range(1, maxit + 1):
        if norm < tol:
            break
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as e:
            raise NewtonDivergence(f"singular Jacobian for {spec}") from e
        if spec.double:
            step[0] = -x[0]  # keep A exactly 0; roundoff would make da/dA blow up
        lam = 1.0
        for _ in range(41):
            xn = x + lam * step
            if sigma * xn[0] < 0 and not complex_crit or sigma * xn[0] > 0 and complex_crit:
                lam /= 2  # do not cross A = 0, where the critical points change type
                continue
            Fn, Jn = _system(xn[0], xn[1], sigma, spec, swap, complex_crit)
            nn = float(np.linalg.norm(Fn))
            if np.isfinite(nn) and nn < norm:
                break
            lam /= 2
        else:
            raise NewtonDivergence(f"line search failed for {spec} at {x}")
        x, F, J, norm = xn, Fn, Jn, nn
        if np.linalg.norm(lam * step) < 1e-14:
            break
    if norm > max(tol, 1e-10):
        raise NewtonDivergence(f"no convergence for {spec}: residual {norm:.3g}")
    if np.linalg.cond(J) > 1e12:
        raise NewtonDivergence(f"singular Jacobian at the solution for {spec}")
    A, b = float(x[0]), float(x[1])
    return RefinedCenter(A, sigma * b * b, abs(b), sigma, norm, it, swap)


@dataclass(frozen=True)
class VerifyReport:
    record: CenterRecord
    residuals: tuple
    passed: bool
    swapped: bool
    tol: float

    def to_json(self):
        r = self.record
        return {"type": r.tag, "A": r.A, "B": r.B, "spec": str(r.spec),
                "residuals": [abs(x) for x in self.residuals], "passed": self.passed,
                "swapped": self.swapped}


def verify_center(rec: CenterRecord, tol=2e-3) -> VerifyReport:
    """Residuals of the record's relations at its printed (A, B); tries both namings of c, c'."""
    m = MonicForm.from_moduli(rec.A, rec.B, rec.sigma)
    best = None
    for swap in (False, True):
        res = relation_residuals(m, rec.spec, swap)
        worst = max(abs(x) for x in res)
        if best is None or worst < best[0]:
            best = (worst, res, swap)
    worst, res, swap = best
    return VerifyReport(rec, tuple(res), worst < tol, swap, tol)


def critical_cycle_multipliers(m: MonicForm, Nwarm=200, pmax=64):
    """Multiplier of the cycle each critical orbit falls into (None if it escapes or wanders)."""
    out = []
    for c in critical_points(m):
        cyc = detect_cycle(m, c, Nwarm=Nwarm, pmax=pmax, tol=1e-9)
        out.append(None if cyc is None else cyc.multiplier)
    return out


@dataclass
class CenterReport:
    record: CenterRecord
    verify: VerifyReport
    refined: RefinedCenter | None = None
    entropy_computed: float | None = None
    error: str | None = None
    multipliers: list = field(default_factory=list)

    def to_json(self):
        r = self.record
        out = {"type": r.tag, "A": r.A, "B": r.B, "spec": str(r.spec),
               "residuals": [abs(x) for x in self.verify.residuals],
               "passed": self.verify.passed}
        if self.refined is not None:
            out["refined"] = {"A": self.refined.A, "B": self.refined.B,
                              "residual": self.refined.residual}
            out["multipliers"] = [None if x is None else abs(x) for x in self.multipliers]
        if self.error:
            out["error"] = self.error
        out["entropy"] = {"expected": r.entropy, "computed": self.entropy_computed}
        return out
