"""Per-pixel critical-orbit classification (numba and numpy versions).

Every family is a map on one or two copies of C given by ``_step``.  Its
two marked orbits (the critical orbits, or the critical points 0 of the two
copies) are iterated together with their derivatives in the two plane
coordinates (u, v).  Escaping orbits get an exterior distance estimate
``|z| log|z| / |dz|`` with |dz| the operator norm of the real 2x2 Jacobian
d(Re z, Im z)/d(u, v).  Bounded orbits are checked for approximate
periodicity and the cycle is Newton-refined.
"""
import math

import numpy as np

from ._accel import njit, prange

CUBIC_AB, CUBIC_AB_PLUS, CUBIC_AB_MINUS = 0, 1, 2
BIQUADRATIC, ARCH, PRODUCT, TRICORN, MANDELBROT, CIRCLE = 3, 4, 5, 6, 7, 8

# pixel classes
BOTH_ESCAPE, ONE_ESCAPES, CONVERGE_SAME, CONVERGE_DISTINCT = 1, 2, 3, 4
CHAOTIC_ONE, CHAOTIC_BOTH, BOUNDARY, STRUCTURE_CHANGE = 5, 6, 7, 8

# orbit outcomes
ESCAPED, WANDERING, CONVERGED = 0, 1, 2

BLOWUP = 1e14
JET_SMALL = 1e6
SAME_CYCLE_TOL = 1e-7
SMALL_B = 1e-8
TWO_PI = 2 * math.pi


@njit
def _setup(fam, x, y):
    """(sigma, p1, p2, escape radius) for a plane point."""
    if fam == CUBIC_AB:
        sigma = -1.0 if y < 0 else 1.0
        b = math.sqrt(abs(y))
        return sigma, x, b, max(2.0, math.sqrt(3 * abs(x) + b + 2))
    if fam == CUBIC_AB_PLUS or fam == CUBIC_AB_MINUS:
        sigma = 1.0 if fam == CUBIC_AB_PLUS else -1.0
        return sigma, x, y, max(2.0, math.sqrt(3 * abs(x) + abs(y) + 2))
    if fam == TRICORN:
        return 1.0, x, y, max(4.0, 1.0 + math.hypot(x, y))
    if fam == MANDELBROT:
        return 1.0, x, y, max(2.0, math.hypot(x, y))
    if fam == CIRCLE:
        return 1.0, x, y, np.inf
    return 1.0, x, y, max(4.0, 1.0 + max(abs(x), abs(y)))


@njit
def _start(fam, which, sigma, p1, p2):
    """(copy, z, dz/du, dz/dv) of marked point ``which`` (0 or 1)."""
    zero = complex(0.0, 0.0)
    if fam <= CUBIC_AB_MINUS:
        sA = sigma * p1
        if sA >= 0:
            a = complex(math.sqrt(sA), 0.0)
        else:
            a = complex(0.0, math.sqrt(-sA))
        da = zero if sA == 0 else sigma / (2 * a)
        if which == 0:
            return 0, a, da, zero
        return 0, -a, -da, zero
    if fam == CIRCLE:
        k = p2
        if abs(TWO_PI * k) > 1:
            t = math.acos(-1.0 / (TWO_PI * k)) / TWO_PI
            if which == 1:
                t = 1.0 - t
            return 0, complex(t, 0.0), zero, zero
        return 0, complex(0.25, 0.0), zero, zero
    if fam == MANDELBROT:
        return 0, zero, zero, zero
    return which, zero, zero, zero


@njit
def _step(fam, sign, copy, z, zu, zv, sigma, p1, p2):
    if fam <= CUBIC_AB_MINUS:
        fp = 3 * sigma * z * z - 3 * p1
        return copy, sigma * z * z * z - 3 * p1 * z + p2, fp * zu - 3 * z, fp * zv + 1
    if fam == BIQUADRATIC:
        if copy == 0:
            return 1, z * z + p1, 2 * z * zu + 1, 2 * z * zv
        return 0, z * z + p2, 2 * z * zu, 2 * z * zv + 1
    if fam == PRODUCT:
        if copy == 0:
            return 0, z * z + p1, 2 * z * zu + 1, 2 * z * zv
        return 1, z * z + p2, 2 * z * zu, 2 * z * zv + 1
    if fam == ARCH:
        if copy == 0:
            return 1, sign * z * z + p2, 2 * sign * z * zu, 2 * sign * z * zv + 1
        return 1, z * z + p1, 2 * z * zu + 1, 2 * z * zv
    if fam == TRICORN:
        if copy == 0:
            return 1, z * z + complex(p1, p2), 2 * z * zu + 1, 2 * z * zv + 1j
        return 0, z * z + complex(p1, -p2), 2 * z * zu + 1, 2 * z * zv - 1j
    if fam == MANDELBROT:
        return 0, z * z + complex(p1, p2), 2 * z * zu + 1, 2 * z * zv + 1j
    # circle map, angle kept in [0, 1)
    t = z.real
    d = 1 + TWO_PI * p2 * math.cos(TWO_PI * t)
    s = math.sin(TWO_PI * t)
    t = t + p1 + p2 * s
    t -= math.floor(t)
    return copy, complex(t, 0.0), d * zu + 1, d * zv + s


@njit
def _fstep(fam, sign, copy, z, sigma, p1, p2):
    """(copy, f(z), f'(z)) without parameter jets."""
    if fam <= CUBIC_AB_MINUS:
        return copy, sigma * z * z * z - 3 * p1 * z + p2, 3 * sigma * z * z - 3 * p1
    if fam == CIRCLE:
        t = z.real
        d = 1 + TWO_PI * p2 * math.cos(TWO_PI * t)
        t = t + p1 + p2 * math.sin(TWO_PI * t)
        t -= math.floor(t)
        return copy, complex(t, 0.0), complex(d, 0.0)
    if fam == BIQUADRATIC:
        if copy == 0:
            return 1, z * z + p1, 2 * z
        return 0, z * z + p2, 2 * z
    if fam == PRODUCT:
        return copy, z * z + (p1 if copy == 0 else p2), 2 * z
    if fam == ARCH:
        if copy == 0:
            return 1, sign * z * z + p2, 2 * sign * z
        return 1, z * z + p1, 2 * z
    if fam == TRICORN:
        if copy == 0:
            return 1, z * z + complex(p1, p2), 2 * z
        return 0, z * z + complex(p1, -p2), 2 * z
    return 0, z * z + complex(p1, p2), 2 * z


@njit
def _diff(fam, a, b):
    if fam == CIRCLE:
        d = a.real - b.real
        d -= math.floor(d + 0.5)
        return complex(d, 0.0)
    return a - b


@njit
def _opnorm(zu, zv):
    """Largest singular value of [[Re zu, Re zv], [Im zu, Im zv]]."""
    t = zu.real * zu.real + zu.imag * zu.imag + zv.real * zv.real + zv.imag * zv.imag
    det = zu.real * zv.imag - zv.real * zu.imag
    return math.sqrt(0.5 * (t + math.sqrt(max(t * t - 4 * det * det, 0.0))))


@njit
def _orbit(fam, sign, which, sigma, p1, p2, resc, nmax, pmax, tol):
    """(outcome, distance, period, copy, cycle point, final jet size) of one marked orbit."""
    bail = max(1e3, 4 * resc)
    copy, z, zu, zv = _start(fam, which, sigma, p1, p2)
    jet = 0.0
    escaped = False
    for _ in range(nmax):
        copy, z, zu, zv = _step(fam, sign, copy, z, zu, zv, sigma, p1, p2)
        az = abs(z)
        if az > bail:
            escaped = True
            break
        jet = max(abs(zu), abs(zv))
        if az <= resc and jet > BLOWUP:
            return WANDERING, np.inf, 0, copy, z, jet
    if escaped or abs(z) > resc:
        if fam == CUBIC_AB:
            if p2 < SMALL_B:
                return ESCAPED, 0.0, 0, copy, z, jet
            zv = zv / (2 * sigma * p2)
        g = _opnorm(zu, zv)
        az = abs(z)
        d = np.inf if g == 0 else az * math.log(az) / g
        return ESCAPED, d, 0, copy, z, jet
    # approximate periodicity
    z0 = z
    c0 = copy
    cc, w = copy, z
    p = 0
    for q in range(1, pmax + 1):
        cc, w, _ = _fstep(fam, sign, cc, w, sigma, p1, p2)
        if cc == c0 and abs(_diff(fam, w, z0)) < tol:
            p = q
            break
    if p == 0:
        return WANDERING, np.inf, 0, copy, z, jet
    zr = z0
    for _ in range(30):
        cc, w, dd = c0, zr, complex(1.0, 0.0)
        for _ in range(p):
            cc, w, dz = _fstep(fam, sign, cc, w, sigma, p1, p2)
            dd = dd * dz
        if dd == 1:
            break
        step = _diff(fam, w, zr) / (dd - 1)
        zr = zr - step
        if abs(zr - z0) > 1e-3:
            zr = z0
            break
        if abs(step) <= 1e-14 * max(1.0, abs(zr)):
            break
    if fam == CIRCLE:
        zr = complex(zr.real - math.floor(zr.real), 0.0)
    cc, w, mult = c0, zr, complex(1.0, 0.0)
    for _ in range(p):
        cc, w, dz = _fstep(fam, sign, cc, w, sigma, p1, p2)
        mult = mult * dz
    if abs(mult) >= 1:
        return WANDERING, np.inf, p, c0, zr, jet
    return CONVERGED, np.inf, p, c0, zr, jet


@njit
def _same_cycle(fam, sign, p, c1, z1, c2, z2, sigma, p1, p2):
    cc, w = c1, z1
    for _ in range(p):
        if cc == c2 and abs(_diff(fam, w, z2)) < SAME_CYCLE_TOL:
            return True
        cc, w, _ = _fstep(fam, sign, cc, w, sigma, p1, p2)
    return False


@njit
def classify_point(fam, sign, x, y, nmax, pmax, tol, px):
    """(class, smaller period, larger period) of one plane point."""
    sigma, p1, p2, resc = _setup(fam, x, y)
    s1, d1, q1, c1, z1, j1 = _orbit(fam, sign, 0, sigma, p1, p2, resc, nmax, pmax, tol)
    if fam == MANDELBROT:
        s2, d2, q2, c2, z2, j2 = s1, d1, q1, c1, z1, j1
    else:
        s2, d2, q2, c2, z2, j2 = _orbit(fam, sign, 1, sigma, p1, p2, resc, nmax, pmax, tol)
    lo, hi = min(q1, q2), max(q1, q2)
    if s1 == ESCAPED or s2 == ESCAPED:
        if (s1 == ESCAPED and d1 < px) or (s2 == ESCAPED and d2 < px):
            return BOUNDARY, 0, 0
        if s1 == ESCAPED and s2 == ESCAPED:
            return BOTH_ESCAPE, 0, 0
        return ONE_ESCAPES, 0, 0
    if (s1 == CONVERGED and j1 > JET_SMALL) or (s2 == CONVERGED and j2 > JET_SMALL):
        # bounded and periodic-looking, but parameter derivatives are large
        return BOUNDARY, 0, 0
    if s1 == CONVERGED and s2 == CONVERGED:
        if q1 == q2 and _same_cycle(fam, sign, q1, c1, z1, c2, z2, sigma, p1, p2):
            return CONVERGE_SAME, lo, hi
        return CONVERGE_DISTINCT, lo, hi
    if s1 == CONVERGED or s2 == CONVERGED:
        return CHAOTIC_ONE, 0, 0
    return CHAOTIC_BOTH, 0, 0


@njit(parallel=True)
def _classify_grid_nb(fam, sign, xs, ys, nmax, pmax, tol, px, cls, plo, phi):
    ny = ys.shape[0]
    nx = xs.shape[0]
    for idx in prange(nx * ny):
        j = idx // nx
        i = idx - j * nx
        c, a, b = classify_point(fam, sign, xs[i], ys[j], nmax, pmax, tol, px)
        cls[j, i] = c
        plo[j, i] = a
        phi[j, i] = b


@njit
def structure_pass(cls, plo, phi):
    """Mark converging pixels whose (periods, same-cycle) signature differs from the left or upper neighbour."""
    ny, nx = cls.shape
    out = cls.copy()
    for j in range(ny):
        for i in range(nx):
            c = cls[j, i]
            if c != CONVERGE_SAME and c != CONVERGE_DISTINCT:
                continue
            for dj, di in ((0, -1), (-1, 0)):
                jj, ii = j + dj, i + di
                if jj < 0 or ii < 0:
                    continue
                n = cls[jj, ii]
                if n != CONVERGE_SAME and n != CONVERGE_DISTINCT:
                    continue
                if n != c or plo[jj, ii] != plo[j, i] or phi[jj, ii] != phi[j, i]:
                    out[j, i] = STRUCTURE_CHANGE
                    break
    return out


# ---------------------------------------------------------------------------
# numpy twin: the same arithmetic, vectorised over pixels

def _setup_np(fam, x, y):
    if fam == CUBIC_AB:
        sigma = np.where(y < 0, -1.0, 1.0)
        b = np.sqrt(np.abs(y))
        return sigma, x, b, np.maximum(2.0, np.sqrt(3 * np.abs(x) + b + 2))
    if fam in (CUBIC_AB_PLUS, CUBIC_AB_MINUS):
        sigma = np.full(x.shape, 1.0 if fam == CUBIC_AB_PLUS else -1.0)
        return sigma, x, y, np.maximum(2.0, np.sqrt(3 * np.abs(x) + np.abs(y) + 2))
    one = np.ones(x.shape)
    if fam == TRICORN:
        return one, x, y, np.maximum(4.0, 1.0 + np.hypot(x, y))
    if fam == MANDELBROT:
        return one, x, y, np.maximum(2.0, np.hypot(x, y))
    if fam == CIRCLE:
        return one, x, y, np.full(x.shape, np.inf)
    return one, x, y, np.maximum(4.0, 1.0 + np.maximum(np.abs(x), np.abs(y)))


def _start_np(fam, which, sigma, p1, p2):
    n = p1.shape
    zero = np.zeros(n, dtype=complex)
    copy = np.zeros(n, dtype=np.int64)
    if fam <= CUBIC_AB_MINUS:
        sA = sigma * p1
        r = np.sqrt(np.abs(sA))
        a = np.where(sA >= 0, r + 0j, 1j * r)
        with np.errstate(divide="ignore", invalid="ignore"):
            da = np.where(sA == 0, 0j, sigma / (2 * a))
        if which == 0:
            return copy, a, da, zero.copy()
        return copy, -a, -da, zero.copy()
    if fam == CIRCLE:
        k = p2
        crit = np.abs(TWO_PI * k) > 1
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.arccos(np.clip(-1.0 / (TWO_PI * k), -1, 1)) / TWO_PI
        if which == 1:
            t = 1.0 - t
        t = np.where(crit, t, 0.25)
        return copy, t + 0j, zero.copy(), zero.copy()
    if fam == MANDELBROT:
        return copy, zero.copy(), zero.copy(), zero.copy()
    return copy + which, zero.copy(), zero.copy(), zero.copy()


def _step_np(fam, sign, copy, z, zu, zv, sigma, p1, p2):
    if fam <= CUBIC_AB_MINUS:
        fp = 3 * sigma * z * z - 3 * p1
        return copy, sigma * z * z * z - 3 * p1 * z + p2, fp * zu - 3 * z, fp * zv + 1
    if fam == CIRCLE:
        t = z.real
        d = 1 + TWO_PI * p2 * np.cos(TWO_PI * t)
        s = np.sin(TWO_PI * t)
        t = t + p1 + p2 * s
        t = t - np.floor(t)
        return copy, t + 0j, d * zu + 1, d * zv + s
    first = copy == 0
    if fam == BIQUADRATIC:
        c = np.where(first, p1, p2)
        return 1 - copy, z * z + c, 2 * z * zu + first, 2 * z * zv + (~first)
    if fam == PRODUCT:
        c = np.where(first, p1, p2)
        return copy, z * z + c, 2 * z * zu + first, 2 * z * zv + (~first)
    if fam == ARCH:
        nz = np.where(first, sign * z * z + p2, z * z + p1)
        nu = np.where(first, 2 * sign * z * zu, 2 * z * zu + 1)
        nv = np.where(first, 2 * sign * z * zv + 1, 2 * z * zv)
        return np.ones_like(copy), nz, nu, nv
    if fam == TRICORN:
        c = np.where(first, p1 + 1j * p2, p1 - 1j * p2)
        return 1 - copy, z * z + c, 2 * z * zu + 1, 2 * z * zv + np.where(first, 1j, -1j)
    return copy, z * z + (p1 + 1j * p2), 2 * z * zu + 1, 2 * z * zv + 1j


def _fstep_np(fam, sign, copy, z, sigma, p1, p2):
    if fam <= CUBIC_AB_MINUS:
        return copy, sigma * z * z * z - 3 * p1 * z + p2, 3 * sigma * z * z - 3 * p1
    if fam == CIRCLE:
        t = z.real
        d = 1 + TWO_PI * p2 * np.cos(TWO_PI * t)
        t = t + p1 + p2 * np.sin(TWO_PI * t)
        return copy, (t - np.floor(t)) + 0j, d + 0j
    first = copy == 0
    if fam == BIQUADRATIC:
        return 1 - copy, z * z + np.where(first, p1, p2), 2 * z
    if fam == PRODUCT:
        return copy, z * z + np.where(first, p1, p2), 2 * z
    if fam == ARCH:
        return (np.ones_like(copy), np.where(first, sign * z * z + p2, z * z + p1),
                np.where(first, 2 * sign * z, 2 * z))
    if fam == TRICORN:
        return 1 - copy, z * z + np.where(first, p1 + 1j * p2, p1 - 1j * p2), 2 * z
    return copy, z * z + (p1 + 1j * p2), 2 * z


def _diff_np(fam, a, b):
    if fam == CIRCLE:
        d = a.real - b.real
        return (d - np.floor(d + 0.5)) + 0j
    return a - b


def _opnorm_np(zu, zv):
    t = zu.real ** 2 + zu.imag ** 2 + zv.real ** 2 + zv.imag ** 2
    det = zu.real * zv.imag - zv.real * zu.imag
    return np.sqrt(0.5 * (t + np.sqrt(np.maximum(t * t - 4 * det * det, 0.0))))


def _orbit_np(fam, sign, which, sigma, p1, p2, resc, nmax, pmax, tol):
    n = p1.shape
    bail = np.maximum(1e3, 4 * resc)
    copy, z, zu, zv = _start_np(fam, which, sigma, p1, p2)
    jet = np.zeros(n)
    state = np.full(n, -1, dtype=np.int64)  # -1 running
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(nmax):
            run = state < 0
            if not run.any():
                break
            c2, z2, u2, v2 = _step_np(fam, sign, copy, z, zu, zv, sigma, p1, p2)
            copy = np.where(run, c2, copy)
            z = np.where(run, z2, z)
            zu = np.where(run, u2, zu)
            zv = np.where(run, v2, zv)
            az = np.abs(z)
            esc = run & (az > bail)
            state[esc] = ESCAPED
            run &= ~esc
            jet = np.where(run, np.maximum(np.abs(zu), np.abs(zv)), jet)
            blow = run & (az <= resc) & (jet > BLOWUP)
            state[blow] = WANDERING
    run = state < 0
    esc = (state == ESCAPED) | (run & (np.abs(z) > resc))
    state[esc] = ESCAPED
    dist = np.full(n, np.inf)
    if esc.any():
        u, v = zu[esc], zv[esc]
        if fam == CUBIC_AB:
            small = p2[esc] < SMALL_B
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(small, v, v / (2 * sigma[esc] * p2[esc]))
        g = _opnorm_np(u, v)
        az = np.abs(z[esc])
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(g == 0, np.inf, az * np.log(az) / g)
        if fam == CUBIC_AB:
            d = np.where(small, 0.0, d)
        dist[esc] = d
    period = np.zeros(n, dtype=np.int64)
    zr = z.copy()
    cand = state < 0
    idx = np.nonzero(cand)[0]
    if idx.size:
        s, a1, a2 = sigma[idx], p1[idx], p2[idx]
        c0, z0 = copy[idx], z[idx]
        cc, w = c0.copy(), z0.copy()
        p = np.zeros(idx.size, dtype=np.int64)
        with np.errstate(over="ignore", invalid="ignore"):
            for q in range(1, pmax + 1):
                cc, w, _ = _fstep_np(fam, sign, cc, w, s, a1, a2)
                hit = (p == 0) & (cc == c0) & (np.abs(_diff_np(fam, w, z0)) < tol)
                p[hit] = q
        ok = p > 0
        zz = z0.copy()
        done = ~ok
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for _ in range(30):
                if done.all():
                    break
                cc, w, dd = c0.copy(), zz.copy(), np.ones(idx.size, dtype=complex)
                for q in range(1, pmax + 1):
                    act = q <= p
                    c2, w2, dz = _fstep_np(fam, sign, cc, w, s, a1, a2)
                    cc = np.where(act, c2, cc)
                    w = np.where(act, w2, w)
                    dd = np.where(act, dd * dz, dd)
                    if not (q < p).any():
                        break
                stop = done | (dd == 1)
                done |= stop
                step = np.where(done, 0j, _diff_np(fam, w, zz) / np.where(dd == 1, 2.0, dd - 1))
                nz = zz - step
                away = ~done & (np.abs(nz - z0) > 1e-3)
                zz = np.where(done, zz, np.where(away, z0, nz))
                done |= away | (np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(nz)))
            if fam == CIRCLE:
                zz = (zz.real - np.floor(zz.real)) + 0j
            cc, w, mult = c0.copy(), zz.copy(), np.ones(idx.size, dtype=complex)
            for q in range(1, pmax + 1):
                act = q <= p
                c2, w2, dz = _fstep_np(fam, sign, cc, w, s, a1, a2)
                cc = np.where(act, c2, cc)
                w = np.where(act, w2, w)
                mult = np.where(act, mult * dz, mult)
        conv = ok & (np.abs(mult) < 1)
        st = np.where(conv, CONVERGED, WANDERING)
        state[idx] = st
        period[idx] = np.where(ok, p, 0)
        zr[idx] = np.where(ok, zz, z0)
    return state, dist, period, copy, zr, jet


def _classify_grid_np(fam, sign, xs, ys, nmax, pmax, tol, px, cls, plo, phi):
    X, Y = np.meshgrid(xs, ys)
    x, y = X.ravel(), Y.ravel()
    sigma, p1, p2, resc = _setup_np(fam, x, y)
    s1, d1, q1, c1, z1, j1 = _orbit_np(fam, sign, 0, sigma, p1, p2, resc, nmax, pmax, tol)
    if fam == MANDELBROT:
        s2, d2, q2, c2, z2, j2 = s1, d1, q1, c1, z1, j1
    else:
        s2, d2, q2, c2, z2, j2 = _orbit_np(fam, sign, 1, sigma, p1, p2, resc, nmax, pmax, tol)
    out = np.full(x.shape, CHAOTIC_BOTH, dtype=np.int64)
    e1, e2 = s1 == ESCAPED, s2 == ESCAPED
    v1, v2 = s1 == CONVERGED, s2 == CONVERGED
    out[v1 ^ v2] = CHAOTIC_ONE
    both = v1 & v2
    same = np.zeros(x.shape, dtype=bool)
    cand = np.nonzero(both & (q1 == q2))[0]
    if cand.size:
        cc, w = c1[cand].copy(), z1[cand].copy()
        s, a1, a2 = sigma[cand], p1[cand], p2[cand]
        hit = np.zeros(cand.size, dtype=bool)
        for q in range(int(q1[cand].max())):
            act = q < q1[cand]
            hit |= act & (cc == c2[cand]) & (np.abs(_diff_np(fam, w, z2[cand])) < SAME_CYCLE_TOL)
            cc2, w2, _ = _fstep_np(fam, sign, cc, w, s, a1, a2)
            cc = np.where(act, cc2, cc)
            w = np.where(act, w2, w)
        same[cand] = hit
    out[both] = np.where(same[both], CONVERGE_SAME, CONVERGE_DISTINCT)
    bigjet = (v1 & (j1 > JET_SMALL)) | (v2 & (j2 > JET_SMALL))
    out[bigjet] = BOUNDARY
    anyesc = e1 | e2
    out[anyesc] = np.where(e1 & e2, BOTH_ESCAPE, ONE_ESCAPES)[anyesc]
    out[(e1 & (d1 < px)) | (e2 & (d2 < px))] = BOUNDARY
    conv = (out == CONVERGE_SAME) | (out == CONVERGE_DISTINCT)
    lo = np.where(conv, np.minimum(q1, q2), 0)
    hi = np.where(conv, np.maximum(q1, q2), 0)
    cls[...] = out.reshape(cls.shape)
    plo[...] = lo.reshape(cls.shape)
    phi[...] = hi.reshape(cls.shape)
