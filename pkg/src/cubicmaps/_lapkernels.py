"""Branch-refinement step for lap counting (numba and numpy versions).

One level takes the turning points ``xs`` of f^k (bracketed by the domain ends)
together with ``ys = f^k(xs)`` and returns the same data for f^(k+1).  New
turning points are the roots of f^k(x) = c inside monotone branches whose
value range strictly contains a critical point c.

The lap number only depends on the ordered values, since roots inside one
branch are ordered by c (ascending on increasing branches).  ``propagate``
does the value update alone; ``refine_level`` also locates the roots.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit, prange

BISECT_TOL = 1e-13
BISECT_MAXIT = 60
MERGE_TOL = 1e-11


@njit
def _f_safe(y, coeffs, R, lead_sign, odd):
    if y > R or y < -R:
        s = 1.0 if y > 0 else -1.0
        if not odd:
            s = 1.0
        return lead_sign * s * np.inf
    acc = coeffs[0]
    for i in range(1, coeffs.shape[0]):
        acc = acc * y + coeffs[i]
    return acc


@njit
def _fk(x, k, coeffs, R, lead_sign, odd):
    z = x
    for _ in range(k):
        z = _f_safe(z, coeffs, R, lead_sign, odd)
    return z


@njit(nogil=True)
def _refine_nb(xs, ys, crit, coeffs, k, R, lead_sign, odd, vtol):
    n = xs.shape[0]
    nc = crit.shape[0]
    # first pass: count straddles
    count = 0
    for i in range(n - 1):
        lo = min(ys[i], ys[i + 1])
        hi = max(ys[i], ys[i + 1])
        for j in range(nc):
            if lo + vtol < crit[j] < hi - vtol:
                count += 1
    rx = np.empty(count)
    rv = np.empty(count)
    ok = np.zeros(count, dtype=np.bool_)
    owner = np.empty(count, dtype=np.int64)
    q = 0
    for i in range(n - 1):
        lo = min(ys[i], ys[i + 1])
        hi = max(ys[i], ys[i + 1])
        inc = ys[i + 1] > ys[i]
        for j in range(nc):
            c = crit[j]
            if not (lo + vtol < c < hi - vtol):
                continue
            a = xs[i]
            b = xs[i + 1]
            for _ in range(BISECT_MAXIT):
                if b - a <= BISECT_TOL:
                    break
                mid = 0.5 * (a + b)
                v = _fk(mid, k, coeffs, R, lead_sign, odd)
                if (v < c) == inc:
                    a = mid
                else:
                    b = mid
            r = 0.5 * (a + b)
            rx[q] = r
            rv[q] = _f_safe(c, coeffs, R, lead_sign, odd)
            owner[q] = i
            ok[q] = (r - xs[i] > MERGE_TOL) and (xs[i + 1] - r > MERGE_TOL)
            q += 1
    kept = 0
    for q in range(count):
        if ok[q]:
            kept += 1
    nx = np.empty(n + kept)
    ny = np.empty(n + kept)
    p = 0
    q = 0
    for i in range(n):
        nx[p] = xs[i]
        ny[p] = _f_safe(ys[i], coeffs, R, lead_sign, odd)
        p += 1
        # roots in branch i, sorted by position
        start = q
        while q < count and owner[q] == i:
            q += 1
        m = q - start
        if m == 0:
            continue
        idx = np.argsort(rx[start:q])
        for t in range(m):
            u = start + idx[t]
            if ok[u]:
                nx[p] = rx[u]
                ny[p] = rv[u]
                p += 1
    return nx, ny


def _f_safe_np(y, coeffs, R, lead_sign, odd):
    out = np.empty_like(y)
    big = np.abs(y) > R
    acc = np.full(y.shape, coeffs[0])
    yy = np.where(big, 0.0, y)
    for c in coeffs[1:]:
        acc = acc * yy + c
    s = np.where(y > 0, 1.0, -1.0) if odd else np.ones_like(y)
    out[:] = np.where(big, lead_sign * s * np.inf, acc)
    return out


def _refine_np(xs, ys, crit, coeffs, k, R, lead_sign, odd, vtol):
    lo = np.minimum(ys[:-1], ys[1:])
    hi = np.maximum(ys[:-1], ys[1:])
    inc = ys[1:] > ys[:-1]
    roots, vals = [], []
    for c in crit:
        sel = np.nonzero((lo + vtol < c) & (c < hi - vtol))[0]
        if sel.size == 0:
            continue
        a = xs[sel].copy()
        b = xs[sel + 1].copy()
        up = inc[sel]
        for _ in range(BISECT_MAXIT):
            active = b - a > BISECT_TOL
            if not active.any():
                break
            mid = 0.5 * (a + b)
            v = mid
            for _ in range(k):
                v = _f_safe_np(v, coeffs, R, lead_sign, odd)
            go_right = (v < c) == up
            a = np.where(active & go_right, mid, a)
            b = np.where(active & ~go_right, mid, b)
        r = 0.5 * (a + b)
        keep = (r - xs[sel] > MERGE_TOL) & (xs[sel + 1] - r > MERGE_TOL)
        roots.append(r[keep])
        vals.append(np.full(keep.sum(), _f_safe_np(np.array([c]), coeffs, R, lead_sign, odd)[0]))
    new_y = _f_safe_np(ys, coeffs, R, lead_sign, odd)
    if not roots:
        return xs.copy(), new_y
    rx = np.concatenate(roots)
    rv = np.concatenate(vals)
    nx = np.concatenate([xs, rx])
    ny = np.concatenate([new_y, rv])
    order = np.argsort(nx, kind="stable")
    return nx[order], ny[order]


def refine_level(xs, ys, crit, coeffs, k, R, lead_sign, odd, vtol, use_numba=None):
    if use_numba is None:
        use_numba = HAVE_NUMBA
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    crit = np.ascontiguousarray(crit, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    fn = _refine_nb if use_numba else _refine_np
    return fn(xs, ys, crit, coeffs, int(k), float(R), float(lead_sign), bool(odd), float(vtol))


@njit(nogil=True)
def _propagate_nb(ys, crit, coeffs, R, lead_sign, odd, vtol):
    n = ys.shape[0]
    nc = crit.shape[0]
    fc = np.empty(nc)
    for j in range(nc):
        fc[j] = _f_safe(crit[j], coeffs, R, lead_sign, odd)
    count = 0
    for i in range(n - 1):
        lo = min(ys[i], ys[i + 1])
        hi = max(ys[i], ys[i + 1])
        for j in range(nc):
            if lo + vtol < crit[j] < hi - vtol:
                count += 1
    out = np.empty(n + count)
    p = 0
    for i in range(n):
        out[p] = _f_safe(ys[i], coeffs, R, lead_sign, odd)
        p += 1
        if i == n - 1:
            break
        lo = min(ys[i], ys[i + 1])
        hi = max(ys[i], ys[i + 1])
        if ys[i + 1] > ys[i]:
            for j in range(nc):
                if lo + vtol < crit[j] < hi - vtol:
                    out[p] = fc[j]
                    p += 1
        else:
            for j in range(nc - 1, -1, -1):
                if lo + vtol < crit[j] < hi - vtol:
                    out[p] = fc[j]
                    p += 1
    return out


def _propagate_np(ys, crit, coeffs, R, lead_sign, odd, vtol):
    lo = np.minimum(ys[:-1], ys[1:])[:, None]
    hi = np.maximum(ys[:-1], ys[1:])[:, None]
    S = (lo + vtol < crit[None, :]) & (crit[None, :] < hi - vtol)
    per = S.sum(axis=1)
    start = np.arange(ys.size)
    start[1:] += np.cumsum(per)
    out = np.empty(ys.size + per.sum())
    out[start] = _f_safe_np(ys, coeffs, R, lead_sign, odd)
    fc = _f_safe_np(crit, coeffs, R, lead_sign, odd)
    rank = np.cumsum(S, axis=1) - 1
    dec = ys[1:] < ys[:-1]
    rank = np.where(dec[:, None], per[:, None] - 1 - rank, rank)
    bi, cj = np.nonzero(S)
    out[start[bi] + 1 + rank[bi, cj]] = fc[cj]
    return out


def propagate(ys, crit, coeffs, R, lead_sign, odd, vtol, use_numba=None):
    """Values of f^(k+1) at its turning points (and the two limits) from those of f^k.

    ``crit`` must be sorted ascending.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    crit = np.ascontiguousarray(crit, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    fn = _propagate_nb if use_numba else _propagate_np
    return fn(ys, crit, coeffs, float(R), float(lead_sign), bool(odd), float(vtol))


@njit(nogil=True)
def _lap_counts_nb(crit, coeffs, R, lead_sign, odd, vtol, kmax, cap, out):
    """Fill ``out[k-1] = l_k``; returns the number of levels completed before the cap."""
    ys = np.empty(2)
    ys[0] = -np.inf
    ys[1] = np.inf
    for k in range(kmax):
        ys = _propagate_nb(ys, crit, coeffs, R, lead_sign, odd, vtol)
        if ys.shape[0] - 2 > cap:
            return k
        out[k] = ys.shape[0] - 1
    return kmax


@njit(parallel=True)
def _lap_grid_nb(As, bs, sigma, kmax, cap, vtol_rel, out, depth):
    nx = As.shape[0]
    ny = bs.shape[0]
    for idx in prange(nx * ny):
        i = idx // nx
        j = idx - i * nx
        A = As[j]
        b = bs[i]
        coeffs = np.array([sigma, 0.0, -3.0 * A, b])
        R = max(2.0, np.sqrt(3.0 * abs(A) + abs(b) + 2.0))
        sA = sigma * A
        if sA <= 0:
            for k in range(kmax):
                out[idx, k] = 1
            depth[idx] = kmax
            continue
        a = np.sqrt(sA)
        crit = np.array([-a, a])
        depth[idx] = _lap_counts_nb(crit, coeffs, R, sigma, True, vtol_rel * max(1.0, R),
                                    kmax, cap, out[idx])


def lap_counts(crit, coeffs, R, lead_sign, odd, vtol, kmax, cap, use_numba=None):
    """Lap numbers ``l_1..l_d`` for ``d <= kmax`` levels (d < kmax when the cap is hit)."""
    if use_numba is None:
        use_numba = HAVE_NUMBA
    crit = np.ascontiguousarray(crit, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    out = np.zeros(kmax, dtype=np.int64)
    if use_numba:
        d = _lap_counts_nb(crit, coeffs, float(R), float(lead_sign), bool(odd), float(vtol),
                           int(kmax), int(cap), out)
        return out[:d]
    ys = np.array([-np.inf, np.inf])
    for k in range(kmax):
        ys = _propagate_np(ys, crit, coeffs, float(R), float(lead_sign), bool(odd), float(vtol))
        if ys.size - 2 > cap:
            return out[:k]
        out[k] = ys.size - 1
    return out


def lap_grid(As, bs, sigma, kmax, cap, vtol_rel, use_numba=None):
    """Lap sequences for every (A, b) cell, row-major over ``bs`` x ``As``.

    Returns ``(laps, depth)`` with ``laps[idx, :depth[idx]]`` valid.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    As = np.ascontiguousarray(As, dtype=np.float64)
    bs = np.ascontiguousarray(bs, dtype=np.float64)
    n = As.size * bs.size
    out = np.zeros((n, kmax), dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    if use_numba:
        _lap_grid_nb(As, bs, float(sigma), int(kmax), int(cap), float(vtol_rel), out, depth)
        return out, depth
    for idx in range(n):
        i, j = divmod(idx, As.size)
        A, b = As[j], bs[i]
        if sigma * A <= 0:
            out[idx] = 1
            depth[idx] = kmax
            continue
        a = np.sqrt(sigma * A)
        R = max(2.0, np.sqrt(3 * abs(A) + abs(b) + 2))
        row = lap_counts([-a, a], [sigma, 0.0, -3 * A, b], R, sigma, True,
                         vtol_rel * max(1.0, R), kmax, cap, use_numba=False)
        out[idx, :row.size] = row
        depth[idx] = row.size
    return out, depth
