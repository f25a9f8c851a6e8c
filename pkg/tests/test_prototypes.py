import math
from fractions import Fraction

import numpy as np
import pytest

from cubicmaps._accel import HAVE_NUMBA
from cubicmaps.entropy import grid_axes
from cubicmaps.prototypes import (OMEGA, Arch, arch_closed_form, arch_grid, arch_membership,
                                  biquadratic_connected, biquadratic_status, circle_rotation_number,
                                  henon_grid, henon_search, mandelbrot_membership, product_grid,
                                  product_membership, quadratic_escape_time, tongue_grid,
                                  tricorn_bounded, tricorn_membership)


def test_quadratic_escape_time():
    # 0 -> 1 -> 2 -> 5 under z^2 + 1
    assert quadratic_escape_time(0.0, 1.0, 50) == 3
    assert quadratic_escape_time(0.0, -1.0, 50) == -1
    # the radius is max(2, |c|): 0 -> 3 stays on the circle, 3 -> 12 leaves
    t = quadratic_escape_time(0.0, np.array([0.0, 1.0, 3.0]), 50)
    assert t.tolist() == [-1, 3, 2]
    assert quadratic_escape_time(5.0, 0.0, 10) == 0


@pytest.mark.parametrize("c,inside", [(-2.0, True), (0.25, True), (0.26, False), (-0.75 + 0.1j, False),
                                      (-1.0, True), (1j, True), (-2.01, False)])
def test_mandelbrot(c, inside):
    assert mandelbrot_membership(c) == inside


def test_biquadratic_diagonal_is_mandelbrot():
    for c in np.linspace(-2.3, 0.5, 57):
        assert biquadratic_connected(c, c) == mandelbrot_membership(c)


def test_biquadratic_status_is_per_orbit():
    # c1 = -1, c2 = 0: 0 -> -1 -> 1 -> 0 -> ... both orbits bounded
    assert biquadratic_connected(-1.0, 0.0)
    a, b = biquadratic_status(0.0, 2.0)
    assert not a.bounded and not b.bounded and a.escaped_at >= 1


def test_arch_closed_form_matches_dynamics(rng):
    for c, x in zip(rng.uniform(-2.3, 0.4, 400), rng.uniform(-2.2, 2.2, 400)):
        # stay away from the closed-form boundary where Nmax is not enough
        gap = min(abs(c + 2), abs(c - 0.25),
                  abs(2 * abs(x) - 1 - math.sqrt(max(1 - 4 * c, 0.0))))
        if gap < 1e-2:
            continue
        closed, dyn = arch_membership(c, x)
        assert closed == dyn


def test_arch_branch_sign():
    assert arch_membership(-1.0, 0.5, sign=-1) == arch_membership(-1.0, 0.5, sign=1)
    with pytest.raises(ValueError):
        Arch(0.0, 0.0, 0)
    assert arch_closed_form(-2.0, 0.0) and arch_closed_form(-2.0, 2.0) and not arch_closed_form(-2.0, 2.01)


def test_product_membership():
    assert product_membership(-1.0, 0.2) == (True, True)
    assert product_membership(-1.0, 0.3) == (False, False)
    assert product_membership(-2.1, 0.0) == (False, False)


def test_grids_small():
    xs, ys = grid_axes((-2.3, 0.4, -2.2, 2.2), 32, 32)
    dyn, closed = arch_grid(xs, ys, Nmax=500)
    assert dyn.shape == (32, 32) and np.mean(dyn == closed) > 0.98
    xs, ys = grid_axes((-2.5, 1.0, -2.5, 1.0), 32, 32)
    dyn, closed = product_grid(xs, ys, Nmax=500)
    assert np.mean(dyn == closed) > 0.98


def test_tricorn_symmetries(rng):
    c = rng.uniform(-2.2, 1.4, 2000) + 1j * rng.uniform(-1.8, 1.8, 2000)
    base = tricorn_bounded(c)
    assert np.mean(base == tricorn_bounded(np.conj(c))) > 0.999
    assert np.mean(base == tricorn_bounded(OMEGA * c)) > 0.995
    assert np.mean(base == tricorn_bounded(OMEGA * OMEGA * c)) > 0.995


def test_tricorn_real_slice(rng):
    for c in rng.uniform(-2.2, 1.4, 200):
        assert tricorn_membership(c) == mandelbrot_membership(c)


def test_tricorn_known_points():
    assert tricorn_membership(0.0)
    assert not tricorn_membership(1.0 + 1.0j)


def test_henon_superattracting_fixed_point():
    # only starts with |y| < 1 are attracted; seed 0 needs more than 8 trials to hit one
    assert henon_search(0.0, 0.0, trials=8).period is None
    r = henon_search(0.0, 0.0, trials=64)
    assert r.period == 1
    assert abs(r.orbit[0][0]) < 1e-9 and abs(r.orbit[0][1]) < 1e-9


def test_henon_nothing_bounded():
    assert henon_search(10.0, 0.0, trials=8).period is None


def henon_jacobian_eigs(alpha, beta, orbit):
    J = np.eye(2)
    for x, y in orbit:
        J = np.array([[0.0, 1.0], [-beta, 2 * y]]) @ J
    return np.linalg.eigvals(J)


def test_henon_period_five_orbit():
    a, b = 1.4921875, -0.1078125
    r = henon_search(a, b, trials=64, seed=0)
    assert r.period == 5
    x, y = r.orbit[0]
    for _ in range(5):
        x, y = y, y * y - a - b * x
    assert abs(x - r.orbit[0][0]) < 1e-9 and abs(y - r.orbit[0][1]) < 1e-9
    eig = henon_jacobian_eigs(a, b, r.orbit)
    assert sorted(abs(eig)) == pytest.approx(sorted(abs(complex(e)) for e in r.eigenvalues), rel=1e-6)
    assert max(abs(eig)) < 1
    assert r.to_json()["seed"] == 0


def test_henon_search_validation():
    with pytest.raises(ValueError):
        henon_search(1.0, 0.0, trials=0)


def test_henon_grid_deterministic_and_backend_independent():
    al, be = grid_axes((1.4, 1.6, -0.3, -0.1), 12, 10)
    g = henon_grid(al, be, trials=8, nwarm=500, seed=3)
    assert np.array_equal(g, henon_grid(al, be, trials=8, nwarm=500, seed=3))
    if HAVE_NUMBA:
        assert np.array_equal(g, henon_grid(al, be, trials=8, nwarm=500, seed=3, use_numba=False))
    assert g.shape == (10, 12) and g.min() >= -1


def test_circle_rigid_rotation_exact():
    for c in (0.0, 0.123, 1 / 3, 0.5, 0.999):
        assert circle_rotation_number(c, 0.0).rho == c


def test_circle_locking():
    est = circle_rotation_number(0.5, 0.05)
    assert est.locked == Fraction(1, 2) and est.rho == 0.5
    assert est.injective and abs(est.multiplier) < 1
    assert circle_rotation_number(0.0, 0.1).locked == Fraction(0, 1)


def test_circle_monotone_in_c():
    k = 0.1
    rhos = [circle_rotation_number(c, k, N=5000, qmax=16, warm=500).rho for c in np.linspace(0, 1, 41)]
    assert all(a <= b + 1e-3 for a, b in zip(rhos, rhos[1:]))


def test_circle_noninjective_flag():
    assert not circle_rotation_number(0.3, 0.2, N=2000, qmax=8).injective


def test_tongue_grid():
    rho, locked = tongue_grid([0.0, 0.5], [0.0, 0.05], N=500, qmax=8)
    assert rho.shape == (2, 2)
    assert rho[0].tolist() == [0.0, 0.5] and not locked[0].any()
    assert locked[1].all() and rho[1].tolist() == [0.0, 0.5]
