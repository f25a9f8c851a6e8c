import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubicmaps._accel import HAVE_NUMBA
from cubicmaps.core import MonicForm
from cubicmaps.entropy import (IntervalMap, LapEngine, entropy_estimate, entropy_grid,
                               estimate_from_laps, grid_axes, lap_sequence, piecewise_monotone)
from cubicmaps.errors import CapExceeded

GOLDEN = (1 + math.sqrt(5)) / 2
# airplane: the critical point of x^2 + c has period 3; entropy log of the golden ratio
AIRPLANE = -1.7548776662466927


def test_chebyshev_laps():
    assert lap_sequence(MonicForm.from_moduli(1.0, 0.0), kmax=8) == [3 ** k for k in range(1, 9)]
    assert lap_sequence(IntervalMap.quadratic(-2.0), kmax=10) == [2 ** k for k in range(1, 11)]


def test_monotone_maps_have_one_lap():
    assert lap_sequence(MonicForm.from_moduli(0.0, 0.0), kmax=5) == [1] * 5
    assert lap_sequence(MonicForm.from_moduli(-0.3, 0.2), kmax=5) == [1] * 5
    est = entropy_estimate(MonicForm.from_moduli(-0.3, 0.2))
    assert est.s == 1.0 and est.h == 0.0


def test_escaping_critical_points_give_linear_growth():
    # f(x) = x^3 - 3x + 5: both critical orbits escape; each level adds one preimage of each
    m = MonicForm(1, 1.0, 5.0)
    assert lap_sequence(m, kmax=6) == [2 * k + 1 for k in range(1, 7)]
    assert entropy_estimate(m).s == 1.0


@pytest.mark.parametrize("use_numba", [False, True] if HAVE_NUMBA else [False])
def test_backends_agree(use_numba, rng):
    for _ in range(20):
        m = MonicForm(int(rng.choice([-1, 1])), float(rng.uniform(-0.5, 1.2)), float(rng.uniform(0, 1)))
        ref = lap_sequence(m, kmax=12, use_numba=False, locate=True)
        assert lap_sequence(m, kmax=12, use_numba=use_numba) == ref


def test_turning_points_are_preimages_of_critical_points():
    m = MonicForm.from_moduli(0.6, 0.1)
    pm = piecewise_monotone(m, 4)
    crit = (-math.sqrt(0.6), math.sqrt(0.6))
    assert pm.lap == lap_sequence(m, kmax=4)[-1]
    for t, v in zip(pm.turning, pm.values):
        z = t
        hit = False
        for _ in range(4):
            hit |= min(abs(z - c) for c in crit) < 1e-9
            z = m(z)
        assert hit
        assert abs(z - v) < 1e-9 * max(1.0, abs(v))
    assert np.all(np.diff(pm.turning) > 0)


def test_engine_state_requires_locate():
    eng = LapEngine(MonicForm.from_moduli(0.6, 0.1))
    eng.step()
    with pytest.raises(ValueError):
        eng.state()


def test_cap_exceeded_reports_prefix():
    with pytest.raises(CapExceeded) as ei:
        lap_sequence(MonicForm.from_moduli(1.0, 0.0), kmax=20, cap=100)
    assert ei.value.laps == [3, 9, 27, 81]
    est = entropy_estimate(MonicForm.from_moduli(1.0, 0.0), cap=100)
    assert est.capped and est.k == 4


def test_estimator_on_model_sequences():
    assert estimate_from_laps([2 ** k for k in range(1, 30)]).s == pytest.approx(2.0, abs=1e-12)
    assert estimate_from_laps([k + 1 for k in range(1, 30)]).s == 1.0
    fib = [2, 3]
    while len(fib) < 40:
        fib.append(fib[-1] + fib[-2])
    est = estimate_from_laps(fib)
    assert est.s == pytest.approx(GOLDEN, abs=1e-8) and est.converged
    assert estimate_from_laps([]).k == 0
    assert estimate_from_laps([3, 3, 3, 3]).s == 1.0


@pytest.mark.parametrize("m,s,tol", [
    (MonicForm.from_moduli(1.0, 0.0), 3.0, 1e-6),
    (MonicForm.from_moduli(-0.75, -0.1875, -1), 2.0, 1e-2),
    (MonicForm.from_moduli(0.71327, 0.12977), GOLDEN, 1e-2),
    (MonicForm.from_moduli(-0.55310, -0.62882), 1.83929, 1e-2),
    (IntervalMap.quadratic(AIRPLANE), GOLDEN, 1e-2),
    (IntervalMap.quadratic(-1.0), 1.0, 1e-9),
], ids=["chebyshev", "cap-2", "golden", "tribonacci", "airplane", "basilica"])
def test_known_growth_numbers(m, s, tol):
    assert entropy_estimate(m).s == pytest.approx(s, abs=tol)


def test_entropy_bounds(rng):
    for _ in range(10):
        m = MonicForm(int(rng.choice([-1, 1])), float(rng.uniform(-1, 1.5)), float(rng.uniform(0, 1.5)))
        est = entropy_estimate(m, kmax=60)
        assert 1.0 <= est.s <= 3.0
        # h never exceeds the crude bound log(l_k)/k by more than the estimator's noise
        assert est.h <= est.h_upper + 0.05


def test_grid_axes_pixel_centres():
    xs, ys = grid_axes((0, 1, 0, 2), 4, 2)
    assert np.allclose(xs, [0.125, 0.375, 0.625, 0.875])
    assert np.allclose(ys, [1.5, 0.5])


def test_entropy_grid_matches_pointwise():
    g = entropy_grid((0.57, 1.03, -0.03, 0.43), 4, 3, sigma=1, kmax=40)
    assert g.s.shape == (3, 4) and g.sigma == 1
    for j, b in enumerate(g.b):
        for i, A in enumerate(g.A):
            est = entropy_estimate(MonicForm(1, A, b), kmax=40, cap=200_000)
            assert g.s[j, i] == pytest.approx(est.s, abs=1e-12)


def test_entropy_grid_AB_plane_splits_sign():
    g = entropy_grid((-0.8, 0.8, -1.0, 0.5), 3, 4, kmax=30, plane="AB")
    assert g.sigma == 0
    for j, B in enumerate(g.b):
        for i, A in enumerate(g.A):
            est = entropy_estimate(MonicForm.from_moduli(A, B), kmax=30, cap=200_000)
            assert g.s[j, i] == pytest.approx(est.s, abs=1e-12)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_entropy_grid_backends_agree():
    w = (-1.05, -0.02, -0.05, 1.35)
    a = entropy_grid(w, 5, 4, sigma=-1, kmax=30, use_numba=True)
    b = entropy_grid(w, 5, 4, sigma=-1, kmax=30, use_numba=False)
    assert np.array_equal(a.s, b.s)


def test_entropy_grid_validation():
    with pytest.raises(ValueError):
        entropy_grid((0, 1, 0, 1), 0, 3)
    with pytest.raises(ValueError):
        entropy_grid((0, 1, 0, 1), 2, 2, plane="xy")
    with pytest.raises(ValueError):
        entropy_grid((0, 1, 0, 1), 2, 2, sigma=0)
    with pytest.raises(ValueError):
        lap_sequence(MonicForm.from_moduli(1.0, 0.0), kmax=0)


@given(st.floats(-0.5, 1.2), st.floats(0.0, 1.2), st.sampled_from([1, -1]))
@settings(max_examples=30, deadline=None)
def test_laps_are_nondecreasing_and_submultiplicative(A, b, sigma):
    laps = lap_sequence(MonicForm(sigma, A, b), kmax=10)
    assert all(x <= y for x, y in zip(laps, laps[1:]))
    for i in range(1, len(laps)):
        assert laps[i] <= laps[0] * laps[i - 1]
