import json
import math

import numpy as np
import pytest

from cubicmaps import _rasterkernels as rk
from cubicmaps._accel import HAVE_NUMBA
from cubicmaps.classifier import RegionClass, curve_region_class
from cubicmaps.errors import AmbiguousNearBoundary, DomainError
from cubicmaps.hyperbolic import builtin_center_table
from cubicmaps.io import read_pgm
from cubicmaps.loci import PER2, PREPER11, Per1, curve_B
from cubicmaps.raster import (FAMILIES, HENON_PALETTE, PALETTE, PixelClass, RasterConfig,
                              classify_grid, classify_pixel, contour_gray, distance_estimate,
                              orbit_report, render)

FIG3 = (-1.2, 1.2, -1.85, 0.75)


def test_single_pixel_render():
    res = render(RasterConfig("cubic-AB", (-1e-3, 1e-3, -1e-3, 1e-3), 1, 1))
    assert res.pgm == b"P5\n1 1\n255\n\xa0"
    assert res.counts() == {"BothConvergeSame": 1}


@pytest.mark.parametrize("point,want", [
    ((0.0, 0.0), PixelClass("BothConverge", True, (1, 1))),
    ((0.8156, 0.0674), PixelClass("BothConverge", False, (3, 4))),
    ((1.1, 0.01), PixelClass("BothEscape")),
    ((0.0, 5.0), PixelClass("BothEscape")),
    # x^3 - 3x: critical orbits stay on the repelling points -+2
    ((1.0, 0.0), PixelClass("Chaotic", chaotic="both")),
])
def test_classify_pixel_examples(point, want):
    cfg = RasterConfig("cubic-AB", FIG3, 288, 225)
    assert classify_pixel(cfg, point) == want


def test_centers_classify_as_converging():
    cfg = RasterConfig("cubic-AB", FIG3, 288, 225)
    for rec in builtin_center_table():
        assert classify_pixel(cfg, (rec.A, rec.B)).tag == "BothConverge"


def test_distance_estimate_formula():
    assert distance_estimate(math.e, 1.0) == pytest.approx(math.e)
    assert distance_estimate(10.0, 0.0) == math.inf
    with pytest.raises(DomainError):
        distance_estimate(0.5, 1.0)


def test_distance_scales_linearly_near_tip():
    # outside the tip c = -2 of the Mandelbrot set the true distance is delta
    ds = [orbit_report("mandelbrot", -2 - d, 0.0)["distance"] for d in (1e-3, 5e-4, 2.5e-4)]
    assert ds[0] / ds[1] == pytest.approx(2, rel=0.02)
    assert ds[1] / ds[2] == pytest.approx(2, rel=0.02)
    assert 0.25 < ds[0] / 1e-3 < 4


def test_distance_halves_near_preper11():
    A = 0.5
    B0 = curve_B(PREPER11, A)[0]
    out = []
    for d in (2e-3, 1e-3, 5e-4):
        reps = [orbit_report("cubic-AB", A, B0 + d, which=w) for w in (0, 1)]
        esc = [r for r in reps if r["outcome"] == "escaped"]
        assert len(esc) == 1
        out.append(esc[0]["distance"])
    assert 1.5 < out[0] / out[1] < 2.7 and 1.5 < out[1] / out[2] < 2.7


def test_config_validation():
    with pytest.raises(ValueError):
        RasterConfig("cubic-XY", FIG3, 4, 4)
    with pytest.raises(ValueError):
        RasterConfig("cubic-AB", (1, 0, 0, 1), 4, 4)
    with pytest.raises(ValueError):
        RasterConfig("cubic-AB", FIG3, 0, 4)
    with pytest.raises(ValueError):
        RasterConfig("cubic-AB", FIG3, 4, 4, palette="v2")
    with pytest.raises(ValueError):
        RasterConfig("arch", FIG3, 4, 4, sign=0)
    cfg = RasterConfig("cubic-AB", [0, 1, 0, 1], 4, 4)
    assert cfg.window == (0.0, 1.0, 0.0, 1.0) and cfg.px == 0.25


def _near_parabolic(A, B, px):
    curves = [Per1(1), Per1(-1), PER2]
    return any(abs(B - curve_B(c, A)[0]) < 2 * px * 4 for c in curves)


@pytest.fixture(scope="module")
def fig3_256():
    return render(RasterConfig("cubic-AB", FIG3, 256, 256))


def test_known_regions(fig3_256):
    res = fig3_256
    cfg = res.config
    xs = cfg.window[0] + (np.arange(256) + 0.5) * cfg.px
    ys = cfg.window[3] - (np.arange(256) + 0.5) * (cfg.window[3] - cfg.window[2]) / 256
    checked = 0
    for j in range(0, 256, 2):
        for i in range(0, 256, 2):
            A, B = xs[i], ys[j]
            if _near_parabolic(A, B, cfg.px):
                continue
            try:
                r = curve_region_class(A, B)
            except AmbiguousNearBoundary:
                continue
            code = res.classes[j, i]
            if r == RegionClass.R3:
                assert code in (rk.BOTH_ESCAPE, rk.BOUNDARY)
                checked += 1
            if r == RegionClass.R1 and A * (1 if B >= 0 else -1) > 0:
                # real turning points with values inside the hull: nothing escapes
                assert code not in (rk.BOTH_ESCAPE, rk.ONE_ESCAPES)
                if code in (rk.CONVERGE_SAME, rk.CONVERGE_DISTINCT):
                    assert res.gray[j, i] != 255
    assert checked > 50


def test_boundary_fraction(fig3_256):
    frac = np.mean(fig3_256.classes == rk.BOUNDARY)
    assert frac < 0.15


def test_palette_values(fig3_256):
    assert set(np.unique(fig3_256.gray)) <= set(PALETTE.values())
    assert fig3_256.metadata()["palette_version"] == "v1"


def test_structure_pass_synthetic():
    cls = np.full((3, 3), rk.CONVERGE_SAME, dtype=np.int64)
    cls[0, 2] = rk.BOTH_ESCAPE
    lo = np.ones((3, 3), dtype=np.int64)
    hi = np.ones((3, 3), dtype=np.int64)
    lo[1, 1] = hi[1, 1] = 2
    sp = getattr(rk.structure_pass, "py_func", rk.structure_pass)
    out = sp(cls.copy(), lo, hi)
    # (1,1) differs from its left and upper neighbours; (1,2) and (2,1) differ from (1,1)
    assert out[1, 1] == rk.STRUCTURE_CHANGE
    assert out[1, 2] == rk.STRUCTURE_CHANGE and out[2, 1] == rk.STRUCTURE_CHANGE
    assert out[0, 0] == rk.CONVERGE_SAME and out[2, 2] == rk.CONVERGE_SAME
    # non-converging neighbours are not compared
    assert out[0, 2] == rk.BOTH_ESCAPE
    if HAVE_NUMBA:
        assert np.array_equal(out, rk.structure_pass(cls.copy(), lo, hi))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("family,window", [
    ("cubic-AB", (-0.6, -0.53, -0.7, -0.55)),
    ("cubic-Ab", (-0.4, 1.1, -1.0, 1.0)),
    ("cubic-Ab'", (-1.1, 0.7, -1.4, 1.4)),
    ("biquadratic", (-2.5, 1.0, -2.5, 1.0)),
    ("tricorn", (0.18, 0.5, 0.34, 0.66)),
])
def test_backends_agree(family, window):
    cfg = RasterConfig(family, window, 24, 20)
    a = classify_grid(cfg, use_numba=True)
    b = classify_grid(cfg, use_numba=False)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_thread_count_does_not_change_bytes():
    cfg = RasterConfig("cubic-AB", (-0.6, -0.53, -0.7, -0.55), 40, 40)
    assert render(cfg, threads=1).pgm == render(cfg, threads=2).pgm


@pytest.mark.parametrize("family", sorted(set(FAMILIES) - {"cubic-Abp"}))
def test_every_family_renders(family):
    window = {"circle": (0.15, 0.7, 0.0, 0.35), "henon": (1.4, 1.6, -0.3, -0.1)}.get(family, (-2, 1, -1.5, 1.5))
    res = render(RasterConfig(family, window, 16, 12, nmax=200, trials=4))
    assert res.gray.shape == (12, 16) and res.gray.dtype == np.uint8
    allowed = HENON_PALETTE.values() if family == "henon" else PALETTE.values()
    assert set(np.unique(res.gray)) <= set(allowed)
    assert sum(res.counts().values()) == 16 * 12


def test_save_writes_pgm_and_sidecar(tmp_path):
    res = render(RasterConfig("cubic-AB", FIG3, 8, 6))
    p = tmp_path / "img.pgm"
    side = res.save(p)
    assert np.array_equal(read_pgm(p), res.gray)
    meta = json.loads(open(side).read())
    assert meta["config"]["family"] == "cubic-AB" and meta["config"]["width"] == 8
    assert sum(meta["counts"].values()) == 48 and meta["palette_version"] == "v1"


def test_henon_metadata_records_seed(tmp_path):
    res = render(RasterConfig("henon", (1.4, 1.6, -0.3, -0.1), 6, 5, trials=4, seed=7, nmax=300))
    assert res.metadata()["seed"] == 7


def test_henon_pixel_rejected_by_classify_pixel():
    with pytest.raises(ValueError):
        classify_pixel(RasterConfig("henon", (1.4, 1.6, -0.3, -0.1), 4, 4), (1.5, -0.2))


def test_contour_gray():
    v = np.array([[0.0, 0.04, 0.06], [0.0, 0.0, 0.0]])
    g = contour_gray(v, 0.05)
    assert g.tolist() == [[255, 0, 0], [255, 255, 255]]
