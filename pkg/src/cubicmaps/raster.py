"""Parameter-plane pictures: critical-orbit jets, distance estimates, periodicity structure.

Pass 1 classifies every pixel centre independently (parallel, pure); pass 2
blackens converging pixels whose period signature differs from the left or
upper neighbour.  Image bytes depend only on the configuration.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _rasterkernels as rk
from ._accel import HAVE_NUMBA, backend_name, set_threads
from .entropy import grid_axes
from .errors import DomainError
from .io import pgm_bytes, write_json, write_pgm

PALETTE_VERSION = "v1"
PALETTE = {
    rk.STRUCTURE_CHANGE: 0,
    rk.BOUNDARY: 0,
    rk.CHAOTIC_BOTH: 64,
    rk.CHAOTIC_ONE: 112,
    rk.CONVERGE_SAME: 160,
    rk.CONVERGE_DISTINCT: 176,
    rk.ONE_ESCAPES: 208,
    rk.BOTH_ESCAPE: 255,
}
CLASS_NAMES = {
    rk.BOTH_ESCAPE: "BothEscape",
    rk.ONE_ESCAPES: "OneEscapes",
    rk.CONVERGE_SAME: "BothConvergeSame",
    rk.CONVERGE_DISTINCT: "BothConvergeDistinct",
    rk.CHAOTIC_ONE: "ChaoticOne",
    rk.CHAOTIC_BOTH: "ChaoticBoth",
    rk.BOUNDARY: "Boundary",
    rk.STRUCTURE_CHANGE: "StructureChange",
}
# Henon pictures: attracting low period found / bounded only / nothing bounded
HENON_PALETTE = {1: 255, 0: 128, -1: 0}

FAMILIES = {
    "cubic-AB": rk.CUBIC_AB,
    "cubic-Ab": rk.CUBIC_AB_PLUS,
    "cubic-Ab'": rk.CUBIC_AB_MINUS,
    "cubic-Abp": rk.CUBIC_AB_MINUS,
    "biquadratic": rk.BIQUADRATIC,
    "arch": rk.ARCH,
    "product": rk.PRODUCT,
    "tricorn": rk.TRICORN,
    "mandelbrot": rk.MANDELBROT,
    "circle": rk.CIRCLE,
    "henon": -1,
}


@dataclass(frozen=True)
class RasterConfig:
    family: str
    window: tuple  # xmin, xmax, ymin, ymax
    width: int
    height: int
    nmax: int = 400
    pmax: int = 64
    tol: float = 1e-6
    palette: str = PALETTE_VERSION
    sign: int = 1  # arch branch
    seed: int = 0  # henon
    trials: int = 16  # henon
    structure: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {sorted(FAMILIES)}")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        xmin, xmax, ymin, ymax = self.window
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("window must satisfy xmin < xmax and ymin < ymax")
        if self.palette != PALETTE_VERSION:
            raise ValueError(f"unsupported palette {self.palette!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "window", tuple(float(v) for v in self.window))

    @property
    def px(self):
        return (self.window[1] - self.window[0]) / self.width

    def to_json(self):
        return asdict(self)


@dataclass(frozen=True)
class PixelClass:
    tag: str  # BothEscape | OneEscapes | BothConverge | Chaotic | Boundary | StructureChange
    same: bool | None = None
    periods: tuple = ()
    chaotic: str | None = None  # "one" | "both"

    @classmethod
    def from_code(cls, code, lo=0, hi=0):
        if code in (rk.CONVERGE_SAME, rk.CONVERGE_DISTINCT):
            return cls("BothConverge", code == rk.CONVERGE_SAME, (int(lo), int(hi)))
        if code == rk.CHAOTIC_ONE:
            return cls("Chaotic", chaotic="one")
        if code == rk.CHAOTIC_BOTH:
            return cls("Chaotic", chaotic="both")
        return cls(CLASS_NAMES[code])


def distance_estimate(z, dz):
    """Exterior distance ``|z| log|z| / |dz|`` (infinite when dz = 0)."""
    az = abs(z)
    if az <= 1:
        raise DomainError("distance estimate needs |z| beyond the escape radius")
    g = abs(dz)
    if g == 0:
        return math.inf
    return az * math.log(az) / g


def _kernel(name):
    fn = getattr(rk, name)
    return fn if HAVE_NUMBA else getattr(fn, "py_func", fn)


def classify_pixel(cfg: RasterConfig, point) -> PixelClass:
    """Pass-1 class of one parameter point (no structure-change marking)."""
    fam = FAMILIES[cfg.family]
    if fam < 0:
        raise ValueError("Henon pictures are classified by henon_grid")
    x, y = point
    code, lo, hi = _kernel("classify_point")(fam, float(cfg.sign), float(x), float(y),
                                             cfg.nmax, cfg.pmax, cfg.tol, cfg.px)
    return PixelClass.from_code(int(code), lo, hi)


def orbit_report(family, x, y, which=0, nmax=400, pmax=64, tol=1e-6, sign=1):
    """Outcome of one marked orbit: dict with outcome, distance, period."""
    fam = FAMILIES[family]
    sigma, p1, p2, resc = _kernel("_setup")(fam, float(x), float(y))
    s, d, p, c, z, jet = _kernel("_orbit")(fam, float(sign), which, sigma, p1, p2, resc, nmax, pmax, tol)
    names = {rk.ESCAPED: "escaped", rk.WANDERING: "wandering", rk.CONVERGED: "converged"}
    return {"outcome": names[int(s)], "distance": float(d), "period": int(p),
            "point": complex(z), "jet": float(jet)}


@dataclass
class RenderResult:
    config: RasterConfig
    classes: np.ndarray  # (height, width) class codes after pass 2
    periods: np.ndarray  # (height, width, 2)
    gray: np.ndarray  # uint8

    @property
    def pgm(self) -> bytes:
        return pgm_bytes(self.gray)

    def counts(self):
        if self.config.family == "henon":
            names = {1: "AttractingFound", 0: "BoundedOnly", -1: "NoneBounded"}
            vals = np.sign(self.classes)
        else:
            names = CLASS_NAMES
            vals = self.classes
        u, c = np.unique(vals, return_counts=True)
        return {names[int(k)]: int(n) for k, n in zip(u, c)}

    def metadata(self):
        from . import __version__
        meta = {"config": self.config.to_json(), "palette_version": self.config.palette,
                "library_version": __version__, "counts": self.counts()}
        if self.config.family == "henon":
            meta["seed"] = self.config.seed
        return meta

    def save(self, path):
        """Write the PGM and a ``<path>.json`` sidecar; returns the sidecar path."""
        write_pgm(path, self.gray)
        side = str(path) + ".json"
        write_json(side, self.metadata())
        return side


def classify_grid(cfg: RasterConfig, use_numba=None):
    """Pass-1 class codes and period pairs over the pixel centres."""
    fam = FAMILIES[cfg.family]
    xs, ys = grid_axes(cfg.window, cfg.width, cfg.height)
    cls = np.empty((cfg.height, cfg.width), dtype=np.int64)
    plo = np.empty_like(cls)
    phi = np.empty_like(cls)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    args = (fam, float(cfg.sign), xs, ys, cfg.nmax, cfg.pmax, cfg.tol, cfg.px, cls, plo, phi)
    if use_numba and HAVE_NUMBA:
        rk._classify_grid_nb(*args)
    else:
        rk._classify_grid_np(*args)
    return cls, plo, phi


def render(cfg: RasterConfig, threads=None, use_numba=None) -> RenderResult:
    prev = set_threads(threads) if threads else None
    try:
        if cfg.family == "henon":
            from .prototypes import henon_grid
            xs, ys = grid_axes(cfg.window, cfg.width, cfg.height)
            per = henon_grid(xs, ys, trials=cfg.trials, nwarm=cfg.nmax, pmax=min(cfg.pmax, 16),
                             tol=cfg.tol, seed=cfg.seed, use_numba=use_numba)
            gray = np.vectorize(HENON_PALETTE.get, otypes=[np.uint8])(np.sign(per))
            periods = np.stack([per, per], axis=-1)
            return RenderResult(cfg, per, periods, gray)
        cls, plo, phi = classify_grid(cfg, use_numba)
    finally:
        if prev is not None:
            set_threads(prev)
    if cfg.structure:
        sp = _kernel("structure_pass")
        cls = sp(cls, plo, phi)
    lut = np.zeros(max(PALETTE) + 1, dtype=np.uint8)
    for k, v in PALETTE.items():
        lut[k] = v
    gray = lut[cls]
    return RenderResult(cfg, cls, np.stack([plo, phi], axis=-1), gray)


def render_to_file(cfg: RasterConfig, path, threads=None, use_numba=None):
    res = render(cfg, threads, use_numba)
    res.save(path)
    return res


def contour_gray(values, step):
    """Black where the level floor(v / step) changes to the right or below, white elsewhere."""
    lev = np.floor(np.asarray(values) / step)
    edge = np.zeros(lev.shape, dtype=bool)
    edge[:, :-1] |= lev[:, :-1] != lev[:, 1:]
    edge[:-1, :] |= lev[:-1, :] != lev[1:, :]
    return np.where(edge, 0, 255).astype(np.uint8)


def backend():
    return backend_name()
