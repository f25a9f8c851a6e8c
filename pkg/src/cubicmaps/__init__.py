"""Real and complex cubic maps: moduli, loci, regions, entropy, hyperbolic centers, pictures."""
__version__ = "0.1.0"

from .core import MonicForm, ModuliPoint, GeneralCubic, normalize, critical_points, iterate
from .classifier import RegionClass, region_class, curve_region_class, hull_interval
from .entropy import entropy_estimate, lap_sequence, entropy_grid
from .hyperbolic import builtin_center_table, verify_center, refine_center, detect_cycle, classify_behavior
from .raster import RasterConfig, render, classify_pixel

__all__ = [
    "MonicForm", "ModuliPoint", "GeneralCubic", "normalize", "critical_points", "iterate",
    "RegionClass", "region_class", "curve_region_class", "hull_interval",
    "entropy_estimate", "lap_sequence", "entropy_grid",
    "builtin_center_table", "verify_center", "refine_center", "detect_cycle", "classify_behavior",
    "RasterConfig", "render", "classify_pixel",
]
