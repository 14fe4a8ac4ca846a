"""Approximate Rips towers from shifted integer lattices and barycentric spans."""

from .errors import BudgetError, InputError, MalformedStreamError, ShiftLatticeError
from .geometry import Metric, PointCloud, load_points, scale_bounds, write_points
from .lattice import LatticeHierarchy, build_hierarchy, locate, vertex_map
from .persistence import Bar, Barcode, bottleneck_log, reduce, tower_to_filtration
from .rips import FilteredComplex, build_rips
from .tower import Tower, build_tower, read_events, replay

__all__ = [
    "Bar", "Barcode", "BudgetError", "FilteredComplex", "InputError", "LatticeHierarchy",
    "MalformedStreamError", "Metric", "PointCloud", "ShiftLatticeError", "Tower",
    "bottleneck_log", "build_hierarchy", "build_rips", "build_tower", "load_points", "locate",
    "read_events", "reduce", "replay", "scale_bounds", "tower_to_filtration", "vertex_map",
    "write_points",
]
