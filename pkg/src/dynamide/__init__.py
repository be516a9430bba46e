"""Numerical laboratory for the dynamide-lattice vacuum model."""
from ._accel import backend_name
from .constants import PhysicalConstants, SpringParams, UnitSystem, make_constants

__version__ = "0.1.0"

__all__ = ["PhysicalConstants", "SpringParams", "UnitSystem", "make_constants", "backend_name", "__version__"]
