"""Selection of discrete PML absorption profiles by minimal average reflectivity."""

from pml_select.errors import PmlSelectError
from pml_select.objective import ObjectiveSpec, average_reflectivity, optimize_profile
from pml_select.profiles import Family, Legacy, Power, RationalMinus, RationalPlus, parse_profile
from pml_select.reflectivity import GridSpec, reflection

__version__ = "0.1.0"

__all__ = [
    "Family",
    "GridSpec",
    "Legacy",
    "ObjectiveSpec",
    "PmlSelectError",
    "Power",
    "RationalMinus",
    "RationalPlus",
    "average_reflectivity",
    "optimize_profile",
    "parse_profile",
    "reflection",
]
