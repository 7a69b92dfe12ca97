"""Height bounds for S-unit equations over Q and real quadratic fields."""

from .baker_bounds import BoundReport, InjectedConstants, SUnitEquation, sunit_bound
from .number_fields import RATIONALS, AlgebraicNumber, FieldDescriptor, Place, PlaceSet
from .sunit_solver import enumerate_solutions, verify_bound

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber",
    "BoundReport",
    "FieldDescriptor",
    "InjectedConstants",
    "Place",
    "PlaceSet",
    "RATIONALS",
    "SUnitEquation",
    "enumerate_solutions",
    "sunit_bound",
    "verify_bound",
]
