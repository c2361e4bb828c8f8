"""Alternating resolvent iterations for two maximal monotone operators,
with computable rates of metastability and an oracle that checks them on
simulated orbits."""

from .iterations import Scenario, Trajectory
from .nat import TOP, Nat, nat
from .operators import (
    LinearPSD,
    NormalConeBall,
    NormalConeBox,
    NormalConeHalfspace,
    Quadratic,
    Translated,
    Zero,
)
from .schedules import builtin, make_bundle

__version__ = "0.1.0"

__all__ = [
    "Nat",
    "TOP",
    "nat",
    "Scenario",
    "Trajectory",
    "Zero",
    "LinearPSD",
    "Quadratic",
    "NormalConeBox",
    "NormalConeBall",
    "NormalConeHalfspace",
    "Translated",
    "builtin",
    "make_bundle",
]
