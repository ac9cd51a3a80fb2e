"""Plant models driven by the receding-horizon controller."""

from .base import IntegrationError, PlantModel
from .cstr import CstrPlant, cstr_rhs, cstr_step
from .linear import LinearAdditivePlant, linear_step

__all__ = [
    "CstrPlant",
    "IntegrationError",
    "LinearAdditivePlant",
    "PlantModel",
    "cstr_rhs",
    "cstr_step",
    "linear_step",
]
