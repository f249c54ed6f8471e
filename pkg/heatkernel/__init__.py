"""Subelliptic heat kernel, distance and functional-inequality constants on SL(2,R)."""

from heatkernel.distance import distance_squared, solve_theta
from heatkernel.kernel import PROBABILITY, STANDARD, Convention, kernel_grid, p_axis, p_integral
from heatkernel.quadrature import QuadSpec

__all__ = [
    "Convention", "PROBABILITY", "QuadSpec", "STANDARD",
    "distance_squared", "kernel_grid", "p_axis", "p_integral", "solve_theta",
]
