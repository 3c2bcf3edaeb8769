"""Pseudospectral simulator for the Hartree-type Schrodinger equation.

The heavy lifting lives in the compiled extension ``hartree_sim._core``;
this package re-exports its public surface.
"""

from ._core import (
    __version__,
    analyze,
    beta_l1_norm,
    evolve,
    grid_coordinates,
    kernel_integral,
    linear_propagate,
    norms,
    sample_gaussian,
)

__all__ = [
    "__version__",
    "analyze",
    "beta_l1_norm",
    "evolve",
    "grid_coordinates",
    "kernel_integral",
    "linear_propagate",
    "norms",
    "sample_gaussian",
]
