from rich.traceback import install

from sqw.analytic import ModeSpec, initial_mode, mode_field, propagate_mode
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam, PotentialSpec, make_grid, nondimensionalize

__version__ = "0.1.0"

install(show_locals=True)

__all__ = [
    "__version__",
    "ModeSpec",
    "initial_mode",
    "mode_field",
    "propagate_mode",
    "ComplexField2D",
    "Grid2D",
    "ParticleBeam",
    "PotentialSpec",
    "make_grid",
    "nondimensionalize",
]
