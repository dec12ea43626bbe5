"""Non-overshooting second-order sliding-mode control: gains, laws, plants, simulation."""
from . import control, gains, plant, sliding
from .errors import NosmcError

__version__ = "0.1.0"

__all__ = ["control", "gains", "plant", "sliding", "NosmcError", "__version__"]
