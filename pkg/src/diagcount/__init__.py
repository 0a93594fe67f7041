"""diagcount: exact counting and circle-method predictions for systems of
multihomogeneous diagonal equations.

The package has two faces that check each other: an exact counting engine
(boxes, primitive solutions, bounded-height classes) and an analytic
predictor (singular series, singular integral, zeta and parity factors).
"""

from .instance import ProblemInstance, instance_from_dict, load_instance, save_instance
from .errors import (BudgetError, ConsistencyError, StructureError,
                     UnsupportedConfigurationError)

__version__ = "0.1.0"

__all__ = [
    "ProblemInstance", "instance_from_dict", "load_instance", "save_instance",
    "BudgetError", "ConsistencyError", "StructureError",
    "UnsupportedConfigurationError",
    "__version__",
]
