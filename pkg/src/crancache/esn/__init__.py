"""Echo-state predictors and their memory-capacity analytics."""
from .content import (CONTEXT_FEATURES, ContentEsn, project_to_simplex,
                      require_context, require_distribution)
from .memory import (empirical_memory_capacity, memory_capacity,
                     memory_capacity_bounds)
from .mobility import (LocationGrid, MobilityEsn, WeightDistribution,
                       build_cycle_reservoir, ridge_train)

__all__ = [
    "CONTEXT_FEATURES",
    "ContentEsn",
    "LocationGrid",
    "MobilityEsn",
    "WeightDistribution",
    "build_cycle_reservoir",
    "empirical_memory_capacity",
    "memory_capacity",
    "memory_capacity_bounds",
    "project_to_simplex",
    "require_context",
    "require_distribution",
    "ridge_train",
]
