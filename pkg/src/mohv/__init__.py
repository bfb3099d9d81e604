"""Multi-objective black-box optimization with hypervolume scalarizations."""

__version__ = "0.1.0"

from .pareto import (  # noqa: E402
    ParetoArchive,
    dominates,
    hypervolume_exact,
    hypervolume_exact_2d,
    hypervolume_grid_oracle,
    pareto_front,
)
from .scalarization import (  # noqa: E402
    Scalarization,
    c_k,
    chebyshev_scalarization,
    estimate_hypervolume_mc,
    hypervolume_scalarization,
    linear_scalarization,
    required_samples,
    sample_weight,
)

__all__ = [
    "ParetoArchive",
    "Scalarization",
    "c_k",
    "chebyshev_scalarization",
    "dominates",
    "estimate_hypervolume_mc",
    "hypervolume_exact",
    "hypervolume_exact_2d",
    "hypervolume_grid_oracle",
    "hypervolume_scalarization",
    "linear_scalarization",
    "pareto_front",
    "required_samples",
    "sample_weight",
]
