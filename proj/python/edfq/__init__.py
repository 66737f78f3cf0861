"""EDF-b queue simulator, fluid-limit solver and convergence harness."""

from ._edfq import (  # noqa: F401
    DistributionSpec,
    FiniteMeasure,
    chi,
    compare,
    example,
    fluid_solve,
    kolmogorov_distance,
    prohorov_upper_bound,
    simulate,
    y_star,
    __version__,
)
