"""Double-slit decoherence of a free Brownian particle in an Ohmic bath."""

__version__ = "0.1.0"

from .correlators import (  # noqa: F401
    UNBOUNDED,
    BathCorrelators,
    ScenarioParams,
    Timescales,
    correlator,
    timescales,
    width_squared,
)
from .errors import (  # noqa: F401
    BrownslitError,
    ConvergenceError,
    GridError,
    ParameterError,
    UnsupportedRegimeError,
)
