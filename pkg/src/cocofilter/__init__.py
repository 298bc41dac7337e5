"""CoCo bond pricing under short-term uncertainty.

A grid-based Bayes filter for the partially observed fundamental process,
closed-form barrier survival, measure-change pricing, and a Monte Carlo
oracle that independently verifies every analytic component.
"""

__version__ = "0.1.0"

from .errors import (
    CocoError,
    ConfigError,
    ConversionTriggeredError,
    DegenerateKernelError,
    DomainError,
    InvariantViolationError,
    MeasureMismatchError,
    OracleStarvationError,
    PosteriorCollapseError,
)
from .filtering import (
    PosteriorDensity,
    TransitionKernelInputs,
    kernel_h,
    posterior_step,
    reset_at_update,
    run_filter,
)
from .hitting import bridge_no_hit, first_passage_cdf, survival_closed_form
from .measures import Measure, MeasureDrifts, drifts_under, rn_weight
from .model import (
    ModelParams,
    ObservationRecord,
    UpdateSchedule,
    barrier_level,
    floor_of,
)
from .oracle import (
    MCEstimate,
    PathBundle,
    conditional_posterior_oracle,
    first_passage_probability,
    simulate_bundle,
    simulate_terminal,
    survival_oracle,
)
from .pricing import (
    CompensatorPath,
    PriceQuote,
    SurvivalReport,
    UpdateScenario,
    compensator_path,
    conditional_survival,
    price,
    survival_report,
)

__all__ = [
    "CocoError",
    "ConfigError",
    "ConversionTriggeredError",
    "DegenerateKernelError",
    "DomainError",
    "InvariantViolationError",
    "MeasureMismatchError",
    "OracleStarvationError",
    "PosteriorCollapseError",
    "PosteriorDensity",
    "TransitionKernelInputs",
    "kernel_h",
    "posterior_step",
    "reset_at_update",
    "run_filter",
    "bridge_no_hit",
    "first_passage_cdf",
    "survival_closed_form",
    "Measure",
    "MeasureDrifts",
    "drifts_under",
    "rn_weight",
    "ModelParams",
    "ObservationRecord",
    "UpdateSchedule",
    "barrier_level",
    "floor_of",
    "MCEstimate",
    "PathBundle",
    "conditional_posterior_oracle",
    "first_passage_probability",
    "simulate_bundle",
    "simulate_terminal",
    "survival_oracle",
    "CompensatorPath",
    "PriceQuote",
    "SurvivalReport",
    "UpdateScenario",
    "compensator_path",
    "conditional_survival",
    "price",
    "survival_report",
    "__version__",
]
