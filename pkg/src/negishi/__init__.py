"""Arrow-Debreu equilibria of finite-state exchange economies via planner weights."""

from .economy import Economy, EconomyError, check_allocation
from .equilibrium import (
    EquilibriumCertificate,
    IntegrabilityReport,
    NonConvergence,
    SolverOptions,
    VerificationReport,
    check_uniqueness_preconditions,
    excess_utility,
    excess_value,
    fixed_point_map,
    integrability_report,
    probe_multiplicity,
    solve,
    verify,
)
from .measure import AlignmentError, StateSpace, expectation, product_discretize, state_function
from .pareto import (
    AggregateSplit,
    NumericalFailure,
    aggregate_utility_value,
    dominance_oracle,
    pareto_allocation,
    split_state,
)
from .utility import (
    CRRA,
    CustomField,
    LogUtility,
    UtilityField,
    concavity_bound_check,
    marginal_times_c_monotone,
    validate_field,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateSplit",
    "AlignmentError",
    "CRRA",
    "CustomField",
    "Economy",
    "EconomyError",
    "EquilibriumCertificate",
    "IntegrabilityReport",
    "LogUtility",
    "NonConvergence",
    "NumericalFailure",
    "SolverOptions",
    "StateSpace",
    "UtilityField",
    "VerificationReport",
    "aggregate_utility_value",
    "check_allocation",
    "check_uniqueness_preconditions",
    "concavity_bound_check",
    "dominance_oracle",
    "excess_utility",
    "excess_value",
    "expectation",
    "fixed_point_map",
    "integrability_report",
    "marginal_times_c_monotone",
    "pareto_allocation",
    "probe_multiplicity",
    "product_discretize",
    "solve",
    "split_state",
    "state_function",
    "validate_field",
    "verify",
]
