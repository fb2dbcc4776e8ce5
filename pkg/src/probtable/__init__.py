"""Vector representation of states and outcomes from probability data tables."""

__version__ = "0.1.0"

from .distinguishability import (
    DistinguishabilityReport,
    boundary_witness,
    max_distinguishable,
    max_weight_through,
    witness_submatrix,
)
from .errors import (
    DegenerateTable,
    DimensionMismatch,
    InconsistentRank,
    InconsistentTable,
    InputError,
    InvalidModel,
    InvalidWeights,
    MixedMeasurements,
    NotDistinguishable,
    NotHermitian,
    NotSpanning,
    OutOfDomain,
    ProbTableError,
    SearchBudgetExceeded,
    SingularBasis,
    SolverFailure,
    TableSyntaxError,
    ValidationError,
)
from .factorization import (
    Factorization,
    OutcomeVector,
    StateVector,
    factorize,
    factorize_by_outcomes,
    probability,
    rank_of,
)
from .geometry import (
    GeometryReport,
    TrivialVector,
    analyze_geometry,
    coarse_grain,
    extreme_states,
    mix_outcomes,
    outcome_region_contains,
    region_symmetry_check,
    trivial_vector,
)
from .numeric import DEFAULT_TOL, EXACT, FLOAT, Arith
from .quantum import (
    QuantumModel,
    generate_table,
    gram_schmidt_basis,
    hermitian_basis,
    qubit_fixture,
    vectorize,
)
from .state_maps import StateMap, apply, check_trivial_constraint, dual_map, linearize
from .table import (
    Measurement,
    MeasurementLayout,
    ProbabilityTable,
    add_mixture_state,
    convert_mode,
    parse_table,
    serialize_table,
)

__all__ = [
    "__version__",
    "Arith",
    "DEFAULT_TOL",
    "DistinguishabilityReport",
    "EXACT",
    "FLOAT",
    "Factorization",
    "GeometryReport",
    "Measurement",
    "MeasurementLayout",
    "OutcomeVector",
    "ProbabilityTable",
    "QuantumModel",
    "StateMap",
    "StateVector",
    "TrivialVector",
    "add_mixture_state",
    "analyze_geometry",
    "apply",
    "boundary_witness",
    "check_trivial_constraint",
    "coarse_grain",
    "convert_mode",
    "dual_map",
    "extreme_states",
    "factorize",
    "factorize_by_outcomes",
    "generate_table",
    "gram_schmidt_basis",
    "hermitian_basis",
    "linearize",
    "max_distinguishable",
    "max_weight_through",
    "mix_outcomes",
    "outcome_region_contains",
    "parse_table",
    "probability",
    "qubit_fixture",
    "rank_of",
    "region_symmetry_check",
    "serialize_table",
    "trivial_vector",
    "vectorize",
    "witness_submatrix",
    "DegenerateTable",
    "DimensionMismatch",
    "InconsistentRank",
    "InconsistentTable",
    "InputError",
    "InvalidModel",
    "InvalidWeights",
    "MixedMeasurements",
    "NotDistinguishable",
    "NotHermitian",
    "NotSpanning",
    "OutOfDomain",
    "ProbTableError",
    "SearchBudgetExceeded",
    "SingularBasis",
    "SolverFailure",
    "TableSyntaxError",
    "ValidationError",
]
