"""Belief functions on finite frames: combination, transforms, credal and
geometric tools, frame lattices, total belief and Belief Modeling Regression."""

__version__ = "0.1.0"

from .errors import (
    ComputationError,
    EnumerationCapError,
    EvidentialError,
    FrameMismatchError,
    NonCombinableError,
    NotABeliefFunctionError,
    SingularSystemError,
    UnsolvedInstanceError,
    ValidationError,
    ZeroSingletonBeliefError,
)
from .frame_core import (
    Frame,
    MassFunction,
    Subset,
    belief,
    belief_values,
    classify,
    core,
    is_bayesian,
    is_consonant,
    mobius_inverse,
    plausibility,
    plausibility_values,
    weakly_includes,
)
from .combination import (
    ConflictReport,
    combinable,
    conjunctive_combine,
    dempster_combine,
    dempster_condition,
    discount,
    geometric_condition,
    orthogonal_sum,
    weight_of_conflict,
)
from .transforms import (
    ProbabilityDistribution,
    bayesian_from_likelihoods,
    consonant_from_likelihoods,
    dirichlet_from_likelihoods,
    pignistic,
    relative_belief,
    relative_plausibility,
)
from .geometry import (
    BeliefVector,
    binary_canonical_decomposition,
    binary_dempster_geometric,
    binary_foci,
    conditional_subspace_vertices,
    convex_combination,
    credal_generators,
    credal_vertices,
    l1_consistent_constant,
    l1_distance,
    to_belief_vector,
)
from .frames_algebra import (
    FrameFamily,
    PartitionFrame,
    Refining,
    is_independent_IF,
    lattice_relations,
    maximal_coarsening,
    minimal_refinement,
    restriction,
    vacuous_extension,
)
from .total_belief import (
    TotalBeliefProblem,
    build_system,
    candidate_columns,
    solution_graph,
    solve_restricted_cell,
    solve_total,
    verify_total,
)
from .bmr import (
    EvidentialModel,
    TrainingSet,
    fit_em_1d,
    interval_estimate,
    learn_model,
    point_estimate,
    predict_belief,
)
