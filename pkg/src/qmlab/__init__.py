"""qmlab: exact quasimorphism and bounded 2-cocycle computations on free
groups, plus seeded Monte Carlo experiments over lazy simple random walks."""

from .cocycles import (
    BoundedCocycle,
    RestrictionWitness,
    TwistWitness,
    check_restriction_homogeneous,
    coboundary_cocycle,
    cocycle_identity_residual,
    find_twist_witness,
    from_inhomogeneous,
    homogeneous_sum_residual,
    propagate_twist,
    restriction_nontrivial,
    tetrahedron_gap,
    to_inhomogeneous,
)
from .errors import ConfigError, InputError, PreconditionError, QmlabError, RefusalError
from .experiments import (
    ExperimentParams,
    ExperimentReport,
    cocycle_from_descriptor,
    identity_checks,
    identity_suite,
    random_subgroup_pipeline,
    twist_branch_census,
    twisted_probability,
    wilson_interval,
)
from .quasimorphisms import (
    Quasimorphism,
    brooks,
    defect_lower_bound,
    delta1,
    homogenize_exact,
    homogenize_numeric,
    linear_combination,
    numeric_homogenization,
    parse_descriptor,
)
from .subgroups import FreePairCertificate, SubgroupGraph, certify_free_pair, stallings_graph
from .version import __version__
from .walks import (
    Trajectory,
    Walker,
    WalkConfig,
    default_step_set,
    default_walk_config,
    make_walker,
    sample_pair,
    sample_position,
    sample_trajectory,
)
from .words import (
    Alphabet,
    Word,
    ball,
    count_occurrences,
    enumerate_words,
    parse_word,
    periodic_count,
    random_reduced_word,
)

__all__ = [
    "__version__",
    "Alphabet",
    "Word",
    "parse_word",
    "count_occurrences",
    "periodic_count",
    "enumerate_words",
    "ball",
    "random_reduced_word",
    "Quasimorphism",
    "brooks",
    "homogenize_exact",
    "homogenize_numeric",
    "numeric_homogenization",
    "linear_combination",
    "delta1",
    "defect_lower_bound",
    "parse_descriptor",
    "BoundedCocycle",
    "TwistWitness",
    "RestrictionWitness",
    "coboundary_cocycle",
    "to_inhomogeneous",
    "from_inhomogeneous",
    "cocycle_identity_residual",
    "check_restriction_homogeneous",
    "homogeneous_sum_residual",
    "tetrahedron_gap",
    "propagate_twist",
    "find_twist_witness",
    "restriction_nontrivial",
    "SubgroupGraph",
    "FreePairCertificate",
    "stallings_graph",
    "certify_free_pair",
    "WalkConfig",
    "Walker",
    "Trajectory",
    "default_step_set",
    "default_walk_config",
    "make_walker",
    "sample_position",
    "sample_pair",
    "sample_trajectory",
    "ExperimentParams",
    "ExperimentReport",
    "wilson_interval",
    "cocycle_from_descriptor",
    "twisted_probability",
    "twist_branch_census",
    "random_subgroup_pipeline",
    "identity_suite",
    "identity_checks",
    "QmlabError",
    "InputError",
    "ConfigError",
    "PreconditionError",
    "RefusalError",
]
