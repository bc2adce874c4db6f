"""Projective Markov logic networks in the two-variable fragment.

Exact lifted inference for quantifier-free two-variable MLNs, a decision
procedure for projectivity, conversion to and from relational block models,
sampling, and maximum-likelihood learning, all cross-checked against
brute-force enumeration at small domain sizes.
"""

from .blockmodel import (
    BlockModel,
    block_model_from_normal_form,
    fit_block_model,
    format_block_model,
    parse_block_model,
)
from .errors import (
    EnumerationCapError,
    Error,
    NotConvergedError,
    NotProjectiveError,
    ParseError,
    ValidationError,
)
from .fol import (
    Atom,
    And,
    Distinct,
    Formula,
    Iff,
    Implies,
    Language,
    LiftedInterpretation,
    Not,
    OneType,
    Or,
    TwoTable,
    evaluate_lifted,
    n_ij,
    n_ijl,
    parse_formula,
    parse_language,
)
from .learn import (
    ConsistencyReport,
    DominanceRecord,
    FitResult,
    compare_with_rbm,
    fit_projective_mln,
    projective_log_likelihood,
    subsample_consistency_experiment,
)
from .mln import (
    HARD,
    MLN,
    NormalForm,
    fomc,
    fomc_oracle,
    format_mln,
    grounding_log_weight,
    normalize,
    parse_mln,
    partition_function,
    partition_function_oracle,
    world_log_weight,
    world_probability,
)
from .projectivity import (
    ProjectivityVerdict,
    check_projective,
    check_sigma_consequence,
    is_sigma_determinate,
    projective_log_partition,
    verify_marginal_consistency,
)
from .worlds import (
    SufficientStats,
    World,
    enumerate_worlds,
    format_world,
    parse_world,
    restrict,
    stats,
    world_from_atoms,
)

__version__ = "0.1.0"
