"""Entropy minimisation and quadratic stability checks for block-diagonal quantum states."""
from .blocks import (
    BlockDecomposition,
    BlockState,
    assemble,
    blockwise_bound_check,
    blockwise_trace_distance,
    decompose,
    entropy_of_blockstate,
    is_block_diagonal,
)
from .constraints import (
    BlockConvexSet,
    Full,
    Hull,
    MarginalPolytope,
    Singleton,
    contains,
    extreme_marginals,
    member_check,
    sample_conditional,
    sample_marginal,
    sample_member,
)
from .core import (
    eigh,
    max_mass_bounds,
    purity,
    relative_entropy,
    shannon_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .fixtures import load_fixture
from .io import parse_spec
from .minimizer import (
    MinimizerDescription,
    conditional_min_entropy,
    distance_to_minimizers,
    minimize_entropy,
    nearest_pure_block,
)
from .stability import (
    NOT_APPLICABLE,
    SharpnessReport,
    StabilityReport,
    assemble_constant,
    estimate_c1,
    gibbs_from_observable,
    gibbs_verify,
    quantum_sharpness_family,
    sharpness_family,
    verify_stability,
)

__version__ = "0.1.0"
