"""Orders of Q(i)-central cyclic division algebras as matrix lattices."""

from .algebra import (
    AlgebraElement,
    AlgebraSpec,
    ExtensionField,
    FieldElement,
    QAlgebraElement,
    UnitData,
    invert,
    is_unit,
    reduced_norm,
    same_left_ideal,
    same_unit_coset,
)
from .analysis import (
    BallCensus,
    GrowthFit,
    census_grid,
    det_sum,
    epstein_sum,
    fit_growth,
    ideal_index,
    mismatch_check,
    oe_unit_count,
    partial_zeta,
    unit_census,
)
from .config import load_spec, validate_config
from .dmt import (
    SimConfig,
    SimResult,
    build_codebook,
    dmt_reference,
    estimate_diversity,
    run_simulation,
    simulate_error_rate,
)
from .errors import (
    BudgetExceededError,
    CdaError,
    ConfigError,
    InternalConsistencyError,
    ZeroElementError,
)
from .gaussian import GaussianInt
from .lattice import LatticePoint, MatrixLattice, build_lattice, count_points, enumerate_ball

__version__ = "0.1.0"
