"""Non-asymptotic capacity bounds for lossy bosonic channels with memory.

The memory channel factorises into independent pure-loss modes whose
transmissivities are squared singular values of a lower-triangular Toeplitz
matrix.  This package builds those matrices, bounds how far their singular
value statistics are from the symbol average at finite n, and turns that into
computable lower bounds on the n-shot quantum, two-way and secret-key
capacities.
"""

__version__ = "0.1.0"

from .errors import (
    BandTooWide,
    ConvergenceFailure,
    DivergentCapacity,
    DomainError,
    MemcapError,
    QuadratureBudgetExceeded,
    TruncationBudgetExceeded,
    UnreachableTarget,
    ZeroCapacityRegion,
)
from .symbol import (
    ChannelParams,
    CirculantMatrix,
    CoefficientSequence,
    SingularSpectrum,
    ToeplitzCorner,
    build_circulant,
    build_toeplitz,
    channel_coefficients,
    derivative_l2_norm,
    effective_transmissivity,
    laguerre_minus_one,
    max_transmissivity,
    mode_transmissivities,
    singular_values,
    symbol_eval,
)
from .capacities import (
    CapacityKind,
    NShotBound,
    asymptotic_capacity,
    epsilon_penalty,
    exact_sum_lower_bound,
    memoryless_nshot_bounds,
    nshot_lower_bound,
    positive_q_region,
    pure_loss_capacity,
    theorem1_constant,
    uses_needed,
)
from .avram_parter import (
    ErgodicReport,
    StepBounds,
    TestFunction,
    ap_error_bound,
    capped_test_function,
    ergodic_average,
    ergodic_report,
    optimal_band,
    step_bounds,
    symbol_integral,
)
