"""corrlab: spacing statistics of dilated power sequences mod 1.

Point-set statistics (discrepancy, window-count moments, pair and triple
correlations), the modular counting tables behind them, prime-denominator
Diophantine approximation, and the dilation-space obstruction computation,
with every nontrivial quantity backed by an independent oracle.
"""

from .correlations import (
    CorrelationResult,
    TestKernel,
    box1d,
    box2d,
    box_kernel,
    generic_correlation,
    kernel_eval,
    kernel_integral,
    moment_identity_report,
    pair_correlation,
    pyramid,
    triangle,
    triple_correlation,
)
from .diophantine import (
    ContinuedFraction,
    RationalApprox,
    continued_fraction,
    partial_quotient_sum,
    prime_denominator_approx,
    squarefree_part,
)
from .errors import (
    AlphaParseError,
    BudgetError,
    CorrlabError,
    PrecisionError,
    PreconditionError,
    VerificationError,
)
from .modcount import (
    CongruenceTable,
    a0_table,
    a_table,
    bad_set,
    compute_D,
    count_A,
    count_A0_brute,
    count_A0_closed,
    delta,
    delta_sq_sum,
    delta_star_table,
    delta_table,
    exp_sum_S,
    f_count,
    f_radius,
    square_root_counts,
)
from .numeric import (
    AlphaValue,
    alpha_from_cf,
    alpha_golden,
    alpha_pi_frac,
    alpha_rational,
    alpha_sqrt,
    frac_dilate,
    gauss_sum,
    is_prime,
    legendre_symbol,
    mod_inverse,
    parse_alpha_spec,
    primes_in,
    signed_frac,
)
from .pipeline import (
    ObstructionReport,
    SandwichBox,
    SandwichReport,
    diophantine_count,
    obstruction_growth_exponent,
    obstruction_report,
    sandwich_bounds,
)
from .sequences import (
    PointSet,
    WindowStats,
    dilated_points,
    discrepancy,
    poisson_moment,
    simulate_counts,
    window_moment,
    window_stats,
)

__version__ = "0.1.0"
