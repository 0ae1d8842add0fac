"""Numerical engine for the first moment of L(1/2, f) L(1/2, Sym^2 f) over
holomorphic newforms of even weight and prime level: exact character sums
with closed-form identities, trace-formula diagonals and off-diagonals,
quadratic large-sieve scans, and a direct non-vanishing path on ingested
Hecke eigenvalue data."""

from .afe import (
    AfeValue,
    ResidueConstants,
    WeightSpec,
    afe_L_f,
    afe_L_sym2,
    fit_v_log_slope,
    gamma_box,
    residue_constants,
    weight_V,
    weight_W,
)
from .arith import (
    ModularContext,
    SquarefreePowerfulSplit,
    epsilon_factor,
    euler_phi,
    factorize,
    is_prime,
    jacobi_symbol,
    mod_inverse,
    powerful_split,
)
from .errors import (
    CapacityError,
    ContourSymmetryError,
    CoverageError,
    DomainError,
    LmomentError,
    NotInvertibleError,
    ParseError,
    UnsupportedCaseError,
    ValidationError,
)
from .expsums import (
    CharSumParams,
    ComplexValue,
    additive_char,
    charsum_o1_bruteforce,
    charsum_o1_closed,
    charsum_o2_bruteforce,
    gauss_quadratic,
    kloosterman,
    salie_type_sum,
    weil_bound,
)
from .moment import (
    MomentReport,
    PoissonCheck,
    TruncationPolicy,
    asymptotic_fit,
    diagonal_delta1,
    diagonal_delta2,
    dyadic_window,
    moment_total,
    offdiag_o1,
    offdiag_o2,
    poisson_crosscheck,
    smooth_bump,
)
from .sieve import SieveScanConfig, alpha_count, character_double_sum, sieve_ratio, sieve_scan
from .specdata import (
    EigenvalueRecord,
    NonvanishingReport,
    load_bundled_sample,
    nonvanishing_report,
    parse_eigenfile,
    serialize_records,
)
from .specfun import ContourSpec, LogScaledReal, bessel_j, inverse_mellin, log_gamma, zeta, zeta_deriv
from .verify import SweepResult, charsum_identity_sweep

__version__ = "0.1.0"
