"""Circular Jacobi beta-ensemble: matrix models, exact samplers, asymptotics."""

from .analysis import (
    EmpiricalMeasure,
    GridMeasure,
    LimitParams,
    RateReport,
    b_const,
    b_const_finite_n,
    haar_grid,
    ks_distance,
    limit_params,
    log_partition_zst,
    mellin_fourier,
    moment_one_minus_gamma,
    mu_d_cdf,
    mu_d_grid,
    mu_d_moment,
    partition_zst,
    potential_q,
    rate_function,
    sigma_energy,
    w_d,
    weight_gap_stat,
)
from .errors import (
    CircJacobiError,
    ConvergenceError,
    DegenerateCoefficientError,
    InvariantError,
    NonCyclicVectorError,
    NumericDegeneracyError,
    ParameterError,
    PoleError,
    TruncationWarning,
)
from .models import (
    DenseUnitary,
    EigenDecomposition,
    agr_product,
    cmv_from_alpha,
    eigen_unitary,
    ggt_from_alpha,
    reflection_product,
    sample_cj_matrix,
    sample_cj_spectrum,
    spectral_measure,
)
from .opuc import (
    DeformedCoeffs,
    EnsembleParams,
    MonicPolyPair,
    SpectralMeasure,
    VerblunskyCoeffs,
    alpha_from_gamma,
    caratheodory_schur,
    char_poly_at_one,
    gamma_from_alpha,
    gamma_functions_at,
    szego_polynomials,
    szego_step,
    verblunsky_from_measure,
)
from .sampling import (
    DiskDensitySpec,
    SeededRng,
    complex_log_gamma,
    gamma_k_density,
    lambda_delta_density,
    sample_beta,
    sample_dirichlet,
    sample_eta,
    sample_eta_batch,
    sample_gamma_k,
    sample_gamma_shape,
    sample_lambda_delta,
    sample_nu_s,
)

__version__ = "0.1.0"
