"""Named tolerances used by constructors, checks and tests.

Single source of truth: code and tests import these rather than repeating
literals.  Functions that enforce one accept a keyword override.
"""

# coefficient bijections (alpha <-> gamma) round-trip agreement
ROUNDTRIP_TOL = 1e-12

# factorization identities, unitarity residuals, weight sums
STRUCTURAL_TOL = 1e-10

# measure <-> coefficients round trip
MEASURE_ROUNDTRIP_TOL = 1e-8

# | |last coefficient| - 1 | at construction
UNIT_MODULUS_TOL = 1e-12

# eigenpair residuals and |eigenvalue| - 1
EIGEN_RESIDUAL_TOL = 1e-9

# minimal admissible spectral weight (cyclicity floor)
WEIGHT_FLOOR = 1e-14

# |Phi_k(z)| below this counts as a pole of the coefficient functions
POLE_TOL = 1e-14

# moment (Gram) matrix conditioning limit for measure -> coefficients
GRAM_COND_LIMIT = 1e12

# |1 - gamma_j| below this makes the phase factor numerically meaningless
DEGENERATE_PHASE_TOL = 1e-14

# minimal circular gap between atoms of a spectral measure
ATOM_GAP_TOL = 1e-10

# quadrature identity checks
QUAD_REL_TOL = 1e-6
