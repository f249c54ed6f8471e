"""Shared tolerances, cutoffs and default grids."""

import math

# ── Chart cutoffs ─────────────────────────────────────────────────────────────
# Operators with 1/sinh or 1/tanh coefficients refuse points closer to the axis.
AXIS_CUTOFF = 1e-8

# p_integral hands over to the closed form below this radius.
AXIS_DELEGATE_R = 1e-7

# distance_squared routes to the exact axis formulas inside these bands.
CASE_TOL = 1e-9

# asym_r is singular at the axis; refuse smaller radii.
ASYM_R_CUTOFF = 1e-6

# Slack allowed on |z| <= pi before a point is declared outside the chart.
Z_CHART_SLACK = 1e-12

# ── Group elements ────────────────────────────────────────────────────────────
DET_TOL = 1e-10

# matrix_to_cyl accepts (a11+a22)^2 + (a12-a21)^2 down to 4 minus this.
CHART_TOL = 1e-9

# ── Finite differences ────────────────────────────────────────────────────────
# First derivatives: h = max(FD_STEP, FD_STEP * |x|); second derivatives use
# the larger FD_STEP_2 so two levels of cancellation stay above rounding.
FD_STEP = 1e-5
FD_STEP_2 = 1e-4

# Richardson finite differences of the kernel on a shared contour.
KERNEL_FD_STEP = 2e-3

# ── Series switches ───────────────────────────────────────────────────────────
ARCH_SERIES_RADIUS = 1e-4
SINH_RATIO_SERIES = 1e-4
HEISENBERG_SERIES = 1e-4

# ── Quadrature defaults ───────────────────────────────────────────────────────
DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
DEFAULT_MAX_LEVELS = 20

# The shifted contour stays this far (in Im y) from the branch point of arccosh.
CONTOUR_MARGIN = 0.1

# Relative size of the integrand at the truncation point.
TRUNCATION_LOG_TOL = math.log(1e-18)

# Composite Gauss-Legendre order of the vectorized kernel rule, and the
# embedded lower order used for its error estimate.
GL_ORDER = 16
GL_ORDER_LOW = 8

# Points processed per vectorized chunk.
GRID_CHUNK = 256

# Geometric grading of the quadrature panels near y = 0, as fractions of the
# truncation length.
GRADING_START = 1e-4
GRADING_STOP = 1.0 / 32.0

# ── Kernel conventions ────────────────────────────────────────────────────────
# The displayed integral representation integrates to 1/2 over the universal
# cover; "probability" rescales it to a density of mass 1.
NORMALIZATION_SCALE = {"standard": 1.0, "probability": 2.0}

# Fiber images whose axis value falls below this fraction of the peak are skipped.
IMAGE_RELEVANCE = 1e-17

# Mass of the displayed hyperbolic kernel s_t against (x^2 - 1)^(1/2) dx.
HYPERBOLIC_MASS = 1.0 / (4.0 * math.pi)

# ── Root finding ──────────────────────────────────────────────────────────────
THETA_RESIDUAL_TOL = 1e-12
THETA_MAX_ITER = 200

# ── Small-time extrapolation ──────────────────────────────────────────────────
LEANDRE_T_GRID = (0.04, 0.02, 0.01)
LEANDRE_MAX_SPREAD = 0.5

# ── Support boxes for 2-D integrals over mu ───────────────────────────────────
# Region {d^2 / 4t - r + t <= SUPPORT_LEVEL} captures all but ~e^(-SUPPORT_LEVEL)
# of the mass; r accounts for the net exponential growth of p_t mu.
SUPPORT_LEVEL = 45.0
SUPPORT_R_MAX = 60.0
SUPPORT_PAD = 1.2

# Dilated tensor rule: panel widths in (rho, zeta) = (r / sqrt(t), z / t).
MU_RHO_PANEL = 0.5
MU_ZETA_PANEL = 1.0
MU_ORDER = 8

# Kernel values below this are treated as zero inside ln p.
DENSITY_FLOOR = 1e-300

# ── Heisenberg group ──────────────────────────────────────────────────────────
HEISENBERG_PREFACTOR = 1.0 / (16.0 * math.pi**2)
HEISENBERG_R_MAX = 8.0
HEISENBERG_Z_MAX = 40.0

# ── Monte Carlo ───────────────────────────────────────────────────────────────
MC_BLOCK_SIZE = 4096
MC_DEFAULT_BINS = (20, 20)
MC_CONFIDENCE_Z = 1.959963984540054
MC_MIN_EXPECTED = 5.0
MC_MIN_PATHS = 100_000
MC_AGREEMENT_TARGET = 0.90
# One-coordinate marginals: bins compared, and the quadrature bins of the
# integrated-out coordinate.
MC_MARGINAL_BINS = 20
MC_MARGINAL_R_BINS = 60
MC_MARGINAL_Z_BINS = 40
# Doubling n_steps should scale the excess bias by about 1/2.
WEAK_ORDER_RATIO_BAND = (0.35, 0.7)

# ── Output ────────────────────────────────────────────────────────────────────
SIGNIFICANT_DIGITS = 17

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3

# ── Acceptance grids ──────────────────────────────────────────────────────────
ON_DIAGONAL_TIMES = (0.25, 0.5, 1.0, 2.0)
AXIS_TIMES = (0.25, 0.5, 1.0)
AXIS_HEIGHTS = (0.3, 1.0, 2.0, math.pi)
MASS_TIMES = (0.1, 0.5, 1.0)
SEMIGROUP_TIMES = (0.25, 0.5)
LIYAU_TIMES = (0.25, 0.5, 1.0)
LIYAU_EPS = 0.05
LIYAU_ALPHA = 3.0
GRADIENT_TIMES = (0.25, 0.5, 0.9)
# 5 x 5 grid over r in [0.2, 2], z in [-2, 2]; C_hat may vary by this much, (max - min) / max.
GRADIENT_GRID = ((0.2, 2.0), (-2.0, 2.0), 5)
GRADIENT_MAX_SPREAD = 0.2
# Harnack fits on two interleaved grids over one box must agree to this, per constant.
HARNACK_TIMES = (0.2, 0.5)
HARNACK_SAMPLE_BOX = ((0.3, 1.5), (-1.0, 1.0))
HARNACK_SAMPLE_NODES = 5
HARNACK_MAX_SPREAD = 0.25
DILATION_POINTS = ((0.0, 0.0), (0.0, 1.0), (1.0, 0.5))
DILATION_TIMES = (0.08, 0.04, 0.02, 0.01)
# The dilation limit is identified with the nearest of these; 3% bands.
KAPPA_CANDIDATES = (0.5, 1.0)
DILATION_TOLERANCE = 0.03
