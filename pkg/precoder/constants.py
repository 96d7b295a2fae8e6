"""Project-wide constants and tunable defaults.

Purpose: Centralize tolerances, thresholds and default settings used across the library
Key Decisions: Plain module-level constants, each documented in place; `config.yml` overrides
               the tunables at the command line, the numerical tolerances are fixed here
Limitations: None - pure data definitions

Organization:
- Validation tolerances (pmf sums, support dust)
- Quadrature defaults
- Optimizer settings (simplex pivots, assignment budgets)
- Capacity estimation (Blahut-Arimoto discretization)
- Noise-free search and simulation defaults
- CLI exit codes
"""

# ===== VALIDATION =====
PMF_SUM_TOL = 1e-12
"""Interference pmf must sum to one within this tolerance"""

JOINT_PMF_SUM_TOL = 1e-10
"""Joint and marginal pmfs must sum to one within this tolerance"""

SUPPORT_DUST = 1e-12
"""Joint pmf entries below this are reported as exact zeros"""

INTEGRAL_TOL = 1e-9
"""An entry counts as 1/M (integral solution) within this tolerance"""

# ===== QUADRATURE =====
DEFAULT_ABS_TOL = 1e-10
"""Absolute tolerance of the adaptive Simpson integrator (bits)"""

DEFAULT_TRUNCATION_SIGMAS = 10.0
"""Integration range extends this many noise deviations past the extreme mixture means"""

MIN_TRUNCATION_SIGMAS = 6.0
"""Smallest truncation accepted by QuadratureSettings"""

DEFAULT_MAX_SUBDIVISIONS = 2**20
"""Cap on the number of Simpson panels before QuadratureNoConvergence"""

TINY_DENSITY = 1e-300
"""Densities below this contribute 0 to t*log(t) integrands"""

# ===== INFLECTION POINTS =====
INFLECTION_BRACKET = (1.0, 2.5)
"""Bisection bracket for the positive inflection point of the normalized g"""

INFLECTION_XTOL = 1e-9
"""Bisection stops when the bracket is narrower than this"""

# ===== OPTIMIZER =====
PIVOT_TOL = 1e-12
"""Simplex entries with magnitude below this are never pivoted on"""

PHASE_ONE_TOL = 1e-9
"""Phase-one objective above this means the equality system is infeasible"""

MAX_SIMPLEX_PIVOTS = 100_000
"""Hard cap on simplex pivots (Bland's rule terminates well before this)"""

EXHAUSTIVE_MAX_M = 5
"""Largest alphabet size solved by exhaustive multi-dimensional assignment"""

EXHAUSTIVE_MAX_Q = 4
"""Largest interference alphabet solved by exhaustive multi-dimensional assignment"""

MDAP_NODE_BUDGET = 10**7
"""Branch-and-bound node budget before BudgetExceeded"""

CLOSED_FORM_TOL = 1e-8
"""Closed-form objectives must match the optimizer within this tolerance"""

HESSIAN_SAMPLES = 64
"""Sample points for the numerical convexity check on the (Q-1)-cube"""

HESSIAN_STEP = 1e-2
"""Finite-difference step for the sampled Hessian"""

# ===== CAPACITY ESTIMATION =====
DEFAULT_GRID_POINTS = 1024
"""Output grid size of the discretized associated channel"""

MIN_GRID_POINTS = 512
"""Smallest output grid accepted by capacity_estimate"""

DEFAULT_CAPACITY_TOL = 1e-7
"""Blahut-Arimoto stops when the capacity bracket is narrower than this (bits)"""

DEFAULT_CAPACITY_MAX_ITERS = 200_000
"""Blahut-Arimoto iteration cap before NoConvergence"""

CAPACITY_SUPPORT_DUST = 1e-9
"""Capacity-achieving pmf entries below this are reported as zeros"""

# ===== NOISE-FREE SEARCH =====
NOISE_FREE_SEARCH_BUDGET = 5_000_000
"""Node budget of the exhaustive disjoint multi-set search"""

# ===== SIMULATION =====
DEFAULT_TRIALS = 100_000
"""Monte Carlo trials per simulation"""

DEFAULT_SEED = 20060529
"""Default simulation seed"""

DEFAULT_BLOCK_SIZE = 65_536
"""Trials per independent random substream"""

WALD_Z = 1.959963984540054
"""Two-sided 95% normal quantile for Wald intervals"""

# ===== MODULO PRECODING =====
DEFAULT_MODULO_DELTA = 2.0
"""Length of the modulo interval A = [-delta/2, delta/2)"""

DEFAULT_MODULO_GRID = 64
"""Equiprobable grid points used to evaluate continuous-input rates"""

# ===== CLI =====
EXIT_OK = 0
"""Success, including NotApplicable statuses"""

EXIT_CONFIG_ERROR = 2
"""Invalid channel, sweep or simulation document"""

EXIT_COMPUTATION_ERROR = 3
"""Solver or numerical failure"""

EXIT_NONE_EXISTS = 4
"""Exhaustive search proved no disjoint multi-set system exists"""

SOLVERS = ("lp", "hungarian", "mdap", "diag", "antidiag", "modulo", "capacity", "awgn")
"""Solver names accepted by `solve` and `sweep`"""
