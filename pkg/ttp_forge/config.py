"""Configuration constants for ttp-forge.

Centralizes tuned constants and benchmark conventions for easy tuning.
"""

# Speeds shared by every benchmark instance
DEFAULT_V_MAX = 1.0
DEFAULT_V_MIN = 0.1

# Benchmark factor sets
ITEM_FACTORS = (1, 3, 5, 10)
CAPACITY_FACTORS = tuple(range(1, 11))
CAPACITY_DIVISOR = 11
SUITE_ITEM_FACTORS = (1, 5, 10)  # Factors used by the comparison suites

# Item sampling ranges (inclusive)
UNCORR_WEIGHT_RANGE = (1, 1000)
UNCORR_PROFIT_RANGE = (1, 1000)
SIMILAR_WEIGHT_RANGE = (1000, 1010)
STRONGLY_CORR_WEIGHT_RANGE = (1, 1000)
STRONGLY_CORR_PROFIT_OFFSET = 100

# Knapsack oracle
DP_WORK_BUDGET = 10**8  # Maximum DP cell updates before greedy fallback

# Tour construction
TWO_OPT_MAX_PASSES = 50
DISTANCE_MATRIX_MAX_CITIES = 3000  # Above this, 2-opt computes distances on demand

# Feature analysis
ANALYSIS_MASK_BOUND = 2.0

# Evolutionary loops
META_INITIAL_PERCENT = 0.5
META_WEIGHT_SIGMA = 1.0
META_PERCENT_SIGMA = 0.1
META_RUNS = 4

# Symbolic regression (gplearn-style defaults)
SR_POPULATION = 1000
SR_GENERATIONS = 300
SR_RUNS = 5
SR_MAX_DEPTH = 8
SR_INIT_DEPTH = (2, 6)
SR_CONST_RANGE = (-1.0, 1.0)
SR_P_CROSSOVER = 0.9
SR_P_SUBTREE_MUTATION = 0.01
SR_P_HOIST_MUTATION = 0.01
SR_P_POINT_MUTATION = 0.01
SR_P_POINT_REPLACE = 0.05
DALEX_SIGMA = 200.0
PROTECTED_DIVISION_EPSILON = 1e-6
BCE_CLAMP = 1e-12
FITNESS_PENALTY = 1e12  # Error assigned to cases with non-finite outputs
PARETO_LENGTH_CAPS = (20, 30, 40)
REGRESSION_RUNS = 10
REGRESSION_OMITTED_VARIABLES = (5, 6)  # v_max and v_min are constant across the suite

# Parameter model fitting
ANOMALY_RESIDUAL_FACTOR = 3.0
ANOMALY_GRID_POINTS = 91  # Capacity factor grid 1.0, 1.1, ..., 10.0
MODEL_FORMAT_VERSION = 1
DEFAULT_MODEL_PATH = "models/parameter_model.csv"

# Learned heuristics
DOUBLING_INITIAL_STEP = 1
DOUBLING_GROWTH = 2
DOUBLING_SHRINK = 8
P_ESTIMATE_DEVIATION = 0.1
HEURISTIC_WEIGHT_SIGMA = 0.5
HEURISTIC_GENERATIONS = 30

# packIterative
PACK_ITERATIVE_ALPHA_LO = 0.1
PACK_ITERATIVE_ALPHA_HI = 5.0
PACK_ITERATIVE_ALPHA_ITERS = 20
PACK_ITERATIVE_BATCH_FRACTION = 0.01

# Harness
THREADS_ENV_VAR = "TTP_FORGE_THREADS"
COMPARE_TRIALS = 30
SYNTHETIC_COORD_RANGE = 1000.0
SYNTHETIC_CLUSTER_COUNT = 5
SYNTHETIC_CLUSTER_SPREAD = 60.0
FEATURE_PLOT_LIMIT = 6  # Instances that get a feature scatter plot per ea-data run
