"""
Constants for the structured-policy regret minimization toolkit.
"""

# Numerical tolerances
ROW_SUM_TOLERANCE = 1e-12
STATIONARY_TOLERANCE = 1e-10
KAC_TOLERANCE = 1e-9
PLANNING_TOLERANCE = 1e-8
PLANNING_MAX_ITERS = 200_000
PSRL_PLANNING_TOLERANCE = 1e-6

# Self-loop mixing used by relative value iteration; keeps the gain and the
# optimal policies, removes periodicity.
APERIODICITY = 0.5

# Simulation
EPISODE_STEP_CAP = 10**9
GENERATOR_ID = "PCG64"
UNIFORM_BLOCK_SIZE = 4096
REFERENCE_STATE = 0
ENVIRONMENT_CACHE_SIZE = 8

# Posterior sampling
DIRICHLET_PRIOR = 1.0
OPTIMISTIC_REWARD = 1.0
PSRL_EPISODE_FACTOR = 2  # default PSRL episode length L = 2 * num_states

# Experiment protocol
BENCHMARK_HORIZON = 10**6
BENCHMARK_NUM_SEEDS = 10
BENCHMARK_T_SWITCH = 10**5
CHECKPOINT_MULTIPLIERS = (1, 2, 5)
FLOAT_FORMAT = "%.17g"
CSV_COLUMNS = ["agent", "seed", "checkpoint", "cum_reward", "regret"]
SUMMARY_COLUMNS = ["agent", "checkpoint", "mean_regret", "std_regret", "num_runs"]

# Slow server problem
SLOW_SERVER_LAMBDA = "12/31"
SLOW_SERVER_MU1 = "18/31"
SLOW_SERVER_MU2 = "1/31"
SLOW_SERVER_BUFFER = 20

# Machine replacement problem
MACHINE_REPLACEMENT_STATES = 100
MACHINE_REPLACEMENT_GAMMA = 0.95
MACHINE_REPLACEMENT_C_MIN = 0.05
MACHINE_REPLACEMENT_C_MAX = 0.95
MACHINE_REPLACEMENT_G_MAX = 1.0
MACHINE_REPLACEMENT_REPAIR_COST = 0.2
MACHINE_REPLACEMENT_ENV_SEED = 2016

ALGORITHMS = {
    "pucb": "Policies-as-arms UCB over renewal episodes",
    "pthompson": "Policies-as-arms Thompson sampling with Beta beliefs",
    "psrl": "Posterior sampling RL with Dirichlet transition posterior",
    "warm_psrl": "Bandit warm start followed by PSRL",
    "random": "Uniformly random arm per episode",
    "fixed": "Single fixed arm (oracle when it is the optimum)",
}

EXIT_CODES = {
    "success": 0,
    "config": 1,
    "runtime": 2,
}
