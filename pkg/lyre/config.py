import os

# ==========================================
# CONFIGURATION
# ==========================================

# --- Evaluation Defaults ---
# Strategy used when --strategy is not given (any name registered in constraints)
DEFAULT_STRATEGY = "pure-lazy"
# Evaluator variant used when --variant is not given (lazy, cbn or eager)
DEFAULT_VARIANT = "lazy"
# Maximum number of evaluation steps before a run is aborted (exit code 3)
DEFAULT_STEP_BUDGET = 10 ** 7
# Python recursion limit raised for deep big-step derivations
RECURSION_LIMIT = 20000
# C stack of the evaluation thread, sized so RECURSION_LIMIT frames fit in it (512 MiB)
EVAL_STACK_SIZE = 512 * 1024 * 1024

# --- Exhaustive Choice Exploration (--enumerate) ---
# Stop exploring after this many complete runs
ENUMERATE_MAX_RUNS = 512
# Step budget for each explored run (exploration is for small programs only)
ENUMERATE_STEP_BUDGET = 10 ** 5

# --- Desugaring ---
# Prefix of the names given to anonymous `let _ = E` components.
# '%' cannot start a surface identifier, so these never clash with user names.
HIDDEN_PREFIX = "%anon"
# Name projected from the implicit top-level structure
MAIN_NAME = "main"

# --- Corpus ---
# Golden programs live next to this package by default
CORPUS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")
# Source and expectation file suffixes
CORPUS_SUFFIX = ".lyre"
EXPECTED_SUFFIX = ".expected"

# --- Exit Codes ---
EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_STATIC = 2
EXIT_BUDGET = 3

# --- Logging ---
# Environment variable that overrides the log level (DEBUG shows rule firings)
LOG_LEVEL_ENV = "LYRE_LOG_LEVEL"
LOG_LEVEL = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
