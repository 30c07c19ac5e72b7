import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# ─────────────────────────────  CAPACITY  ────────────────────────────────────
# Largest total Hilbert-space dimension dimA·dimB any operator may reach
MAX_TOTAL_DIMENSION = int(os.getenv("IFE_MAX_TOTAL_DIMENSION", "4096"))

# Upper bound on D^(2k) index tuples enumerated by the resonance recipe
RESONANCE_BUDGET = int(os.getenv("IFE_RESONANCE_BUDGET", "10000000"))

# Support search walks 2^D subsets
SUPPORT_SEARCH_MAX_DIM = int(os.getenv("IFE_SUPPORT_SEARCH_MAX_DIM", "12"))

# ─────────────────────────────  VERDICT DEFAULTS  ────────────────────────────
DEFAULT_TOLERANCE = float(os.getenv("IFE_DEFAULT_TOLERANCE", "1e-8"))
DEFAULT_T_MAX = float(os.getenv("IFE_DEFAULT_T_MAX", "20.0"))
DEFAULT_SAMPLES = int(os.getenv("IFE_DEFAULT_SAMPLES", "200"))
DEFAULT_TRIALS = int(os.getenv("IFE_DEFAULT_TRIALS", "8"))
DEFAULT_SEED = int(os.getenv("IFE_DEFAULT_SEED", "0"))

# ─────────────────────────────  RUNTIME  ─────────────────────────────────────
WORKERS = int(os.getenv("IFE_WORKERS", "4"))
LOG_LEVEL = os.getenv("IFE_LOG_LEVEL", "INFO")

# ─────────────────────────────  NUMERICAL CONSTANTS  ─────────────────────────
# Not environment-tunable: verdicts depend on them
HERMITIAN_RTOL = 1e-12
RANK_CUTOFF = 1e-12
KRYLOV_CUTOFF = 1e-12
NORM_TOLERANCE = 1e-10
ORTHONORMAL_TOLERANCE = 1e-10
SCHMIDT_DEGENERACY_GAP = 1e-8
CLUSTER_RELATIVE_TOL = 1e-9

if MAX_TOTAL_DIMENSION < 4:
    raise ValueError(
        f"❌ IFE_MAX_TOTAL_DIMENSION must be at least 4, got {MAX_TOTAL_DIMENSION}"
    )
