"""
Configuration file for the eigenvector transport pipeline.
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Output Configuration
OUTPUT_DIR = os.getenv("EIGENPORT_OUTPUT_DIR", "results")
DATA_DIR = os.getenv("EIGENPORT_DATA_DIR", "data")

# Execution Configuration
WORKERS = int(os.getenv("EIGENPORT_WORKERS", "1"))
LOG_LEVEL = os.getenv("EIGENPORT_LOG_LEVEL", "WARNING").upper()

# Algorithm defaults
DEFAULT_ALPHA = float(os.getenv("EIGENPORT_DEFAULT_ALPHA", "0.5"))
MAX_DIM = int(os.getenv("EIGENPORT_MAX_DIM", "3"))
GAP_FACTOR = 2.0  # eigenvalue_d must exceed GAP_FACTOR * eigenvalue_{d+1}
FALLBACK_DIM = 2

# Numerical tolerances
UNIT_NORM_TOLERANCE = 1e-8
PMF_SUM_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-10
CLUSTER_GAP = 1e-9  # eigenvalues closer than this count as repeated
BALANCE_TOLERANCE = 1e-9
FLOW_FLOOR = 1e-9  # flows below this are unused edges in M_alpha
NEGATIVE_FLOW_TOLERANCE = 1e-12
LENGTH_TOLERANCE = 1e-12

# Spectral graph settings
PHASE_THRESHOLD = 4.0
MAX_DENSE_NODES = 2000  # beyond this the dense eigensolver gets slow

# Output formatting (round-trippable doubles)
CSV_FLOAT_FORMAT = "%.17g"


# Validation (only raise error when a run actually starts, not on import)
def validate_settings():
    """Validate environment-derived settings. Call this before running the pipeline."""
    if WORKERS < 1:
        raise ValueError("EIGENPORT_WORKERS must be a positive integer")
    if not 0.0 <= DEFAULT_ALPHA <= 1.0:
        raise ValueError("EIGENPORT_DEFAULT_ALPHA must lie in [0, 1]")
    if MAX_DIM < 1:
        raise ValueError("EIGENPORT_MAX_DIM must be a positive integer")
    return True
