import math
import os

from dotenv import load_dotenv

load_dotenv()


def env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise RuntimeError(f"Environment variable {name} must be an integer.")


def env_float(name: str, default: float) -> float:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return float(value)
    except ValueError:
        raise RuntimeError(f"Environment variable {name} must be a number.")


# --- Run Defaults ---
DEFAULT_SEED = env_int("SADDLECOUNT_SEED", 20240601)
DEFAULT_THREADS = env_int("SADDLECOUNT_THREADS", os.cpu_count() or 1)
OUTPUT_DIR = os.environ.get("SADDLECOUNT_OUTPUT_DIR") or "./runs"
LOG_LEVEL = (os.environ.get("SADDLECOUNT_LOG_LEVEL") or "INFO").upper()
APP_VERSION = os.environ.get("APP_VERSION") or "0.3.0"
DEFAULT_LAMBDA = env_float("SADDLECOUNT_DEFAULT_LAMBDA", 1.0)

# --- Numerical Tolerances ---
QUAD_TOLERANCE = env_float("SADDLECOUNT_QUAD_TOL", 1e-8)
QUAD_MAX_NODES = env_int("SADDLECOUNT_QUAD_MAX_NODES", 2 ** 20)
EDGE_TOLERANCE = env_float("SADDLECOUNT_EDGE_TOL", 1e-9)
WEDGE_TOLERANCE = env_float("SADDLECOUNT_WEDGE_TOL", 1e-12)
DET_TOLERANCE = 1e-12
SANDWICH_SLACK = 1e-9

# --- Mathematical Constants ---
TWO_PI = 2.0 * math.pi
ZETA2 = math.pi ** 2 / 6.0
TORUS_SV_CONSTANT = 1.0 / ZETA2
FUNDAMENTAL_DOMAIN_Y0 = math.sqrt(3.0) / 2.0
