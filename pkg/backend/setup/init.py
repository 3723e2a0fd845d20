"""Setting up run budgets, verification bounds and logging"""

import os, logging
from dotenv import load_dotenv

# ===========================================================================================================================================================
# Step 1: Load Configuration: budgets, seeds, API
# ===========================================================================================================================================================

load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(level=LOG_LEVEL)
logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    """Reads an integer setting, falling back to the default on junk."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring malformed {name}={raw!r}, using {default}")
        return default


MAX_STEPS = _int_env("MAX_STEPS", 10**6)  # machine steps per interaction, hidden steps per response
INTERACT_BUDGET = _int_env("INTERACT_BUDGET", 100_000)  # occurrences per interaction
DEFAULT_SEED = _int_env("DEFAULT_SEED", 0)
VERIFY_DEPTH = _int_env("VERIFY_DEPTH", 16)
VERIFY_SEEDS = _int_env("VERIFY_SEEDS", 20)
API_HOST = os.getenv("API_HOST", "0.0.0.0")
API_PORT = _int_env("API_PORT", 8000)


def get_config() -> dict:
    """Effective configuration, as reported by the API and the CLI."""
    return {
        "max_steps": MAX_STEPS,
        "interact_budget": INTERACT_BUDGET,
        "default_seed": DEFAULT_SEED,
        "verify_depth": VERIFY_DEPTH,
        "verify_seeds": VERIFY_SEEDS,
        "log_level": LOG_LEVEL,
    }
