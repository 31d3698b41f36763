"""Central configuration. Loads a single .env file and exposes typed settings.

Respects ENV_FILE to override the default .env. This module is imported early
by every other module; do not add imports from src.* here.
"""

import os
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

_env_file = os.environ.get('ENV_FILE') or '.env'
load_dotenv(dotenv_path=_env_file, override=True)


def get_bool_env(key: str, default: bool = False) -> bool:
    return os.getenv(key, str(default)).lower() in ('true', '1', 'yes', 'on')


def get_int_env(key: str, default: int) -> int:
    try:
        return int(os.getenv(key, default))
    except (TypeError, ValueError):
        return default


def get_optional_env(key: str) -> Optional[str]:
    value = os.getenv(key)
    return value if value else None


# ── Paths ──
ROOT_DIR = Path(os.getcwd()).resolve()
SAMPLES_DIR = ROOT_DIR / 'samples'
TMP_DIR = ROOT_DIR / 'tmp'
OUTPUT_DIR = TMP_DIR / 'output'


def get_output_prefix(input_path: Path) -> Path:
    """Default `<prefix>` for generated files: OUTPUT_DIR/<stem>."""
    return OUTPUT_DIR / input_path.stem


# ── Parallel Processing ──
PARALLEL_JOBS = get_int_env('PARALLEL_JOBS', 1)

# ── Interpretation checking ──
SEED = get_int_env('CSTUPLE_SEED', 0)
SAMPLE_BUDGET = get_int_env('SAMPLE_BUDGET', 10_000)
SAMPLE_RANDOM_MAX = get_int_env('SAMPLE_RANDOM_MAX', 20)

# ── Rewriting ──
MAX_STEPS = get_int_env('MAX_STEPS', 1_000_000)
GRAPH_DEBUG_CHECKS = get_bool_env('GRAPH_DEBUG_CHECKS', False)
ORACLE_DEFAULT = get_optional_env('ORACLE_DEFAULT')

# Terms are nested dataclasses; unary numerals and long words nest deeply.
RECURSION_LIMIT = get_int_env('RECURSION_LIMIT', 20_000)
if sys.getrecursionlimit() < RECURSION_LIMIT:
    sys.setrecursionlimit(RECURSION_LIMIT)
